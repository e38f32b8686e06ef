"""Command-line front end.

Exit codes: 0 success / equivalent, 1 not equivalent, 2 usage or parse error,
3 state bound exceeded.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bisim, lts
from .errors import ParseError, StateBoundExceeded
from .extract import extract_thread
from .pga import canonical_form, parse_pga
from .pgld import parse_pgld, pgld_to_pga
from .process import pextr_c, use_on_process
from .services import parse_service, use_thread
from .synthesis import SynthesisError, synth_binary, synth_multireply, to_single_occurrence
from .threads import normalize, to_linear_spec

log = logging.getLogger("isaw")

DEFAULT_STATE_BOUND = 100_000
EXIT_OK, EXIT_DIFFERENT, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    uses: list[tuple[str, str]] = field(default_factory=list)
    abstract: list[str] = field(default_factory=list)
    fmt: str = "json"
    state_bound: int = DEFAULT_STATE_BOUND
    output: str | None = None
    lang: str | None = None
    mode: str = "multi"
    tact: str | None = None
    kind: str = "strong"
    root_tau: bool = False

    def __post_init__(self):
        if self.state_bound < 1:
            raise UsageError("state bound must be >= 1")
        foci = [f for f, _ in self.uses]
        if len(set(foci)) != len(foci):
            raise UsageError("service foci must be distinct")


def default_state_bound() -> int:
    raw = os.environ.get("ISAW_STATE_BOUND")
    if raw is None:
        return DEFAULT_STATE_BOUND
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ISAW_STATE_BOUND is not an integer: {raw!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _language(cfg: RunConfig, path: str) -> str:
    if cfg.lang:
        return cfg.lang
    return "pgld" if path.endswith(".pgld") else "pga"


def load_program(cfg: RunConfig, path: str):
    """Read a PGAmr or PGLDmr file as a canonical instruction sequence."""
    text = _read(path)
    if _language(cfg, path) == "pgld":
        return pgld_to_pga(parse_pgld(text))
    return canonical_form(parse_pga(text))


def load_lts(path: str) -> lts.Lts:
    text = _read(path)
    if path.endswith(".aut"):
        return lts.from_aut(text)
    return lts.from_json(text)


def render_lts(p: lts.Lts, fmt: str) -> str:
    if fmt == "aut":
        return lts.to_aut(p)
    if fmt == "text":
        return lts.to_text(p)
    return lts.to_json(p) + "\n"


def _services(cfg: RunConfig):
    try:
        return [(f, parse_service(d)) for f, d in cfg.uses]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the text for stdout."""
    cmd = cfg.command
    if cmd == "canon":
        return EXIT_OK, str(canonical_form(parse_pga(_read(cfg.inputs[0])))) + "\n"
    if cmd == "translate":
        return EXIT_OK, str(pgld_to_pga(parse_pgld(_read(cfg.inputs[0])))) + "\n"
    if cmd == "thread":
        a = extract_thread(load_program(cfg, cfg.inputs[0]))
        for f, h in _services(cfg):
            a = use_thread(a, f, h, cfg.state_bound)
        return EXIT_OK, str(to_linear_spec(a)) + "\n"
    if cmd == "process":
        a = normalize(extract_thread(load_program(cfg, cfg.inputs[0])))
        p = pextr_c(a)
        for f, h in _services(cfg):
            p = use_on_process(p, f, h, cfg.state_bound)
        hidden = {lts.STOP_L}
        try:
            hidden |= {lts.parse_label(x) for x in cfg.abstract}
        except ParseError as exc:
            raise UsageError(str(exc)) from None
        return EXIT_OK, render_lts(lts.abstract(p, hidden), cfg.fmt)
    if cmd == "synth":
        spec = lts.parse_linear_process_spec(_read(cfg.inputs[0]))
        if cfg.mode == "binary":
            if not cfg.tact:
                raise UsageError("--mode binary needs --tact")
            prog = synth_binary(spec, cfg.tact)
        else:
            prog = synth_multireply(spec)
        return EXIT_OK, str(prog) + "\n"
    if cmd == "single-occurrence":
        prog, registers = to_single_occurrence(parse_pgld(_read(cfg.inputs[0])))
        log.info("registers: %d", registers)
        return EXIT_OK, str(prog) + "\n"
    if cmd == "equiv":
        p, q = (load_lts(x) for x in cfg.inputs)
        if cfg.root_tau:
            p, q = lts.tau_prefix(p), lts.tau_prefix(q)
        check = bisim.strong_bisimilar if cfg.kind == "strong" else bisim.rooted_branching_bisimilar
        same = check(p, q)
        return (EXIT_OK if same else EXIT_DIFFERENT), ("equivalent\n" if same else "not equivalent\n")
    raise UsageError(f"unknown command {cmd!r}")


def _use_pair(text: str) -> tuple[str, str]:
    focus, sep, desc = text.partition("=")
    if not sep or not focus or not desc:
        raise argparse.ArgumentTypeError(f"expected FOCUS=DESCRIPTOR, got {text!r}")
    return focus, desc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isaw", description=__doc__.splitlines()[0])
    parser.add_argument("--state-bound", type=int, default=None,
                        help=f"product state bound (default ISAW_STATE_BOUND or {DEFAULT_STATE_BOUND})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def program_cmd(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("input")
        p.add_argument("--lang", choices=["pga", "pgld"], help="input notation (default: by file extension)")
        p.add_argument("--use", action="append", type=_use_pair, default=[], metavar="FOCUS=SERVICE",
                       help="attach a service: br:<t|f|b>, counter:<max>, stack:<max>:<alphabet>")
        return p

    p = sub.add_parser("canon", help="canonical form of a PGAmr program")
    p.add_argument("input")
    p = sub.add_parser("translate", help="PGLDmr program to PGAmr")
    p.add_argument("input")
    program_cmd("thread", "extract the thread as a linear thread specification")
    p = program_cmd("process", "extract the process as an LTS")
    p.add_argument("--abstract", action="append", default=[], metavar="LABEL",
                   help="hide this label as well as stop (repeatable)")
    p.add_argument("--format", dest="fmt", choices=["json", "aut", "text"], default=None)
    p.add_argument("-o", "--output")
    p = sub.add_parser("synth", help="synthesise a PGLDmr program from a linear process spec")
    p.add_argument("input")
    p.add_argument("--mode", choices=["multi", "binary"], default="multi")
    p.add_argument("--tact")
    p = sub.add_parser("single-occurrence", help="share repeated construct instructions via registers")
    p.add_argument("input")
    p = sub.add_parser("equiv", help="compare two LTS files (.json or .aut)")
    p.add_argument("inputs", nargs=2)
    p.add_argument("--kind", choices=["strong", "rbranching"], default="strong")
    p.add_argument("--root-tau", action="store_true", help="tau-prefix both systems first")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    bound = args.state_bound if args.state_bound is not None else default_state_bound()
    inputs = args.inputs if args.command == "equiv" else [args.input]
    fmt = getattr(args, "fmt", None)
    output = getattr(args, "output", None)
    if fmt is None:
        fmt = "aut" if output and output.endswith(".aut") else "text" if output and output.endswith(".txt") else "json"
    return RunConfig(
        command=args.command,
        inputs=inputs,
        uses=getattr(args, "use", []),
        abstract=getattr(args, "abstract", []),
        fmt=fmt,
        state_bound=bound,
        output=output,
        lang=getattr(args, "lang", None),
        mode=getattr(args, "mode", "multi"),
        tact=getattr(args, "tact", None),
        kind=getattr(args, "kind", "strong"),
        root_tau=getattr(args, "root_tau", False),
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="isaw: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        status, text = run(cfg)
    except StateBoundExceeded as exc:
        print(f"isaw: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (UsageError, ParseError, SynthesisError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"isaw: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
