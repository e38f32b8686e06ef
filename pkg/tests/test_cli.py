import json
import logging

import pytest

from isaw import lts
from isaw.cli import RunConfig, UsageError, default_state_bound, main
from isaw.extract import extract_thread
from isaw.pga import canonical_form, parse_pga
from isaw.pgld import parse_pgld, pgld_to_pga
from isaw.process import pextr_c, use_on_process
from isaw.services import parse_service, use_thread
from isaw.synthesis import synth_binary
from isaw.threads import normalize, to_linear_spec


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_process_of_halt(write, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert main(["process", write("prog.pga", "!"), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["transitions"] == [[0, "tau", 1]]
    assert doc["terminating"] == [1]


def test_process_aut_by_extension(write, tmp_path):
    out = tmp_path / "out.aut"
    assert main(["process", write("prog.pga", "!"), "-o", str(out)]) == 0
    p = lts.from_aut(out.read_text())
    assert p.transitions == ((0, lts.TAU_L, 1),) and p.terminating == {1}


def test_equiv_reflexive(write, capsys):
    path = write("a.aut", lts.to_aut(lts.build_lts(0, [(0, lts.atom("a"), 1)], [1])))
    assert run(capsys, "equiv", "--kind", "strong", path, path)[:2] == (0, "equivalent\n")
    assert run(capsys, "equiv", "--kind", "rbranching", "--root-tau", path, path)[0] == 0


def test_equiv_difference_and_mixed_formats(write, capsys):
    p = lts.build_lts(0, [(0, lts.atom("a"), 1), (1, lts.TAU_L, 2)], [2])
    q = lts.build_lts(0, [(0, lts.atom("a"), 1)], [1])
    a, b = write("p.json", lts.to_json(p)), write("q.aut", lts.to_aut(q))
    assert run(capsys, "equiv", a, b)[:2] == (1, "not equivalent\n")
    assert run(capsys, "equiv", "--kind", "rbranching", a, b)[0] == 0


def test_synth_commands(write, capsys):
    path = write("spec.lps", "X = a . X + b ;")
    assert run(capsys, "synth", "--mode", "multi", path)[1] == "+[2]ac(a,b) ; ##1 ; ##0\n"
    assert run(capsys, "synth", "--mode", "binary", "--tact", "t", path)[1] == \
        "+ac(a,t) ; ##1 ; ##4 ; +ac(b,t) ; ##0 ; ##1\n"
    assert run(capsys, "synth", "--mode", "binary", path)[0] == 2
    assert run(capsys, "synth", write("bad.lps", "X = a . X + delta ;"))[0] == 2


def test_single_occurrence_logs_registers(write, capsys, caplog):
    from isaw.lts import parse_linear_process_spec

    prog = synth_binary(parse_linear_process_spec("X = a . Y + a . X ; Y = a . X + b ;"), "t")
    path = write("p.pgld", str(prog))
    with caplog.at_level(logging.INFO, logger="isaw"):
        code, out, _ = run(capsys, "-v", "single-occurrence", path)
    assert code == 0 and out.count("ac(a,") == 1
    assert "registers: 3" in caplog.text


def test_canon_and_translate(write, capsys):
    assert run(capsys, "canon", write("p.pga", "a.m ; (b.m ; a.m)*"))[1] == "(a.m ; b.m)*\n"
    assert run(capsys, "translate", write("p.pgld", "##0"))[1] == \
        str(pgld_to_pga(parse_pgld("##0"))) + "\n"


def test_thread_matches_library_composition(write, capsys):
    text = "br.set:T ; -br.get ; ! ; #0"
    code, out, _ = run(capsys, "thread", write("p.pga", text), "--use", "br=br:f")
    a = use_thread(extract_thread(canonical_form(parse_pga(text))), "br", parse_service("br:f"))
    assert code == 0 and out == str(to_linear_spec(a)) + "\n"


def test_process_matches_library_composition(write, capsys):
    text = "+[3]ac(a,b,c) ; c.inc ; #2 ; +c.iszero ; ! ; #0"
    code, out, _ = run(capsys, "process", write("p.pga", text), "--use", "c=counter:2",
                       "--abstract", "i", "--format", "text")
    p = pextr_c(normalize(extract_thread(canonical_form(parse_pga(text)))))
    p = use_on_process(p, "c", parse_service("counter:2"))
    assert code == 0 and out == lts.to_text(lts.abstract(p, {lts.STOP_L, lts.I_L}))


def test_pgld_language_flag(write, capsys):
    path = write("p.txt", "+ac(a,t) ; ##0 ; ##1")
    assert run(capsys, "process", path)[0] == 2
    assert run(capsys, "process", "--lang", "pgld", path)[0] == 0


def test_parse_errors_exit_2(write, capsys):
    assert run(capsys, "canon", write("p.pga", "a.m ; ; #"))[0] == 2
    code, _, err = run(capsys, "equiv", write("x.aut", "nonsense"), write("y.aut", "nonsense"))
    assert code == 2 and err.startswith("isaw: error")
    assert run(capsys, "canon", "/nonexistent/file.pga")[0] == 2
    assert run(capsys, "thread", write("p.pga", "!"), "--use", "f=tape:1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_state_bound_exit_3(write, capsys, monkeypatch):
    path = write("p.pga", "(c.inc ; c.inc ; c.dec)*")
    assert run(capsys, "--state-bound", "2", "thread", path, "--use", "c=counter:5")[0] == 3
    monkeypatch.setenv("ISAW_STATE_BOUND", "2")
    assert run(capsys, "thread", path, "--use", "c=counter:5")[0] == 3
    monkeypatch.setenv("ISAW_STATE_BOUND", "many")
    assert run(capsys, "thread", path)[0] == 2


def test_run_config_invariants(monkeypatch):
    with pytest.raises(UsageError):
        RunConfig("thread", ["x"], state_bound=0)
    with pytest.raises(UsageError):
        RunConfig("thread", ["x"], uses=[("f", "br:t"), ("f", "br:f")])
    monkeypatch.delenv("ISAW_STATE_BOUND", raising=False)
    assert default_state_bound() == 100_000
    assert run_dup_foci() == 2


def run_dup_foci():
    return main(["thread", "-", "--use", "f=br:t", "--use", "f=br:f"])


def test_output_is_deterministic(write, capsys):
    path = write("p.pga", "(+[2]ac(a,b) ; f.m ; #3 ; -ac(c) ; #0 ; !)*")
    first = run(capsys, "process", path)[1]
    assert first == run(capsys, "process", path)[1]
    assert lts.to_json(lts.from_json(first)) + "\n" == first
