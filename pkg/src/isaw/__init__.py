"""Instruction sequences, threads and processes: extraction, synthesis and equivalence checking."""
from .bisim import branching_bisimilar, rooted_branching_bisimilar, strong_bisimilar
from .errors import ParseError, StateBoundExceeded
from .extract import extract_thread
from .lts import Lts, lts_from_linear_spec, parse_linear_process_spec
from .pga import InstructionSequence, canonical_form, parse_pga, sequences_equal
from .pgld import PgldProgram, parse_pgld, pgld_to_pga
from .process import pextr, pextr_c, use_chain, use_process
from .services import BR, BoundedCounter, BoundedStack, boolean_register, use_thread
from .synthesis import synth_binary, synth_multireply, to_single_occurrence
from .threads import ThreadAutomaton, normalize, thread_equal

__all__ = [
    "BR", "BoundedCounter", "BoundedStack", "InstructionSequence", "Lts", "ParseError",
    "PgldProgram", "StateBoundExceeded", "ThreadAutomaton", "boolean_register",
    "branching_bisimilar", "canonical_form", "extract_thread", "lts_from_linear_spec",
    "normalize", "parse_linear_process_spec", "parse_pga", "parse_pgld", "pextr", "pextr_c",
    "pgld_to_pga", "rooted_branching_bisimilar", "sequences_equal", "strong_bisimilar",
    "synth_binary", "synth_multireply", "thread_equal", "to_single_occurrence", "use_chain",
    "use_process", "use_thread",
]
