"""Shared helpers for the test modules."""
from ontoprobe.folify import AxiomSet, emit_tptp, translate_ontology
from ontoprobe.kif import parse_suo_kif
from ontoprobe.mini_prover import run_builtin
from ontoprobe.models import LayerTag, SaturationBudget


def kif(text: str):
    """Parse SUO-KIF text into bare formulas."""
    return [f for f, _ in parse_suo_kif(text)]


def one(text: str):
    (formula,) = kif(text)
    return formula


def translate_text(text: str, layer: LayerTag = LayerTag.TOP_LEVEL, max_row_arity: int = 7) -> AxiomSet:
    statements = parse_suo_kif(text)
    return translate_ontology(statements, [layer] * len(statements), max_row_arity)


def prove_kif(axioms_text: str, conjecture_text: str, max_steps: int = 10000, set_of_support: bool = False):
    axioms = translate_text(axioms_text)
    problem = emit_tptp(axioms, one(conjecture_text))
    return run_builtin(problem, SaturationBudget(max_steps=max_steps, wall_limit_s=60.0), set_of_support)
