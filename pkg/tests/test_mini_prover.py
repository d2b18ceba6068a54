import itertools
import random

import pytest

from ontoprobe.constants import CONJECTURE_NAME
from ontoprobe.cq_gen import negate_conjecture
from ontoprobe.kif import And, Atom, Constant, Exists, Forall, Iff, Implies, Not, Or, Variable, render_formula
from ontoprobe.mini_prover import (
    Clause,
    Clausifier,
    _subsumes,
    clausify,
    equality_axioms,
    render_clause,
    run_builtin,
    saturate,
)
from ontoprobe.models import SaturationBudget, VerdictStatus
from tests.helpers import one, prove_kif


ENTAILMENTS = {
    "instance-through-subclass": (
        "(subclass Dog Animal) (instance fido Dog)",
        "(instance fido Animal)",
    ),
    "subclass-transitivity": (
        "(subclass A B) (subclass B C)",
        "(subclass A C)",
    ),
    "disjointness": (
        "(disjoint Cat Dog)",
        "(not (exists (?X) (and (instance ?X Cat) (instance ?X Dog))))",
    ),
    "instance-in-disjoint-class": (
        "(instance a A) (subclass A B) (disjoint B C)",
        "(not (instance a C))",
    ),
    "partition": (
        "(partition Animal Cat Dog) (instance rex Animal) (not (instance rex Cat))",
        "(instance rex Dog)",
    ),
    "variable-predicate": (
        "(instance near SymmetricRelation) (instance near BinaryPredicate)"
        " (=> (and (instance ?REL SymmetricRelation) (?REL ?X ?Y)) (?REL ?Y ?X)) (near a b)",
        "(near b a)",
    ),
}

# problem that saturates only with an unbounded budget
DIVERGENT = (
    "fof(ax1, axiom, s__p(s__a)).\n"
    "fof(ax2, axiom, ![X] : (s__p(X) => s__p(s__f(X)))).\n"
    "fof(goal, conjecture, s__q(s__a)).\n"
)


def negate_conjecture_text(text):
    return render_formula(negate_conjecture(one(text)))


@pytest.mark.parametrize("name", sorted(ENTAILMENTS))
def test_entailment_is_proved(name):
    axioms, conjecture = ENTAILMENTS[name]
    verdict = prove_kif(axioms, conjecture)
    assert verdict.status == VerdictStatus.PROOF_FOUND
    assert verdict.szs_status == "Theorem"
    assert verdict.used_axioms
    assert CONJECTURE_NAME not in verdict.used_axioms


@pytest.mark.parametrize("name", sorted(ENTAILMENTS))
def test_negated_entailment_saturates(name):
    axioms, conjecture = ENTAILMENTS[name]
    verdict = prove_kif(axioms, negate_conjecture_text(conjecture))
    assert verdict.status == VerdictStatus.NO_PROOF
    assert verdict.szs_status == "CounterSatisfiable"
    assert "saturated" in verdict.flags
    assert "countermodel" in verdict.flags


def test_membership_excludes_a_disjoint_superclass():
    verdict = prove_kif("(instance a A) (subclass A B) (disjoint B C)", "(not (instance a C))")
    assert verdict.status == VerdictStatus.PROOF_FOUND
    assert {"meta_disjoint", "meta_instance_subclass", "top_1", "top_2", "top_3"} <= set(verdict.used_axioms)


def test_proof_cites_the_axioms_it_needs():
    verdict = prove_kif("(subclass Dog Animal) (instance fido Dog) (subclass Cat Animal)", "(instance fido Animal)")
    assert {"meta_instance_subclass", "top_1", "top_2"} <= set(verdict.used_axioms)
    assert "top_3" not in verdict.used_axioms
    assert verdict.trace.complete


def test_set_of_support_finds_the_same_proof():
    verdict = prove_kif("(subclass Dog Animal) (instance fido Dog)", "(instance fido Animal)", set_of_support=True)
    assert verdict.status == VerdictStatus.PROOF_FOUND


def test_set_of_support_gives_up_instead_of_saturating():
    verdict = run_builtin(DIVERGENT, SaturationBudget(max_steps=1000), set_of_support=True)
    assert verdict.status == VerdictStatus.NO_PROOF
    assert verdict.szs_status == "GaveUp"
    assert "saturated" not in verdict.flags


def test_step_budget_runs_out():
    verdict = run_builtin(DIVERGENT, SaturationBudget(max_steps=50))
    assert verdict.status == VerdictStatus.NO_PROOF
    assert verdict.szs_status == "ResourceOut"


def test_clause_budget_runs_out():
    verdict = run_builtin(DIVERGENT, SaturationBudget(max_steps=10**6, max_clauses=40))
    assert verdict.szs_status == "ResourceOut"


def test_cpu_budget_runs_out():
    budget = SaturationBudget(max_steps=10**9, max_clauses=10**9, wall_limit_s=None, cpu_limit_s=0.05)
    verdict = run_builtin(DIVERGENT, budget)
    assert verdict.status == VerdictStatus.NO_PROOF
    assert verdict.szs_status == "Timeout"


def test_contradictory_axioms_are_reported():
    problem = (
        "fof(top_1, axiom, s__p(s__a)).\n"
        "fof(top_2, axiom, ~ s__p(s__a)).\n"
        "fof(goal, conjecture, s__q(s__a)).\n"
    )
    verdict = run_builtin(problem)
    assert verdict.status == VerdictStatus.PROOF_FOUND
    assert verdict.szs_status == "ContradictoryAxioms"
    assert "contradictory-axioms" in verdict.flags
    assert verdict.used_axioms == ["top_1", "top_2"]


def test_unreadable_problem_is_a_prover_error():
    verdict = run_builtin("fof(a, axiom, p(")
    assert verdict.status == VerdictStatus.PROVER_ERROR
    assert verdict.message


def test_equality_is_handled():
    verdict = prove_kif("(equal a b) (p a)", "(p b)")
    assert verdict.status == VerdictStatus.PROOF_FOUND


def test_clausify_implication():
    (clause,) = clausify(one("(forall (?X) (=> (p ?X) (q ?X)))"))
    assert clause.literals == ((False, "p", (0,)), (True, "q", (0,)))


def test_clausify_skolemizes_under_universals():
    (clause,) = clausify(one("(forall (?X) (exists (?Y) (r ?X ?Y)))"))
    assert clause.literals == ((True, "r", (0, ("sk0", 0))),)


def test_skolem_names_avoid_problem_symbols():
    (clause,) = Clausifier(reserved={"sk0"}).clausify(one("(exists (?Y) (p ?Y))"))
    assert clause.literals == ((True, "p", (("sk1",),)),)


def test_clausify_biconditional_and_tautologies():
    assert len(clausify(one("(forall (?X) (<=> (p ?X) (q ?X)))"))) == 2
    assert clausify(one("(or (p a) (not (p a)))")) == []


def test_free_variables_are_read_universally():
    assert clausify(one("(p ?X)"))[0].literals == ((True, "p", (0,)),)


def test_equality_axioms_cover_symbols_in_use():
    clauses = clausify(one("(and (equal (f a) b) (p b))"))
    axioms = equality_axioms(clauses)
    # reflexivity, symmetry, transitivity, f/1 and p/1 substitution
    assert len(axioms) == 5
    assert all(c.source == "equality" for c in axioms)
    assert equality_axioms(clausify(one("(p a)"))) == []


def test_subsumption():
    general = Clause(((True, "p", (0,)),))
    specific = Clause(((False, "q", (("b",),)), (True, "p", (("a",),))))
    assert _subsumes(general, specific)
    assert not _subsumes(specific, general)
    binary = Clause(((True, "r", (0, 0)),))
    assert not _subsumes(binary, Clause(((True, "r", (("a",), ("b",))),)))


def test_render_clause():
    clause = Clause(((False, "p", (0,)), (True, "q", (("a",),))), id=4, source="top_2")
    assert render_clause(clause) == "cnf(c4, axiom, (~ s__p(X0) | s__q(s__a)), file('problem', top_2))."


# ---------------------------------------------------------------------------
# Agreement with a brute-force model checker on random Horn-like problems
# ---------------------------------------------------------------------------

DOMAIN = ("a", "b")
GROUND_ATOMS = [(p, (c,)) for p in ("p", "q", "r") for c in DOMAIN] + [
    ("s", (x, y)) for x in DOMAIN for y in DOMAIN
]
RULES = [
    "(forall (?X) (=> ({0} ?X) ({1} ?X)))",
    "(forall (?X) (=> (and ({0} ?X) ({1} ?X)) ({2} ?X)))",
    "(forall (?X ?Y) (=> (and (s ?X ?Y) ({0} ?X)) ({1} ?Y)))",
    "(forall (?X ?Y) (=> (s ?X ?Y) (s ?Y ?X)))",
    "(forall (?X) (=> ({0} ?X) (or ({1} ?X) (not ({2} ?X)))))",
    "(forall (?X) (or ({0} ?X) ({1} ?X)))",
]


def _literal_text(rng):
    name, args = rng.choice(GROUND_ATOMS)
    atom = f"({name} {' '.join(args)})"
    return atom if rng.random() < 0.7 else f"(not {atom})"


def random_problem(rng):
    facts = []
    for _ in range(rng.randint(1, 4)):
        if rng.random() < 0.25:
            facts.append(f"(or {_literal_text(rng)} {_literal_text(rng)})")
        else:
            facts.append(_literal_text(rng))
    rules = [rng.choice(RULES).format(*rng.sample(["p", "q", "r"], 3)) for _ in range(rng.randint(1, 3))]
    axioms = [one(text) for text in facts + rules]
    name, args = rng.choice(GROUND_ATOMS)
    conjecture = one(f"({name} {' '.join(args)})")
    return axioms, conjecture


def holds(f, model, env=None):
    env = env or {}
    if isinstance(f, Atom):
        args = tuple(env[a] if isinstance(a, Variable) else a.name for a in f.args)
        return (f.predicate.name, args) in model
    if isinstance(f, Not):
        return not holds(f.body, model, env)
    if isinstance(f, And):
        return all(holds(i, model, env) for i in f.items)
    if isinstance(f, Or):
        return any(holds(i, model, env) for i in f.items)
    if isinstance(f, Implies):
        return not holds(f.lhs, model, env) or holds(f.rhs, model, env)
    if isinstance(f, Iff):
        return holds(f.lhs, model, env) == holds(f.rhs, model, env)
    assignments = (
        {**env, **dict(zip(f.variables, values))}
        for values in itertools.product(DOMAIN, repeat=len(f.variables))
    )
    test = all if isinstance(f, Forall) else any
    return test(holds(f.body, model, e) for e in assignments)


def entailed(axioms, conjecture):
    for bits in itertools.product((False, True), repeat=len(GROUND_ATOMS)):
        model = {atom for atom, bit in zip(GROUND_ATOMS, bits) if bit}
        if all(holds(a, model) for a in axioms) and not holds(conjecture, model):
            return False
    return True


@pytest.mark.parametrize("seed", range(30))
def test_agrees_with_model_checking(seed):
    axioms, conjecture = random_problem(random.Random(seed))
    clausifier = Clausifier()
    axiom_clauses = [c for i, a in enumerate(axioms) for c in clausifier.clausify(a, f"ax{i}")]
    goal = clausifier.clausify(Not(conjecture), CONJECTURE_NAME)
    budget = SaturationBudget(max_steps=100000, max_clauses=100000, wall_limit_s=120.0)
    result = saturate(axiom_clauses, goal, budget)
    assert result.status in ("proof", "saturated")
    assert (result.status == "proof") == entailed(axioms, conjecture)


def test_oracle_sanity():
    axioms = [one("(forall (?X) (=> (p ?X) (q ?X)))"), one("(p a)")]
    assert entailed(axioms, one("(q a)"))
    assert not entailed(axioms, one("(q b)"))
    assert holds(Exists((Variable("X"),), Atom(Constant("p"), (Variable("X"),))), {("p", ("b",))})
