"""
Mini prover module for Ontoprobe
Clausification and a given-clause resolution loop for desk-scale refutations
"""
import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from loguru import logger

from ontoprobe.constants import CONJECTURE_NAME, EQUALITY_PREDICATE
from ontoprobe.errors import ClausificationError, OntoprobeError
from ontoprobe.kif import (
    And,
    Atom,
    Compound,
    Constant,
    Equal,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
    free_variables_in_order,
)
from ontoprobe.models import SaturationBudget, Verdict, VerdictStatus
from ontoprobe.prover_bridge import verdict_from_output
from ontoprobe.tptp import encode_symbol, parse_problem

# Terms are ints (variables) or tuples (symbol, *args); constants are 1-tuples.
PTerm = Union[int, tuple]
# (positive, predicate, args)
Literal = Tuple[bool, str, Tuple[PTerm, ...]]

EQUALITY_SOURCE = "equality"
MAX_CLAUSES_PER_FORMULA = 4096


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def _walk(t: PTerm, s: Dict[int, PTerm]) -> PTerm:
    while isinstance(t, int) and t in s:
        t = s[t]
    return t


def _apply(t: PTerm, s: Dict[int, PTerm]) -> PTerm:
    t = _walk(t, s)
    if isinstance(t, int) or len(t) == 1:
        return t
    return (t[0],) + tuple(_apply(a, s) for a in t[1:])


def _occurs(v: int, t: PTerm, s: Dict[int, PTerm]) -> bool:
    t = _walk(t, s)
    if isinstance(t, int):
        return t == v
    return any(_occurs(v, a, s) for a in t[1:])


def _unify_args(xs: Sequence[PTerm], ys: Sequence[PTerm], s: Dict[int, PTerm]) -> Optional[Dict[int, PTerm]]:
    s = dict(s)
    stack = list(zip(xs, ys))
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if x == y:
            continue
        if isinstance(x, int):
            if _occurs(x, y, s):
                return None
            s[x] = y
        elif isinstance(y, int):
            if _occurs(y, x, s):
                return None
            s[y] = x
        elif x[0] != y[0] or len(x) != len(y):
            return None
        else:
            stack.extend(zip(x[1:], y[1:]))
    return s


def _match(p: PTerm, t: PTerm, s: Dict[int, PTerm]) -> Optional[Dict[int, PTerm]]:
    """One-way matching: only variables of p are bound, those of t stay rigid."""
    if isinstance(p, int):
        if p in s:
            return s if s[p] == t else None
        s = dict(s)
        s[p] = t
        return s
    if isinstance(t, int) or p[0] != t[0] or len(p) != len(t):
        return None
    for a, b in zip(p[1:], t[1:]):
        s = _match(a, b, s)
        if s is None:
            return None
    return s


def _shift(t: PTerm, k: int) -> PTerm:
    if isinstance(t, int):
        return t + k
    if len(t) == 1:
        return t
    return (t[0],) + tuple(_shift(a, k) for a in t[1:])


def _size(t: PTerm) -> int:
    if isinstance(t, int) or len(t) == 1:
        return 1
    return 1 + sum(_size(a) for a in t[1:])


def _max_var(t: PTerm) -> int:
    if isinstance(t, int):
        return t
    return max((_max_var(a) for a in t[1:]), default=-1)


def _symbols(t: PTerm, out: Set[Tuple[str, int]]) -> None:
    if isinstance(t, int):
        return
    out.add((t[0], len(t) - 1))
    for a in t[1:]:
        _symbols(a, out)


def _shape(t: PTerm) -> str:
    if isinstance(t, int):
        return "_"
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(_shape(a) for a in t[1:]) + ")"


# ---------------------------------------------------------------------------
# Clauses
# ---------------------------------------------------------------------------

def _literal_key(lit: Literal) -> Tuple:
    return (lit[1], not lit[0], tuple(_shape(a) for a in lit[2]), repr(lit[2]))


def _normalize(literals: Iterable[Literal]) -> Tuple[Literal, ...]:
    """Deduplicate, order and rename variables to 0.. in order of appearance."""
    unique = sorted(set(literals), key=_literal_key)
    renaming: Dict[int, int] = {}

    def rename(t: PTerm) -> PTerm:
        if isinstance(t, int):
            if t not in renaming:
                renaming[t] = len(renaming)
            return renaming[t]
        if len(t) == 1:
            return t
        return (t[0],) + tuple(rename(a) for a in t[1:])

    renamed = [(sign, pred, tuple(rename(a) for a in args)) for sign, pred, args in unique]
    return tuple(sorted(set(renamed), key=_literal_key))


def _is_tautology(literals: Sequence[Literal]) -> bool:
    positives = {(pred, args) for sign, pred, args in literals if sign}
    return any(not sign and (pred, args) in positives for sign, pred, args in literals)


@dataclass(slots=True)
class Clause:
    literals: Tuple[Literal, ...]
    id: int = 0
    parents: Tuple[int, ...] = ()
    source: str = "derived"
    rule: str = "input"
    keys: FrozenSet[Tuple[bool, str]] = field(init=False, repr=False)
    weight: int = field(init=False, repr=False)
    nvars: int = field(init=False, repr=False)

    def __post_init__(self):
        self.keys = frozenset((sign, pred) for sign, pred, _ in self.literals)
        self.weight = sum(1 + sum(_size(a) for a in args) for _, _, args in self.literals)
        self.nvars = 1 + max((_max_var(a) for _, _, args in self.literals for a in args), default=-1)

    @property
    def is_empty(self) -> bool:
        return not self.literals

    @property
    def is_positive(self) -> bool:
        return all(sign for sign, _, _ in self.literals)


def _subsumes(c: Clause, d: Clause) -> bool:
    if len(c.literals) > len(d.literals) or not c.keys <= d.keys:
        return False

    def search(i: int, s: Dict[int, PTerm]) -> bool:
        if i == len(c.literals):
            return True
        sign, pred, args = c.literals[i]
        for sign2, pred2, args2 in d.literals:
            if sign2 != sign or pred2 != pred or len(args2) != len(args):
                continue
            s2: Optional[Dict[int, PTerm]] = s
            for a, b in zip(args, args2):
                s2 = _match(a, b, s2)
                if s2 is None:
                    break
            if s2 is not None and search(i + 1, s2):
                return True
        return False

    return search(0, {})


# ---------------------------------------------------------------------------
# Clausification
# ---------------------------------------------------------------------------

class Clausifier:
    """Clausifies the formulas of one problem with shared Skolem numbering."""

    def __init__(self, reserved: Iterable[str] = ()):
        self._reserved = set(reserved)
        self._skolems = itertools.count()

    def _skolem_name(self) -> str:
        while True:
            name = f"sk{next(self._skolems)}"
            if name not in self._reserved:
                self._reserved.add(name)
                return name

    # negation normal form, polarity-aware
    def _nnf(self, f: Formula, positive: bool):
        if isinstance(f, (Atom, Equal)):
            return ("lit", positive, f)
        if isinstance(f, Not):
            return self._nnf(f.body, not positive)
        if isinstance(f, (And, Or)):
            op = "and" if isinstance(f, And) == positive else "or"
            return (op, [self._nnf(i, positive) for i in f.items])
        if isinstance(f, Implies):
            if positive:
                return ("or", [self._nnf(f.lhs, False), self._nnf(f.rhs, True)])
            return ("and", [self._nnf(f.lhs, True), self._nnf(f.rhs, False)])
        if isinstance(f, Iff):
            if positive:
                return ("and", [
                    ("or", [self._nnf(f.lhs, False), self._nnf(f.rhs, True)]),
                    ("or", [self._nnf(f.lhs, True), self._nnf(f.rhs, False)]),
                ])
            return ("and", [
                ("or", [self._nnf(f.lhs, True), self._nnf(f.rhs, True)]),
                ("or", [self._nnf(f.lhs, False), self._nnf(f.rhs, False)]),
            ])
        universal = isinstance(f, Forall) == positive
        return ("all" if universal else "ex", f.variables, self._nnf(f.body, positive))

    def _term(self, t: Term, env: Dict[Variable, PTerm]) -> PTerm:
        if isinstance(t, Variable):
            if t not in env:
                raise ClausificationError(f"unbound variable ?{t.name}")
            return env[t]
        if isinstance(t, Constant):
            return (t.name,)
        if isinstance(t, Compound) and isinstance(t.head, Constant):
            return (t.head.name,) + tuple(self._term(a, env) for a in t.args)
        raise ClausificationError(f"term outside first-order logic: {t!r}")

    def _literal(self, positive: bool, atom: Union[Atom, Equal], env: Dict[Variable, PTerm]) -> Literal:
        if isinstance(atom, Equal):
            return (positive, EQUALITY_PREDICATE, (self._term(atom.lhs, env), self._term(atom.rhs, env)))
        if not isinstance(atom.predicate, Constant):
            raise ClausificationError("variable in predicate position")
        return (positive, atom.predicate.name, tuple(self._term(a, env) for a in atom.args))

    def _skolemize(self, node, env: Dict[Variable, PTerm], universals: List[int], counter: List[int]):
        kind = node[0]
        if kind == "lit":
            return ("lit", self._literal(node[1], node[2], env))
        if kind in ("and", "or"):
            return (kind, [self._skolemize(n, env, universals, counter) for n in node[1]])
        env = dict(env)
        if kind == "all":
            fresh = []
            for v in node[1]:
                env[v] = counter[0]
                fresh.append(counter[0])
                counter[0] += 1
            return self._skolemize(node[2], env, universals + fresh, counter)
        for v in node[1]:
            env[v] = (self._skolem_name(),) + tuple(universals)
        return self._skolemize(node[2], env, universals, counter)

    def _cnf(self, node) -> List[List[Literal]]:
        if node[0] == "lit":
            return [[node[1]]]
        parts = [self._cnf(n) for n in node[1]]
        if node[0] == "and":
            return [clause for part in parts for clause in part]
        product: List[List[Literal]] = [[]]
        for part in parts:
            if len(product) * len(part) > MAX_CLAUSES_PER_FORMULA:
                raise ClausificationError("clause normal form exceeds the size limit")
            product = [left + right for left in product for right in part]
        return product

    def clausify(self, f: Formula, source: str = "derived") -> List[Clause]:
        free = free_variables_in_order(f)
        if free:
            f = Forall(tuple(free), f)
        matrix = self._skolemize(self._nnf(f, True), {}, [], [0])
        clauses = []
        for literals in self._cnf(matrix):
            if _is_tautology(literals):
                continue
            clauses.append(Clause(_normalize(literals), source=source))
        return clauses


def clausify(f: Formula, source: str = "derived") -> List[Clause]:
    """CNF of a closed formula; free variables are read universally."""
    return Clausifier().clausify(f, source)


def equality_axioms(clauses: Sequence[Clause]) -> List[Clause]:
    """Reflexivity, symmetry, transitivity and substitution for every symbol in use."""
    functions: Set[Tuple[str, int]] = set()
    predicates: Set[Tuple[str, int]] = set()
    for c in clauses:
        for _, pred, args in c.literals:
            predicates.add((pred, len(args)))
            for a in args:
                _symbols(a, functions)
    if (EQUALITY_PREDICATE, 2) not in predicates:
        return []
    eq = EQUALITY_PREDICATE
    raw: List[List[Literal]] = [
        [(True, eq, (0, 0))],
        [(False, eq, (0, 1)), (True, eq, (1, 0))],
        [(False, eq, (0, 1)), (False, eq, (1, 2)), (True, eq, (0, 2))],
    ]
    for name, arity in sorted(functions):
        for i in range(arity):
            left = tuple(range(arity))
            right = tuple(arity if j == i else j for j in range(arity))
            raw.append([(False, eq, (i, arity)), (True, eq, ((name,) + left, (name,) + right))])
    for name, arity in sorted(predicates):
        if name == eq:
            continue
        for i in range(arity):
            left = tuple(range(arity))
            right = tuple(arity if j == i else j for j in range(arity))
            raw.append([(False, eq, (i, arity)), (False, name, left), (True, name, right)])
    return [Clause(_normalize(lits), source=EQUALITY_SOURCE, rule="equality") for lits in raw]


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------

@dataclass
class SaturationResult:
    status: str  # proof | saturated | gave-up | resource-out | timeout
    clauses: Dict[int, Clause]
    empty_clause: Optional[Clause] = None
    steps: int = 0

    @property
    def proved(self) -> bool:
        return self.empty_clause is not None

    def refutation(self) -> List[Clause]:
        """The empty clause's ancestry, ordered by id."""
        if self.empty_clause is None:
            return []
        seen: Dict[int, Clause] = {}
        stack = [self.empty_clause]
        while stack:
            c = stack.pop()
            if c.id in seen:
                continue
            seen[c.id] = c
            stack.extend(self.clauses[p] for p in c.parents)
        return [seen[i] for i in sorted(seen)]

    def used_axiom_names(self) -> List[str]:
        sources = {c.source for c in self.refutation() if not c.parents}
        return sorted(sources - {CONJECTURE_NAME, EQUALITY_SOURCE, "derived"})

    def uses_conjecture(self) -> bool:
        return any(c.source == CONJECTURE_NAME for c in self.refutation())


def _selected(c: Clause, set_of_support: bool) -> List[int]:
    """Indices of literals that may be resolved upon."""
    if set_of_support:
        return list(range(len(c.literals)))
    negatives = [i for i, (sign, _, _) in enumerate(c.literals) if not sign]
    if negatives:
        best = max(negatives, key=lambda i: (sum(_size(a) for a in c.literals[i][2]), -i))
        return [best]
    return list(range(len(c.literals)))


def _resolvents(given: Clause, partner: Clause, set_of_support: bool) -> Iterator[List[Literal]]:
    offset = given.nvars
    shifted = [(sign, pred, tuple(_shift(a, offset) for a in args)) for sign, pred, args in partner.literals]
    for i in _selected(given, set_of_support):
        sign, pred, args = given.literals[i]
        for j in _selected(partner, set_of_support):
            sign2, pred2, args2 = shifted[j]
            if sign2 == sign or pred2 != pred or len(args2) != len(args):
                continue
            s = _unify_args(args, args2, {})
            if s is None:
                continue
            rest = [lit for k, lit in enumerate(given.literals) if k != i]
            rest += [lit for k, lit in enumerate(shifted) if k != j]
            yield [(sg, pd, tuple(_apply(a, s) for a in ar)) for sg, pd, ar in rest]


def _factors(c: Clause, set_of_support: bool) -> Iterator[List[Literal]]:
    if not set_of_support and not c.is_positive:
        return
    for i, j in itertools.combinations(range(len(c.literals)), 2):
        (sign, pred, args), (sign2, pred2, args2) = c.literals[i], c.literals[j]
        if sign != sign2 or pred != pred2 or len(args) != len(args2):
            continue
        s = _unify_args(args, args2, {})
        if s is not None:
            yield [(sg, pd, tuple(_apply(a, s) for a in ar)) for k, (sg, pd, ar) in enumerate(c.literals) if k != j]


def saturate(
    axiom_clauses: Sequence[Clause],
    conjecture_clauses: Sequence[Clause],
    budget: Optional[SaturationBudget] = None,
    set_of_support: bool = False,
) -> SaturationResult:
    """
    Given-clause resolution with factoring, forward subsumption and tautology deletion.

    The default strategy selects one negative literal per clause, which is
    complete and terminates on function-free inputs, so running out of
    clauses certifies non-entailment ("saturated"). With set_of_support only
    inferences involving a descendant of the negated conjecture are made;
    exhausting them is reported as "gave-up".
    """
    budget = budget or SaturationBudget()
    started = time.monotonic()
    cpu_started = time.thread_time()

    def out_of_time() -> bool:
        if budget.wall_limit_s is not None and time.monotonic() - started > budget.wall_limit_s:
            return True
        return budget.cpu_limit_s is not None and time.thread_time() - cpu_started > budget.cpu_limit_s

    clauses: Dict[int, Clause] = {}
    active: List[Clause] = []
    usable: List[Clause] = []
    kept: List[Clause] = []
    passive: List[Tuple[int, int, int, Clause]] = []
    seen: Set[Tuple[Literal, ...]] = set()
    ids = itertools.count(1)

    def register(literals: Tuple[Literal, ...], parents: Tuple[int, ...], source: str, rule: str,
                 support: bool = True) -> Optional[Clause]:
        if literals in seen or _is_tautology(literals):
            return None
        candidate = Clause(literals, 0, parents, source, rule)
        if support and any(_subsumes(k, candidate) for k in kept):
            return None
        candidate.id = next(ids)
        seen.add(literals)
        clauses[candidate.id] = candidate
        if support:
            kept.append(candidate)
        return candidate

    def result(status: str, empty: Optional[Clause] = None, steps: int = 0) -> SaturationResult:
        logger.debug(f"Saturation ended with {status} after {steps} steps and {len(clauses)} clauses")
        return SaturationResult(status=status, clauses=clauses, empty_clause=empty, steps=steps)

    for c in list(axiom_clauses) + list(conjecture_clauses):
        # with a set of support, axioms are resolution partners only
        in_support = not set_of_support or c.source == CONJECTURE_NAME
        registered = register(c.literals, (), c.source, c.rule, support=in_support)
        if registered is None:
            continue
        if registered.is_empty:
            return result("proof", registered)
        if not in_support:
            usable.append(registered)
        else:
            heapq.heappush(passive, (len(registered.literals), registered.weight, registered.id, registered))

    steps = 0
    while passive:
        if steps >= budget.max_steps or len(clauses) >= budget.max_clauses:
            return result("resource-out", steps=steps)
        if out_of_time():
            return result("timeout", steps=steps)
        given = heapq.heappop(passive)[-1]
        steps += 1
        if any(_subsumes(a, given) for a in active):
            continue
        active.append(given)

        inferences: List[Tuple[List[Literal], Tuple[int, ...], str]] = [
            (lits, (given.id,), "factoring") for lits in _factors(given, set_of_support)
        ]
        for partner in usable + active:
            for lits in _resolvents(given, partner, set_of_support):
                inferences.append((lits, (given.id, partner.id) if partner is not given else (given.id,), "resolution"))
        for lits, parents, rule in inferences:
            new = register(_normalize(lits), parents, "derived", rule)
            if new is None:
                continue
            if new.is_empty:
                return result("proof", new, steps)
            heapq.heappush(passive, (len(new.literals), new.weight, new.id, new))
        if out_of_time():
            return result("timeout", steps=steps)

    return result("gave-up" if set_of_support else "saturated", steps=steps)


# ---------------------------------------------------------------------------
# TPTP front end
# ---------------------------------------------------------------------------

_SZS_FOR_STATUS = {
    "saturated": "CounterSatisfiable",
    "gave-up": "GaveUp",
    "resource-out": "ResourceOut",
    "timeout": "Timeout",
}


def _render_term(t: PTerm) -> str:
    if isinstance(t, int):
        return f"X{t}"
    head = encode_symbol(t[0])
    if len(t) == 1:
        return head
    return head + "(" + ",".join(_render_term(a) for a in t[1:]) + ")"


def _render_literal(lit: Literal) -> str:
    sign, pred, args = lit
    if pred == EQUALITY_PREDICATE:
        op = "=" if sign else "!="
        return f"{_render_term(args[0])} {op} {_render_term(args[1])}"
    atom = encode_symbol(pred) + ("(" + ",".join(_render_term(a) for a in args) + ")" if args else "")
    return atom if sign else f"~ {atom}"


def render_clause(c: Clause) -> str:
    body = " | ".join(_render_literal(lit) for lit in c.literals) if c.literals else "$false"
    if c.parents:
        annotation = f"inference({c.rule}, [status(thm)], [{', '.join(f'c{p}' for p in c.parents)}])"
        role = "plain"
    elif c.source == EQUALITY_SOURCE:
        annotation, role = "introduced(equality_axiom)", "axiom"
    elif c.source == CONJECTURE_NAME:
        annotation, role = f"file('problem', {CONJECTURE_NAME})", "negated_conjecture"
    else:
        annotation, role = f"file('problem', {c.source})", "axiom"
    return f"cnf(c{c.id}, {role}, ({body}), {annotation})."


def render_output(result: SaturationResult, has_conjecture: bool, cpu_s: float) -> str:
    """SZS-style report of a saturation run."""
    lines = []
    if result.proved:
        status = "Theorem" if has_conjecture and result.uses_conjecture() else (
            "ContradictoryAxioms" if has_conjecture else "Unsatisfiable")
        lines.append(f"% SZS status {status} for problem")
        lines.append("% SZS output start CNFRefutation for problem")
        lines.extend(render_clause(c) for c in result.refutation())
        lines.append("% SZS output end CNFRefutation for problem")
    else:
        lines.append(f"% SZS status {_SZS_FOR_STATUS[result.status]} for problem")
    lines.append(f"% Steps: {result.steps}, clauses: {len(result.clauses)}")
    lines.append(f"% Time elapsed: {cpu_s:.3f} s")
    return "\n".join(lines) + "\n"


def run_builtin(
    problem_text: str,
    budget: Optional[SaturationBudget] = None,
    set_of_support: bool = False,
) -> Verdict:
    """Prove a TPTP problem with the built-in prover; the verdict mirrors an external run."""
    started = time.thread_time()
    try:
        items = parse_problem(problem_text)
        clausifier = Clausifier(reserved=_problem_symbols(item.formula for item in items))
        axioms: List[Clause] = []
        goals: List[Clause] = []
        names: List[str] = []
        for item in items:
            if item.role == "conjecture":
                goals.extend(clausifier.clausify(Not(item.formula), CONJECTURE_NAME))
            elif item.role == "negated_conjecture":
                goals.extend(clausifier.clausify(item.formula, CONJECTURE_NAME))
            else:
                names.append(item.name)
                axioms.extend(clausifier.clausify(item.formula, item.name))
    except (OntoprobeError, ValueError) as e:
        logger.error(f"Built-in prover cannot read problem: {e}")
        return Verdict(status=VerdictStatus.PROVER_ERROR, message=str(e))

    axioms.extend(equality_axioms(axioms + goals))
    outcome = saturate(axioms, goals, budget, set_of_support)
    cpu_s = time.thread_time() - started
    output = render_output(outcome, bool(goals), cpu_s)
    verdict = verdict_from_output(0, output, names, cpu_ms=int(round(cpu_s * 1000)))
    if outcome.status == "saturated":
        verdict.flags.append("saturated")
    return verdict


def _problem_symbols(formulas: Iterable[Formula]) -> Set[str]:
    """Symbol names already used by a problem, so Skolem names stay fresh."""
    found: Set[str] = set()
    stack: List = list(formulas)
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            stack.append(node.predicate)
            stack.extend(node.args)
        elif isinstance(node, Equal):
            stack.extend((node.lhs, node.rhs))
        elif isinstance(node, Constant):
            found.add(node.name)
        elif isinstance(node, Compound):
            stack.append(node.head)
            stack.extend(node.args)
        elif isinstance(node, Not):
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            stack.extend(node.items)
        elif isinstance(node, (Implies, Iff)):
            stack.extend((node.lhs, node.rhs))
        elif isinstance(node, (Forall, Exists)):
            stack.append(node.body)
    return found
