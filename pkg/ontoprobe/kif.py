"""
SUO-KIF core module
Parses SUO-KIF text into formula trees, classifies formulas and renders them back
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from ontoprobe.constants import (
    AND,
    EQUAL,
    EXISTS,
    FORALL,
    IFF,
    IMPLIES,
    LOGICAL_OPERATORS,
    NON_LOGICAL_PREDICATES,
    NOT,
    OR,
)
from ontoprobe.errors import (
    EmptyExpression,
    MalformedFormula,
    MalformedQuantifier,
    SourceLocation,
    UnbalancedParens,
    UnreadableFile,
)

_FORBIDDEN_NAME_CHARS = frozenset("()\";")


def _check_name(kind: str, name: str) -> None:
    if not name or any(ch.isspace() or ch in _FORBIDDEN_NAME_CHARS for ch in name):
        raise ValueError(f"invalid {kind} name: {name!r}")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Constant:
    name: str


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __post_init__(self):
        _check_name("variable", self.name)


@dataclass(frozen=True, slots=True)
class RowVariable:
    name: str

    def __post_init__(self):
        _check_name("row variable", self.name)


@dataclass(frozen=True, slots=True)
class Compound:
    head: "Term"
    args: Tuple["Term", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("a compound term needs at least one argument")


@dataclass(frozen=True, slots=True)
class Embedded:
    """A formula written in argument position, e.g. the second argument of holdsDuring."""
    formula: "Formula"


Term = Union[Constant, Variable, RowVariable, Compound, Embedded]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Atom:
    predicate: Term
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("a conjunction needs at least two conjuncts")


@dataclass(frozen=True, slots=True)
class Or:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("a disjunction needs at least two disjuncts")


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


def _check_bound(variables: Tuple[Variable, ...]) -> None:
    if not variables:
        raise ValueError("a quantifier needs at least one variable")
    if len(set(variables)) != len(variables):
        raise ValueError("quantified variables must be distinct")
    if not all(isinstance(v, Variable) for v in variables):
        raise ValueError("only ordinary variables can be quantified")


@dataclass(frozen=True, slots=True)
class Forall:
    variables: Tuple[Variable, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        _check_bound(self.variables)


@dataclass(frozen=True, slots=True)
class Exists:
    variables: Tuple[Variable, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        _check_bound(self.variables)


@dataclass(frozen=True, slots=True)
class Equal:
    lhs: Term
    rhs: Term


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists, Equal]


class FormulaKind(str, Enum):
    UNIT_CLAUSE = "unit"
    GENERAL_CLAUSE = "general"


def conjoin(items: Sequence[Formula]) -> Formula:
    """And over items, collapsing the one-item case."""
    return items[0] if len(items) == 1 else And(tuple(items))


def disjoin(items: Sequence[Formula]) -> Formula:
    return items[0] if len(items) == 1 else Or(tuple(items))


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------

@dataclass(slots=True)
class _Token:
    text: str
    location: SourceLocation
    is_string: bool = False


@dataclass(slots=True)
class _SList:
    items: List[Union["_SList", _Token]]
    location: SourceLocation


def _tokenize(text: str, path: Optional[str]) -> Iterator[_Token]:
    """Yield parenthesis, symbol and string tokens with their positions."""
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        loc = SourceLocation(path, line, col)
        if ch in "()":
            yield _Token(ch, loc)
            i, col = i + 1, col + 1
            continue
        if ch == '"':
            j = i + 1
            col += 1
            while j < n and text[j] != '"':
                step = 2 if text[j] == "\\" and j + 1 < n else 1
                for k in range(j, min(j + step, n)):
                    if text[k] == "\n":
                        line, col = line + 1, 1
                    else:
                        col += 1
                j += step
            if j >= n:
                raise MalformedFormula("unterminated string literal", loc)
            yield _Token(text[i:j + 1], loc, is_string=True)
            i, col = j + 1, col + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in '();"':
            j += 1
        yield _Token(text[i:j], loc)
        col += j - i
        i = j


def _read_sexprs(text: str, path: Optional[str]) -> List[_SList]:
    roots: List[_SList] = []
    stack: List[_SList] = []
    for token in _tokenize(text, path):
        if not token.is_string and token.text == "(":
            stack.append(_SList([], token.location))
        elif not token.is_string and token.text == ")":
            if not stack:
                raise UnbalancedParens("unexpected ')'", token.location)
            done = stack.pop()
            if stack:
                stack[-1].items.append(done)
            else:
                roots.append(done)
        elif stack:
            stack[-1].items.append(token)
        else:
            raise MalformedFormula(f"expected '(' but found {token.text!r}", token.location)
    if stack:
        raise UnbalancedParens("missing ')'", stack[-1].location)
    return roots


def _symbol(node: Union[_SList, _Token]) -> Optional[str]:
    if isinstance(node, _Token) and not node.is_string:
        return node.text
    return None


def _to_term(node: Union[_SList, _Token]) -> Term:
    if isinstance(node, _Token):
        text = node.text
        if node.is_string:
            return Constant(text)
        if text.startswith("?") and len(text) > 1:
            return Variable(text[1:])
        if text.startswith("@") and len(text) > 1:
            return RowVariable(text[1:])
        return Constant(text)
    if not node.items:
        raise EmptyExpression("empty expression", node.location)
    head = _symbol(node.items[0])
    if head in LOGICAL_OPERATORS:
        return Embedded(_to_formula(node))
    if len(node.items) < 2:
        raise MalformedFormula("function term without arguments", node.location)
    return Compound(_to_term(node.items[0]), tuple(_to_term(item) for item in node.items[1:]))


def _quantifier(node: _SList, head: str) -> Formula:
    if len(node.items) != 3 or not isinstance(node.items[1], _SList):
        raise MalformedQuantifier(f"'{head}' needs a variable list and a body", node.location)
    var_list = node.items[1]
    names = [_symbol(item) for item in var_list.items]
    if not names or any(name is None or not name.startswith("?") or len(name) < 2 for name in names):
        raise MalformedQuantifier(f"'{head}' variable list must hold ?-variables", var_list.location)
    if len(set(names)) != len(names):
        raise MalformedQuantifier(f"duplicate variable in '{head}' list", var_list.location)
    variables = tuple(Variable(name[1:]) for name in names)
    body = _to_formula(node.items[2])
    return Forall(variables, body) if head == FORALL else Exists(variables, body)


def _to_formula(node: Union[_SList, _Token]) -> Formula:
    if isinstance(node, _Token):
        raise MalformedFormula(f"expected a statement but found {node.text!r}", node.location)
    if not node.items:
        raise EmptyExpression("empty expression", node.location)
    head = _symbol(node.items[0])
    rest = node.items[1:]

    if head in (FORALL, EXISTS):
        return _quantifier(node, head)
    if head == NOT:
        if len(rest) != 1:
            raise MalformedFormula("'not' takes exactly one argument", node.location)
        return Not(_to_formula(rest[0]))
    if head in (AND, OR):
        if not rest:
            raise MalformedFormula(f"'{head}' needs at least one argument", node.location)
        items = [_to_formula(item) for item in rest]
        return conjoin(items) if head == AND else disjoin(items)
    if head in (IMPLIES, IFF):
        if len(rest) != 2:
            raise MalformedFormula(f"'{head}' is strictly binary", node.location)
        lhs, rhs = _to_formula(rest[0]), _to_formula(rest[1])
        return Implies(lhs, rhs) if head == IMPLIES else Iff(lhs, rhs)
    if head == EQUAL:
        if len(rest) != 2:
            raise MalformedFormula("'equal' is strictly binary", node.location)
        return Equal(_to_term(rest[0]), _to_term(rest[1]))

    predicate = _to_term(node.items[0])
    if isinstance(predicate, RowVariable):
        raise MalformedFormula("row variable in predicate position", node.location)
    return Atom(predicate, tuple(_to_term(item) for item in rest))


def parse_suo_kif(text: str, path: Optional[str] = None) -> List[Tuple[Formula, SourceLocation]]:
    """
    Parse SUO-KIF text into one formula per top-level S-expression.

    Returns (formula, location) pairs in source order. Raises a KifSyntaxError
    subclass pointing at the offending expression.
    """
    return [(_to_formula(root), root.location) for root in _read_sexprs(text, path)]


def load_kif_file(path: Union[str, Path]) -> List[Tuple[Formula, SourceLocation]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UnreadableFile(f"cannot read {path}: {e}") from e
    return parse_suo_kif(text, str(path))


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def render_term(t: Term) -> str:
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, Variable):
        return f"?{t.name}"
    if isinstance(t, RowVariable):
        return f"@{t.name}"
    if isinstance(t, Compound):
        return "(" + " ".join([render_term(t.head)] + [render_term(a) for a in t.args]) + ")"
    return render_formula(t.formula)


def render_formula(f: Formula) -> str:
    """Canonical single-line SUO-KIF text for f."""
    if isinstance(f, Atom):
        return "(" + " ".join([render_term(f.predicate)] + [render_term(a) for a in f.args]) + ")"
    if isinstance(f, Equal):
        return f"({EQUAL} {render_term(f.lhs)} {render_term(f.rhs)})"
    if isinstance(f, Not):
        return f"({NOT} {render_formula(f.body)})"
    if isinstance(f, (And, Or)):
        op = AND if isinstance(f, And) else OR
        return f"({op} " + " ".join(render_formula(item) for item in f.items) + ")"
    if isinstance(f, (Implies, Iff)):
        op = IMPLIES if isinstance(f, Implies) else IFF
        return f"({op} {render_formula(f.lhs)} {render_formula(f.rhs)})"
    op = FORALL if isinstance(f, Forall) else EXISTS
    names = " ".join(f"?{v.name}" for v in f.variables)
    return f"({op} ({names}) {render_formula(f.body)})"


# ---------------------------------------------------------------------------
# Inspection
# ---------------------------------------------------------------------------

def subformulas(f: Formula) -> Tuple[Formula, ...]:
    """Immediate formula children of f."""
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.items
    if isinstance(f, (Implies, Iff)):
        return (f.lhs, f.rhs)
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    return ()


def iter_atoms(f: Formula) -> Iterator[Union[Atom, Equal]]:
    """Atoms and equalities of f, outside embedded formulas."""
    if isinstance(f, (Atom, Equal)):
        yield f
        return
    for child in subformulas(f):
        yield from iter_atoms(child)


def iter_terms(t: Term) -> Iterator[Term]:
    """t and every term nested inside it (embedded formulas included)."""
    yield t
    if isinstance(t, Compound):
        yield from iter_terms(t.head)
        for a in t.args:
            yield from iter_terms(a)
    elif isinstance(t, Embedded):
        for atom in iter_atoms(t.formula):
            for inner in _atom_terms(atom):
                yield from iter_terms(inner)


def _atom_terms(atom: Union[Atom, Equal]) -> Tuple[Term, ...]:
    if isinstance(atom, Equal):
        return (atom.lhs, atom.rhs)
    return (atom.predicate,) + atom.args


def _term_variables(t: Term, bound: FrozenSet[Variable], free: set, row: set) -> None:
    if isinstance(t, Variable):
        if t not in bound:
            free.add(t)
    elif isinstance(t, RowVariable):
        row.add(t)
    elif isinstance(t, Compound):
        _term_variables(t.head, bound, free, row)
        for a in t.args:
            _term_variables(a, bound, free, row)
    elif isinstance(t, Embedded):
        _formula_variables(t.formula, bound, free, row)


def _formula_variables(f: Formula, bound: FrozenSet[Variable], free: set, row: set) -> None:
    if isinstance(f, (Atom, Equal)):
        for t in _atom_terms(f):
            _term_variables(t, bound, free, row)
    elif isinstance(f, (Forall, Exists)):
        _formula_variables(f.body, bound | frozenset(f.variables), free, row)
    else:
        for child in subformulas(f):
            _formula_variables(child, bound, free, row)


def collect_variables(f: Formula) -> Tuple[FrozenSet[Variable], FrozenSet[RowVariable]]:
    """Free ordinary variables of f and all of its row variables."""
    free: set = set()
    row: set = set()
    _formula_variables(f, frozenset(), free, row)
    return frozenset(free), frozenset(row)


def classify_formula(f: Formula) -> FormulaKind:
    if isinstance(f, (Atom, Equal)):
        free, row = collect_variables(f)
        if not free and not row:
            return FormulaKind.UNIT_CLAUSE
    return FormulaKind.GENERAL_CLAUSE


def is_non_logical(f: Formula) -> bool:
    """True for documentation-like statements that are not axioms."""
    return (
        isinstance(f, Atom)
        and isinstance(f.predicate, Constant)
        and f.predicate.name in NON_LOGICAL_PREDICATES
    )


def free_variables_in_order(f: Formula) -> List[Variable]:
    """Free variables of f in order of first occurrence."""
    seen: List[Variable] = []

    def visit_term(t: Term, bound: FrozenSet[Variable]) -> None:
        if isinstance(t, Variable):
            if t not in bound and t not in seen:
                seen.append(t)
        elif isinstance(t, Compound):
            visit_term(t.head, bound)
            for a in t.args:
                visit_term(a, bound)
        elif isinstance(t, Embedded):
            visit(t.formula, bound)

    def visit(g: Formula, bound: FrozenSet[Variable]) -> None:
        if isinstance(g, (Atom, Equal)):
            for t in _atom_terms(g):
                visit_term(t, bound)
        elif isinstance(g, (Forall, Exists)):
            visit(g.body, bound | frozenset(g.variables))
        else:
            for child in subformulas(g):
                visit(child, bound)

    visit(f, frozenset())
    return seen
