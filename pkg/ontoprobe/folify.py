"""
Folify module for Ontoprobe
Compiles SUO-KIF statements into a layered first-order axiom set and emits TPTP FOF
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from loguru import logger

from ontoprobe.constants import (
    CLASS,
    CONJECTURE_NAME,
    DECLARED_ARITIES,
    DEFAULT_MAX_ROW_ARITY,
    DISJOINT,
    DISJOINT_DECOMPOSITION,
    DOMAIN,
    DOMAIN_SUBCLASS,
    EXHAUSTIVE_DECOMPOSITION,
    FUNCTION_SUFFIX,
    GUARD_PREDICATES,
    HOLDS_PREFIX,
    INSTANCE,
    PARTITION,
    SUBCLASS,
    VARIABLE_ARITY_RELATION,
)
from ontoprobe.errors import ConflictingDomain, RowVariableNotTrailing, SourceLocation, UnreadableFile
from ontoprobe.kif import (
    And,
    Atom,
    Compound,
    Constant,
    Embedded,
    Equal,
    Exists,
    Forall,
    Formula,
    FormulaKind,
    Iff,
    Implies,
    Not,
    Or,
    RowVariable,
    Term,
    Variable,
    classify_formula,
    collect_variables,
    conjoin,
    disjoin,
    free_variables_in_order,
    is_non_logical,
    iter_atoms,
    iter_terms,
    load_kif_file,
    render_formula,
    subformulas,
)
from ontoprobe.models import AxiomMeta, DroppedStatement, LayerTag, TranslationReport
from ontoprobe.tptp import parse_problem, render_annotated

LAYER_PREFIXES = {
    LayerTag.META_KNOWLEDGE: "meta",
    LayerTag.TOP_LEVEL: "top",
    LayerTag.MID_LEVEL: "mid",
    LayerTag.FO_TRANSFORMATION: "fot",
}
_PREFIX_LAYERS = {prefix: layer for layer, prefix in LAYER_PREFIXES.items()}


class ArgMode(str, Enum):
    INSTANCE = "instance"
    SUBCLASS = "subclass"


@dataclass(frozen=True, slots=True)
class ArgDomain:
    position: int
    concept: str
    mode: ArgMode


@dataclass
class RelationSignature:
    relation: str
    arg_domains: List[ArgDomain] = field(default_factory=list)
    variable_arity: bool = False
    declared_arity: Optional[int] = None

    @property
    def min_arity(self) -> int:
        return max((d.position for d in self.arg_domains), default=0)

    def domain_at(self, position: int) -> Optional[ArgDomain]:
        for d in self.arg_domains:
            if d.position == position:
                return d
        return None


@dataclass(frozen=True, slots=True)
class Axiom:
    name: str
    formula: Formula
    layer: LayerTag
    kind: FormulaKind
    source: Optional[str] = None


@dataclass
class AxiomSet:
    axioms: List[Axiom] = field(default_factory=list)
    signatures: Dict[str, RelationSignature] = field(default_factory=dict)
    report: TranslationReport = field(default_factory=TranslationReport)

    def __post_init__(self):
        self._by_name: Dict[str, Axiom] = {}
        for axiom in self.axioms:
            if axiom.name in self._by_name:
                raise ValueError(f"duplicate axiom name '{axiom.name}'")
            self._by_name[axiom.name] = axiom

    def __len__(self) -> int:
        return len(self.axioms)

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self.axioms)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def names(self) -> List[str]:
        return [a.name for a in self.axioms]

    def get(self, name: str) -> Axiom:
        return self._by_name[name]

    def metadata(self) -> Dict[str, AxiomMeta]:
        return {
            a.name: AxiomMeta(name=a.name, layer=a.layer, kind=a.kind, source=a.source)
            for a in self.axioms
        }

    @classmethod
    def from_tptp(
        cls,
        text: str,
        metadata: Optional[Mapping[str, AxiomMeta]] = None,
        default_layer: LayerTag = LayerTag.TOP_LEVEL,
    ) -> "AxiomSet":
        """Reload an emitted problem; conjectures are ignored."""
        metadata = metadata or {}
        axioms = []
        for item in parse_problem(text):
            if item.role in ("conjecture", "negated_conjecture"):
                continue
            meta = metadata.get(item.name)
            if meta is not None:
                layer, kind, source = meta.layer, meta.kind, meta.source
            else:
                layer = layer_from_name(item.name) or default_layer
                kind, source = classify_formula(item.formula), None
            axioms.append(Axiom(item.name, item.formula, layer, kind, source))
        return cls(axioms=axioms)


def layer_from_name(name: str) -> Optional[LayerTag]:
    return _PREFIX_LAYERS.get(name.split("_", 1)[0])


# ---------------------------------------------------------------------------
# Small constructors
# ---------------------------------------------------------------------------

def _atom(predicate: str, *args: Term) -> Atom:
    return Atom(Constant(predicate), tuple(args))


def _instance(x: Term, c: Term) -> Atom:
    return _atom(INSTANCE, x, c)


def _subclass(c: Term, d: Term) -> Atom:
    return _atom(SUBCLASS, c, d)


def _disjoint(c: Term, d: Term) -> Atom:
    return _atom(DISJOINT, c, d)


def _holds(k: int) -> str:
    return f"{HOLDS_PREFIX}{k}"


def _map_atoms(f: Formula, fn: Callable[[Union[Atom, Equal]], Formula]) -> Formula:
    if isinstance(f, (Atom, Equal)):
        return fn(f)
    if isinstance(f, Not):
        return Not(_map_atoms(f.body, fn))
    if isinstance(f, And):
        return And(tuple(_map_atoms(i, fn) for i in f.items))
    if isinstance(f, Or):
        return Or(tuple(_map_atoms(i, fn) for i in f.items))
    if isinstance(f, Implies):
        return Implies(_map_atoms(f.lhs, fn), _map_atoms(f.rhs, fn))
    if isinstance(f, Iff):
        return Iff(_map_atoms(f.lhs, fn), _map_atoms(f.rhs, fn))
    if isinstance(f, Forall):
        return Forall(f.variables, _map_atoms(f.body, fn))
    return Exists(f.variables, _map_atoms(f.body, fn))


# ---------------------------------------------------------------------------
# Meta-knowledge
# ---------------------------------------------------------------------------

def meta_axioms() -> List[Axiom]:
    """Fixed axiomatization of instance, subclass and disjoint."""
    C, D, E, X = (Variable(n) for n in ("C", "D", "E", "X"))
    klass = Constant(CLASS)
    families = [
        ("subclass_transitivity",
         Forall((C, D, E), Implies(And((_subclass(C, D), _subclass(D, E))), _subclass(C, E)))),
        ("subclass_reflexivity",
         Forall((C,), Implies(_instance(C, klass), _subclass(C, C)))),
        ("instance_subclass",
         Forall((X, C, D), Implies(And((_instance(X, C), _subclass(C, D))), _instance(X, D)))),
        ("instance_domain",
         Forall((X, C), Implies(_instance(X, C), _instance(C, klass)))),
        ("subclass_domain",
         Forall((C, D), Implies(_subclass(C, D), And((_instance(C, klass), _instance(D, klass)))))),
        ("disjoint",
         Forall((C, D), Implies(_disjoint(C, D), Not(Exists((X,), And((_instance(X, C), _instance(X, D)))))))),
        ("disjoint_symmetry",
         Forall((C, D), Implies(_disjoint(C, D), _disjoint(D, C)))),
        ("disjoint_domain",
         Forall((C, D), Implies(_disjoint(C, D), And((_instance(C, klass), _instance(D, klass)))))),
    ]
    return [
        Axiom(f"meta_{family}", formula, LayerTag.META_KNOWLEDGE, FormulaKind.GENERAL_CLAUSE)
        for family, formula in families
    ]


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

def _collect_signatures(
    statements: Sequence[Formula],
) -> Tuple[Dict[str, RelationSignature], List[Tuple[int, ConflictingDomain]]]:
    signatures: Dict[str, RelationSignature] = {}
    conflicts: List[Tuple[int, ConflictingDomain]] = []
    for index, f in enumerate(statements):
        if not isinstance(f, Atom) or not isinstance(f.predicate, Constant):
            continue
        if not all(isinstance(a, Constant) for a in f.args):
            continue
        predicate = f.predicate.name
        names = [a.name for a in f.args]
        if predicate in (DOMAIN, DOMAIN_SUBCLASS) and len(names) == 3:
            relation, raw_position, concept = names
            try:
                position = int(raw_position)
            except ValueError:
                logger.warning(f"Ignoring {predicate} for {relation}: position '{raw_position}' is not a number")
                continue
            if position < 1:
                logger.warning(f"Ignoring {predicate} for {relation}: position {position} is not positive")
                continue
            mode = ArgMode.INSTANCE if predicate == DOMAIN else ArgMode.SUBCLASS
            declared = ArgDomain(position, concept, mode)
            signature = signatures.setdefault(relation, RelationSignature(relation))
            existing = signature.domain_at(position)
            if existing is None:
                signature.arg_domains.append(declared)
                signature.arg_domains.sort(key=lambda d: d.position)
            elif existing != declared:
                conflicts.append((index, ConflictingDomain(
                    relation, position,
                    f"{existing.mode.value} {existing.concept}", f"{mode.value} {concept}",
                )))
        elif predicate == INSTANCE and len(names) == 2:
            relation, category = names
            if category == VARIABLE_ARITY_RELATION:
                signatures.setdefault(relation, RelationSignature(relation)).variable_arity = True
            elif category in DECLARED_ARITIES:
                signatures.setdefault(relation, RelationSignature(relation)).declared_arity = DECLARED_ARITIES[category]
    return signatures, conflicts


def build_signatures(statements: Sequence[Formula]) -> Dict[str, RelationSignature]:
    """Argument domains from domain/domainSubclass statements plus arity declarations."""
    signatures, conflicts = _collect_signatures(statements)
    if conflicts:
        raise conflicts[0][1]
    return signatures


# ---------------------------------------------------------------------------
# Row variables
# ---------------------------------------------------------------------------

def _check_row_args(args: Tuple[Term, ...]) -> None:
    for i, a in enumerate(args):
        if isinstance(a, RowVariable) and i != len(args) - 1:
            raise RowVariableNotTrailing(f"row variable @{a.name} is not the last argument")
        if isinstance(a, Compound):
            if isinstance(a.head, RowVariable):
                raise RowVariableNotTrailing(f"row variable @{a.head.name} used as a function symbol")
            _check_row_args(a.args)


def _check_row_positions(f: Formula) -> None:
    for atom in iter_atoms(f):
        if isinstance(atom, Equal):
            for side in (atom.lhs, atom.rhs):
                if isinstance(side, RowVariable):
                    raise RowVariableNotTrailing(f"row variable @{side.name} outside an argument list")
                _check_row_args((side,))
        else:
            _check_row_args(atom.args)


def _all_variable_names(f: Formula) -> Set[str]:
    names: Set[str] = set()

    def visit(g: Formula) -> None:
        if isinstance(g, (Forall, Exists)):
            names.update(v.name for v in g.variables)
        if isinstance(g, (Atom, Equal)):
            terms = (g.lhs, g.rhs) if isinstance(g, Equal) else (g.predicate,) + g.args
            for t in terms:
                for sub in iter_terms(t):
                    if isinstance(sub, (Variable, RowVariable)):
                        names.add(sub.name)
        for child in subformulas(g):
            visit(child)

    visit(f)
    return names


def _expand_args(args: Tuple[Term, ...], mapping: Mapping[RowVariable, Tuple[Variable, ...]]) -> Tuple[Term, ...]:
    out: List[Term] = []
    for a in args:
        if isinstance(a, RowVariable):
            out.extend(mapping[a])
        else:
            out.append(_expand_term(a, mapping))
    return tuple(out)


def _expand_term(t: Term, mapping: Mapping[RowVariable, Tuple[Variable, ...]]) -> Term:
    if isinstance(t, Compound):
        return Compound(t.head, _expand_args(t.args, mapping))
    if isinstance(t, Embedded):
        return Embedded(_map_atoms(t.formula, lambda a: _expand_atom(a, mapping)))
    return t


def _expand_atom(atom: Union[Atom, Equal], mapping: Mapping[RowVariable, Tuple[Variable, ...]]) -> Formula:
    if isinstance(atom, Equal):
        return Equal(_expand_term(atom.lhs, mapping), _expand_term(atom.rhs, mapping))
    return Atom(_expand_term(atom.predicate, mapping), _expand_args(atom.args, mapping))


def expand_rows(f: Formula, max_row_arity: int = DEFAULT_MAX_ROW_ARITY) -> List[Formula]:
    """
    Replace row variables by 1..max_row_arity fresh ordinary variables.

    Returns one formula per arity; a row-free formula comes back as [f].
    """
    if max_row_arity < 1:
        raise ValueError("max_row_arity must be positive")
    _, rows = collect_variables(f)
    if not rows:
        return [f]
    _check_row_positions(f)
    used = _all_variable_names(f)
    fresh: Dict[RowVariable, List[Variable]] = {}
    for row in sorted(rows, key=lambda r: r.name):
        names = []
        for i in range(1, max_row_arity + 1):
            candidate = f"{row.name}{i}"
            while candidate in used:
                candidate += "_"
            used.add(candidate)
            names.append(Variable(candidate))
        fresh[row] = names
    expanded = []
    for k in range(1, max_row_arity + 1):
        mapping = {row: tuple(names[:k]) for row, names in fresh.items()}
        expanded.append(_map_atoms(f, lambda a, m=mapping: _expand_atom(a, m)))
    return expanded


# ---------------------------------------------------------------------------
# Variable predicates
# ---------------------------------------------------------------------------

def _reify_atom(atom: Union[Atom, Equal]) -> Formula:
    if isinstance(atom, Atom) and isinstance(atom.predicate, Variable):
        return Atom(Constant(_holds(len(atom.args) + 1)), (atom.predicate,) + atom.args)
    return atom


def reify_variable_predicates(f: Formula) -> Formula:
    """Rewrite (?R t1 .. tk) as holds_{k+1}(?R, t1, .., tk)."""
    return _map_atoms(f, _reify_atom)


def bridging_axiom(relation: str, arity: int) -> Formula:
    xs = tuple(Variable(f"X{i}") for i in range(1, arity + 1))
    return Forall(xs, Iff(Atom(Constant(_holds(arity + 1)), (Constant(relation),) + xs), Atom(Constant(relation), xs)))


def _argument_constants(formulas: Sequence[Formula]) -> Set[str]:
    found: Set[str] = set()

    def visit(t: Term) -> None:
        if isinstance(t, Constant):
            found.add(t.name)
        elif isinstance(t, Compound):
            for a in t.args:
                visit(a)

    for f in formulas:
        for atom in iter_atoms(f):
            for t in ((atom.lhs, atom.rhs) if isinstance(atom, Equal) else atom.args):
                visit(t)
    return found


def _predicate_arities(formulas: Sequence[Formula], signatures: Mapping[str, RelationSignature]) -> Dict[str, Set[int]]:
    arities: Dict[str, Set[int]] = defaultdict(set)
    for f in formulas:
        for atom in iter_atoms(f):
            if isinstance(atom, Atom) and isinstance(atom.predicate, Constant):
                name = atom.predicate.name
                if not name.startswith(HOLDS_PREFIX):
                    arities[name].add(len(atom.args))
    for name, signature in signatures.items():
        if signature.declared_arity:
            arities[name].add(signature.declared_arity)
    return arities


def _bridging_axioms(
    formulas: Sequence[Formula], signatures: Mapping[str, RelationSignature],
) -> List[Tuple[str, Formula]]:
    arities = _predicate_arities(formulas, signatures)
    in_arguments = _argument_constants(formulas)
    out = []
    for relation in sorted(in_arguments & set(arities)):
        for k in sorted(a for a in arities[relation] if a >= 1):
            out.append((f"{relation}/{k}", bridging_axiom(relation, k)))
    return out


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

_DECOMPOSITIONS = (PARTITION, EXHAUSTIVE_DECOMPOSITION, DISJOINT_DECOMPOSITION)


def decomposition_axiom(predicate: str, nargs: int) -> Formula:
    """
    Semantics of partition, exhaustiveDecomposition and disjointDecomposition
    for a class followed by nargs - 1 parts.
    """
    if predicate not in _DECOMPOSITIONS or nargs < 2:
        raise ValueError(f"no decomposition axiom for {predicate}/{nargs}")
    whole = Variable("C")
    parts = tuple(Variable(f"C{i}") for i in range(1, nargs))
    x = Variable("X")
    covered = [_subclass(p, whole) for p in parts]
    if predicate == PARTITION:
        body: Formula = And((_atom(EXHAUSTIVE_DECOMPOSITION, whole, *parts), _atom(DISJOINT_DECOMPOSITION, whole, *parts)))
    elif predicate == EXHAUSTIVE_DECOMPOSITION:
        cover = Forall((x,), Implies(_instance(x, whole), disjoin([_instance(x, p) for p in parts])))
        body = conjoin(covered + [cover])
    else:
        pairs = [_disjoint(a, b) for i, a in enumerate(parts) for b in parts[i + 1:]]
        body = conjoin(covered + pairs)
    return Forall((whole,) + parts, Implies(_atom(predicate, whole, *parts), body))


def _decomposition_axioms(formulas: Sequence[Formula]) -> List[Formula]:
    needed: Set[Tuple[int, int]] = set()
    order = {p: i for i, p in enumerate(_DECOMPOSITIONS)}
    for f in formulas:
        for atom in iter_atoms(f):
            if not (isinstance(atom, Atom) and isinstance(atom.predicate, Constant)):
                continue
            name = atom.predicate.name
            if name in order and len(atom.args) >= 2:
                n = len(atom.args)
                needed.add((n, order[name]))
                if name == PARTITION:
                    needed.update({(n, order[EXHAUSTIVE_DECOMPOSITION]), (n, order[DISJOINT_DECOMPOSITION])})
    return [decomposition_axiom(_DECOMPOSITIONS[p], n) for n, p in sorted(needed)]


# ---------------------------------------------------------------------------
# Type guards
# ---------------------------------------------------------------------------

def _guard_atom(domain: ArgDomain, v: Variable) -> Atom:
    predicate = INSTANCE if domain.mode == ArgMode.INSTANCE else SUBCLASS
    return _atom(predicate, v, Constant(domain.concept))


def _occurrence_guards(f: Formula, v: Variable, signatures: Mapping[str, RelationSignature]) -> List[Atom]:
    found: Set[Atom] = set()

    def visit(g: Formula) -> None:
        if isinstance(g, Atom):
            if not isinstance(g.predicate, Constant) or g.predicate.name in GUARD_PREDICATES:
                return
            relation, args = g.predicate.name, g.args
            if relation.startswith(HOLDS_PREFIX) and args and isinstance(args[0], Constant):
                relation, args = args[0].name, args[1:]
            signature = signatures.get(relation)
            if signature is None:
                return
            for position, a in enumerate(args, start=1):
                if a == v:
                    domain = signature.domain_at(position)
                    if domain is not None:
                        found.add(_guard_atom(domain, v))
        elif isinstance(g, (Forall, Exists)):
            if v not in g.variables:
                visit(g.body)
        else:
            for child in subformulas(g):
                visit(child)

    visit(f)
    return sorted(found, key=lambda a: (a.predicate.name, a.args[1].name))


def _conjuncts(f: Formula) -> Tuple[Formula, ...]:
    return f.items if isinstance(f, And) else (f,)


def _antecedents(f: Formula) -> List[Formula]:
    out: List[Formula] = []
    while isinstance(f, Implies):
        out.extend(_conjuncts(f.lhs))
        f = f.rhs
    return out


def _missing_guards(body: Formula, variables: Tuple[Variable, ...], present: Sequence[Formula],
                    signatures: Mapping[str, RelationSignature]) -> List[Formula]:
    seen = set(present)
    missing: List[Formula] = []
    for v in variables:
        for guard in _occurrence_guards(body, v, signatures):
            if guard not in seen:
                seen.add(guard)
                missing.append(guard)
    return missing


def _guard(f: Formula, signatures: Mapping[str, RelationSignature]) -> Formula:
    if isinstance(f, Forall):
        body = _guard(f.body, signatures)
        missing = _missing_guards(body, f.variables, _antecedents(body), signatures)
        if missing:
            body = Implies(conjoin(missing), body)
        return Forall(f.variables, body)
    if isinstance(f, Exists):
        body = _guard(f.body, signatures)
        missing = _missing_guards(body, f.variables, _conjuncts(body), signatures)
        if missing:
            body = conjoin(missing + list(_conjuncts(body)))
        return Exists(f.variables, body)
    if isinstance(f, (Atom, Equal)):
        return f
    if isinstance(f, Not):
        return Not(_guard(f.body, signatures))
    if isinstance(f, And):
        return And(tuple(_guard(i, signatures) for i in f.items))
    if isinstance(f, Or):
        return Or(tuple(_guard(i, signatures) for i in f.items))
    if isinstance(f, Implies):
        return Implies(_guard(f.lhs, signatures), _guard(f.rhs, signatures))
    return Iff(_guard(f.lhs, signatures), _guard(f.rhs, signatures))


def guard_types(f: Formula, signatures: Mapping[str, RelationSignature]) -> Formula:
    """
    Close f universally and add domain guards for its quantified variables.

    Universal variables get instance/subclass antecedents, existential ones get
    conjuncts inside their scope. Guards already present are not repeated, so
    the operation is idempotent.
    """
    free = free_variables_in_order(f)
    if free:
        f = Forall(tuple(free), f)
    return _guard(f, signatures)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def untranslatable_reason(f: Formula, relations: Set[str]) -> Optional[str]:
    """Why f has no first-order rendering, or None."""
    for atom in iter_atoms(f):
        if isinstance(atom, Atom) and not isinstance(atom.predicate, (Constant, Variable)):
            return "complex term in predicate position"
        terms = (atom.lhs, atom.rhs) if isinstance(atom, Equal) else atom.args
        for t in terms:
            for sub in iter_terms(t):
                if isinstance(sub, Embedded):
                    return "formula-valued argument"
                if isinstance(sub, Compound):
                    if not isinstance(sub.head, Constant):
                        return "non-constant function symbol"
                    name = sub.head.name
                    if not name.endswith(FUNCTION_SUFFIX) and name in relations:
                        return f"relation '{name}' used as a function term"
    return None


def count_kinds(axioms: Union[AxiomSet, Sequence[Axiom]]) -> Dict[LayerTag, Dict[FormulaKind, int]]:
    counts = {layer: {kind: 0 for kind in FormulaKind} for layer in LayerTag}
    for a in axioms:
        counts[a.layer][a.kind] += 1
    return counts


def _counts_for_report(counts: Mapping[LayerTag, Mapping[FormulaKind, int]]) -> Dict[str, Dict[str, int]]:
    out = {layer.value: {kind.value: n for kind, n in by_kind.items()} for layer, by_kind in counts.items()}
    out["total"] = {kind.value: sum(counts[layer][kind] for layer in LayerTag) for kind in FormulaKind}
    return out


def translate_ontology(
    statements: Sequence[Tuple[Formula, Optional[SourceLocation]]],
    layers: Sequence[LayerTag],
    max_row_arity: int = DEFAULT_MAX_ROW_ARITY,
) -> AxiomSet:
    """
    Compile parsed statements into an AxiomSet.

    Statements that cannot be rendered in first-order logic are dropped and
    listed in the report; nothing here raises on ontology content.
    """
    if len(statements) != len(layers):
        raise ValueError("every statement needs a layer")
    formulas = [f for f, _ in statements]
    signatures, conflicts = _collect_signatures(formulas)
    conflicting = dict(conflicts)
    relations = set(signatures) | {
        atom.predicate.name
        for f in formulas
        for atom in iter_atoms(f)
        if isinstance(atom, Atom) and isinstance(atom.predicate, Constant)
    }

    report = TranslationReport(statements=len(statements), max_row_arity=max_row_arity)
    meta = meta_axioms()
    seen: Set[Formula] = {a.formula for a in meta}
    kept: List[Tuple[Formula, LayerTag, Optional[str]]] = []

    for index, ((f, location), layer) in enumerate(zip(statements, layers)):
        where = str(location) if location else None
        if is_non_logical(f):
            report.non_logical += 1
            continue
        expanded: List[Formula] = []
        if index in conflicting:
            reason: Optional[str] = str(conflicting[index])
        else:
            reason = untranslatable_reason(f, relations)
        if reason is None:
            try:
                expanded = expand_rows(f, max_row_arity)
            except RowVariableNotTrailing as e:
                reason = str(e)
        if reason is not None:
            logger.warning(f"Dropping statement at {where or '?'}: {reason}")
            report.dropped.append(DroppedStatement(source=where, reason=reason, statement=render_formula(f)))
            continue
        report.translated += 1
        for g in expanded:
            g = guard_types(reify_variable_predicates(g), signatures)
            if g in seen:
                report.duplicates += 1
                continue
            seen.add(g)
            kept.append((g, layer, where))

    translated = [g for g, _, _ in kept]
    generated: List[Formula] = []
    for label, bridge in _bridging_axioms(translated, signatures):
        report.bridged_relations.append(label)
        generated.append(bridge)
    generated.extend(_decomposition_axioms(translated))
    for g in generated:
        if g not in seen:
            seen.add(g)
            kept.append((g, LayerTag.FO_TRANSFORMATION, None))

    axioms = list(meta)
    counters: Dict[LayerTag, int] = defaultdict(int)
    for g, layer, where in kept:
        counters[layer] += 1
        name = f"{LAYER_PREFIXES[layer]}_{counters[layer]}"
        axioms.append(Axiom(name, g, layer, classify_formula(g), where))

    axiom_set = AxiomSet(axioms=axioms, signatures=signatures, report=report)
    report.counts = _counts_for_report(count_kinds(axiom_set))
    logger.info(
        f"Translated {report.translated} of {report.statements} statements into {len(axiom_set)} axioms "
        f"({len(report.dropped)} dropped, {report.non_logical} non-logical, {report.duplicates} duplicates)"
    )
    return axiom_set


def emit_tptp(axioms: Union[AxiomSet, Sequence[Axiom]], conjecture: Optional[Formula] = None) -> str:
    lines = [render_annotated(a.name, "axiom", a.formula) for a in axioms]
    if conjecture is not None:
        free, rows = collect_variables(conjecture)
        if free or rows:
            raise ValueError("the conjecture must be closed")
        lines.append(render_annotated(CONJECTURE_NAME, "conjecture", conjecture))
    return "\n".join(lines) + "\n" if lines else ""


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

def sidecar_paths(tptp_path: Union[str, Path]) -> Tuple[Path, Path]:
    """(translation report, axiom metadata) paths stored next to a TPTP file."""
    path = Path(tptp_path)
    stem = path.with_suffix("")
    return Path(f"{stem}.report.json"), Path(f"{stem}.axioms.json")


def write_translation(axiom_set: AxiomSet, tptp_path: Union[str, Path]) -> None:
    path = Path(tptp_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report_path, meta_path = sidecar_paths(path)
    path.write_text(emit_tptp(axiom_set), encoding="utf-8", newline="\n")
    report_path.write_text(axiom_set.report.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    metadata = {name: meta.model_dump(mode="json") for name, meta in axiom_set.metadata().items()}
    meta_path.write_text(json.dumps(metadata, indent=2) + "\n", encoding="utf-8", newline="\n")
    logger.success(f"Wrote {len(axiom_set)} axioms to {path}")


def load_axiom_metadata(path: Union[str, Path]) -> Dict[str, AxiomMeta]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UnreadableFile(f"cannot read axiom metadata {path}: {e}") from e
    return {name: AxiomMeta.model_validate(entry) for name, entry in raw.items()}


def load_axiom_set(tptp_path: Union[str, Path]) -> AxiomSet:
    """Reload a translated ontology, using its metadata sidecar when present."""
    path = Path(tptp_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise UnreadableFile(f"cannot read {path}: {e}") from e
    _, meta_path = sidecar_paths(path)
    metadata = load_axiom_metadata(meta_path) if meta_path.exists() else None
    if metadata is None:
        logger.warning(f"No axiom metadata next to {path}; layers are taken from axiom names")
    return AxiomSet.from_tptp(text, metadata)


def read_layer_map(path: Union[str, Path]) -> Dict[str, LayerTag]:
    """JSON object mapping .kif file names to layer tags."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UnreadableFile(f"cannot read layer map {path}: {e}") from e
    if not isinstance(raw, dict):
        raise UnreadableFile(f"layer map {path} must be a JSON object")
    return {name: LayerTag(value) for name, value in raw.items()}


def load_layered_sources(
    paths: Sequence[Union[str, Path]], layer_map: Optional[Mapping[str, LayerTag]] = None,
) -> Tuple[List[Tuple[Formula, SourceLocation]], List[LayerTag]]:
    statements: List[Tuple[Formula, SourceLocation]] = []
    layers: List[LayerTag] = []
    for path in paths:
        path = Path(path)
        layer = (layer_map or {}).get(path.name)
        if layer is None:
            logger.warning(f"{path.name} has no layer assignment; treating it as {LayerTag.TOP_LEVEL.value}")
            layer = LayerTag.TOP_LEVEL
        parsed = load_kif_file(path)
        logger.info(f"Parsed {len(parsed)} statements from {path} ({layer.value})")
        statements.extend(parsed)
        layers.extend([layer] * len(parsed))
    return statements, layers
