"""
Competency question module for Ontoprobe
Generates truth-tests and falsity-tests from WordNet to SUMO mappings and lexical links
"""
import csv
import json
import re
from collections import defaultdict
from itertools import product
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from ontoprobe.errors import KifSyntaxError, TemplateArityMismatch, TptpSyntaxError, UnreadableFile
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
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
    collect_variables,
    parse_suo_kif,
    render_formula,
)
from ontoprobe.models import (
    MappingEntry,
    MappingRelation,
    MorphoLink,
    PatternTemplate,
    TestCase,
    TestKind,
)
from ontoprobe.tptp import parse_problem, render_fof

_MARKER = re.compile(r"&%([^\s&=+@]+)([=+@])")
_PLACEHOLDER_PREFIX = "$"

# Placeholders each selector source can fill
SELECTOR_SLOTS = {
    "antonyms": {"A", "B"},
    "morpholinks": {"V", "N"},
}


def _read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UnreadableFile(f"cannot read {path}: {e}") from e


# ---------------------------------------------------------------------------
# Lexical resources
# ---------------------------------------------------------------------------

def load_mapping(path: Union[str, Path], skipped: Optional[List[str]] = None) -> List[MappingEntry]:
    """
    Read a WordNet to SUMO mapping file.

    Lines are `synset<TAB>pos<TAB>lemma,lemma<TAB>&%Concept<marker>`; invalid lines
    are logged and, when a list is given, reported through `skipped`.
    """
    entries: List[MappingEntry] = []
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        problem = None
        marker = _MARKER.search("\t".join(fields[3:])) if len(fields) >= 4 else None
        if len(fields) < 4:
            problem = "expected four tab-separated fields"
        elif marker is None:
            problem = "no &% mapping marker"
        else:
            try:
                entries.append(MappingEntry(
                    synset_id=fields[0].strip(),
                    pos=fields[1].strip(),
                    words=tuple(w.strip() for w in fields[2].split(",") if w.strip()),
                    sumo_concept=marker.group(1),
                    mapping_relation=MappingRelation(marker.group(2)),
                ))
            except ValidationError as e:
                problem = f"invalid entry ({e.error_count()} errors)"
        if problem:
            logger.warning(f"Skipping {path}:{number}: {problem}")
            if skipped is not None:
                skipped.append(f"{number}: {problem}")
    logger.info(f"Loaded {len(entries)} mapping entries from {path}")
    return entries


def load_morpholinks(path: Union[str, Path]) -> List[MorphoLink]:
    """CSV rows `verb_synset,relation,noun_synset`, header optional, duplicates dropped."""
    links: List[MorphoLink] = []
    seen: Set[MorphoLink] = set()
    reader = csv.reader(_read_text(path).splitlines())
    for number, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if number == 1 and row[0].strip() == "verb_synset":
            continue
        if len(row) != 3:
            logger.warning(f"Skipping {path}:{number}: expected three columns")
            continue
        link = MorphoLink(verb_synset=row[0].strip(), relation=row[1].strip(), noun_synset=row[2].strip())
        if link not in seen:
            seen.add(link)
            links.append(link)
    logger.info(f"Loaded {len(links)} morphosemantic links from {path}")
    return links


def load_antonyms(path: Union[str, Path]) -> List[Tuple[str, str]]:
    """TSV synset pairs, ordered lexicographically and deduplicated."""
    pairs: List[Tuple[str, str]] = []
    seen: Set[Tuple[str, str]] = set()
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != 2 or not all(fields) or fields[0] == fields[1]:
            logger.warning(f"Skipping {path}:{number}: expected two distinct synsets")
            continue
        pair = (min(fields), max(fields))
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    logger.info(f"Loaded {len(pairs)} antonym pairs from {path}")
    return pairs


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------

def _substitute_term(t: Term, binding: Mapping[str, str]) -> Term:
    if isinstance(t, Constant) and t.name.startswith(_PLACEHOLDER_PREFIX):
        return Constant(binding[t.name[1:]])
    if isinstance(t, Compound):
        return Compound(_substitute_term(t.head, binding), tuple(_substitute_term(a, binding) for a in t.args))
    if isinstance(t, Embedded):
        return Embedded(substitute(t.formula, binding))
    return t


def substitute(f: Formula, binding: Mapping[str, str]) -> Formula:
    """Replace $NAME constants by the concepts bound to NAME."""
    if isinstance(f, Atom):
        return Atom(_substitute_term(f.predicate, binding), tuple(_substitute_term(a, binding) for a in f.args))
    if isinstance(f, Equal):
        return Equal(_substitute_term(f.lhs, binding), _substitute_term(f.rhs, binding))
    if isinstance(f, Not):
        return Not(substitute(f.body, binding))
    if isinstance(f, And):
        return And(tuple(substitute(i, binding) for i in f.items))
    if isinstance(f, Or):
        return Or(tuple(substitute(i, binding) for i in f.items))
    if isinstance(f, Implies):
        return Implies(substitute(f.lhs, binding), substitute(f.rhs, binding))
    if isinstance(f, Iff):
        return Iff(substitute(f.lhs, binding), substitute(f.rhs, binding))
    if isinstance(f, Forall):
        return Forall(f.variables, substitute(f.body, binding))
    return Exists(f.variables, substitute(f.body, binding))


def placeholders(f: Formula) -> Set[str]:
    names: Set[str] = set()

    def visit_term(t: Term) -> None:
        if isinstance(t, Constant) and t.name.startswith(_PLACEHOLDER_PREFIX):
            names.add(t.name[1:])
        elif isinstance(t, Compound):
            visit_term(t.head)
            for a in t.args:
                visit_term(a)
        elif isinstance(t, Embedded):
            names.update(placeholders(t.formula))

    def visit(g: Formula) -> None:
        if isinstance(g, Atom):
            visit_term(g.predicate)
            for a in g.args:
                visit_term(a)
        elif isinstance(g, Equal):
            visit_term(g.lhs)
            visit_term(g.rhs)
        elif isinstance(g, Not):
            visit(g.body)
        elif isinstance(g, (And, Or)):
            for i in g.items:
                visit(i)
        elif isinstance(g, (Implies, Iff)):
            visit(g.lhs)
            visit(g.rhs)
        else:
            visit(g.body)

    visit(f)
    return names


def template_schema(template: PatternTemplate) -> Formula:
    """Parse and check a template's conjecture schema."""
    try:
        parsed = parse_suo_kif(template.conjecture, f"template {template.id}")
    except KifSyntaxError as e:
        raise TemplateArityMismatch(f"template {template.id}: {e}") from e
    if len(parsed) != 1:
        raise TemplateArityMismatch(f"template {template.id} must hold exactly one conjecture")
    schema = parsed[0][0]
    missing = placeholders(schema) - SELECTOR_SLOTS[template.selector.source]
    if missing:
        raise TemplateArityMismatch(
            f"template {template.id}: a {template.selector.source} tuple cannot fill "
            + ", ".join(f"${name}" for name in sorted(missing))
        )
    free, rows = collect_variables(schema)
    if free or rows:
        raise TemplateArityMismatch(f"template {template.id}: conjecture schema is not closed")
    return schema


def load_templates(path: Union[str, Path]) -> List[PatternTemplate]:
    try:
        raw = json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise UnreadableFile(f"cannot parse templates {path}: {e}") from e
    if not isinstance(raw, list):
        raise UnreadableFile(f"templates file {path} must hold a JSON list")
    templates = [PatternTemplate.model_validate(item) for item in raw]
    ids = [t.id for t in templates]
    if len(set(ids)) != len(ids):
        raise UnreadableFile(f"templates file {path} repeats a template id")
    for t in templates:
        template_schema(t)
    return templates


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def _alpha_key(f: Formula) -> str:
    """Rendering with bound variables renamed in binding order."""
    counter = [0]

    def rename_term(t: Term, env: Dict[Variable, Variable]) -> Term:
        if isinstance(t, Variable):
            return env.get(t, t)
        if isinstance(t, Compound):
            return Compound(rename_term(t.head, env), tuple(rename_term(a, env) for a in t.args))
        return t

    def rename(g: Formula, env: Dict[Variable, Variable]) -> Formula:
        if isinstance(g, Atom):
            return Atom(rename_term(g.predicate, env), tuple(rename_term(a, env) for a in g.args))
        if isinstance(g, Equal):
            return Equal(rename_term(g.lhs, env), rename_term(g.rhs, env))
        if isinstance(g, Not):
            return Not(rename(g.body, env))
        if isinstance(g, And):
            return And(tuple(rename(i, env) for i in g.items))
        if isinstance(g, Or):
            return Or(tuple(rename(i, env) for i in g.items))
        if isinstance(g, Implies):
            return Implies(rename(g.lhs, env), rename(g.rhs, env))
        if isinstance(g, Iff):
            return Iff(rename(g.lhs, env), rename(g.rhs, env))
        inner = dict(env)
        fresh = []
        for v in g.variables:
            counter[0] += 1
            inner[v] = Variable(f"B{counter[0]}")
            fresh.append(inner[v])
        return type(g)(tuple(fresh), rename(g.body, inner))

    return render_formula(rename(f, {}))


def _mapping_index(mapping: Sequence[MappingEntry]) -> Dict[str, List[MappingEntry]]:
    index: Dict[str, List[MappingEntry]] = defaultdict(list)
    for entry in mapping:
        index[entry.synset_id].append(entry)
    return index


def _select(entries: Sequence[MappingEntry], pos: Optional[str], relations: Sequence[MappingRelation]) -> List[MappingEntry]:
    return [e for e in entries if (pos is None or e.pos == pos) and e.mapping_relation in relations]


def _antonym_tuples(template: PatternTemplate, index, antonyms) -> List[Tuple[Dict[str, str], Tuple[str, ...]]]:
    selector = template.selector
    out = []
    for a, b in sorted(antonyms):
        left = _select(index.get(a, []), selector.pos, selector.mapping_relations)
        right = _select(index.get(b, []), selector.pos, selector.mapping_relations)
        for ea, eb in product(left, right):
            if selector.distinct and ea.sumo_concept == eb.sumo_concept:
                continue
            out.append(({"A": ea.sumo_concept, "B": eb.sumo_concept}, (a, b, ea.sumo_concept, eb.sumo_concept)))
    return out


def _morpholink_tuples(template: PatternTemplate, index, links) -> List[Tuple[Dict[str, str], Tuple[str, ...]]]:
    selector = template.selector
    out = []
    unresolved = 0
    for link in sorted(links, key=lambda l: (l.verb_synset, l.relation, l.noun_synset)):
        if link.relation != selector.relation:
            continue
        if link.verb_synset not in index or link.noun_synset not in index:
            unresolved += 1
            continue
        verbs = _select(index[link.verb_synset], selector.pos, selector.mapping_relations)
        nouns = _select(index[link.noun_synset], None, selector.noun_mapping_relations)
        for ev, en in product(verbs, nouns):
            if selector.distinct and ev.sumo_concept == en.sumo_concept:
                continue
            out.append((
                {"V": ev.sumo_concept, "N": en.sumo_concept},
                (link.verb_synset, link.relation, link.noun_synset, ev.sumo_concept, en.sumo_concept),
            ))
    if unresolved:
        logger.warning(f"Template {template.id}: skipped {unresolved} links with unmapped synsets")
    return out


def generate_truth_tests(
    mapping: Sequence[MappingEntry],
    antonyms: Sequence[Tuple[str, str]],
    morpholinks: Sequence[MorphoLink],
    templates: Sequence[PatternTemplate],
) -> List[TestCase]:
    """Instantiate every template on every matching tuple; ids are stable per template."""
    index = _mapping_index(mapping)
    tests: List[TestCase] = []
    seen: Set[str] = set()
    for template in sorted(templates, key=lambda t: t.id):
        schema = template_schema(template)
        if template.selector.source == "antonyms":
            tuples = _antonym_tuples(template, index, antonyms)
        else:
            tuples = _morpholink_tuples(template, index, morpholinks)
        count = 0
        for binding, source in tuples:
            conjecture = substitute(schema, binding)
            key = _alpha_key(conjecture)
            if key in seen:
                continue
            seen.add(key)
            count += 1
            tests.append(TestCase(
                id=f"t-{template.id}-{count:04d}",
                kind=TestKind.TRUTH,
                conjecture=conjecture,
                pattern=template.id,
                source=source,
            ))
        logger.info(f"Template {template.id} produced {count} truth-tests")
    return tests


def negate_conjecture(f: Formula) -> Formula:
    return f.body if isinstance(f, Not) else Not(f)


def derive_falsity_tests(truth_tests: Sequence[TestCase]) -> List[TestCase]:
    out = []
    for test in truth_tests:
        if test.kind != TestKind.TRUTH:
            raise ValueError(f"{test.id} is not a truth-test")
        falsity_id = "f-" + test.id[2:] if test.id.startswith("t-") else f"f-{test.id}"
        out.append(TestCase(
            id=falsity_id,
            kind=TestKind.FALSITY,
            conjecture=negate_conjecture(test.conjecture),
            pattern=test.pattern,
            source=test.source,
        ))
    return out


# ---------------------------------------------------------------------------
# Suite files
# ---------------------------------------------------------------------------

def write_suite(path: Union[str, Path], tests: Sequence[TestCase]) -> None:
    ids = [t.id for t in tests]
    if len(set(ids)) != len(ids):
        raise ValueError("test ids must be unique")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in tests:
            record = {
                "id": t.id,
                "kind": t.kind.value,
                "conjecture": render_fof(t.conjecture),
                "pattern": t.pattern,
                "source": list(t.source),
            }
            f.write(json.dumps(record) + "\n")
    logger.success(f"Wrote {len(tests)} tests to {path}")


def read_suite(path: Union[str, Path]) -> List[TestCase]:
    tests = []
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            formula = parse_problem(f"fof(goal, conjecture, {record['conjecture']}).")[0].formula
            tests.append(TestCase(
                id=record["id"],
                kind=TestKind(record["kind"]),
                conjecture=formula,
                pattern=record.get("pattern", ""),
                source=tuple(record.get("source", ())),
            ))
        except (json.JSONDecodeError, KeyError, ValueError, TptpSyntaxError) as e:
            raise UnreadableFile(f"{path}:{number}: invalid test record ({e})") from e
    ids = [t.id for t in tests]
    if len(set(ids)) != len(ids):
        raise UnreadableFile(f"{path}: duplicate test ids")
    return tests
