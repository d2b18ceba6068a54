import pytest
from hypothesis import given
from hypothesis import strategies as st

from ontoprobe.constants import LOGICAL_OPERATORS
from ontoprobe.errors import EmptyExpression, MalformedFormula, MalformedQuantifier, UnbalancedParens
from ontoprobe.kif import (
    And,
    Atom,
    Compound,
    Constant,
    Embedded,
    Equal,
    Exists,
    Forall,
    FormulaKind,
    Iff,
    Implies,
    Not,
    Or,
    RowVariable,
    Variable,
    classify_formula,
    collect_variables,
    conjoin,
    free_variables_in_order,
    is_non_logical,
    load_kif_file,
    parse_suo_kif,
    render_formula,
)
from tests.helpers import kif, one

identifiers = st.from_regex(r"[A-Za-z][A-Za-z0-9_-]{0,8}", fullmatch=True).filter(lambda s: s not in LOGICAL_OPERATORS)
variable_names = st.from_regex(r"[A-Z][A-Z0-9]{0,3}", fullmatch=True)
constants = identifiers.map(Constant)
variables = variable_names.map(Variable)
strings = st.text(alphabet="abc XYZ;()?@", max_size=8).map(lambda s: Constant(f'"{s}"'))
terms = st.recursive(
    st.one_of(constants, variables, strings, variable_names.map(RowVariable)),
    lambda inner: st.builds(Compound, constants, st.lists(inner, min_size=1, max_size=3).map(tuple)),
    max_leaves=6,
)
predicates = st.one_of(constants, variables)


def _embed(f):
    # a bare atom in argument position reads back as a function term
    return Embedded(Not(f) if isinstance(f, Atom) else f)


def _connectives(inner):
    bound = st.lists(variables, min_size=1, max_size=3, unique=True).map(tuple)
    several = st.lists(inner, min_size=2, max_size=3).map(tuple)
    return st.one_of(
        st.builds(Not, inner),
        st.builds(And, several),
        st.builds(Or, several),
        st.builds(Implies, inner, inner),
        st.builds(Iff, inner, inner),
        st.builds(Forall, bound, inner),
        st.builds(Exists, bound, inner),
        st.builds(Atom, predicates, st.tuples(inner.map(_embed), terms)),
    )


formulas = st.recursive(
    st.one_of(
        st.builds(Atom, predicates, st.lists(terms, max_size=3).map(tuple)),
        st.builds(Equal, terms, terms),
    ),
    _connectives,
    max_leaves=12,
)


def test_parse_subclass_atom():
    assert one("(subclass Dog Animal)") == Atom(Constant("subclass"), (Constant("Dog"), Constant("Animal")))


def test_parse_quantified_implication():
    f = one("(forall (?X) (=> (instance ?X Dog) (instance ?X Animal)))")
    x = Variable("X")
    assert f == Forall((x,), Implies(
        Atom(Constant("instance"), (x, Constant("Dog"))),
        Atom(Constant("instance"), (x, Constant("Animal"))),
    ))


def test_parse_connectives_and_equality():
    f = one("(or (not (p a)) (and (q a) (r a)) (equal a (MotherFn b)))")
    assert isinstance(f, Or)
    assert isinstance(f.items[0], Not)
    assert isinstance(f.items[1], And)
    assert f.items[2] == Equal(Constant("a"), Compound(Constant("MotherFn"), (Constant("b"),)))


def test_single_conjunct_collapses():
    assert one("(and (p a))") == one("(p a)")
    with pytest.raises(ValueError):
        And((one("(p a)"),))
    assert conjoin([one("(p a)")]) == one("(p a)")


def test_row_variable_and_string_constant():
    f = one('(documentation Dog EnglishLanguage "A \\"good\\" dog.")')
    assert f.args[2] == Constant('"A \\"good\\" dog."')
    g = one("(partition ?C @ROW)")
    assert g.args == (Variable("C"), RowVariable("ROW"))


def test_operator_in_argument_position_is_embedded():
    f = one("(holdsDuring ?T (not (attribute ?X Dead)))")
    assert isinstance(f.args[1], Embedded)
    assert isinstance(f.args[1].formula, Not)


def test_comments_are_ignored():
    assert kif(";; header\n(p a) ; trailing\n;; (q b)\n") == [one("(p a)")]


def test_statements_keep_source_locations():
    parsed = parse_suo_kif("(p a)\n\n  (q b)", "onto.kif")
    assert [(loc.line, loc.column) for _, loc in parsed] == [(1, 1), (3, 3)]
    assert str(parsed[1][1]) == "onto.kif:3:3"


@pytest.mark.parametrize(
    "text, error",
    [
        ("(instance a b", UnbalancedParens),
        (")", UnbalancedParens),
        ("()", EmptyExpression),
        ("(p ())", EmptyExpression),
        ("(forall ?X (p ?X))", MalformedQuantifier),
        ("(exists () (p a))", MalformedQuantifier),
        ("(forall (?X ?X) (p ?X))", MalformedQuantifier),
        ("(not (p a) (q b))", MalformedFormula),
        ("(=> (p a))", MalformedFormula),
        ("(equal a)", MalformedFormula),
        ("instance", MalformedFormula),
        ('(p "unterminated)', MalformedFormula),
        ("(@ROW a)", MalformedFormula),
    ],
)
def test_syntax_errors(text, error):
    with pytest.raises(error):
        parse_suo_kif(text)


def test_syntax_error_points_at_expression():
    with pytest.raises(MalformedQuantifier) as info:
        parse_suo_kif("(p a)\n(exists (?X) (q ?X) extra)", "x.kif")
    assert info.value.location.line == 2
    assert info.value.location.column == 1
    assert str(info.value).startswith("x.kif:2:1:")


def test_collect_variables_separates_free_and_row():
    f = one("(=> (and (instance ?X ?C) (exists (?Y) (r ?X ?Y))) (s ?Z @ROW))")
    free, row = collect_variables(f)
    assert free == {Variable("X"), Variable("C"), Variable("Z")}
    assert row == {RowVariable("ROW")}


def test_free_variables_in_order():
    f = one("(=> (r ?B ?A) (exists (?C) (r ?A ?C ?B)))")
    assert free_variables_in_order(f) == [Variable("B"), Variable("A")]


@pytest.mark.parametrize(
    "text, kind",
    [
        ("(subclass Dog Animal)", FormulaKind.UNIT_CLAUSE),
        ("(equal a b)", FormulaKind.UNIT_CLAUSE),
        ("(instance ?X Dog)", FormulaKind.GENERAL_CLAUSE),
        ("(not (instance fido Cat))", FormulaKind.GENERAL_CLAUSE),
        ("(and (p a) (q a))", FormulaKind.GENERAL_CLAUSE),
        ("(forall (?X) (p ?X))", FormulaKind.GENERAL_CLAUSE),
    ],
)
def test_classify(text, kind):
    assert classify_formula(one(text)) == kind


def test_documentation_is_non_logical():
    assert is_non_logical(one('(documentation Dog EnglishLanguage "dog")'))
    assert not is_non_logical(one("(subclass Dog Animal)"))


def test_render_formula_canonical_text():
    text = "(forall (?X ?Y) (=> (and (r ?X ?Y) (not (equal ?X ?Y))) (exists (?Z) (or (p ?Z) (q (SuccFn ?Z))))))"
    assert render_formula(one(text)) == text


def test_toy_ontology_renders_to_a_fixpoint(toy_dir):
    for name in ("top.kif", "mid.kif"):
        parsed = [f for f, _ in load_kif_file(toy_dir / name)]
        rendered = "\n".join(render_formula(f) for f in parsed)
        assert kif(rendered) == parsed


def test_variable_names_are_checked():
    with pytest.raises(ValueError):
        Variable("has space")
    with pytest.raises(ValueError):
        Exists((), one("(p a)"))


@given(formulas)
def test_rendered_formulas_parse_back_unchanged(f):
    text = render_formula(f)
    assert "\n" not in text
    assert [g for g, _ in parse_suo_kif(text)] == [f]
