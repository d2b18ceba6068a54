import pytest
from hypothesis import given
from hypothesis import strategies as st

from ontoprobe.errors import TptpSyntaxError, UnencodableSymbol
from ontoprobe.kif import Atom, Constant, Equal, Exists, Forall, Implies, Not, Variable
from ontoprobe.tptp import (
    check_name,
    decode_symbol,
    decode_variable,
    encode_symbol,
    encode_variable,
    parse_problem,
    render_annotated,
    render_fof,
    split_problem,
)
from tests.helpers import one

names = st.text(
    alphabet=st.characters(min_codepoint=33, max_codepoint=0x2FF, exclude_characters='()";\x7f'),
    min_size=1,
    max_size=12,
)


@given(names, names)
def test_symbol_encoding_is_injective(a, b):
    if a != b:
        assert encode_symbol(a) != encode_symbol(b)
    assert decode_symbol(encode_symbol(a)) == a


@given(names)
def test_variable_encoding_is_reversible(name):
    token = encode_variable(name)
    assert token[0].isupper()
    assert decode_variable(token) == name


@pytest.mark.parametrize(
    "name, token",
    [
        ("Dog", "s__Dog"),
        ("agent", "s__agent"),
        ("holds_3", "s__holds__3"),
        ("part-of", "s__part_u2d_of"),
        ("=>", "s___u3d__u3e_"),
    ],
)
def test_symbol_encoding_examples(name, token):
    assert encode_symbol(name) == token


def test_control_characters_cannot_be_encoded():
    with pytest.raises(UnencodableSymbol):
        encode_symbol("bad\tname")
    with pytest.raises(UnencodableSymbol):
        encode_symbol("")


def test_render_fof():
    f = one("(forall (?X) (=> (instance ?X Dog) (exists (?Y) (and (mother ?X ?Y) (not (equal ?X ?Y))))))")
    assert render_fof(f) == (
        "(! [VX] : (s__instance(VX,s__Dog) => "
        "(? [VY] : (s__mother(VX,VY) & ~ (VX = VY)))))"
    )


def test_render_annotated_checks_names():
    f = one("(subclass Dog Animal)")
    assert render_annotated("top_1", "axiom", f) == "fof(top_1, axiom, s__subclass(s__Dog,s__Animal))."
    with pytest.raises(UnencodableSymbol):
        render_annotated("Top-1", "axiom", f)
    assert check_name("42") == "42"


def test_parse_problem_reads_back_rendered_formulas():
    f = one("(forall (?X ?Y) (<=> (r ?X ?Y) (or (p ?X) (not (q ?Y)))))")
    text = render_annotated("mid_1", "axiom", f) + "\n" + render_annotated("goal", "conjecture", one("(p a)"))
    premises, conjectures = split_problem(text)
    assert [p.name for p in premises] == ["mid_1"]
    assert premises[0].formula == f
    assert conjectures[0].formula == Atom(Constant("p"), (Constant("a"),))


def test_parser_skips_comments_annotations_and_includes():
    text = """
    % a comment
    /* a block
       comment */
    include('Axioms/SUMO.ax').
    fof(a1, axiom, ![X]: (p(X) => q(X)), file('x.p', a1), [extra]).
    cnf(c1, negated_conjecture, ~ q(b)).
    fof(e1, axiom, a != b).
    """
    items = parse_problem(text)
    assert [(i.name, i.role) for i in items] == [("a1", "axiom"), ("c1", "negated_conjecture"), ("e1", "axiom")]
    x = Variable("X")
    assert items[0].formula == Forall((x,), Implies(Atom(Constant("p"), (x,)), Atom(Constant("q"), (x,))))
    assert items[1].formula == Not(Atom(Constant("q"), (Constant("b"),)))
    assert items[2].formula == Not(Equal(Constant("a"), Constant("b")))


def test_parser_reads_reverse_implication_and_quoted_names():
    (item,) = parse_problem("fof('my name', axiom, ?[X] : (p(X) <= 'Big Name'(X))).")
    x = Variable("X")
    assert item.name == "my name"
    assert item.formula == Exists((x,), Implies(Atom(Constant("Big Name"), (x,)), Atom(Constant("p"), (x,))))


@pytest.mark.parametrize(
    "text, line",
    [
        ("fof(a, axiom, p(a)", 1),
        ("fof(a, axiom, p(a)).\nfof(b, axiom, & q).", 2),
        ("tff(a, axiom, p).", 1),
        ("fof(a, axiom, $true).", 1),
        ("fof(a, axiom, p(a)) #", 1),
    ],
)
def test_parse_errors_carry_a_position(text, line):
    with pytest.raises(TptpSyntaxError) as info:
        parse_problem(text)
    assert info.value.line == line
