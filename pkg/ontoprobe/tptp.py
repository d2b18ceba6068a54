"""
TPTP FOF codec
Injective symbol encoding, formula rendering and a parser for the FOF subset we emit
"""
import re
import string
from dataclasses import dataclass
from typing import List, Optional, Tuple

from loguru import logger

from ontoprobe.constants import TPTP_SYMBOL_PREFIX, TPTP_VARIABLE_PREFIX
from ontoprobe.errors import TptpSyntaxError, UnencodableSymbol
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
)

_SAFE = frozenset(string.ascii_letters + string.digits)
_NAME_RE = re.compile(r"^([a-z][A-Za-z0-9_]*|[0-9]+)$")


# ---------------------------------------------------------------------------
# Symbol encoding
# ---------------------------------------------------------------------------

def _escape(name: str) -> str:
    if not name:
        raise UnencodableSymbol("empty identifier")
    out = []
    for ch in name:
        if ch in _SAFE:
            out.append(ch)
        elif ch == "_":
            out.append("__")
        elif ord(ch) < 32 or ord(ch) == 127:
            raise UnencodableSymbol(f"control character in identifier {name!r}")
        else:
            out.append(f"_u{ord(ch):x}_")
    return "".join(out)


def _unescape(text: str) -> Optional[str]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in _SAFE:
            out.append(ch)
            i += 1
        elif text.startswith("__", i):
            out.append("_")
            i += 2
        elif text.startswith("_u", i):
            end = text.find("_", i + 2)
            if end < 0:
                return None
            try:
                out.append(chr(int(text[i + 2:end], 16)))
            except ValueError:
                return None
            i = end + 1
        else:
            return None
    return "".join(out) if out else None


def encode_symbol(name: str) -> str:
    return TPTP_SYMBOL_PREFIX + _escape(name)


def decode_symbol(token: str) -> str:
    if token.startswith(TPTP_SYMBOL_PREFIX):
        decoded = _unescape(token[len(TPTP_SYMBOL_PREFIX):])
        if decoded is not None:
            return decoded
    return token


def encode_variable(name: str) -> str:
    return TPTP_VARIABLE_PREFIX + _escape(name)


def decode_variable(token: str) -> str:
    if token.startswith(TPTP_VARIABLE_PREFIX) and len(token) > 1:
        decoded = _unescape(token[1:])
        if decoded is not None:
            return decoded
    return token


def check_name(name: str) -> str:
    """Annotated-formula names must be TPTP lower words or integers."""
    if not _NAME_RE.match(name):
        raise UnencodableSymbol(f"'{name}' is not a valid TPTP formula name")
    return name


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_term(t: Term) -> str:
    if isinstance(t, Constant):
        return encode_symbol(t.name)
    if isinstance(t, Variable):
        return encode_variable(t.name)
    if isinstance(t, Compound) and isinstance(t.head, Constant):
        return encode_symbol(t.head.name) + "(" + ",".join(render_term(a) for a in t.args) + ")"
    raise UnencodableSymbol(f"term has no first-order encoding: {t!r}")


def render_fof(f: Formula) -> str:
    """Fully parenthesized TPTP FOF text for a first-order formula."""
    if isinstance(f, Atom):
        if not isinstance(f.predicate, Constant):
            raise UnencodableSymbol(f"predicate position holds a non-constant: {f.predicate!r}")
        head = encode_symbol(f.predicate.name)
        if not f.args:
            return head
        return head + "(" + ",".join(render_term(a) for a in f.args) + ")"
    if isinstance(f, Equal):
        return f"({render_term(f.lhs)} = {render_term(f.rhs)})"
    if isinstance(f, Not):
        return f"~ {render_fof(f.body)}"
    if isinstance(f, And):
        return "(" + " & ".join(render_fof(i) for i in f.items) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(render_fof(i) for i in f.items) + ")"
    if isinstance(f, Implies):
        return f"({render_fof(f.lhs)} => {render_fof(f.rhs)})"
    if isinstance(f, Iff):
        return f"({render_fof(f.lhs)} <=> {render_fof(f.rhs)})"
    quantifier = "!" if isinstance(f, Forall) else "?"
    names = ",".join(encode_variable(v.name) for v in f.variables)
    return f"({quantifier} [{names}] : {render_fof(f.body)})"


def render_annotated(name: str, role: str, f: Formula) -> str:
    return f"fof({check_name(name)}, {role}, {render_fof(f)})."


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>%[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<op><=>|<~>|=>|<=|~\||~&|!=|[()\[\],.:!?~&|=])
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<distinct>"(?:[^"\\]|\\.)*")
  | (?P<dollar>\$\$?[a-z][A-Za-z0-9_]*)
  | (?P<number>[+-]?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(slots=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _lex(text: str) -> List[_Tok]:
    tokens: List[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TptpSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "line_comment", "block_comment"):
            tokens.append(_Tok(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.pos = 0

    # token helpers
    def peek(self, offset: int = 0) -> Optional[_Tok]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def error(self, message: str) -> TptpSyntaxError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Tok("eof", "", 1, 1)
            return TptpSyntaxError(f"{message} at end of input", last.line, last.column)
        return TptpSyntaxError(f"{message}, found {tok.text!r}", tok.line, tok.column)

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.error(f"expected '{text}'")

    # grammar
    def problem(self) -> List[AnnotatedFormula]:
        out: List[AnnotatedFormula] = []
        while self.peek() is not None:
            head = self.next()
            if head.kind != "lower":
                raise TptpSyntaxError(f"expected an annotated formula, found {head.text!r}", head.line, head.column)
            if head.text == "include":
                self.expect("(")
                self.skip_until_close()
                self.expect(".")
                logger.warning(f"Ignoring TPTP include at line {head.line}")
                continue
            if head.text not in ("fof", "cnf"):
                raise TptpSyntaxError(f"unsupported language '{head.text}'", head.line, head.column)
            self.expect("(")
            name_tok = self.next()
            name = name_tok.text.strip("'") if name_tok.kind == "quoted" else name_tok.text
            self.expect(",")
            role = self.next().text
            self.expect(",")
            formula = self.formula()
            if self.accept(","):
                self.skip_until_close()
            else:
                self.expect(")")
            self.expect(".")
            out.append(AnnotatedFormula(name, role, formula))
        return out

    def skip_until_close(self) -> None:
        """Consume a balanced annotation up to and including the closing ')'."""
        depth = 0
        while True:
            tok = self.next()
            if tok.kind == "op" and tok.text in "([":
                depth += 1
            elif tok.kind == "op" and tok.text in ")]":
                if depth == 0:
                    return
                depth -= 1

    def formula(self) -> Formula:
        left = self.unitary()
        tok = self.peek()
        if tok is None or tok.kind != "op":
            return left
        if tok.text in ("&", "|"):
            op = tok.text
            items = [left]
            while self.accept(op):
                items.append(self.unitary())
            return And(tuple(items)) if op == "&" else Or(tuple(items))
        if tok.text in ("=>", "<=", "<=>", "<~>", "~|", "~&"):
            self.pos += 1
            right = self.unitary()
            if tok.text == "=>":
                return Implies(left, right)
            if tok.text == "<=":
                return Implies(right, left)
            if tok.text == "<=>":
                return Iff(left, right)
            if tok.text == "<~>":
                return Not(Iff(left, right))
            if tok.text == "~|":
                return Not(Or((left, right)))
            return Not(And((left, right)))
        return left

    def unitary(self) -> Formula:
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("~"):
            return Not(self.unitary())
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in ("!", "?"):
            self.pos += 1
            self.expect("[")
            variables = [self.variable()]
            while self.accept(","):
                variables.append(self.variable())
            self.expect("]")
            self.expect(":")
            body = self.unitary()
            return Forall(tuple(variables), body) if tok.text == "!" else Exists(tuple(variables), body)
        return self.atom()

    def variable(self) -> Variable:
        tok = self.next()
        if tok.kind != "upper":
            raise TptpSyntaxError(f"expected a variable, found {tok.text!r}", tok.line, tok.column)
        return Variable(decode_variable(tok.text))

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is not None and tok.kind == "dollar":
            raise self.error("unsupported defined symbol")
        left = self.term()
        if self.accept("="):
            return Equal(left, self.term())
        if self.accept("!="):
            return Not(Equal(left, self.term()))
        if isinstance(left, Variable):
            raise self.error("variable used as a formula")
        if isinstance(left, Compound):
            return Atom(left.head, left.args)
        return Atom(left, ())

    def term(self) -> Term:
        tok = self.next()
        if tok.kind == "upper":
            return Variable(decode_variable(tok.text))
        if tok.kind in ("number", "distinct"):
            return Constant(tok.text)
        if tok.kind == "quoted":
            name = tok.text[1:-1].replace("\\'", "'").replace("\\\\", "\\")
        elif tok.kind == "lower":
            name = decode_symbol(tok.text)
        else:
            raise TptpSyntaxError(f"expected a term, found {tok.text!r}", tok.line, tok.column)
        if self.accept("("):
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            return Compound(Constant(name), tuple(args))
        return Constant(name)


def parse_problem(text: str) -> List[AnnotatedFormula]:
    """Parse fof/cnf annotated formulas; annotations after the formula are skipped."""
    return _Parser(text).problem()


def split_problem(text: str) -> Tuple[List[AnnotatedFormula], List[AnnotatedFormula]]:
    """Separate conjectures from the premises of a problem."""
    premises, conjectures = [], []
    for item in parse_problem(text):
        (conjectures if item.role in ("conjecture", "negated_conjecture") else premises).append(item)
    return premises, conjectures
