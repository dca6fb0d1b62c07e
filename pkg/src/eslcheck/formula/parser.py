"""Recursive-descent parser and printer for the ASCII formula syntax.

Binding strength, loosest first::

    exists x . f / forall x . f     (scope extends as far right as possible)
    f -> g                          (right associative)
    f | g
    f & g
    ~ AX EX AF EF AG EG  K a  D{..}  C{..}  E{..}  <<H>>_C{G}

Atoms are ``true``, ``false``, propositions, ``(f)``, ``A[f U g]``,
``E[f U g]``, ``loc(i, x)`` and ``loc({i, j}, x)``.  Agents inside groups and
``loc`` are plain names, ``sigma(name)`` or ``env``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from eslcheck.formula.nodes import (
    AF, AG, AU, AX, EF, EG, EU, EX, And, Base, C, Coalition, D, Env, Everyone, ExistsG,
    FalseF, ForallG, Formula, Implies, Knows, LocEq, LocGroup, Not, Or, Prop, Sigma,
    TrueF, sorted_group,
)

KEYWORDS = frozenset(
    {
        "true", "false", "A", "E", "U", "AX", "EX", "AF", "EF", "AG", "EG",
        "K", "D", "C", "exists", "forall", "loc", "sigma", "env",
    }
)
UNARY_TEMPORAL = {"AX": AX, "EX": EX, "AF": AF, "EF": EF, "AG": AG, "EG": EG}
COALITION_KINDS = {"_C": "C", "_D": "D", "_E": "E"}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><<|>>|->|[~&|(){}\[\],.])"
)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, column: int):
        self.msg = msg
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {msg}")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "op" or "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = line_start = 0
    line = 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            ch = text[pos]
            what = "non-ASCII character" if ord(ch) > 127 else "unexpected character"
            raise FormulaSyntaxError(f"{what} {ch!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line += 1
                    line_start = i + 1
        else:
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        if tok.kind == "eof":
            msg = f"{msg} at end of input"
        else:
            msg = f"{msg}, found {tok.text!r}"
        raise FormulaSyntaxError(msg, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def name(self, what: str) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected {what}")
        self.advance()
        return t.text

    # grammar ----------------------------------------------------------------

    def formula(self) -> Formula:
        f = self.implication()
        if self.tok.kind != "eof":
            self.error("unexpected token")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "op":
            if t.text == "~":
                self.advance()
                return Not(self.unary())
            if t.text == "<<":
                return self.coalition()
            return self.atom()
        if t.kind != "ident":
            return self.atom()
        word = t.text
        if word in UNARY_TEMPORAL:
            self.advance()
            return UNARY_TEMPORAL[word](self.unary())
        if word in ("exists", "forall"):
            self.advance()
            var = self.name("variable")
            self.expect(".")
            body = self.implication()
            return ExistsG(var, body) if word == "exists" else ForallG(var, body)
        if word == "K":
            self.advance()
            who = self.agent()
            return Knows(who, self.unary())
        if word in ("D", "C"):
            self.advance()
            group = self.group()
            return (D if word == "D" else C)(group, self.unary())
        if word == "E" and self.peek().text == "{":
            self.advance()
            group = self.group()
            return Everyone(group, self.unary())
        return self.atom()

    def coalition(self) -> Formula:
        self.expect("<<")
        members: list[str] = []
        if not self.at(">>"):
            members.append(self.name("agent name"))
            while self.at(","):
                self.advance()
                members.append(self.name("agent name"))
        self.expect(">>")
        t = self.tok
        if t.kind != "ident" or t.text not in COALITION_KINDS:
            self.error("expected '_C', '_D' or '_E' after coalition")
        self.advance()
        group = self.group()
        return Coalition(tuple(dict.fromkeys(members)), COALITION_KINDS[t.text], group, self.unary())

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "eof":
            self.error("expected a formula")
        if t.text == "(":
            self.advance()
            f = self.implication()
            self.expect(")")
            return f
        if t.kind != "ident":
            self.error("expected a formula")
        if t.text == "true":
            self.advance()
            return TrueF()
        if t.text == "false":
            self.advance()
            return FalseF()
        if t.text in ("A", "E"):
            if self.peek().text != "[":
                self.error("path quantifier must be fused with a temporal operator", t)
            self.advance()
            self.advance()
            left = self.implication()
            self.expect("U")
            right = self.implication()
            self.expect("]")
            return (AU if t.text == "A" else EU)(left, right)
        if t.text == "loc":
            self.advance()
            self.expect("(")
            if self.at("{"):
                brace = self.tok
                group = self.group()
                if not group:
                    self.error("loc needs a nonempty group", brace)
                self.expect(",")
                var = self.name("variable")
                self.expect(")")
                return LocGroup(group, var)
            who = self.agent()
            self.expect(",")
            var = self.name("variable")
            self.expect(")")
            return LocEq(who, var)
        if t.text in KEYWORDS:
            self.error("unexpected keyword")
        self.advance()
        return Prop(t.text)

    def agent(self):
        if self.at("env"):
            self.advance()
            return Env()
        if self.at("sigma"):
            self.advance()
            self.expect("(")
            name = self.name("agent name")
            self.expect(")")
            return Sigma(name)
        return Base(self.name("agent name"))

    def group(self) -> frozenset:
        self.expect("{")
        members = []
        if not self.at("}"):
            members.append(self.agent())
            while self.at(","):
                self.advance()
                members.append(self.agent())
        self.expect("}")
        return frozenset(members)


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST that may still contain derived forms."""
    return _Parser(text).formula()


def parse_formula_file(text: str) -> list[Formula]:
    """One formula per line; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        try:
            out.append(parse_formula(line))
        except FormulaSyntaxError as exc:
            raise FormulaSyntaxError(exc.msg, lineno, exc.column) from None
    return out


# -- printing ----------------------------------------------------------------

_QUANT, _IMPL, _OR, _AND, _UNARY = range(5)


def _agent(w) -> str:
    return str(w)


def _group(g) -> str:
    return "{" + ",".join(_agent(w) for w in sorted_group(g)) + "}"


def _prec(f: Formula) -> int:
    if isinstance(f, (ExistsG, ForallG)):
        return _QUANT
    if isinstance(f, Implies):
        return _IMPL
    if isinstance(f, Or):
        return _OR
    if isinstance(f, And):
        return _AND
    return _UNARY


def _show(f: Formula, need: int) -> str:
    s = _render(f)
    return f"({s})" if _prec(f) < need else s


def _render(f: Formula) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return "~" + _show(f.sub, _UNARY)
    if isinstance(f, And):
        return f"{_show(f.left, _AND)} & {_show(f.right, _UNARY)}"
    if isinstance(f, Or):
        return f"{_show(f.left, _OR)} | {_show(f.right, _AND)}"
    if isinstance(f, Implies):
        return f"{_show(f.left, _OR)} -> {_show(f.right, _IMPL)}"
    if isinstance(f, (ExistsG, ForallG)):
        word = "exists" if isinstance(f, ExistsG) else "forall"
        return f"{word} {f.var} . {_render(f.sub)}"
    for name, cls in UNARY_TEMPORAL.items():
        if type(f) is cls:
            return f"{name} {_show(f.sub, _UNARY)}"
    if isinstance(f, AU):
        return f"A[{_render(f.left)} U {_render(f.right)}]"
    if isinstance(f, EU):
        return f"E[{_render(f.left)} U {_render(f.right)}]"
    if isinstance(f, D):
        return f"D{_group(f.group)} {_show(f.sub, _UNARY)}"
    if isinstance(f, C):
        return f"C{_group(f.group)} {_show(f.sub, _UNARY)}"
    if isinstance(f, Everyone):
        return f"E{_group(f.group)} {_show(f.sub, _UNARY)}"
    if isinstance(f, Knows):
        return f"K {_agent(f.who)} {_show(f.sub, _UNARY)}"
    if isinstance(f, LocEq):
        return f"loc({_agent(f.who)}, {f.var})"
    if isinstance(f, LocGroup):
        return f"loc({_group(f.group)}, {f.var})"
    if isinstance(f, Coalition):
        return f"<<{','.join(f.coalition)}>>_{f.kind}{_group(f.group)} {_show(f.sub, _UNARY)}"
    raise TypeError(f"not a formula node: {f!r}")


def unparse(f: Formula) -> str:
    """Render ``f`` in concrete syntax that parses back to the same AST."""
    return _render(f)
