"""Lexer, parser, and printer for the source language.

A program is two blocks:

    decls { <declarations> }
    goal  { <goal> }

Declarations are `;`-separated and build a right-nested And tree; a
`choice(d0, d1, ...)` groups whole declaration subtrees into a
user-switchable alternative list.  Constants are written `name == expr`,
procedures `name(p1, ..., pk) = { goal }`.  Goals are `;`-separated
statements: `skip`, `x = expr`, `print(x)`, calls, comparisons, and
`choice(g0, g1, ...)`.

Scoping is resolved here so later stages never see raw names: a lowercase
identifier in expression position becomes a ConstRef when any alternative
declares a constant of that name, a Var otherwise; procedure parameters
shadow constants inside their body.  Uppercase-initial identifiers are
symbols, compared by name only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ArityError, EmptyChoiceError, ParseError
from .syntax import (
    And,
    Assign,
    BinOp,
    Call,
    Cond,
    CondG,
    ConstDecl,
    ConstRef,
    Decl,
    Expr,
    Goal,
    IntLit,
    Leaf,
    Print,
    ProcDecl,
    ProgramD,
    Seq,
    SeqChoiceD,
    SeqChoiceG,
    StrLit,
    SymLit,
    Top,
    TOP,
    Var,
    active_view,
)

KEYWORDS = frozenset({"decls", "goal", "choice", "skip", "print"})

MONEY_RE = re.compile(r"\$\d+(?:,\d{3})*(?:\.\d+)?")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
INT_RE = re.compile(r"\d+")

TWO_CHAR_OPS = ("==", "!=", "<=", ">=")
ONE_CHAR_OPS = "=<>+-*/{}(),;"

STRING_ESCAPES = {"\\": "\\", '"': '"', "n": "\n"}


@dataclass(frozen=True)
class Token:
    kind: str  # INT MONEY STRING IDENT OP EOF
    text: str
    line: int
    col: int


def tokenize(text: str, filename: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            parts: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise ParseError("unterminated string", start_line, start_col, filename)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in STRING_ESCAPES:
                        raise ParseError("bad escape in string", line, col, filename)
                    parts.append(STRING_ESCAPES[text[i + 1]])
                    i += 2
                    col += 2
                    continue
                parts.append(c)
                i += 1
                col += 1
            tokens.append(Token("STRING", "".join(parts), start_line, start_col))
            continue
        if ch == "$":
            m = MONEY_RE.match(text, i)
            if not m:
                raise ParseError("stray '$' (amounts look like $1,234 or $5.99)", line, col, filename)
            tokens.append(Token("MONEY", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch.isdigit():
            m = INT_RE.match(text, i)
            tokens.append(Token("INT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = IDENT_RE.match(text, i)
            tokens.append(Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        two = text[i : i + 2]
        if two in TWO_CHAR_OPS:
            tokens.append(Token("OP", two, line, col))
            i += 2
            col += 2
            continue
        if ch in ONE_CHAR_OPS:
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col, filename)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], filename: str):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename
        self.param_stack: list[frozenset[str]] = []
        # side records for the post-parse checks, each with a position
        self.const_rhs_names: list[tuple[str, str, int, int]] = []
        self.calls: list[tuple[str, int, int, int]] = []
        self.assigns: list[tuple[str, int, int]] = []

    # -- token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col, self.filename)

    def expect_op(self, op: str) -> Token:
        t = self.peek()
        if t.kind != "OP" or t.text != op:
            raise self.error(f"expected {op!r}, found {t.text!r}" if t.kind != "EOF" else f"expected {op!r}, found end of input")
        return self.next()

    def at_op(self, op: str) -> bool:
        t = self.peek()
        return t.kind == "OP" and t.text == op

    def at_ident(self, word: str | None = None) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and (word is None or t.text == word)

    def expect_name(self, what: str) -> Token:
        """A lowercase-initial identifier that is not a keyword."""
        t = self.peek()
        if t.kind != "IDENT":
            raise self.error(f"expected {what}")
        if t.text in KEYWORDS:
            raise self.error(f"{t.text!r} is a keyword and cannot be used as {what}")
        if t.text[0].isupper():
            raise self.error(f"{what} must start lowercase; uppercase names are plain symbols")
        return self.next()

    @property
    def params(self) -> frozenset[str]:
        return self.param_stack[-1] if self.param_stack else frozenset()

    # -- program

    def parse_program(self) -> tuple[ProgramD, Goal]:
        if not self.at_ident("decls"):
            raise self.error("program must start with a 'decls' block")
        self.next()
        self.expect_op("{")
        decls = self.parse_decl_seq()
        self.expect_op("}")
        if not self.at_ident("goal"):
            raise self.error("expected a 'goal' block after the declarations")
        self.next()
        self.expect_op("{")
        goal = self.parse_goal_seq()
        self.expect_op("}")
        t = self.peek()
        if t.kind != "EOF":
            raise self.error(f"unexpected {t.text!r} after the goal block")
        return decls, goal

    # -- declarations

    def parse_decl_seq(self) -> ProgramD:
        item = self.parse_decl_item()
        if self.at_op(";"):
            self.next()
            return And(item, self.parse_decl_seq())
        return item

    def parse_decl_item(self) -> ProgramD:
        if self.at_ident("choice"):
            tok = self.next()
            self.expect_op("(")
            alts = [self.parse_decl_seq()]
            while self.at_op(","):
                self.next()
                alts.append(self.parse_decl_seq())
            self.expect_op(")")
            if len(alts) < 2:
                raise EmptyChoiceError(
                    "a choice needs at least two alternatives", tok.line, tok.col, self.filename
                )
            return SeqChoiceD(tuple(alts))
        name_tok = self.expect_name("a declaration name")
        if self.at_op("=="):
            self.next()
            rhs = self.parse_expr(in_const_rhs=name_tok.text)
            return Leaf(ConstDecl(name_tok.text, rhs))
        if self.at_op("("):
            return Leaf(self.parse_proc_decl(name_tok))
        raise self.error(f"expected '==' or '(' after declaration name {name_tok.text!r}")

    def parse_proc_decl(self, name_tok: Token) -> ProcDecl:
        self.expect_op("(")
        params: list[str] = []
        if not self.at_op(")"):
            while True:
                p = self.expect_name("a parameter name")
                if p.text in params:
                    raise self.error(f"duplicate parameter {p.text!r}", p)
                params.append(p.text)
                if self.at_op(","):
                    self.next()
                    continue
                break
        self.expect_op(")")
        self.expect_op("=")
        self.expect_op("{")
        self.param_stack.append(frozenset(params))
        try:
            body = self.parse_goal_seq()
        finally:
            self.param_stack.pop()
        self.expect_op("}")
        head = Call(name_tok.text, tuple(Var(p) for p in params))
        return ProcDecl(tuple(params), head, body)

    # -- goals

    def parse_goal_seq(self) -> Goal:
        g = self.parse_goal_atom()
        if self.at_op(";"):
            self.next()
            return Seq(g, self.parse_goal_seq())
        return g

    def parse_goal_atom(self) -> Goal:
        if self.at_ident("skip"):
            self.next()
            return TOP
        if self.at_ident("print"):
            self.next()
            self.expect_op("(")
            var = self.expect_name("a variable name")
            self.expect_op(")")
            return Print(var.text)
        if self.at_ident("choice"):
            tok = self.next()
            self.expect_op("(")
            alts = [self.parse_goal_seq()]
            while self.at_op(","):
                self.next()
                alts.append(self.parse_goal_seq())
            self.expect_op(")")
            if len(alts) < 2:
                raise EmptyChoiceError(
                    "a choice needs at least two alternatives", tok.line, tok.col, self.filename
                )
            return SeqChoiceG(tuple(alts))
        t = self.peek()
        if t.kind == "IDENT" and t.text[0].islower() and t.text not in KEYWORDS:
            after = self.tokens[self.pos + 1]
            if after.kind == "OP" and after.text == "(":
                name = self.next()
                args = self.parse_call_args()
                self.calls.append((name.text, len(args), name.line, name.col))
                return Call(name.text, args)
            if after.kind == "OP" and after.text == "=":
                name = self.next()
                self.next()
                if name.text in self.params:
                    raise self.error(
                        f"cannot assign to parameter {name.text!r}; parameters are fixed by the call", name
                    )
                self.assigns.append((name.text, name.line, name.col))
                return Assign(name.text, self.parse_expr())
        return CondG(self.parse_cond())

    def parse_call_args(self) -> tuple[Expr, ...]:
        self.expect_op("(")
        if self.at_op(")"):
            self.next()
            return ()
        args = [self.parse_expr()]
        while self.at_op(","):
            self.next()
            args.append(self.parse_expr())
        self.expect_op(")")
        return tuple(args)

    def parse_cond(self) -> Cond:
        left = self.parse_expr()
        t = self.peek()
        if t.kind != "OP" or t.text not in ("==", "!=", "<", "<=", ">", ">="):
            raise self.error("expected a comparison operator")
        self.next()
        right = self.parse_expr()
        return Cond(t.text, left, right)

    # -- expressions

    def parse_expr(self, in_const_rhs: str | None = None) -> Expr:
        e = self.parse_term(in_const_rhs)
        while self.at_op("+") or self.at_op("-"):
            op = self.next().text
            e = BinOp(op, e, self.parse_term(in_const_rhs))
        return e

    def parse_term(self, in_const_rhs: str | None) -> Expr:
        e = self.parse_factor(in_const_rhs)
        while self.at_op("*") or self.at_op("/"):
            op = self.next().text
            e = BinOp(op, e, self.parse_factor(in_const_rhs))
        return e

    def parse_factor(self, in_const_rhs: str | None) -> Expr:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return IntLit(int(t.text))
        if t.kind in ("MONEY", "STRING"):
            self.next()
            return StrLit(t.text)
        if t.kind == "OP" and t.text == "-":
            nxt = self.tokens[self.pos + 1]
            if nxt.kind != "INT":
                raise self.error("'-' may only prefix an integer literal here")
            self.next()
            self.next()
            return IntLit(-int(nxt.text))
        if t.kind == "OP" and t.text == "(":
            self.next()
            e = self.parse_expr(in_const_rhs)
            self.expect_op(")")
            return e
        if t.kind == "IDENT":
            if t.text in KEYWORDS:
                raise self.error(f"{t.text!r} is a keyword and cannot appear in an expression")
            self.next()
            if t.text[0].isupper():
                return SymLit(t.text)
            if in_const_rhs is not None:
                self.const_rhs_names.append((in_const_rhs, t.text, t.line, t.col))
            # a provisional Var; the resolution pass may turn it into ConstRef
            return Var(t.text)
        raise self.error("expected an expression")


# ---------------------------------------------------------------------------
# Name resolution

def _collect_decls(p: ProgramD) -> list[Decl]:
    if isinstance(p, Leaf):
        return [p.decl]
    if isinstance(p, And):
        return _collect_decls(p.left) + _collect_decls(p.right)
    return [d for alt in p.alternatives for d in _collect_decls(alt)]


def _resolve_expr(e: Expr, consts: frozenset[str], params: frozenset[str]) -> Expr:
    if isinstance(e, Var):
        if e.name in params:
            return e
        if e.name in consts:
            return ConstRef(e.name)
        return e
    if isinstance(e, BinOp):
        return BinOp(e.op, _resolve_expr(e.left, consts, params), _resolve_expr(e.right, consts, params))
    return e


def _resolve_goal(g: Goal, consts: frozenset[str], params: frozenset[str]) -> Goal:
    if isinstance(g, (Top, Print)):
        return g
    if isinstance(g, Call):
        return Call(g.name, tuple(_resolve_expr(a, consts, params) for a in g.args))
    if isinstance(g, CondG):
        c = g.cond
        return CondG(Cond(c.op, _resolve_expr(c.left, consts, params), _resolve_expr(c.right, consts, params)))
    if isinstance(g, Assign):
        return Assign(g.var, _resolve_expr(g.expr, consts, params))
    if isinstance(g, Seq):
        return Seq(_resolve_goal(g.first, consts, params), _resolve_goal(g.second, consts, params))
    if isinstance(g, SeqChoiceG):
        return SeqChoiceG(tuple(_resolve_goal(a, consts, params) for a in g.alternatives))
    raise TypeError(f"not a goal: {g!r}")


def _resolve_program(p: ProgramD, consts: frozenset[str]) -> ProgramD:
    if isinstance(p, Leaf):
        d = p.decl
        if isinstance(d, ConstDecl):
            return Leaf(ConstDecl(d.name, _resolve_expr(d.expr, consts, frozenset())))
        shadow = frozenset(d.params)
        return Leaf(ProcDecl(d.params, d.head, _resolve_goal(d.body, consts, shadow)))
    if isinstance(p, And):
        return And(_resolve_program(p.left, consts), _resolve_program(p.right, consts))
    return SeqChoiceD(tuple(_resolve_program(a, consts) for a in p.alternatives))


def parse_program(text: str, filename: str = "<string>") -> tuple[ProgramD, Goal]:
    """Parse and resolve a full program; returns (declarations, goal)."""
    parser = _Parser(tokenize(text, filename), filename)
    raw_decls, raw_goal = parser.parse_program()

    all_decls = _collect_decls(raw_decls)
    consts = frozenset(d.name for d in all_decls if isinstance(d, ConstDecl))
    proc_arities: dict[str, set[int]] = {}
    for d in all_decls:
        if isinstance(d, ProcDecl):
            proc_arities.setdefault(d.name, set()).add(d.arity)

    for owner, name, line, col in parser.const_rhs_names:
        if name not in consts:
            raise ParseError(
                f"constant {owner!r} refers to {name!r}, which no alternative declares as a constant",
                line,
                col,
                filename,
            )
    for var, line, col in parser.assigns:
        if var in consts:
            raise ParseError(f"cannot assign to {var!r}: it is declared as a constant", line, col, filename)
    for name, arity, line, col in parser.calls:
        if name in proc_arities and arity not in proc_arities[name]:
            declared = ", ".join(str(a) for a in sorted(proc_arities[name]))
            raise ArityError(
                f"call to {name!r} with {arity} argument(s); declared with {declared}", line, col, filename
            )

    decls = _resolve_program(raw_decls, consts)
    goal = _resolve_goal(raw_goal, consts, frozenset())
    return decls, goal


def parse_decls_text(text: str, filename: str = "<string>") -> ProgramD:
    """Parse a bare declaration list (no 'decls { }' wrapper)."""
    parser = _Parser(tokenize(text, filename), filename)
    decls = parser.parse_decl_seq()
    if parser.peek().kind != "EOF":
        raise parser.error("unexpected input after the declarations")
    consts = frozenset(d.name for d in _collect_decls(decls) if isinstance(d, ConstDecl))
    return _resolve_program(decls, consts)


def parse_goal_text(text: str, filename: str = "<string>") -> Goal:
    """Parse a bare goal (no 'goal { }' wrapper); every name stays a Var."""
    parser = _Parser(tokenize(text, filename), filename)
    goal = parser.parse_goal_seq()
    if parser.peek().kind != "EOF":
        raise parser.error("unexpected input after the goal")
    return goal


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _needs_quotes(s: str) -> bool:
    return not MONEY_RE.fullmatch(s)


def pretty_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, StrLit):
        if _needs_quotes(e.value):
            body = e.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            return f'"{body}"'
        return e.value
    if isinstance(e, SymLit):
        return e.name
    if isinstance(e, (Var, ConstRef)):
        return e.name
    if isinstance(e, BinOp):
        left = pretty_expr(e.left)
        right = pretty_expr(e.right)
        if isinstance(e.left, BinOp) and _PREC[e.left.op] < _PREC[e.op]:
            left = f"({left})"
        if isinstance(e.right, BinOp) and _PREC[e.right.op] <= _PREC[e.op]:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def pretty_cond(c: Cond) -> str:
    return f"{pretty_expr(c.left)} {c.op} {pretty_expr(c.right)}"


def pretty_goal(g: Goal) -> str:
    if isinstance(g, Top):
        return "skip"
    if isinstance(g, Print):
        return f"print({g.var})"
    if isinstance(g, Call):
        return f"{g.name}({', '.join(pretty_expr(a) for a in g.args)})"
    if isinstance(g, CondG):
        return pretty_cond(g.cond)
    if isinstance(g, Assign):
        return f"{g.var} = {pretty_expr(g.expr)}"
    if isinstance(g, Seq):
        return f"{pretty_goal(g.first)}; {pretty_goal(g.second)}"
    if isinstance(g, SeqChoiceG):
        return f"choice({', '.join(pretty_goal(a) for a in g.alternatives)})"
    raise TypeError(f"not a goal: {g!r}")


def pretty_decl(d: Decl) -> str:
    if isinstance(d, ConstDecl):
        return f"{d.name} == {pretty_expr(d.expr)}"
    params = ", ".join(d.params)
    return f"{d.name}({params}) = {{ {pretty_goal(d.body)} }}"


def pretty_program(p: ProgramD) -> str:
    if isinstance(p, Leaf):
        return pretty_decl(p.decl)
    if isinstance(p, And):
        return f"{pretty_program(p.left)}; {pretty_program(p.right)}"
    if isinstance(p, SeqChoiceD):
        return f"choice({', '.join(pretty_program(a) for a in p.alternatives)})"
    raise TypeError(f"not a declaration tree: {p!r}")


def _decl_items(p: ProgramD) -> list[ProgramD]:
    """Split the top-level And spine back into `;`-separated items."""
    if isinstance(p, And):
        return [p.left] + _decl_items(p.right)
    return [p]


def format_program(p: ProgramD, g: Goal) -> str:
    """Canonical block layout, stable under reformatting."""
    lines = ["decls {"]
    items = _decl_items(p)
    for i, item in enumerate(items):
        sep = ";" if i < len(items) - 1 else ""
        lines.append(f"  {pretty_program(item)}{sep}")
    lines.append("}")
    lines.append("")
    lines.append("goal {")
    if isinstance(g, SeqChoiceG):
        lines.append("  choice(")
        for i, alt in enumerate(g.alternatives):
            sep = "," if i < len(g.alternatives) - 1 else ""
            lines.append(f"    {pretty_goal(alt)}{sep}")
        lines.append("  )")
    else:
        lines.append(f"  {pretty_goal(g)}")
    lines.append("}")
    return "\n".join(lines) + "\n"
