import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import jet
from .jet import Jet2, JetDomainError


class ExpressionError(Exception):
    pass


class ExprSyntaxError(ExpressionError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownIdentifierError(ExpressionError):
    def __init__(self, symbol: str, line: int, column: int, kind: str = "identifier"):
        super().__init__(f"line {line}, column {column}: unknown {kind} '{symbol}'")
        self.symbol = symbol
        self.line = line
        self.column = column


class ExprDomainError(ExpressionError):
    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str
    index: int


@dataclass(frozen=True)
class Const:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


FUNCTIONS = {
    "sin":   (1, jet.sin),
    "cos":   (1, jet.cos),
    "tan":   (1, jet.tan),
    "exp":   (1, jet.exp),
    "log":   (1, jet.log),
    "sqrt":  (1, jet.sqrt),
    "abs":   (1, jet.fabs),
    "atan2": (2, jet.atan2),
}

DEFAULT_CONSTANTS = {"pi": math.pi, "e": math.e}


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOK_NUM, _TOK_IDENT        = "NUM", "IDENT"
_TOK_OP                     = "OP"
_TOK_LPAREN, _TOK_RPAREN    = "LP", "RP"
_TOK_COMMA, _TOK_EOF        = "COMMA", "EOF"


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(source)
    line, line_start = 1, 0
    while i < n:
        c = source[i]
        col = i - line_start + 1
        if c == "\n":
            i += 1
            line, line_start = line + 1, i
        elif c in " \t\r":
            i += 1
        elif c in "+-*/^":
            tokens.append(_Token(_TOK_OP, c, line, col)); i += 1
        elif c == "(":
            tokens.append(_Token(_TOK_LPAREN, c, line, col)); i += 1
        elif c == ")":
            tokens.append(_Token(_TOK_RPAREN, c, line, col)); i += 1
        elif c == ",":
            tokens.append(_Token(_TOK_COMMA, c, line, col)); i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            start = i
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
                else:
                    raise ExprSyntaxError("malformed exponent in number", line, i - line_start + 1)
            tokens.append(_Token(_TOK_NUM, source[start:i], line, col))
        elif c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(_Token(_TOK_IDENT, source[start:i], line, col))
        else:
            raise ExprSyntaxError(f"unexpected character '{c}'", line, col)
    tokens.append(_Token(_TOK_EOF, "", line, i - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Recursive descent
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := '-' factor | power
#   power  := atom ('^' factor)?
#   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
# ---------------------------------------------------------------------------

class _Scope(NamedTuple):
    coords: dict
    constants: dict


def _describe(tok: _Token) -> str:
    return "end of input" if tok.kind == _TOK_EOF else f"'{tok.text}'"


def _expect(tokens: list, pos: int, kind: str, what: str) -> int:
    tok = tokens[pos]
    if tok.kind != kind:
        raise ExprSyntaxError(f"expected {what}, found {_describe(tok)}", tok.line, tok.col)
    return pos + 1


def _parse_expr(tokens: list, pos: int, scope: _Scope):
    node, pos = _parse_term(tokens, pos, scope)
    while tokens[pos].kind == _TOK_OP and tokens[pos].text in "+-":
        op = tokens[pos].text
        right, pos = _parse_term(tokens, pos + 1, scope)
        node = BinOp(op, node, right)
    return node, pos


def _parse_term(tokens: list, pos: int, scope: _Scope):
    node, pos = _parse_factor(tokens, pos, scope)
    while tokens[pos].kind == _TOK_OP and tokens[pos].text in "*/":
        op = tokens[pos].text
        right, pos = _parse_factor(tokens, pos + 1, scope)
        node = BinOp(op, node, right)
    return node, pos


def _parse_factor(tokens: list, pos: int, scope: _Scope):
    tok = tokens[pos]
    if tok.kind == _TOK_OP and tok.text == "-":
        operand, pos = _parse_factor(tokens, pos + 1, scope)
        return Neg(operand), pos
    return _parse_power(tokens, pos, scope)


def _parse_power(tokens: list, pos: int, scope: _Scope):
    base, pos = _parse_atom(tokens, pos, scope)
    if tokens[pos].kind == _TOK_OP and tokens[pos].text == "^":
        exponent, pos = _parse_factor(tokens, pos + 1, scope)
        return BinOp("^", base, exponent), pos
    return base, pos


def _parse_atom(tokens: list, pos: int, scope: _Scope):
    tok = tokens[pos]
    if tok.kind == _TOK_NUM:
        return Num(float(tok.text)), pos + 1

    if tok.kind == _TOK_LPAREN:
        node, pos = _parse_expr(tokens, pos + 1, scope)
        return node, _expect(tokens, pos, _TOK_RPAREN, "')'")

    if tok.kind == _TOK_IDENT:
        if tokens[pos + 1].kind == _TOK_LPAREN:
            return _parse_call(tokens, pos, scope)
        if tok.text in scope.coords:
            return Sym(tok.text, scope.coords[tok.text]), pos + 1
        if tok.text in scope.constants:
            return Const(tok.text, float(scope.constants[tok.text])), pos + 1
        raise UnknownIdentifierError(tok.text, tok.line, tok.col)

    raise ExprSyntaxError(f"unexpected {_describe(tok)}", tok.line, tok.col)


def _parse_call(tokens: list, pos: int, scope: _Scope):
    name_tok = tokens[pos]
    if name_tok.text not in FUNCTIONS:
        raise UnknownIdentifierError(name_tok.text, name_tok.line, name_tok.col, kind="function")
    arity, _ = FUNCTIONS[name_tok.text]

    pos += 2
    args = []
    arg, pos = _parse_expr(tokens, pos, scope)
    args.append(arg)
    while tokens[pos].kind == _TOK_COMMA:
        arg, pos = _parse_expr(tokens, pos + 1, scope)
        args.append(arg)
    pos = _expect(tokens, pos, _TOK_RPAREN, "')'")

    if len(args) != arity:
        raise ExprSyntaxError(
            f"{name_tok.text}() takes {arity} argument(s), got {len(args)}",
            name_tok.line, name_tok.col
        )
    return Call(name_tok.text, tuple(args)), pos


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_SUM, _PREC_PRODUCT, _PREC_UNARY, _PREC_POWER, _PREC_ATOM = 1, 2, 3, 4, 5


def _precedence(node) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _PREC_SUM
        if node.op in "*/":
            return _PREC_PRODUCT
        return _PREC_POWER
    if isinstance(node, Neg):
        return _PREC_UNARY
    return _PREC_ATOM


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _src(node, min_prec: int) -> str:
    text = to_source(node)
    return f"({text})" if _precedence(node) < min_prec else text


def to_source(node) -> str:
    """Pretty-print with the minimal parentheses that reparse to the same tree."""
    if isinstance(node, Expression):
        node = node.root
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, (Sym, Const)):
        return node.name
    if isinstance(node, Neg):
        return "-" + _src(node.operand, _PREC_UNARY)
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, BinOp):
        if node.op in "+-":
            return f"{_src(node.left, _PREC_SUM)} {node.op} {_src(node.right, _PREC_PRODUCT)}"
        if node.op in "*/":
            return f"{_src(node.left, _PREC_PRODUCT)} {node.op} {_src(node.right, _PREC_UNARY)}"
        return f"{_src(node.left, _PREC_ATOM)}^{_src(node.right, _PREC_UNARY)}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _apply(node, fn, *args):
    try:
        return fn(*args)
    except JetDomainError as e:
        raise ExprDomainError(str(e), to_source(node)) from e


def _eval(node, X: Jet2):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Sym):
        return X[node.index]
    if isinstance(node, Neg):
        return -_eval(node.operand, X)
    if isinstance(node, Call):
        _, fn = FUNCTIONS[node.name]
        args = [_lift(_eval(a, X), X) for a in node.args]
        return _apply(node, fn, *args)

    left, right = _eval(node.left, X), _eval(node.right, X)
    if not isinstance(left, Jet2) and not isinstance(right, Jet2):
        left = _lift(left, X)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return _apply(node, lambda a, b: a / b, left, right)
    return _apply(node, jet.power, _lift(left, X), right)


def _lift(value, X: Jet2) -> Jet2:
    if isinstance(value, Jet2):
        return value
    return Jet2.constant(value, X.n, X.order) if X.grad is not None else Jet2(value)


@dataclass(frozen=True)
class Expression:
    root: object
    coords: tuple
    source: str = field(default="", compare=False)

    @property
    def symbols(self) -> set:
        found = set()

        def walk(node):
            if isinstance(node, Sym):
                found.add(node.name)
            elif isinstance(node, Neg):
                walk(node.operand)
            elif isinstance(node, BinOp):
                walk(node.left); walk(node.right)
            elif isinstance(node, Call):
                for a in node.args:
                    walk(a)
        walk(self.root)
        return found

    @property
    def free_symbols(self) -> frozenset:
        return frozenset(self.symbols)

    def on(self, X: Jet2) -> Jet2:
        """Evaluate with the coordinate jets X (shape (dim,)) substituted for the symbols."""
        return _lift(_eval(self.root, X), X)

    def jet(self, p) -> Jet2:
        p = np.asarray(p, dtype=float)
        if p.shape != (len(self.coords),):
            raise ValueError(f"point of dimension {p.shape} for chart of dimension {len(self.coords)}")
        return self.on(Jet2.variable(p))

    def __call__(self, p) -> float:
        return float(self.on(Jet2(np.asarray(p, dtype=float))).value)

    def __str__(self):
        return to_source(self.root)


def parse(source: str, coords, constants: Optional[dict] = None) -> Expression:
    coords = tuple(coords)
    scope_constants = dict(DEFAULT_CONSTANTS)
    if constants:
        scope_constants.update(constants)
    scope = _Scope({name: i for i, name in enumerate(coords)}, scope_constants)

    tokens = _tokenize(source)
    if tokens[0].kind == _TOK_EOF:
        raise ExprSyntaxError("empty expression", tokens[0].line, tokens[0].col)
    root, pos = _parse_expr(tokens, 0, scope)
    if tokens[pos].kind != _TOK_EOF:
        tok = tokens[pos]
        raise ExprSyntaxError(f"unexpected {_describe(tok)}", tok.line, tok.col)
    return Expression(root, coords, source)


def evaluate_jet2(e: Expression, p) -> Jet2:
    return e.jet(p)


def rebind(e: Expression, coords) -> Expression:
    """Same tree over a larger or reordered coordinate list (symbols matched by name)."""
    coords = tuple(coords)
    index = {name: i for i, name in enumerate(coords)}
    missing = e.symbols - set(index)
    if missing:
        raise UnknownIdentifierError(sorted(missing)[0], 1, 1)

    def walk(node):
        if isinstance(node, Sym):
            return Sym(node.name, index[node.name])
        if isinstance(node, Neg):
            return Neg(walk(node.operand))
        if isinstance(node, BinOp):
            return BinOp(node.op, walk(node.left), walk(node.right))
        if isinstance(node, Call):
            return Call(node.name, tuple(walk(a) for a in node.args))
        return node
    return Expression(walk(e.root), coords, e.source)
