"""Parser/evaluator for the small arithmetic expressions used in scenario files.

Grammar (standard precedence, loosest first)::

    expr    :=  term  (('+' | '-') term)*
    term    :=  unary (('*' | '/') unary)*
    unary   :=  '-' unary | power
    power   :=  atom ('^' unary)?          # right-associative, binds above unary minus
    atom    :=  NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers are the single free variable fixed at parse time, the constants
``pi`` and ``e``, or one of the functions ``sin cos tan exp log sqrt abs pow``.
Numbers are decimal or scientific notation. Evaluation is plain IEEE double
arithmetic; domain errors (log of non-positive, sqrt of negative, division by
zero, overflowing exp/pow) raise :class:`~remp.errors.ExprDomainError` instead
of silently producing NaN.

Parsed expressions are immutable and safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ExprArityError,
    ExprDomainError,
    ExprNameError,
    ExprSyntaxError,
)

_FUNCTIONS = {
    "sin": (1, math.sin),
    "cos": (1, math.cos),
    "tan": (1, math.tan),
    "exp": (1, math.exp),
    "log": (1, math.log),
    "sqrt": (1, math.sqrt),
    "abs": (1, math.fabs),
    "pow": (2, math.pow),
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

# Nesting bound so that hostile input ("(((((..." ) cannot blow the Python
# stack (each level costs several interpreter frames); anything legitimately
# written by a user sits far below it.
_MAX_DEPTH = 100


# --- AST -----------------------------------------------------------------


@dataclass(frozen=True)
class _Num:
    value: float


@dataclass(frozen=True)
class _Var:
    name: str


@dataclass(frozen=True)
class _Const:
    name: str


@dataclass(frozen=True)
class _Neg:
    operand: object


@dataclass(frozen=True)
class _Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class _Call:
    name: str
    args: tuple


# --- tokenizer -----------------------------------------------------------

_TOK_NUM = "num"
_TOK_IDENT = "ident"
_TOK_OP = "op"
_TOK_END = "end"

_OP_CHARS = set("+-*/^(),")


def _byte_offset(text: str, index: int) -> int:
    """Translate a character index into a byte offset (UTF-8)."""
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OP_CHARS:
            tokens.append((_TOK_OP, ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lexeme = text[i:j]
            try:
                float(lexeme)
            except ValueError:
                raise ExprSyntaxError(
                    f"malformed number {lexeme!r}", _byte_offset(text, i)
                ) from None
            tokens.append((_TOK_NUM, lexeme, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((_TOK_IDENT, text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", _byte_offset(text, i))
    tokens.append((_TOK_END, "", n))
    return tokens


# --- parser --------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, var: str):
        self.text = text
        self.var = var
        self.tokens = _tokenize(text)
        self.pos = 0
        self.depth = 0

    def _peek(self):
        return self.tokens[self.pos]

    def _advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _error(self, message: str, index: int):
        raise ExprSyntaxError(message, _byte_offset(self.text, index))

    def _enter(self, index: int):
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            self._error("expression nested too deeply", index)

    def parse(self):
        node = self._expr()
        kind, lexeme, idx = self._peek()
        if kind != _TOK_END:
            self._error(f"unexpected {lexeme!r}, expected operator or end", idx)
        return node

    def _expr(self):
        _, _, idx = self._peek()
        self._enter(idx)
        try:
            node = self._term()
            while True:
                kind, lexeme, _ = self._peek()
                if kind == _TOK_OP and lexeme in "+-":
                    self._advance()
                    node = _Bin(lexeme, node, self._term())
                else:
                    return node
        finally:
            self.depth -= 1

    def _term(self):
        node = self._unary()
        while True:
            kind, lexeme, _ = self._peek()
            if kind == _TOK_OP and lexeme in "*/":
                self._advance()
                node = _Bin(lexeme, node, self._unary())
            else:
                return node

    def _unary(self):
        kind, lexeme, idx = self._peek()
        if kind == _TOK_OP and lexeme == "-":
            self._enter(idx)
            try:
                self._advance()
                return _Neg(self._unary())
            finally:
                self.depth -= 1
        return self._power()

    def _power(self):
        node = self._atom()
        kind, lexeme, _ = self._peek()
        if kind == _TOK_OP and lexeme == "^":
            self._advance()
            # right-associative; the exponent may carry its own unary minus
            return _Bin("^", node, self._unary())
        return node

    def _atom(self):
        kind, lexeme, idx = self._advance()
        if kind == _TOK_NUM:
            return _Num(float(lexeme))
        if kind == _TOK_IDENT:
            nkind, nlex, _ = self._peek()
            if nkind == _TOK_OP and nlex == "(":
                return self._call(lexeme, idx)
            if lexeme == self.var:
                return _Var(lexeme)
            if lexeme in _CONSTANTS:
                return _Const(lexeme)
            raise ExprNameError(lexeme, _byte_offset(self.text, idx))
        if kind == _TOK_OP and lexeme == "(":
            node = self._expr()
            ckind, clex, cidx = self._advance()
            if not (ckind == _TOK_OP and clex == ")"):
                self._error(f"expected ')', got {clex or 'end of input'!r}", cidx)
            return node
        self._error(
            f"expected a number, name or '(', got {lexeme or 'end of input'!r}", idx
        )

    def _call(self, name: str, idx: int):
        if name not in _FUNCTIONS:
            raise ExprNameError(name, _byte_offset(self.text, idx))
        arity, _ = _FUNCTIONS[name]
        self._advance()  # '('
        args = [self._expr()]
        while True:
            kind, lexeme, aidx = self._advance()
            if kind == _TOK_OP and lexeme == ")":
                break
            if kind == _TOK_OP and lexeme == ",":
                args.append(self._expr())
            else:
                self._error(f"expected ',' or ')', got {lexeme or 'end of input'!r}", aidx)
        if len(args) != arity:
            raise ExprArityError(name, arity, len(args), _byte_offset(self.text, idx))
        return _Call(name, tuple(args))


# --- evaluation / printing ------------------------------------------------


def _eval_node(node, value: float) -> float:
    if isinstance(node, _Num):
        return node.value
    if isinstance(node, _Var):
        return value
    if isinstance(node, _Const):
        return _CONSTANTS[node.name]
    if isinstance(node, _Neg):
        return -_eval_node(node.operand, value)
    if isinstance(node, _Bin):
        a = _eval_node(node.left, value)
        b = _eval_node(node.right, value)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise ExprDomainError(f"division of {a!r} by zero", b)
            return a / b
        try:
            return math.pow(a, b)
        except (ValueError, OverflowError):
            raise ExprDomainError(f"{a!r} ^ {b!r} is undefined or overflows", b) from None
    if isinstance(node, _Call):
        args = [_eval_node(a, value) for a in node.args]
        _, fn = _FUNCTIONS[node.name]
        try:
            return fn(*args)
        except (ValueError, OverflowError, ZeroDivisionError):
            shown = args[0] if len(args) == 1 else tuple(args)
            raise ExprDomainError(f"{node.name} of {shown!r}", args[-1]) from None
    raise TypeError(f"unknown node {node!r}")


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _print_node(node, parent_prec: int = 0) -> str:
    if isinstance(node, _Num):
        return repr(node.value)
    if isinstance(node, _Var):
        return node.name
    if isinstance(node, _Const):
        return node.name
    if isinstance(node, _Neg):
        inner = _print_node(node.operand, _PRECEDENCE["neg"])
        s = f"-{inner}"
        return f"({s})" if parent_prec > _PRECEDENCE["neg"] else s
    if isinstance(node, _Bin):
        prec = _PRECEDENCE[node.op]
        if node.op == "^":
            # right-associative: parenthesize a left operand of equal precedence
            left = _print_node(node.left, prec + 1)
            right = _print_node(node.right, prec)
        else:
            left = _print_node(node.left, prec)
            right = _print_node(node.right, prec + 1)
        s = f"{left} {node.op} {right}"
        return f"({s})" if prec < parent_prec else s
    if isinstance(node, _Call):
        args = ", ".join(_print_node(a, 0) for a in node.args)
        return f"{node.name}({args})"
    raise TypeError(f"unknown node {node!r}")


class Expr:
    """A parsed expression in one free variable.

    Immutable; evaluation is deterministic (identical text and argument give
    bit-identical results) and thread-safe.
    """

    __slots__ = ("_root", "var", "text")

    def __init__(self, root, var: str, text: str):
        self._root = root
        self.var = var
        self.text = text

    def eval(self, value: float) -> float:
        return _eval_node(self._root, float(value))

    __call__ = eval

    def to_string(self) -> str:
        """Render the tree back to parseable text (evaluation-equivalent)."""
        return _print_node(self._root)

    def __repr__(self) -> str:
        return f"Expr({self.to_string()!r}, var={self.var!r})"


def parse(text: str, var: str) -> Expr:
    """Parse ``text`` into an :class:`Expr` with free variable ``var``.

    Raises :class:`~remp.errors.ExprSyntaxError` (with byte offset),
    :class:`~remp.errors.ExprNameError` or :class:`~remp.errors.ExprArityError`.
    """
    if not text or text.isspace():
        raise ExprSyntaxError("empty expression", 0)
    root = _Parser(text, var).parse()
    return Expr(root, var, text)
