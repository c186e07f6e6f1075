"""
Expressions in one variable x, used for the coefficient g, the forcing q
and optional exact solutions in problem files.

Grammar (whitespace insignificant):
    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' factor)?            right-associative
    base   := number | 'x' | func '(' expr ')' | '(' expr ')' | '-' base

Parsed trees are compiled to a postfix program so evaluation and printing
never recurse, however long the expression.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

from ..errors import ExpressionDomainError, ExpressionSyntaxError, UnknownIdentifierError

MAX_SOURCE_BYTES = 64 * 1024

FUNCTIONS: dict[str, Callable[[float], float]] = {
    'exp': math.exp,
    'sin': math.sin,
    'cos': math.cos,
    'log': math.log,
    'sqrt': math.sqrt,
    'abs': abs,
}

VARIABLE = 'x'


# --- Tree ---

@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Negate:
    operand: 'Node'


@dataclass(frozen=True)
class BinaryOp:
    op: str  # one of + - * / ^
    left: 'Node'
    right: 'Node'


@dataclass(frozen=True)
class Call:
    function: str
    argument: 'Node'


Node = Union[Constant, Variable, Negate, BinaryOp, Call]

# Postfix opcodes
_CONST, _VAR, _NEG, _CALL, _BINARY = range(5)


@dataclass(frozen=True, eq=False)
class Expression:
    """A parsed expression; call it with x to evaluate."""
    source: str
    root: Node = field(repr=False)
    program: tuple = field(repr=False, default=())

    def __call__(self, x: float) -> float:
        return eval_expression(self, x)

    def __str__(self) -> str:
        return format_expression(self)


# --- Tokens ---

@dataclass(frozen=True)
class _Token:
    kind: str      # number, ident, an operator character, invalid, end
    text: str
    offset: int    # byte offset into the UTF-8 source
    value: float = 0.0


_TOKEN_RE = re.compile(r'''
      (?P<space>\s+)
    | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>[-+*/^()])
''', re.VERBOSE | re.ASCII)

_OPERAND_START = ('number', 'x', 'function', '(', '-')
_OPERATORS = ('+', '-', '*', '/', '^')


def _tokenize(text: str) -> list[_Token]:
    byte_offsets = [0]
    for ch in text:
        byte_offsets.append(byte_offsets[-1] + len(ch.encode('utf-8', 'surrogatepass')))

    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            # The parser reports it with the right expected set
            tokens.append(_Token('invalid', text[pos], byte_offsets[pos]))
            break
        kind = match.lastgroup
        lexeme = match.group()
        offset = byte_offsets[pos]
        if kind == 'number':
            value = float(lexeme)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"number '{lexeme}' out of range", offset)
            tokens.append(_Token('number', lexeme, offset, value))
        elif kind == 'ident':
            tokens.append(_Token('ident', lexeme, offset))
        elif kind == 'op':
            tokens.append(_Token(lexeme, lexeme, offset))
        pos = match.end()
    tokens.append(_Token('end', '', byte_offsets[-1]))
    return tokens


# --- Parser ---

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, token: _Token, expected) -> ExpressionSyntaxError:
        found = 'end of input' if token.kind == 'end' else f"'{token.text}'"
        return ExpressionSyntaxError(f"unexpected {found}", token.offset, expected)

    def expect(self, kind: str, expected) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise self.error(token, expected)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek().kind != 'end':
            raise self.error(self.peek(), _OPERATORS + ('end of input',))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind in ('+', '-'):
            op = self.advance().kind
            node = BinaryOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind in ('*', '/'):
            op = self.advance().kind
            node = BinaryOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek().kind == '^':
            self.advance()
            return BinaryOp('^', node, self.factor())
        return node

    def base(self) -> Node:
        token = self.peek()
        if token.kind == 'number':
            self.advance()
            return Constant(token.value)
        if token.kind == 'ident':
            self.advance()
            if token.text == VARIABLE:
                return Variable()
            if token.text in FUNCTIONS:
                self.expect('(', ('(',))
                argument = self.expr()
                self.expect(')', _OPERATORS + (')',))
                return Call(token.text, argument)
            raise UnknownIdentifierError(token.text, token.offset, FUNCTIONS)
        if token.kind == '(':
            self.advance()
            node = self.expr()
            self.expect(')', _OPERATORS + (')',))
            return node
        if token.kind == '-':
            self.advance()
            return Negate(self.base())
        raise self.error(token, _OPERAND_START)


def _compile(root: Node) -> tuple:
    program = []
    pending = [(root, False)]
    while pending:
        node, children_done = pending.pop()
        if isinstance(node, Constant):
            program.append((_CONST, node.value))
        elif isinstance(node, Variable):
            program.append((_VAR, None))
        elif children_done:
            if isinstance(node, Negate):
                program.append((_NEG, None))
            elif isinstance(node, Call):
                program.append((_CALL, node.function))
            else:
                program.append((_BINARY, node.op))
        else:
            pending.append((node, True))
            if isinstance(node, BinaryOp):
                children = (node.left, node.right)
            elif isinstance(node, Negate):
                children = (node.operand,)
            else:
                children = (node.argument,)
            for child in reversed(children):
                pending.append((child, False))
    return tuple(program)


def parse_expression(text: str) -> Expression:
    """Parse `text`; raises ExpressionSyntaxError or UnknownIdentifierError."""
    size = len(text.encode('utf-8', 'surrogatepass'))
    if size > MAX_SOURCE_BYTES:
        raise ExpressionSyntaxError(
            f"expression is {size} bytes, limit is {MAX_SOURCE_BYTES}", MAX_SOURCE_BYTES
        )
    parser = _Parser(text)
    try:
        root = parser.parse()
    except RecursionError:
        raise ExpressionSyntaxError(
            "expression nested too deeply", parser.peek().offset
        ) from None
    return Expression(source=text, root=root, program=_compile(root))


# --- Evaluation ---

def _int_power(base: float, k: int) -> float:
    # square-and-multiply
    result = 1.0
    while k:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


def _power(base: float, exponent: float, x: float) -> float:
    if exponent.is_integer() and abs(exponent) <= 2 ** 31:
        k = int(exponent)
        if k < 0:
            if base == 0.0:
                raise ExpressionDomainError("division by zero (zero to a negative power)", x)
            magnitude = _int_power(base, -k)
            if magnitude == 0.0:
                raise ExpressionDomainError("power overflows", x)
            return 1.0 / magnitude
        return _int_power(base, k)
    if base <= 0.0:
        raise ExpressionDomainError(
            f"non-integer power {exponent!r} of non-positive base {base!r}", x
        )
    try:
        return math.exp(exponent * math.log(base))
    except OverflowError:
        raise ExpressionDomainError("power overflows", x) from None


def _binary(op: str, left: float, right: float, x: float) -> float:
    if op == '+':
        return left + right
    if op == '-':
        return left - right
    if op == '*':
        return left * right
    if op == '/':
        if right == 0.0:
            raise ExpressionDomainError("division by zero", x)
        return left / right
    return _power(left, right, x)


def _call(name: str, arg: float, x: float) -> float:
    if name == 'log' and arg <= 0.0:
        raise ExpressionDomainError(f"log of non-positive value {arg!r}", x)
    if name == 'sqrt' and arg < 0.0:
        raise ExpressionDomainError(f"sqrt of negative value {arg!r}", x)
    try:
        return FUNCTIONS[name](arg)
    except (OverflowError, ValueError):
        raise ExpressionDomainError(f"{name}({arg!r}) is not a finite real", x) from None


def eval_expression(e: Expression, x: float) -> float:
    """Evaluate at x; any non-finite result is an ExpressionDomainError."""
    x = float(x)
    if not math.isfinite(x):
        raise ExpressionDomainError("cannot evaluate at a non-finite point", x)
    stack: list[float] = []
    for opcode, arg in e.program:
        if opcode == _CONST:
            stack.append(arg)
        elif opcode == _VAR:
            stack.append(x)
        elif opcode == _NEG:
            stack[-1] = -stack[-1]
        elif opcode == _CALL:
            stack[-1] = _call(arg, stack[-1], x)
        else:
            right = stack.pop()
            stack[-1] = _binary(arg, stack[-1], right, x)
        if not math.isfinite(stack[-1]):
            raise ExpressionDomainError("intermediate value is not finite", x)
    return stack.pop()


# --- Printing ---

def format_expression(e: Expression) -> str:
    """Fully parenthesised text that parses back to the same value."""
    parts: list[str] = []
    for opcode, arg in e.program:
        if opcode == _CONST:
            parts.append(repr(arg) if arg >= 0 else f"({arg!r})")
        elif opcode == _VAR:
            parts.append(VARIABLE)
        elif opcode == _NEG:
            parts[-1] = f"(-{parts[-1]})"
        elif opcode == _CALL:
            parts[-1] = f"{arg}({parts[-1]})"
        else:
            right = parts.pop()
            parts[-1] = f"({parts[-1]} {arg} {right})"
    return parts[-1]
