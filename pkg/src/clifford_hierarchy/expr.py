"""Gate-expression mini-language.

Grammar::

    expr    := term
    term    := IDENT [ "(" [ arg ("," arg)* ] ")" ]
    arg     := term | number
    number  := ["-"] atom [("*" | "/") atom]*
    atom    := INT | FLOAT | "pi"

Examples: ``w_k(4)``, ``compose(h, t)``, ``lambda(1, r_k(3))``,
``embed(t, 2, 3)``, ``phase(pi/5)``. Qubit indices are 0-based.
"""
from dataclasses import dataclass
import math
import re

from . import gates
from .exceptions import HierarchyError, ParseError
from .matrix import DenseUnitary, compose, dagger, tensor

_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)|(?P<nl>\n)|(?P<float>\d+\.\d*(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),*/\-])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    out = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                out.append(Token(kind, tok, line, col))
            col += len(tok)
        pos = m.end()
    out.append(Token("end", "", line, col))
    return out


def _lambda(m, u):
    return gates.lambda_controlled(int(m), u)


def _embed(g, *rest):
    *qubits, n = rest
    return gates.embed(g, tuple(int(q) for q in qubits), int(n))


def _compose(*gs):
    out = gs[-1]
    for g in reversed(gs[:-1]):
        out = compose(g, out)
    return out


def _tensor(*gs):
    out = gs[0]
    for g in gs[1:]:
        out = tensor(out, g)
    return out


def _phase(theta):
    from .gates import _phase as ph

    return DenseUnitary([[1, 0], [0, ph(theta)]])


def _int(v):
    if isinstance(v, float) and not v.is_integer():
        raise ValueError(f"expected an integer, got {v}")
    return int(v)


# name -> (callable, (min_args, max_args), argument kinds):
# "" or "n" numbers only, "g" a gate then numbers, "ng" a number then a gate, "*" gates only
GATES = {
    "i": (lambda n=1: gates.identity(_int(n)), (0, 1), "n"),
    "id": (lambda n=1: gates.identity(_int(n)), (0, 1), "n"),
    "h": (gates.h, (0, 0), ""),
    "x": (gates.x, (0, 0), ""),
    "y": (gates.y, (0, 0), ""),
    "z": (gates.z, (0, 0), ""),
    "s": (gates.s, (0, 0), ""),
    "sdg": (gates.sdg, (0, 0), ""),
    "t": (gates.t, (0, 0), ""),
    "cnot": (lambda *a: gates.cnot(*map(_int, a)), (0, 3), "n"),
    "cx": (lambda *a: gates.cnot(*map(_int, a)), (0, 3), "n"),
    "cz": (lambda *a: gates.cz(*map(_int, a)), (0, 3), "n"),
    "cs": (lambda *a: gates.cs(*map(_int, a)), (0, 3), "n"),
    "swap": (lambda *a: gates.swap(*map(_int, a)), (0, 3), "n"),
    "ccz": (gates.ccz, (0, 0), ""),
    "toffoli": (lambda *a: gates.toffoli(*map(_int, a)), (0, 4), "n"),
    "s_k": (lambda k: gates.s_k(_int(k)), (1, 1), "n"),
    "r_k": (lambda k: gates.r_k(_int(k)), (1, 1), "n"),
    "v_k": (lambda k: gates.v_k(_int(k)), (1, 1), "n"),
    "w_k": (lambda k: gates.w_k(_int(k)), (1, 1), "n"),
    "w_k_rev": (lambda k: gates.w_k(_int(k), order="v-first"), (1, 1), "n"),
    "r_c2": (gates.r_c2, (0, 0), ""),
    "r_c3": (gates.r_c3, (0, 0), ""),
    "qft": (lambda n: gates.qft(_int(n)), (1, 1), "n"),
    "qft_block": (lambda m: gates.qft_block(_int(m)), (1, 1), "n"),
    "gamma1": (gates.gamma1, (1, 1), "n"),
    "gamma2": (gates.gamma2, (2, 2), "n"),
    "u_phi_alpha": (gates.u_phi_alpha, (2, 2), "n"),
    "u_phi_xi_beta": (gates.u_phi_xi_beta, (3, 3), "n"),
    "phase": (_phase, (1, 1), "n"),
    "lambda": (_lambda, (2, 2), "ng"),
    "compose": (_compose, (1, 64), "*"),
    "tensor": (_tensor, (1, 6), "*"),
    "dagger": (dagger, (1, 1), "g"),
    "embed": (_embed, (3, 8), "g"),
}


def _arg_kind(kinds, pos):
    if kinds == "*":
        return "g"
    if kinds == "g":
        return "g" if pos == 0 else "n"
    if kinds == "ng":
        return "n" if pos == 0 else "g"
    return "n"


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, text=None):
        tok = self.toks[self.i]
        if (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", tok.line, tok.column)
        self.i += 1
        return tok

    def parse(self):
        value = self.arg()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r} after expression", tok.line, tok.column)
        if not isinstance(value, DenseUnitary):
            raise ParseError("expression evaluates to a number, not a gate", 1, 1)
        return value

    def arg(self):
        tok = self.peek()
        if tok.kind == "ident" and tok.text.lower() != "pi":
            return self.call()
        return self.number()

    def call(self):
        tok = self.take("ident")
        name = tok.text.lower()
        if name not in GATES:
            raise ParseError(f"unknown gate {tok.text!r}", tok.line, tok.column)
        fn, (lo, hi), kinds = GATES[name]
        args = []
        if self.peek().text == "(":
            self.take(text="(")
            if self.peek().text != ")":
                args.append(self.arg())
                while self.peek().text == ",":
                    self.take(text=",")
                    args.append(self.arg())
            self.take(text=")")
        if not lo <= len(args) <= hi:
            raise ParseError(f"{name} takes {lo}..{hi} arguments, got {len(args)}", tok.line, tok.column)
        for pos, a in enumerate(args):
            kind = _arg_kind(kinds, pos)
            if kind == "g" and not isinstance(a, DenseUnitary):
                raise ParseError(f"argument {pos + 1} of {name} must be a gate", tok.line, tok.column)
            if kind == "n" and isinstance(a, DenseUnitary):
                raise ParseError(f"argument {pos + 1} of {name} must be a number", tok.line, tok.column)
        try:
            return fn(*args)
        except (HierarchyError, ValueError, TypeError) as err:
            raise ParseError(f"{name}: {err}", tok.line, tok.column) from err

    def number(self):
        neg = False
        if self.peek().text == "-":
            self.take()
            neg = True
        value = self.atom()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.atom()
            if op == "*":
                value = value * rhs
            else:
                if rhs == 0:
                    tok = self.toks[self.i - 1]
                    raise ParseError("division by zero", tok.line, tok.column)
                value = value / rhs
        return -value if neg else value

    def atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return int(tok.text)
        if tok.kind == "float":
            self.take()
            return float(tok.text)
        if tok.kind == "ident" and tok.text.lower() == "pi":
            self.take()
            return math.pi
        got = tok.text or "end of input"
        raise ParseError(f"expected a number, got {got!r}", tok.line, tok.column)


def parse_gate(text):
    """Evaluate a gate expression to a :class:`DenseUnitary`."""
    return _Parser(text).parse()
