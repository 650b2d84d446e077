"""Plain-text round-trip syntax for operator expressions.

Grammar (whitespace is ignored)::

    expr    := ["-"] term (("+" | "-") term)*
    term    := factor ("*" factor)*
    factor  := complex | real | "i" | xfactor | tfactor
    complex := "(" real ("+" | "-") ureal "i" ")"
    xfactor := "x" MODE ["^" UINT]
    tfactor := "T" MODE ["^" ["-"] UINT]

Factors inside a term are multiplied left to right with the operator product,
so ``T1*x1`` parses to ``x1*T1 + T1``.  :func:`format_expr` emits one
canonical term per summand, for example ``(2+0i)*x1*T1^-1*T3``; parsing that
output returns an identical expression.
"""

from __future__ import annotations

import re

from .algebra import OperatorExpr, identity, mul, shift_op, x_op

__all__ = ["format_expr", "parse_expr", "ExprSyntaxError"]


class ExprSyntaxError(ValueError):
    pass


_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|inf|nan"
_TOKEN = re.compile(
    rf"""\s*(?:
    (?P<cplx>\(\s*(?P<re>[-+]?(?:{_REAL}))\s*(?P<sg>[-+])\s*(?P<im>{_REAL})\s*i\s*\))
  | (?P<real>{_REAL})
  | (?P<x>x(?P<xm>\d+)(?:\^(?P<xp>\d+))?)
  | (?P<t>T(?P<tm>\d+)(?:\^(?P<tp>-?\d+))?)
  | (?P<imag>i)
  | (?P<op>[-+*])
    )""",
    re.VERBOSE,
)


def _fmt_real(v: float) -> str:
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def _fmt_coeff(c: complex) -> str:
    im = c.imag
    sign = "-" if (im < 0 or (im == 0 and str(im).startswith("-"))) else "+"
    return f"({_fmt_real(c.real)}{sign}{_fmt_real(abs(im))}i)"


def format_expr(expr: OperatorExpr) -> str:
    parts = []
    for term in expr.terms():
        factors = [_fmt_coeff(term.coeff)]
        factors += [f"x{m}" if p == 1 else f"x{m}^{p}" for m, p in term.xpart.powers]
        factors += [f"T{m}" if p == 1 else f"T{m}^{p}" for m, p in term.shift.exponents]
        parts.append("*".join(factors))
    return " + ".join(parts) if parts else "0"


def _tokenize(text: str) -> list[tuple[str, object]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected input at offset {pos}: {text[pos:pos + 12]!r}")
        pos = m.end()
        if m.group("cplx"):
            im = float(m.group("im"))
            out.append(("num", complex(float(m.group("re")), -im if m.group("sg") == "-" else im)))
        elif m.group("real"):
            out.append(("num", complex(float(m.group("real")))))
        elif m.group("x"):
            out.append(("op", x_op(int(m.group("xm"))) ** int(m.group("xp") or 1)))
        elif m.group("t"):
            out.append(("op", shift_op(int(m.group("tm")), int(m.group("tp") or 1))))
        elif m.group("imag"):
            out.append(("num", 1j))
        else:
            out.append(("sym", m.group("op")))
    return out


def parse_expr(text: str) -> OperatorExpr:
    """Parse the text syntax into a canonical :class:`OperatorExpr`."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExprSyntaxError("empty expression")
    if tokens == [("num", 0j)]:
        return OperatorExpr()
    total = OperatorExpr()
    sign = 1.0
    i = 0
    if tokens[0] in (("sym", "-"), ("sym", "+")):
        sign = -1.0 if tokens[0][1] == "-" else 1.0
        i = 1
    while True:
        term = identity()
        expect_factor = True
        while i < len(tokens):
            kind, val = tokens[i]
            if expect_factor:
                if kind == "num":
                    term = term.scale(val)
                elif kind == "op":
                    term = mul(term, val)
                else:
                    raise ExprSyntaxError(f"expected a factor, found {val!r}")
                expect_factor = False
                i += 1
            elif kind == "sym" and val == "*":
                expect_factor = True
                i += 1
            else:
                break
        if expect_factor:
            raise ExprSyntaxError("expression ends with an operator")
        total = total + term.scale(sign)
        if i == len(tokens):
            return total
        kind, val = tokens[i]
        if kind != "sym" or val not in "+-":
            raise ExprSyntaxError(f"expected '+' or '-', found {val!r}")
        sign = -1.0 if val == "-" else 1.0
        i += 1
