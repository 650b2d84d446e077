"""Normal-form algebra of position operators and unit translations.

Every element is stored as a finite sum of terms ``c * X * W`` where ``X`` is a
commutative monomial in the position operators ``x_j`` and ``W`` is a word of
integer powers of the translations ``T_j`` (``T_j^-1`` is the adjoint of
``T_j``).  Position factors always sit to the left of the shift word.  The only
nontrivial rewrite needed to keep that order is

    T_j^m x_j = (x_j + m) T_j^m,

translations of distinct modes commute with everything of the other modes, and
all shift words commute among themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from numbers import Number
from typing import Iterable, Iterator, Mapping

__all__ = [
    "ShiftWord",
    "XMonomial",
    "NormalTerm",
    "OperatorExpr",
    "DEFAULT_EPS",
    "identity",
    "zero",
    "x_op",
    "shift_op",
    "word_op",
    "mul",
    "adjoint",
    "commutator",
    "anticommutator",
    "is_hermitian",
    "evaluate_weighted",
]

DEFAULT_EPS = 1e-14


def _as_pairs(mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    items = mapping.items() if isinstance(mapping, Mapping) else mapping
    acc: dict[int, int] = {}
    for mode, power in items:
        mode = int(mode)
        if mode < 0:
            raise ValueError(f"mode index must be nonnegative, got {mode}")
        acc[mode] = acc.get(mode, 0) + int(power)
    return tuple(sorted((m, p) for m, p in acc.items() if p != 0))


@dataclass(frozen=True, order=True)
class ShiftWord:
    """Product of integer translation powers, one per mode.

    ``exponents`` is a sorted tuple of ``(mode, m)`` pairs with ``m != 0``;
    the empty word is the identity.
    """

    exponents: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "ShiftWord":
        return cls(_as_pairs(mapping))

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)

    def get(self, mode: int) -> int:
        for m, p in self.exponents:
            if m == mode:
                return p
        return 0

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.exponents)

    @property
    def is_identity(self) -> bool:
        return not self.exponents

    def __mul__(self, other: "ShiftWord") -> "ShiftWord":
        return ShiftWord.of(self.exponents + other.exponents)

    def inverse(self) -> "ShiftWord":
        return ShiftWord(tuple((m, -p) for m, p in self.exponents))

    def __str__(self) -> str:
        return "*".join(f"T{m}" if p == 1 else f"T{m}^{p}" for m, p in self.exponents) or "1"


@dataclass(frozen=True, order=True)
class XMonomial:
    """Commutative monomial in the position operators; ``()`` means 1."""

    powers: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if any(p <= 0 for _, p in self.powers):
            raise ValueError("XMonomial powers must be strictly positive")

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "XMonomial":
        return cls(_as_pairs(mapping))

    def as_dict(self) -> dict[int, int]:
        return dict(self.powers)

    @property
    def modes(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.powers)

    @property
    def degree(self) -> int:
        return sum(p for _, p in self.powers)

    def __mul__(self, other: "XMonomial") -> "XMonomial":
        return XMonomial.of(self.powers + other.powers)

    def __str__(self) -> str:
        return "*".join(f"x{m}" if p == 1 else f"x{m}^{p}" for m, p in self.powers) or "1"


@dataclass(frozen=True)
class NormalTerm:
    coeff: complex
    xpart: XMonomial
    shift: ShiftWord


def _shifted_monomial(x: XMonomial, word: ShiftWord) -> dict[XMonomial, float]:
    """Expand ``X(x + m)`` where ``m`` are the word's exponents.

    Returns a dict of monomials with integer-valued float coefficients.
    """
    result: dict[XMonomial, float] = {XMonomial(): 1.0}
    for mode, n in x.powers:
        m = word.get(mode)
        if m == 0:
            factor = {n: 1.0}
        else:
            factor = {k: float(comb(n, k) * m ** (n - k)) for k in range(n + 1)}
        nxt: dict[XMonomial, float] = {}
        for mono, c in result.items():
            for k, ck in factor.items():
                key = mono * XMonomial.of({mode: k}) if k else mono
                nxt[key] = nxt.get(key, 0.0) + c * ck
        result = nxt
    return result


class OperatorExpr:
    """Canonical finite sum of normal-ordered terms.

    Instances are immutable.  Arithmetic operators build new canonical
    expressions: ``a * b`` is the operator product, ``a + b`` the sum, and
    plain numbers act as multiples of the identity.

    Examples
    --------
    >>> T1, x1 = shift_op(1, 1), x_op(1)
    >>> str(T1 * x1)
    '(1+0i)*T1 + (1+0i)*x1*T1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[XMonomial, ShiftWord], complex] | None = None,
                 eps: float = DEFAULT_EPS):
        acc: dict[tuple[XMonomial, ShiftWord], complex] = {}
        for key, c in (terms or {}).items():
            acc[key] = acc.get(key, 0j) + complex(c)
        self._terms = {k: acc[k] for k in sorted(acc) if abs(acc[k]) > eps}
        self._hash = None

    @classmethod
    def from_terms(cls, terms: Iterable[NormalTerm], eps: float = DEFAULT_EPS) -> "OperatorExpr":
        acc: dict[tuple[XMonomial, ShiftWord], complex] = {}
        for t in terms:
            key = (t.xpart, t.shift)
            acc[key] = acc.get(key, 0j) + complex(t.coeff)
        return cls(acc, eps)

    # -- inspection -----------------------------------------------------
    @property
    def items(self) -> dict[tuple[XMonomial, ShiftWord], complex]:
        return dict(self._terms)

    def terms(self) -> Iterator[NormalTerm]:
        for (x, w), c in self._terms.items():
            yield NormalTerm(c, x, w)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[NormalTerm]:
        return self.terms()

    @property
    def modes(self) -> tuple[int, ...]:
        modes: set[int] = set()
        for x, w in self._terms:
            modes.update(x.modes)
            modes.update(w.modes)
        return tuple(sorted(modes))

    @property
    def words(self) -> tuple[ShiftWord, ...]:
        return tuple(sorted({w for _, w in self._terms}))

    def coeff(self, xpart: XMonomial = XMonomial(), shift: ShiftWord = ShiftWord()) -> complex:
        return self._terms.get((xpart, shift), 0j)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self._terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def prune(self, tol: float) -> "OperatorExpr":
        return OperatorExpr(self._terms, eps=tol)

    def allclose(self, other: "OperatorExpr", atol: float = 1e-12) -> bool:
        return (self - other).is_zero(atol)

    # -- algebra --------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0j) + c
        return OperatorExpr(acc)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def scale(self, s: complex) -> "OperatorExpr":
        return OperatorExpr({k: s * c for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(complex(other))
        if isinstance(other, OperatorExpr):
            return mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self.scale(complex(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self.scale(1.0 / complex(other))
        return NotImplemented

    def __pow__(self, n: int) -> "OperatorExpr":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = identity()
        for _ in range(n):
            out = mul(out, self)
        return out

    def dag(self) -> "OperatorExpr":
        return adjoint(self)

    # -- equality / display ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Number):
            other = identity().scale(complex(other))
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        from .syntax import format_expr

        return format_expr(self)

    def __repr__(self) -> str:
        return f"OperatorExpr({str(self)!r})"


def _coerce(value) -> OperatorExpr:
    if isinstance(value, OperatorExpr):
        return value
    if isinstance(value, Number):
        return identity().scale(complex(value))
    return NotImplemented


def identity() -> OperatorExpr:
    return OperatorExpr({(XMonomial(), ShiftWord()): 1.0})


def zero() -> OperatorExpr:
    return OperatorExpr()


def x_op(j: int) -> OperatorExpr:
    """Position operator of mode ``j``."""
    return OperatorExpr({(XMonomial.of({j: 1}), ShiftWord()): 1.0})


def shift_op(j: int, m: int = 1) -> OperatorExpr:
    """``T_j**m``; negative ``m`` gives powers of the adjoint."""
    return OperatorExpr({(XMonomial(), ShiftWord.of({j: m})): 1.0})


def word_op(word: ShiftWord | Mapping[int, int], coeff: complex = 1.0) -> OperatorExpr:
    if not isinstance(word, ShiftWord):
        word = ShiftWord.of(word)
    return OperatorExpr({(XMonomial(), word): coeff})


def mul(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    """Operator product ``a b`` brought back to normal order."""
    acc: dict[tuple[XMonomial, ShiftWord], complex] = {}
    for (xa, wa), ca in a._terms.items():
        for (xb, wb), cb in b._terms.items():
            w = wa * wb
            c = ca * cb
            for mono, k in _shifted_monomial(xb, wa).items():
                key = (xa * mono, w)
                acc[key] = acc.get(key, 0j) + c * k
    return OperatorExpr(acc)


def adjoint(a: OperatorExpr) -> OperatorExpr:
    """Hermitian adjoint.

    ``(c X W)^dagger = conj(c) W^-1 X = conj(c) X(x - m) W^-1``.
    """
    acc: dict[tuple[XMonomial, ShiftWord], complex] = {}
    for (x, w), c in a._terms.items():
        winv = w.inverse()
        cc = c.conjugate()
        for mono, k in _shifted_monomial(x, winv).items():
            key = (mono, winv)
            acc[key] = acc.get(key, 0j) + cc * k
    return OperatorExpr(acc)


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return mul(a, b) - mul(b, a)


def anticommutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return mul(a, b) + mul(b, a)


def is_hermitian(a: OperatorExpr, rtol: float = 1e-12) -> bool:
    """True when ``adjoint(a) == a`` up to ``rtol`` times the largest coefficient."""
    scale = max(1.0, a.max_abs_coeff())
    return (adjoint(a) - a).is_zero(rtol * scale)


def evaluate_weighted(pieces: Iterable[tuple[complex, OperatorExpr]]) -> OperatorExpr:
    """Sum of ``w * expr`` without intermediate canonicalization cost."""
    acc: dict[tuple[XMonomial, ShiftWord], complex] = {}
    for w, expr in pieces:
        if w == 0:
            continue
        for k, c in expr._terms.items():
            acc[k] = acc.get(k, 0j) + w * c
    return OperatorExpr(acc)
