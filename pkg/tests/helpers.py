"""Hypothesis strategies and brute-force oracles shared by the test modules."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from ladderdyn import OperatorExpr, ShiftWord, XMonomial, word_op

MODES = (1, 2, 3)

small_ints = st.integers(min_value=-3, max_value=3)
coeffs = st.builds(complex, small_ints, small_ints).filter(lambda c: c != 0)
xmonos = st.dictionaries(st.sampled_from(MODES), st.integers(1, 2), max_size=2).map(XMonomial.of)
words = st.dictionaries(st.sampled_from(MODES), st.integers(-2, 2), max_size=3).map(ShiftWord.of)


@st.composite
def exprs(draw, max_terms: int = 3, modes=MODES):
    """Random expressions with small Gaussian-integer coefficients (exact in float)."""
    mono = st.dictionaries(st.sampled_from(modes), st.integers(1, 2), max_size=2).map(XMonomial.of)
    word = st.dictionaries(st.sampled_from(modes), st.integers(-2, 2), max_size=2).map(ShiftWord.of)
    terms = draw(st.lists(st.tuples(coeffs, mono, word), min_size=1, max_size=max_terms))
    out = OperatorExpr()
    for c, x, w in terms:
        out = out + OperatorExpr({(x, w): c})
    return out


def centers(modes=MODES):
    return st.fixed_dictionaries({j: st.floats(-3, 3, allow_nan=False) for j in modes})


def apply_callable(a: OperatorExpr, f):
    """Act with ``a`` on a function ``f(x: dict) -> complex`` straight from the definitions.

    ``x_j`` multiplies by the coordinate and ``T_j^m`` evaluates at ``x_j + m``;
    no normal-ordering rules are used.
    """

    def g(x: dict) -> complex:
        total = 0j
        for t in a.terms():
            shifted = dict(x)
            for j, m in t.shift.exponents:
                shifted[j] = shifted.get(j, 0.0) + m
            val = f(shifted)
            for j, p in t.xpart.powers:
                val *= x.get(j, 0.0) ** p
            total += t.coeff * val
        return total

    return g


def gaussian_fn(centers: dict, phase: dict | None = None):
    """Normalized product of unit-width Gaussians, optionally with a plane-wave phase."""
    phase = phase or {}

    def f(x: dict) -> complex:
        val = 1.0 + 0j
        for j, k in centers.items():
            xj = x.get(j, 0.0)
            val *= np.pi ** -0.25 * np.exp(-0.5 * (xj - k) ** 2 + 1j * phase.get(j, 0.0) * xj)
        return val

    return f


def lattice_inner(f, g, modes, lo=-9.0, hi=9.0, cells_per_unit=6):
    """``<f, g>`` as a Riemann sum on a lattice containing all integer shifts.

    For Gaussian integrands the sum converges spectrally in the spacing.
    """
    axis = np.arange(lo, hi + 1e-12, 1.0 / cells_per_unit)
    mesh = np.meshgrid(*([axis] * len(modes)), indexing="ij")
    fv = np.vectorize(lambda *xs: f(dict(zip(modes, xs))), otypes=[complex])(*mesh)
    gv = np.vectorize(lambda *xs: g(dict(zip(modes, xs))), otypes=[complex])(*mesh)
    return complex(np.sum(np.conj(fv) * gv) / cells_per_unit ** len(modes))


def word(mapping) -> OperatorExpr:
    return word_op(ShiftWord.of(mapping))
