"""Gamma-family functions and Gauss/generalized hypergeometric series.

Everything here is real-argument and restricted to z in [0, 1], which is
all the radial potential formulas need.  The evaluation strategy for
F(a,b;c;z):

* direct summation for z <= 0.75 (terms decay at least geometrically);
* for z in (0.75, 1), the z -> 1-z connection formula (DLMF 15.8.4),
  unless c-a-b is within 1e-8 of an integer, where the two connection
  terms cancel catastrophically; there we fall back to direct summation
  with a documented accuracy floor of about 1e-8 and a 2e6 term cap;
* z = 1 itself goes through the Gauss summation formula, which is exact
  up to gamma-function rounding whenever c-a-b > 0.

Terminating series (a or b a non-positive integer, detected within
1e-12) are summed exactly as polynomials regardless of z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import DomainError, NonConvergence, PoleError
from .params import GammaArg

__all__ = [
    "GammaArg",
    "Hyp2F1Input",
    "gamma_fn",
    "digamma",
    "pochhammer",
    "hyp2f1",
    "hyp2f1_at_one",
    "hyp2f1_deriv",
    "hyp3f2",
]

_EPS = float(np.finfo(float).eps)
SERIES_CAP = 2_000_000
_INT_TOL = 1e-12
_CONNECTION_CUTOFF = 1e-8


def _is_nonpositive_integer(x: float, tol: float = 0.0) -> bool:
    if tol == 0.0:
        return x <= 0 and float(x).is_integer()
    return x <= 0.5 and abs(x - round(x)) <= tol and round(x) <= 0


def gamma_fn(x: float) -> float:
    """Gamma function on the real line, poles excluded.

    Backed by scipy's implementation (Lanczos plus reflection), which is
    comfortably within 1e-13 relative error on |x| <= 50.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma pole at {x}")
    return float(_sp.gamma(x))


def digamma(x: float) -> float:
    """Logarithmic derivative Gamma'(x)/Gamma(x)."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma pole at {x}")
    return float(_sp.psi(x))


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1.

    Computed as a plain product so that integer zeros (e.g. (-2)_3) come
    out exactly zero.
    """
    if n < 0 or not float(n).is_integer():
        raise DomainError(f"pochhammer order must be a nonnegative integer, got {n}")
    out = 1.0
    x = float(x)
    for k in range(int(n)):
        out *= x + k
    return out


@dataclass(frozen=True)
class Hyp2F1Input:
    """Validated parameter/argument bundle (a, b, c, z) for F(a,b;c;z).

    c must avoid the non-positive integers and z must lie in [0, 1];
    z = 1 additionally needs c - a - b > 0 for the series to converge.
    """

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"c={self.c} is a non-positive integer")
        if not 0.0 <= self.z <= 1.0:
            raise DomainError(f"z={self.z} outside [0, 1]")
        if self.z == 1.0 and not self.c - self.a - self.b > 0:
            raise DomainError(
                "z=1 requires c-a-b > 0, got "
                f"c-a-b={self.c - self.a - self.b}"
            )


def _blocked_sum(ratio, cap: int, label: str) -> float:
    """Sum 1 + t1 + t2 + ... where t_{n+1} = ratio(n) * t_n.

    ``ratio`` must accept a float ndarray of indices.  Stops when three
    consecutive terms fall below eps times the running partial sum;
    raises NonConvergence at the cap.  Blocks keep the inner arithmetic
    in numpy, which matters for the slowly-decaying near-boundary cases.
    """
    total = 1.0
    carry = 1.0
    n0 = 0
    block = 64
    while n0 < cap:
        m = min(block, cap - n0)
        n = np.arange(n0, n0 + m, dtype=float)
        terms = carry * np.cumprod(ratio(n))
        partial = total + np.cumsum(terms)
        small = np.abs(terms) <= _EPS * np.abs(partial)
        if m >= 3:
            hits = np.nonzero(small[:-2] & small[1:-1] & small[2:])[0]
            if hits.size:
                return float(partial[hits[0] + 2])
        total = float(partial[-1])
        carry = float(terms[-1])
        if carry == 0.0:
            return total
        if not math.isfinite(total):
            raise NonConvergence(f"{label}: series blew up (non-finite partial sum)")
        n0 += m
        block = min(block * 2, 65536)
    raise NonConvergence(f"{label}: no convergence within {cap} terms")


def _terminating_order(a: float, b: float):
    """Smallest m with a = -m or b = -m (within 1e-12), else None."""
    best = None
    for p in (a, b):
        if abs(p - round(p)) <= _INT_TOL and round(p) <= 0:
            m = int(-round(p))
            best = m if best is None else min(best, m)
    return best


def _finite_2f1(a: float, b: float, c: float, z: float, m: int) -> float:
    total = 1.0
    term = 1.0
    for n in range(m):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z
        total += term
    return total


def _direct_2f1(a: float, b: float, c: float, z: float) -> float:
    return _blocked_sum(
        lambda n: (a + n) * (b + n) / ((c + n) * (1.0 + n)) * z,
        SERIES_CAP,
        "hyp2f1",
    )


def _gauss_at_one(a: float, b: float, c: float) -> float:
    # Gauss summation; rgamma turns denominator poles into exact zeros.
    return float(
        _sp.gamma(c) * _sp.gamma(c - a - b) * _sp.rgamma(c - a) * _sp.rgamma(c - b)
    )


def _connection_2f1(a: float, b: float, c: float, z: float) -> float:
    # DLMF 15.8.4; valid because s = c-a-b is kept away from the integers.
    s = c - a - b
    w = 1.0 - z
    coef1 = _sp.gamma(c) * _sp.gamma(s) * _sp.rgamma(c - a) * _sp.rgamma(c - b)
    coef2 = _sp.gamma(c) * _sp.gamma(-s) * _sp.rgamma(a) * _sp.rgamma(b)
    f1 = _gauss_series(a, b, 1.0 - s, w) if coef1 != 0.0 else 0.0
    f2 = _gauss_series(c - a, c - b, 1.0 + s, w) if coef2 != 0.0 else 0.0
    return float(coef1 * f1 + coef2 * w**s * f2)


def _gauss_series(a: float, b: float, c: float, z: float) -> float:
    """Internal F(a,b;c;z) for z in [0, 1]; c checked by the caller."""
    if z == 0.0:
        return 1.0
    if z == 1.0:
        if not c - a - b > 0:
            raise DomainError("F(a,b;c;1) needs c-a-b > 0")
        return _gauss_at_one(a, b, c)
    m = _terminating_order(a, b)
    if m is not None:
        return _finite_2f1(a, b, c, z, m)
    if z <= 0.75:
        return _direct_2f1(a, b, c, z)
    s = c - a - b
    if abs(s - round(s)) <= _CONNECTION_CUTOFF:
        # Documented fallback: near-integer s makes the connection
        # formula cancel; plain summation keeps ~1e-8 here.
        return _direct_2f1(a, b, c, z)
    return _connection_2f1(a, b, c, z)


def hyp2f1(inp: Hyp2F1Input) -> float:
    """Gauss hypergeometric series F(a,b;c;z) for z in [0, 1).

    The boundary value lives in :func:`hyp2f1_at_one`; asking for z = 1
    here is an error rather than a silent detour.
    """
    if inp.z == 1.0:
        raise DomainError("use hyp2f1_at_one for the z=1 boundary value")
    return _gauss_series(inp.a, inp.b, inp.c, inp.z)


def hyp2f1_at_one(a: float, b: float, c: float) -> float:
    """Boundary value F(a,b;c;1) = Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b)).

    Requires c - a - b > 0 (else the series diverges at 1).  Zeros of
    1/Gamma at non-positive integer c-a or c-b are honored exactly.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    if not c - a - b > 0:
        raise DomainError(f"need c-a-b > 0 at z=1, got {c - a - b}")
    return _gauss_at_one(a, b, c)


def hyp2f1_deriv(inp: Hyp2F1Input, order: int) -> float:
    """First or second z-derivative of F(a,b;c;z) via parameter shifts.

    d/dz F(a,b;c;z) = (ab/c) F(a+1,b+1;c+1;z), applied once or twice.
    At z = 1 the shifted boundary values are used; they only extend
    continuously when c-a-b exceeds the derivative order, so anything
    with c-a-b in (0, order] is refused.
    """
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    a, b, c, z = inp.a, inp.b, inp.c, inp.z
    coef = a * b / c
    if order == 2:
        coef *= (a + 1) * (b + 1) / (c + 1)
    k = order
    if z == 1.0:
        if not c - a - b > order:
            raise DomainError(
                f"derivative of order {order} at z=1 needs c-a-b > {order}"
            )
        return coef * _gauss_at_one(a + k, b + k, c + k)
    return coef * _gauss_series(a + k, b + k, c + k, z)


def _hyp3f2_tail(t_last: float, n_last: float, s3: float) -> float:
    """Euler-Maclaurin estimate of sum_{n > n_last} t_n, t_n ~ C n^(-1-s3).

    ``t_last`` is the final term already accumulated.  The estimate is
    accurate to O(1/n_last) relative to the tail, far below the
    rounding floor of the truncated sum itself.
    """
    n = n_last
    return t_last * (n / s3 - 0.5 + (1.0 + s3) / (12.0 * n))


def hyp3f2(a0: float, a1: float, a2: float, b0: float, b1: float, z: float) -> float:
    """Generalized hypergeometric 3F2(a0,a1,a2; b0,b1; z) on [0, 1].

    Direct summation; terminating numerator parameters short-circuit to
    the exact polynomial.  At z = 1 convergence needs
    s3 = b0+b1-a0-a1-a2 > 0 and the terms only decay like n^(-1-s3), so
    the sum is truncated at 1e6 terms and finished with an
    Euler-Maclaurin tail estimate (absolute accuracy around 1e-11 for
    s3 of order one).
    """
    for b_ in (b0, b1):
        if _is_nonpositive_integer(b_, _INT_TOL):
            raise DomainError(f"denominator parameter {b_} is a non-positive integer")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z={z} outside [0, 1]")
    if z == 0.0:
        return 1.0

    m = None
    for p in (a0, a1, a2):
        if abs(p - round(p)) <= _INT_TOL and round(p) <= 0:
            k = int(-round(p))
            m = k if m is None else min(m, k)
    if m is not None:
        total = 1.0
        term = 1.0
        for n in range(m):
            term *= (
                (a0 + n) * (a1 + n) * (a2 + n)
                / ((b0 + n) * (b1 + n) * (1.0 + n))
                * z
            )
            total += term
        return total

    def ratio(n):
        return (a0 + n) * (a1 + n) * (a2 + n) / ((b0 + n) * (b1 + n) * (1.0 + n)) * z

    if z < 1.0:
        return _blocked_sum(ratio, SERIES_CAP, "hyp3f2")

    s3 = b0 + b1 - a0 - a1 - a2
    if not s3 > 0:
        raise DomainError(f"3F2 at z=1 needs sum(b)-sum(a) > 0, got {s3}")
    budget = 1_000_000
    total = 1.0
    carry = 1.0
    n0 = 0
    block = 4096
    while n0 < budget:
        mblk = min(block, budget - n0)
        n = np.arange(n0, n0 + mblk, dtype=float)
        terms = carry * np.cumprod(ratio(n))
        partial = total + np.cumsum(terms)
        small = np.abs(terms) <= _EPS * np.abs(partial)
        if mblk >= 3:
            hits = np.nonzero(small[:-2] & small[1:-1] & small[2:])[0]
            if hits.size:
                return float(partial[hits[0] + 2])
        total = float(partial[-1])
        carry = float(terms[-1])
        n0 += mblk
        block = min(block * 2, 65536)
    return total + _hyp3f2_tail(carry, float(n0), s3)
