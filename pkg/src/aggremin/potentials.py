"""Closed-form radial potentials of the two candidate measures.

The attractive-repulsive kernel is W(r) = r^alpha/alpha - r^beta/beta,
with r^gamma/gamma read as ln r when the exponent degenerates to 0.
Two families of candidate minimizers appear:

* the uniform probability measure on a sphere of radius R, whose
  potential is radial and expressible through the profile psi_gamma;
* a ball-supported density proportional to (R^2-|x|^2)^((2-beta-d)/2),
  whose alpha=2 potential splits into an exact quadratic part plus a
  hypergeometric remainder (ball_potential).

All profiles are functions of rho = |x/R|^2 with a branch point at
rho = 1 (the support boundary).  Piecewise formulas return the exact
gamma-function boundary value at rho = 1 instead of a series limit.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, RegimeError
from .params import CandidateMinimizer, KernelParams, RadialArg
from .special import Hyp2F1Input, digamma, gamma_fn, hyp2f1

__all__ = [
    "KernelParams",
    "RadialArg",
    "unit_sphere_area",
    "psi_gamma",
    "psi_values_at_one",
    "sphere_potential",
    "sphere_potential_alt",
    "ball_potential",
    "quadratic_ball_moment",
    "tilde_psi0",
    "tilde_psi0_prime",
    "total_potential",
]

_EPS = float(np.finfo(float).eps)
_SERIES_CAP = 2_000_000
# Width of the Taylor patch around the rho=1 branch point of tilde_psi0,
# where the series argument degenerates and convergence stalls.
_NEAR_ONE = 1e-6


def _check_dim(d, minimum: int) -> int:
    if not float(d).is_integer() or d < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {d}")
    return int(d)


def unit_sphere_area(d) -> float:
    """Surface measure of the unit sphere in R^d, |S^(d-1)| = 2 pi^(d/2) / Gamma(d/2)."""
    d = _check_dim(d, 1)
    return 2.0 * math.pi ** (d / 2.0) / gamma_fn(d / 2.0)


def _psi_one_value(d: int, gamma: float) -> float:
    """psi_gamma(1) through the Gauss boundary formula; needs d + gamma > 1."""
    if gamma == 0.0:
        return 1.0
    if not d + gamma > 1:
        raise DomainError(
            f"spherical average diverges on the sphere itself for gamma <= {1 - d}"
        )
    return (
        gamma_fn(d / 2.0)
        * gamma_fn(d + gamma - 1.0)
        / (gamma_fn((d + gamma) / 2.0) * gamma_fn((2.0 * d + gamma - 2.0) / 2.0))
    )


def _psi_raw(d: int, gamma: float, rho: float) -> float:
    """Two-branch hypergeometric profile without the public domain gate."""
    if gamma == 0.0:
        return 1.0
    a = -gamma / 2.0
    b = (2.0 - gamma - d) / 2.0
    c = d / 2.0
    if rho == 1.0:
        return _psi_one_value(d, gamma)
    if rho < 1.0:
        return hyp2f1(Hyp2F1Input(a, b, c, rho))
    return rho ** (gamma / 2.0) * hyp2f1(Hyp2F1Input(a, b, c, 1.0 / rho))


def psi_gamma(d, gamma: float, rho: float) -> float:
    """Scaled radial profile of the spherical average of r^gamma.

    For the uniform probability measure on the unit sphere in R^d,
    psi_gamma(|x|^2) is its potential under the pure power kernel, up to
    the surface-area normalization applied by :func:`sphere_potential`.
    The two branches (series in rho inside, series in 1/rho times
    rho^(gamma/2) outside) glue continuously at rho = 1 whenever the
    boundary value exists (gamma > 1 - d), and in C^1 fashion once
    d + gamma > 2.  Off the branch point every exponent is accepted.
    """
    RadialArg(rho)
    if gamma == 0.0:
        return 1.0
    d = _check_dim(d, 2)
    return _psi_raw(d, gamma, float(rho))


def psi_values_at_one(d, gamma: float):
    """Value and first two derivatives of psi_gamma at the branch point.

    Returns the triple (psi(1), psi'(1), psi''(1)) from the gamma-function
    closed forms.  The second derivative only exists for d + gamma > 3;
    in the strip 2 < d + gamma <= 3 it is returned as nan so the
    value/derivative pair stays usable (callers needing psi'' must check
    their own precondition).
    """
    if gamma == 0.0:
        return (1.0, 0.0, 0.0)
    d = _check_dim(d, 2)
    if not d + gamma > 2:
        raise DomainError(f"need d + gamma > 2, got {d + gamma}")
    tail = gamma_fn(d / 2.0) / gamma_fn((2.0 * d + gamma - 2.0) / 2.0)
    value = tail * gamma_fn(d + gamma - 1.0) / gamma_fn((d + gamma) / 2.0)
    first = (gamma / 2.0) * tail * gamma_fn(d + gamma - 2.0) / gamma_fn(
        (d + gamma - 2.0) / 2.0
    )
    if d + gamma > 3:
        from scipy.special import rgamma

        # rgamma handles the Gamma((d+gamma-4)/2) pole at d+gamma=4,
        # where the second derivative legitimately vanishes.
        second = (
            (gamma / 2.0)
            * (gamma / 2.0 - 1.0)
            * tail
            * gamma_fn(d + gamma - 3.0)
            * float(rgamma((d + gamma - 4.0) / 2.0))
        )
    else:
        second = math.nan
    return (value, first, second)


def sphere_potential(d, gamma: float, x_norm: float) -> float:
    """Integral of |x - w|^gamma over the unit sphere {|w| = 1} in R^d.

    Equals |S^(d-1)| psi_gamma(x_norm^2).  Off the sphere the formula
    holds for every exponent; on the sphere itself the integral only
    converges for gamma > 1 - d.
    """
    d = _check_dim(d, 2)
    if not x_norm >= 0:
        raise DomainError(f"x_norm must be >= 0, got {x_norm}")
    surf = unit_sphere_area(d)
    rho = float(x_norm) * float(x_norm)
    if rho == 1.0:
        if gamma != 0.0 and not gamma > 1 - d:
            raise DomainError(
                f"surface integral diverges at |x| = 1 for gamma <= {1 - d}"
            )
        return surf * _psi_one_value(d, gamma)
    return surf * _psi_raw(d, gamma, rho)


def sphere_potential_alt(d, gamma: float, x_norm: float) -> float:
    """Alternative single-branch form of :func:`sphere_potential`.

    Uses the argument 4 x / (1+x)^2, which stays in [0, 1) for x != 1,
    so one series covers interior and exterior at once.  Kept as an
    independent route for cross-checking the two-branch formula.
    """
    d = _check_dim(d, 2)
    if not x_norm >= 0:
        raise DomainError(f"x_norm must be >= 0, got {x_norm}")
    x = float(x_norm)
    if x == 1.0:
        raise DomainError("alternative form is singular at x_norm = 1")
    z = 4.0 * x / (1.0 + x) ** 2
    surf = unit_sphere_area(d)
    f = hyp2f1(Hyp2F1Input(-gamma / 2.0, (d - 1.0) / 2.0, d - 1.0, z))
    return surf * (1.0 + x) ** gamma * f


def ball_potential(d, gamma: float, x_norm: float) -> float:
    """Weighted ball integral of |x - y|^gamma against (1-|y|^2)^((2-gamma-d)/2).

    Defined for -d < gamma < -d + 4, where the weight is integrable.
    Inside the ball the value is exactly affine in x_norm^2; outside it
    is x_norm^gamma times a hypergeometric factor in x_norm^(-2).  At
    x_norm = 1 the two branches share a common limit and the (affine)
    inner value is returned.
    """
    d = _check_dim(d, 1)
    if not -d < gamma < -d + 4:
        raise DomainError(f"need -d < gamma < -d+4, got gamma={gamma} in d={d}")
    if not x_norm >= 0:
        raise DomainError(f"x_norm must be >= 0, got {x_norm}")
    x = float(x_norm)
    half = math.pi ** (d / 2.0) * gamma_fn((4.0 - gamma - d) / 2.0)
    if x <= 1.0:
        inner = half * gamma_fn((gamma + d) / 2.0) / gamma_fn(d / 2.0)
        return inner * (1.0 + (gamma / d) * x * x)
    outer = half / gamma_fn(2.0 - gamma / 2.0)
    f = hyp2f1(
        Hyp2F1Input(-gamma / 2.0, (2.0 - gamma - d) / 2.0, 2.0 - gamma / 2.0, x**-2)
    )
    return outer * x**gamma * f


def quadratic_ball_moment(d, beta: float):
    """Normalization C_beta and second-moment coefficient of the ball profile.

    Returns (C_beta, d/(4-beta)) with
    C_beta = pi^(d/2) Gamma((4-beta-d)/2) / Gamma((4-beta)/2), so that
    the quadratic-kernel potential of the unnormalized profile equals
    C_beta (|x|^2 + d/(4-beta)) / 2.
    """
    d = _check_dim(d, 1)
    if not -d < beta < -d + 4:
        raise DomainError(f"need -d < beta < -d+4, got beta={beta} in d={d}")
    c_beta = (
        math.pi ** (d / 2.0)
        * gamma_fn((4.0 - beta - d) / 2.0)
        / gamma_fn((4.0 - beta) / 2.0)
    )
    return (c_beta, d / (4.0 - beta))


def _sum_with_tail(first_term: float, ratio, label: str) -> float:
    """Sum first_term * (1 + r0 + r0 r1 + ...) for a power-law-decaying series.

    Same streaming/blocked scheme as the hypergeometric evaluator, but
    instead of failing at the cap it closes the sum with a geometric
    tail estimate t * r / (1 - r).  Appropriate only for the internal
    log-limit series, whose terms decay like a fixed power of n; the
    correction pushes the truncation error well below 1e-10 relative.
    """
    if first_term == 0.0:
        return 0.0
    total = 0.0
    carry = first_term
    k0 = 0
    block = 64
    while k0 < _SERIES_CAP:
        m = min(block, _SERIES_CAP - k0)
        idx = np.arange(k0, k0 + m, dtype=float)
        r = ratio(idx)
        steps = np.concatenate(([1.0], r[:-1]))
        terms = carry * np.cumprod(steps)
        partial = total + np.cumsum(terms)
        small = np.abs(terms) <= _EPS * np.abs(partial)
        if m >= 3:
            hits = np.nonzero(small[:-2] & small[1:-1] & small[2:])[0]
            if hits.size:
                j = hits[0] + 2
                rj = float(r[j]) if j < m else float(ratio(np.array([k0 + m]))[0])
                tail = terms[j] * rj / (1.0 - rj) if 0.0 < rj < 1.0 else 0.0
                return float(partial[j] + tail)
        total = float(partial[-1])
        carry = float(terms[-1]) * float(r[-1])
        if carry == 0.0:
            return total
        if not math.isfinite(total):
            raise DomainError(f"{label}: series diverged")
        k0 += m
        block = min(block * 2, 65536)
    r_next = float(ratio(np.array([float(_SERIES_CAP)]))[0])
    tail = carry * r_next / (1.0 - r_next) if 0.0 < r_next < 1.0 else 0.0
    return total + carry + tail


def _log_sphere_series(d: int, z: float) -> float:
    """T(z) = sum_{n>=1} ((2-d)/2)_n / ((d/2)_n n) z^n for z in [0, 1].

    Term-wise derivative of the psi_gamma Gauss series with respect to
    the exponent at 0; tilde_psi0 is -T/2 inside and ln(rho)/2 - T(1/rho)/2
    outside.  Identically zero in d = 2 and a single term in d = 4.
    """
    if d == 2 or z == 0.0:
        return 0.0
    a0 = (2.0 - d) / 2.0
    c0 = d / 2.0
    t1 = a0 / c0 * z

    def ratio(m):
        n = m + 1.0
        return (a0 + n) / (c0 + n) * (n / (n + 1.0)) * z

    return _sum_with_tail(t1, ratio, "log sphere series")


def _log_ball_series(d: int, z: float) -> float:
    """S(z) = sum_{n>=1} ((2-d)/2)_n / ((2)_n n) z^n for z in [0, 1]."""
    if d == 2 or z == 0.0:
        return 0.0
    a0 = (2.0 - d) / 2.0
    t1 = a0 / 2.0 * z

    def ratio(m):
        n = m + 1.0
        return (a0 + n) / (2.0 + n) * (n / (n + 1.0)) * z

    return _sum_with_tail(t1, ratio, "log ball series")


def tilde_psi0(d, rho: float) -> float:
    """Logarithmic-kernel profile: the limit of (psi_gamma(rho) - 1)/gamma.

    Equals the average of ln|x - w| over the unit sphere at rho = |x|^2.
    Far afield it behaves like ln(sqrt(rho)); at the branch point it
    takes the digamma value (digamma(d-1) - digamma(d/2))/2.  Within
    1e-6 of rho = 1 a second-order Taylor patch is used because the
    series argument degenerates there.
    """
    RadialArg(rho)
    d = _check_dim(d, 2)
    rho = float(rho)
    if d == 2:
        # Classical circle potential: zero inside, ln|x| outside.
        return 0.0 if rho <= 1.0 else 0.5 * math.log(rho)
    if rho == 1.0:
        return 0.5 * (digamma(d - 1.0) - digamma(d / 2.0))
    if abs(rho - 1.0) < _NEAR_ONE:
        value = 0.5 * (digamma(d - 1.0) - digamma(d / 2.0))
        h = 1e-4
        dd = (tilde_psi0_prime(d, 1.0 + h) - tilde_psi0_prime(d, 1.0 - h)) / (2 * h)
        return value + 0.25 * (rho - 1.0) + 0.5 * dd * (rho - 1.0) ** 2
    if rho < 1.0:
        return -0.5 * _log_sphere_series(d, rho)
    return 0.5 * math.log(rho) - 0.5 * _log_sphere_series(d, 1.0 / rho)


def tilde_psi0_prime(d, rho: float) -> float:
    """Derivative of :func:`tilde_psi0` in rho.

    One hypergeometric branch on each side of rho = 1, where both
    boundary values equal 1/4 for d >= 3.  In d = 2 the derivative
    genuinely jumps (0 inside, 1/(2 rho) outside); the returned value at
    exactly rho = 1 is the two-sided convention 1/4 in every dimension.
    Near the branch point the d = 3 series converges too slowly for the
    2e6-term budget and the evaluation can fail; production callers stay
    at least 1e-4 away or use the exact rho = 1 value.
    """
    RadialArg(rho)
    d = _check_dim(d, 2)
    rho = float(rho)
    if rho == 1.0:
        return 0.25
    if rho < 1.0:
        if d == 2:
            return 0.0
        f = hyp2f1(Hyp2F1Input(1.0, (4.0 - d) / 2.0, d / 2.0 + 1.0, rho))
        return (d - 2.0) / (2.0 * d) * f
    f = hyp2f1(Hyp2F1Input(1.0, (2.0 - d) / 2.0, d / 2.0, 1.0 / rho))
    return f / (2.0 * rho)


def _log_ball_lambda(d: int, rho: float) -> float:
    """Normalized log-kernel potential piece of the unit ball profile.

    Interior: (digamma(d/2) - digamma(2))/2 + rho/d, exactly affine.
    Exterior: ln(rho)/2 - S(1/rho)/2.  Continuous at rho = 1.
    """
    if rho <= 1.0:
        return 0.5 * (digamma(d / 2.0) - digamma(2.0)) + rho / d
    return 0.5 * math.log(rho) - 0.5 * _log_ball_series(d, 1.0 / rho)


def total_potential(
    params: KernelParams, candidate: CandidateMinimizer, x_norm: float
) -> float:
    """Potential of a candidate measure under the kernel, at radius x_norm.

    For a uniform sphere of radius R this is
    R^alpha psi_alpha(rho)/alpha - R^beta psi_beta(rho)/beta at
    rho = (x_norm/R)^2, with the repulsive term replaced by
    ln R + tilde_psi0(rho) in the logarithmic case.  For the ball
    profile (alpha = 2 only) the attractive part is an exact quadratic
    and the repulsive part reduces to ball_potential.
    """
    if not x_norm >= 0:
        raise DomainError(f"x_norm must be >= 0, got {x_norm}")
    if params.alpha_is_log:
        raise RegimeError("logarithmic attraction has no candidate closed form")
    d = params.d
    r_cand = candidate.radius
    x = float(x_norm)
    rho = (x / r_cand) ** 2
    if candidate.kind == "UniformSphere":
        if d < 2:
            raise RegimeError("sphere candidates need d >= 2")
        if not d + params.alpha > 2:
            raise RegimeError(f"need d + alpha > 2 for the sphere profile, d={d}")
        attract = r_cand**params.alpha / params.alpha * _psi_raw(d, params.alpha, rho)
        if params.beta_is_log:
            repel = math.log(r_cand) + tilde_psi0(d, rho)
        else:
            if not d + params.beta > 2:
                raise RegimeError(
                    f"sphere profile needs d + beta > 2, got {d + params.beta}"
                )
            repel = r_cand**params.beta / params.beta * _psi_raw(d, params.beta, rho)
        return attract - repel
    # BallProfile
    if params.alpha != 2.0:
        raise RegimeError("ball profile candidates exist only for alpha = 2")
    if not params.beta < min(2.0, -d + 4.0):
        raise RegimeError(
            f"ball profile needs beta < min(2, -d+4), got beta={params.beta}"
        )
    quad = 0.5 * x * x + r_cand * r_cand * d / (2.0 * (4.0 - params.beta))
    if params.beta_is_log:
        return quad - math.log(r_cand) - _log_ball_lambda(d, rho)
    c_beta, _ = quadratic_ball_moment(d, params.beta)
    shape = ball_potential(d, params.beta, x / r_cand)
    return quad - r_cand**params.beta / (params.beta * c_beta) * shape
