"""Explicit minimizers of the attractive-repulsive interaction energy.

For W(r) = r^alpha/alpha - r^beta/beta over probability measures on R^d
there are two exactly solvable regimes:

* 2 <= alpha <= 4 with beta_star(alpha) <= beta <= 2 (and beta < alpha):
  the minimizer is the uniform measure on a sphere whose radius and
  energy are gamma-function expressions;
* alpha = 2 with -d < beta < min(2, 4-d): the minimizer is supported on
  a full ball with density proportional to (R^2-|x|^2)^((2-beta-d)/2).

The critical curve beta_star separates sphere-supported minimizers from
fatter ones.  At (alpha, beta) = (4, 2) the two constraints meet and
minimizers stop being unique; the sphere formulas remain valid there
and the point is tagged Boundary.  Logarithmic kernels (exponent 0 via
the ``*_is_log`` flags) are the continuous limits of either family.
"""

from __future__ import annotations

import math

from .errors import DomainError, IllConditioned, RegimeError
from .params import CandidateMinimizer, KernelParams, RegimeTag
from .potentials import quadratic_ball_moment, total_potential
from .special import digamma, gamma_fn

__all__ = [
    "CandidateMinimizer",
    "RegimeTag",
    "beta_star",
    "classify",
    "radius",
    "energy",
    "eta",
    "ball_density",
    "candidate_for",
]

_SUPPORTED = ("SphereTheorem1", "Boundary", "BallTheorem2")


def beta_star(d, alpha: float) -> float:
    """Critical repulsion exponent: the sphere stops minimizing below it.

    beta_star(alpha) = (-10 + 3 alpha + 7 d - alpha d - d^2) / (d + alpha - 3),
    a decreasing function of alpha with beta_star(2) = -d + 4 and values
    pinned to the interval (-d + 3, -d + 4].
    """
    if not float(d).is_integer() or d < 2:
        raise DomainError(f"need integer d >= 2, got {d}")
    if not alpha >= 2:
        raise DomainError(f"need alpha >= 2, got {alpha}")
    d = int(d)
    return (-10.0 + 3.0 * alpha + 7.0 * d - alpha * d - d * d) / (d + alpha - 3.0)


def classify(params: KernelParams) -> RegimeTag:
    """Decide which closed-form family (if any) covers the parameters.

    Ties are resolved toward the sphere: beta equal to beta_star or to 2
    still classifies as SphereTheorem1.  The corner (alpha, beta) = (4, 2)
    is tagged Boundary, where minimizers exist but are no longer unique.
    """
    d, a, b = params.d, params.alpha, params.beta
    if params.alpha_is_log or a < 2.0 or a > 4.0:
        return RegimeTag("OutOfScope", "alpha out of supported range")
    if d >= 2 and a == 4.0 and b == 2.0:
        return RegimeTag(
            "Boundary", "alpha=4, beta=2: sphere formulas hold, minimizer not unique"
        )
    if d >= 2:
        bs = beta_star(d, a)
        if bs <= b <= 2.0 and b < a:
            return RegimeTag("SphereTheorem1", f"sphere regime, beta_star={bs!r}")
    if a == 2.0 and b < min(2.0, 4.0 - d):
        return RegimeTag("BallTheorem2", "ball regime, alpha=2")
    if d < 2:
        return RegimeTag("OutOfScope", "only alpha = 2 is supported in dimension 1")
    if b > 2.0:
        return RegimeTag("OutOfScope", "beta above 2 is outside both regimes")
    return RegimeTag(
        "OutOfScope",
        f"beta below beta_star(alpha) = {beta_star(d, a)!r} with alpha != 2",
    )


def _require_supported(params: KernelParams) -> RegimeTag:
    tag = classify(params)
    if tag.tag not in _SUPPORTED:
        raise RegimeError(tag.detail)
    return tag


def _radius_sphere(d: int, alpha: float, beta: float) -> float:
    num = gamma_fn((d + beta - 1.0) / 2.0) * gamma_fn((2.0 * d + alpha - 2.0) / 2.0)
    den = gamma_fn((d + alpha - 1.0) / 2.0) * gamma_fn((2.0 * d + beta - 2.0) / 2.0)
    return 0.5 * (num / den) ** (1.0 / (alpha - beta))


def _radius_ball(d: int, beta: float) -> float:
    num = gamma_fn((4.0 - beta) / 2.0) * gamma_fn((beta + d) / 2.0)
    den = gamma_fn(1.0 + d / 2.0)
    return (num / den) ** (1.0 / (2.0 - beta))


def radius(params: KernelParams) -> float:
    """Support radius of the minimizer (sphere radius or ball radius)."""
    tag = _require_supported(params)
    if tag.tag == "BallTheorem2":
        return _radius_ball(params.d, params.beta)
    return _radius_sphere(params.d, params.alpha, params.beta)


def _energy_sphere(d: int, alpha: float, beta: float, beta_is_log: bool) -> float:
    if beta_is_log:
        bracket = (
            gamma_fn((d - 1.0) / 2.0)
            * gamma_fn((2.0 * d + alpha - 2.0) / 2.0)
            / (gamma_fn(d - 1.0) * gamma_fn((d + alpha - 1.0) / 2.0))
        )
        return (1.0 - math.log(bracket)) / (2.0 * alpha) + 0.25 * (
            digamma(d - 1.0) - digamma((d - 1.0) / 2.0)
        )
    r = _radius_sphere(d, alpha, beta)
    coef = (
        -(math.pi**-0.5)
        * 2.0 ** (d + alpha - 3.0)
        * gamma_fn(d / 2.0)
        * gamma_fn((d + alpha - 1.0) / 2.0)
        / gamma_fn((2.0 * d + alpha - 2.0) / 2.0)
    )
    return coef * (1.0 / beta - 1.0 / alpha) * r**alpha


def _energy_ball(d: int, beta: float, beta_is_log: bool) -> float:
    if beta_is_log:
        return 0.25 * (0.5 + math.log(d / 2.0) + digamma(2.0) - digamma(d / 2.0))
    r = _radius_ball(d, beta)
    return -d * (2.0 - beta) / (2.0 * beta * (4.0 - beta)) * r * r


def energy(params: KernelParams) -> float:
    """Minimum interaction energy in a supported regime."""
    tag = _require_supported(params)
    if tag.tag == "BallTheorem2":
        return _energy_ball(params.d, params.beta, params.beta_is_log)
    return _energy_sphere(params.d, params.alpha, params.beta, params.beta_is_log)


def candidate_for(params: KernelParams) -> CandidateMinimizer:
    """Build the minimizing measure as a CandidateMinimizer record."""
    tag = _require_supported(params)
    if tag.tag == "BallTheorem2":
        r = _radius_ball(params.d, params.beta)
        c_beta, _ = quadratic_ball_moment(params.d, params.beta)
        return CandidateMinimizer(
            "BallProfile", r, normalization=r ** (params.beta - 2.0) / c_beta
        )
    return CandidateMinimizer(
        "UniformSphere", _radius_sphere(params.d, params.alpha, params.beta)
    )


def ball_density(params: KernelParams, r: float) -> float:
    """Radial density of the ball-regime minimizer at distance r from its center.

    Zero outside the support radius.  Total mass is 1 by the choice of
    the C_beta normalization.
    """
    tag = classify(params)
    if tag.tag != "BallTheorem2":
        raise RegimeError(f"ball density needs the alpha=2 ball regime: {tag.detail}")
    if not r >= 0:
        raise DomainError(f"r must be >= 0, got {r}")
    cand = candidate_for(params)
    big_r = cand.radius
    if r >= big_r:
        return 0.0
    exponent = (2.0 - params.beta - params.d) / 2.0
    return cand.normalization * (big_r * big_r - r * r) ** exponent


def eta(params: KernelParams) -> float:
    """Constant value of the minimizer's potential on its own support.

    Always exactly twice the energy; computed that way, then cross-checked
    against an independent evaluation of the candidate's total potential
    at a support point (sphere surface, or ball center).  The two routes
    share no code beyond the gamma function, so their agreement is a real
    consistency test of the formulas.
    """
    tag = _require_supported(params)
    value = 2.0 * energy(params)
    cand = candidate_for(params)
    probe = 0.0 if tag.tag == "BallTheorem2" else cand.radius
    other = total_potential(params, cand, probe)
    if not abs(value - other) <= 1e-12 * max(1.0, abs(value)):
        raise IllConditioned(
            f"eta routes disagree: 2E={value!r} vs potential={other!r}"
        )
    return value
