"""Particle gradient descent on the discrete interaction energy.

The continuum energy is discretized over N equal point masses with the
self-interaction excluded; the resulting system follows explicit Euler
steps along the per-particle forces with a backtracking line search, so
the recorded energies never increase.  Converged configurations act as
an empirical cross-check on the closed-form minimizers: in the sphere
regime the particles should ring up at the predicted radius, in the
ball regime they should fill it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closed_form import radius
from .errors import DomainError, NonConvergence, RegimeError, StallError
from .params import KernelParams

__all__ = [
    "ParticleSystem",
    "RadialStats",
    "kernel_w",
    "force",
    "discrete_energy",
    "max_force",
    "step",
    "radial_stats",
    "run_to_convergence",
]

_MIN_STEP = 1e-16


def _kernel_singular_at_zero(params: KernelParams) -> bool:
    return (
        params.alpha_is_log
        or params.beta_is_log
        or params.beta <= 0
        or params.alpha <= 0
    )


def kernel_w(params: KernelParams, r: float) -> float:
    """Pair interaction at distance r: r^alpha/alpha - r^beta/beta.

    Either power law degrades to ln(r) when the corresponding log flag
    is set.  Distance zero is only meaningful when both exponents are
    positive (the value is then 0); otherwise the kernel blows up there
    and a DomainError is raised.
    """
    r = float(r)
    if r < 0:
        raise DomainError(f"distance must be >= 0, got {r}")
    if r == 0.0:
        if _kernel_singular_at_zero(params):
            raise DomainError("kernel is singular at distance 0")
        return 0.0
    attract = math.log(r) if params.alpha_is_log else r**params.alpha / params.alpha
    repel = math.log(r) if params.beta_is_log else r**params.beta / params.beta
    return attract - repel


def force(params: KernelParams, z) -> np.ndarray:
    """Force -grad W(z) exerted on a particle at offset z from a source.

    Radial kernels give (|z|^(alpha-2) - |z|^(beta-2)) z for the
    gradient, with |z|^(-2) z replacing either term in log mode; the
    force is its negation.  It vanishes on the unit sphere, where
    attraction and repulsion balance.
    """
    z = np.asarray(z, dtype=float)
    r2 = float(np.dot(z, z))
    if r2 == 0.0:
        raise DomainError("force is undefined at zero offset")
    r = math.sqrt(r2)
    ca = 1.0 / r2 if params.alpha_is_log else r ** (params.alpha - 2.0)
    cb = 1.0 / r2 if params.beta_is_log else r ** (params.beta - 2.0)
    return -(ca - cb) * z


def _pairwise_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    dist2 = np.sum(diff * diff, axis=2)
    np.fill_diagonal(dist2, np.inf)
    return np.sqrt(dist2)


def _energy_of(params: KernelParams, positions: np.ndarray) -> float:
    n = positions.shape[0]
    iu = np.triu_indices(n, k=1)
    diff = positions[iu[0]] - positions[iu[1]]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    if np.any(dist == 0.0):
        raise DomainError("coincident particles")
    if params.alpha_is_log:
        attract = np.log(dist)
    else:
        attract = dist**params.alpha / params.alpha
    if params.beta_is_log:
        repel = np.log(dist)
    else:
        repel = dist**params.beta / params.beta
    return float(np.sum(attract - repel)) / n**2


def _pair_forces(params: KernelParams, positions: np.ndarray) -> np.ndarray:
    """Per-particle mean force (1/N) sum_{j != i} -grad W(x_i - x_j).

    Fully vectorized with a fixed summation order, so reruns with the
    same inputs are bit-identical.
    """
    n = positions.shape[0]
    diff = positions[:, None, :] - positions[None, :, :]
    dist2 = np.sum(diff * diff, axis=2)
    off_diag = ~np.eye(n, dtype=bool)
    if np.any(dist2[off_diag] == 0.0):
        raise DomainError("coincident particles")
    np.fill_diagonal(dist2, 1.0)
    dist = np.sqrt(dist2)
    ca = 1.0 / dist2 if params.alpha_is_log else dist ** (params.alpha - 2.0)
    cb = 1.0 / dist2 if params.beta_is_log else dist ** (params.beta - 2.0)
    coef = ca - cb
    np.fill_diagonal(coef, 0.0)
    return -np.sum(coef[:, :, None] * diff, axis=1) / n


@dataclass(frozen=True, eq=False)
class ParticleSystem:
    """State of the N-particle descent.

    Positions are an N x d array of pairwise-distinct finite points.
    ``energy_trace`` holds the energy after every accepted step starting
    from the initial state; ``step_trace`` the step size that produced
    each entry.  Instances are immutable; ``step`` returns a new one.
    """

    positions: np.ndarray
    params: KernelParams
    rng_seed: int = 0
    step_size: float = 0.5
    iteration: int = 0
    energy_trace: tuple = field(default=())
    step_trace: tuple = field(default=())

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[0] < 2:
            raise DomainError(
                f"positions must be an N x d array with N >= 2, got shape {pos.shape}"
            )
        if not np.all(np.isfinite(pos)):
            raise DomainError("positions must be finite")
        if float(np.min(_pairwise_distances(pos))) == 0.0:
            raise DomainError("coincident particles")
        if not self.step_size > 0:
            raise DomainError(f"step_size must be positive, got {self.step_size}")
        if self.iteration < 0:
            raise DomainError(f"iteration must be >= 0, got {self.iteration}")
        object.__setattr__(self, "positions", pos)
        trace = tuple(self.energy_trace)
        if not trace:
            trace = (_energy_of(self.params, pos),)
        object.__setattr__(self, "energy_trace", trace)
        steps = tuple(self.step_trace)
        if not steps:
            steps = (self.step_size,)
        object.__setattr__(self, "step_trace", steps)

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class RadialStats:
    """Radial summary of a configuration about its mass centroid."""

    mean_radius: float
    std_radius: float
    max_radius: float
    center: tuple

    def to_dict(self) -> dict:
        return {
            "mean_radius": self.mean_radius,
            "std_radius": self.std_radius,
            "max_radius": self.max_radius,
            "center": list(self.center),
        }


def discrete_energy(sys: ParticleSystem) -> float:
    """Energy (1/(2 N^2)) sum over ordered pairs i != j of W(|x_i - x_j|)."""
    return _energy_of(sys.params, sys.positions)


def max_force(sys: ParticleSystem) -> float:
    """Largest per-particle force magnitude; zero at a critical point."""
    forces = _pair_forces(sys.params, sys.positions)
    return float(np.max(np.sqrt(np.sum(forces * forces, axis=1))))


def _advanced_state(
    sys: ParticleSystem, positions: np.ndarray, energy: float, accepted_h: float
) -> ParticleSystem:
    # Internal constructor for accepted proposals, whose positions were
    # already proven finite and distinct by the energy evaluation; skips
    # the O(N^2) revalidation in __post_init__.
    new = object.__new__(ParticleSystem)
    object.__setattr__(new, "positions", positions)
    object.__setattr__(new, "params", sys.params)
    object.__setattr__(new, "rng_seed", sys.rng_seed)
    object.__setattr__(new, "step_size", accepted_h * 1.1)
    object.__setattr__(new, "iteration", sys.iteration + 1)
    object.__setattr__(new, "energy_trace", sys.energy_trace + (energy,))
    object.__setattr__(new, "step_trace", sys.step_trace + (accepted_h,))
    return new


def _advance(sys: ParticleSystem, forces: np.ndarray) -> ParticleSystem:
    e0 = sys.energy_trace[-1]
    h = sys.step_size
    while True:
        if h < _MIN_STEP:
            raise StallError(
                f"step size underflowed below {_MIN_STEP} at iteration {sys.iteration}"
            )
        proposal = sys.positions + h * forces
        try:
            e1 = _energy_of(sys.params, proposal)
        except DomainError:
            h *= 0.5
            continue
        if math.isfinite(e1) and e1 <= e0:
            break
        h *= 0.5
    return _advanced_state(sys, proposal, e1, h)


def step(sys: ParticleSystem) -> ParticleSystem:
    """One accepted descent step with backtracking on the step size.

    The proposal x + h F is halved until the energy does not increase
    and no particles collide, then the accepted step is recorded and
    the next attempt starts 10% larger.  Underflow of h below 1e-16
    raises StallError; by construction the energy trace never rises.
    """
    return _advance(sys, _pair_forces(sys.params, sys.positions))


def radial_stats(sys: ParticleSystem) -> RadialStats:
    """Mean, spread, and maximum of particle radii about the centroid."""
    center = sys.positions.mean(axis=0)
    radii = np.sqrt(np.sum((sys.positions - center) ** 2, axis=1))
    return RadialStats(
        mean_radius=float(np.mean(radii)),
        std_radius=float(np.std(radii)),
        max_radius=float(np.max(radii)),
        center=tuple(float(c) for c in center),
    )


def _initial_positions(
    params: KernelParams, n_particles: int, rng: np.random.Generator
) -> np.ndarray:
    try:
        scale = 2.0 * radius(params)
    except RegimeError:
        scale = 1.0
    d = params.d
    directions = rng.normal(size=(n_particles, d))
    norms = np.sqrt(np.sum(directions * directions, axis=1))
    while np.any(norms == 0.0):
        directions = rng.normal(size=(n_particles, d))
        norms = np.sqrt(np.sum(directions * directions, axis=1))
    radii = scale * rng.random(n_particles) ** (1.0 / d)
    return directions * (radii / norms)[:, None]


def run_to_convergence(
    params: KernelParams,
    n_particles: int,
    seed: int,
    tol: float = 1e-8,
    max_iter: int = 2000,
):
    """Descend from a random cloud until the forces are negligible.

    Particles start uniformly distributed in a ball of twice the
    predicted radius (unit ball when no prediction applies) and step
    until the largest per-particle force drops to ``tol``.  Returns the
    converged system with its radial statistics; if the iteration
    budget runs out first, raises NonConvergence whose ``partial``
    attribute carries the best-so-far pair.
    """
    if n_particles < 16:
        raise DomainError(f"need at least 16 particles, got {n_particles}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    rng = np.random.default_rng(seed)
    sys = ParticleSystem(
        positions=_initial_positions(params, n_particles, rng),
        params=params,
        rng_seed=int(seed),
    )
    for _ in range(max_iter):
        forces = _pair_forces(params, sys.positions)
        if float(np.max(np.sqrt(np.sum(forces * forces, axis=1)))) <= tol:
            return sys, radial_stats(sys)
        sys = _advance(sys, forces)
    if max_force(sys) <= tol:
        return sys, radial_stats(sys)
    raise NonConvergence(
        f"force norm still above {tol} after {max_iter} iterations",
        partial=(sys, radial_stats(sys)),
    )
