"""Discrete gradient descent: kernel, forces, descent loop, statistics.

Exact pair values pin the kernel and force conventions; the descent is
checked for its contract properties (monotone energy, determinism,
conserved centroid) and for converging toward the predicted minimizers
as the particle count grows.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aggremin import (
    DomainError,
    KernelParams,
    NonConvergence,
    ParticleSystem,
    RadialStats,
    discrete_energy,
    energy,
    force,
    kernel_w,
    max_force,
    radial_stats,
    radius,
    run_to_convergence,
    step,
)
from aggremin.flow import _initial_positions


def test_kernel_w_values():
    assert kernel_w(KernelParams(2, 2.0, 1.0), 1.0) == -0.5
    assert kernel_w(KernelParams(2, 2.0, 0.0, beta_is_log=True), 1.0) == 0.5
    log_attract = KernelParams(2, 0.0, -1.0, alpha_is_log=True)
    assert kernel_w(log_attract, 1.0) == 1.0
    assert kernel_w(KernelParams(2, 2.0, 1.0), 0.0) == 0.0


def test_kernel_w_gates():
    with pytest.raises(DomainError):
        kernel_w(KernelParams(2, 2.0, -1.0), 0.0)
    with pytest.raises(DomainError):
        kernel_w(KernelParams(2, 2.0, 0.0, beta_is_log=True), 0.0)
    with pytest.raises(DomainError):
        kernel_w(KernelParams(2, 2.0, 1.0), -0.5)


def test_kernel_w_is_stationary_at_unit_distance():
    h = 1e-6
    for params in (KernelParams(3, 2.5, 0.7), KernelParams(2, 3.0, 1.75)):
        slope = (kernel_w(params, 1.0 + h) - kernel_w(params, 1.0 - h)) / (2.0 * h)
        assert abs(slope) < 1e-9, params


def test_force_balances_exactly_on_the_unit_sphere():
    params = KernelParams(3, 2.5, 0.7)
    for z in ([1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.6, 0.8, 0.0]):
        assert np.all(force(params, z) == 0.0), z


def test_force_value_and_antisymmetry():
    params = KernelParams(2, 2.0, 0.0, beta_is_log=True)
    got = force(params, [2.0, 0.0])
    assert np.allclose(got, [-1.5, 0.0], rtol=0.0, atol=1e-15)
    z = np.array([0.4, -1.1])
    assert np.all(force(params, z) + force(params, -z) == 0.0)
    with pytest.raises(DomainError):
        force(params, [0.0, 0.0])


@given(
    zx=st.floats(-3.0, 3.0),
    zy=st.floats(-3.0, 3.0),
)
@settings(max_examples=100, deadline=None)
def test_force_antisymmetry_property(zx, zy):
    params = KernelParams(2, 3.0, 1.0)
    z = np.array([zx, zy])
    if float(np.dot(z, z)) == 0.0:
        return
    assert np.all(force(params, z) + force(params, -z) == 0.0)


def test_force_matches_kernel_gradient():
    params = KernelParams(3, 2.5, 0.7)
    z = np.array([1.3, 0.4, -0.2])
    r = float(np.linalg.norm(z))
    h = 1e-7
    slope = (kernel_w(params, r + h) - kernel_w(params, r - h)) / (2.0 * h)
    want = -slope * z / r
    assert np.allclose(force(params, z), want, rtol=1e-7, atol=1e-12)


def test_discrete_energy_of_a_pair_at_unit_distance():
    def pair(params):
        return ParticleSystem(
            positions=[[0.0, 0.0], [1.0, 0.0]], params=params
        )

    assert discrete_energy(pair(KernelParams(2, 2.0, 1.0))) == -0.125
    got = discrete_energy(pair(KernelParams(2, 2.5, 0.7)))
    assert abs(got - (1.0 / 2.5 - 1.0 / 0.7) / 4.0) < 1e-15
    log_params = KernelParams(2, 2.0, 0.0, beta_is_log=True)
    assert discrete_energy(pair(log_params)) == 0.125


def test_discrete_energy_is_translation_invariant():
    rng = np.random.default_rng(5)
    pos = rng.normal(size=(12, 2))
    params = KernelParams(2, 3.0, 1.75)
    a = discrete_energy(ParticleSystem(positions=pos, params=params))
    b = discrete_energy(
        ParticleSystem(positions=pos + np.array([5.0, -7.0]), params=params)
    )
    assert abs(a - b) <= 1e-12 * (1.0 + abs(a))


def test_particle_system_validation_and_trace_defaults():
    params = KernelParams(2, 2.0, 1.0)
    with pytest.raises(DomainError):
        ParticleSystem(positions=[[0.0, 0.0], [0.0, 0.0]], params=params)
    with pytest.raises(DomainError):
        ParticleSystem(positions=[[0.0, math.nan], [1.0, 0.0]], params=params)
    with pytest.raises(DomainError):
        ParticleSystem(positions=[[0.0, 0.0]], params=params)
    with pytest.raises(DomainError):
        ParticleSystem(
            positions=[[0.0, 0.0], [1.0, 0.0]], params=params, step_size=-1.0
        )
    with pytest.raises(DomainError):
        ParticleSystem(
            positions=[[0.0, 0.0], [1.0, 0.0]], params=params, iteration=-1
        )
    sys0 = ParticleSystem(positions=[[0.0, 0.0], [1.0, 0.0]], params=params)
    assert sys0.energy_trace == (discrete_energy(sys0),)
    assert sys0.step_trace == (sys0.step_size,)
    assert sys0.n_particles == 2


def test_step_leaves_an_equilibrium_pair_unchanged():
    params = KernelParams(2, 2.0, 1.0)
    sys0 = ParticleSystem(positions=[[0.0, 0.0], [1.0, 0.0]], params=params)
    assert max_force(sys0) == 0.0
    sys1 = step(sys0)
    assert np.array_equal(sys1.positions, sys0.positions)
    assert sys1.iteration == 1
    assert sys1.energy_trace == (-0.125, -0.125)


def test_energy_trace_never_increases():
    rng = np.random.default_rng(3)
    sys0 = ParticleSystem(
        positions=rng.normal(size=(24, 2)), params=KernelParams(2, 2.0, -1.0)
    )
    cur = sys0
    for _ in range(500):
        cur = step(cur)
    trace = np.array(cur.energy_trace)
    assert len(trace) == 501
    assert np.all(np.diff(trace) <= 0.0)


def test_descent_is_deterministic():
    rng = np.random.default_rng(11)
    start = rng.normal(size=(20, 2))
    params = KernelParams(2, 2.0, -1.0)
    outs = []
    for _ in range(2):
        cur = ParticleSystem(positions=start.copy(), params=params)
        for _ in range(50):
            cur = step(cur)
        outs.append(cur)
    assert outs[0].positions.tobytes() == outs[1].positions.tobytes()
    assert outs[0].energy_trace == outs[1].energy_trace


def test_centroid_is_conserved():
    rng = np.random.default_rng(7)
    start = rng.normal(size=(24, 2))
    cur = ParticleSystem(positions=start, params=KernelParams(2, 2.0, -1.0))
    before = cur.positions.mean(axis=0)
    for _ in range(200):
        cur = step(cur)
    after = cur.positions.mean(axis=0)
    scale = float(np.max(np.abs(cur.positions)))
    assert np.max(np.abs(after - before)) <= 1e-12 * scale


def test_ring_discretization_force_shrinks_with_n():
    params = KernelParams(2, 3.0, 1.75)
    big_r = radius(params)
    radial = []
    for n in (64, 256, 1024):
        ang = 2.0 * math.pi * np.arange(n) / n
        pos = big_r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        total = np.zeros(2)
        for j in range(1, n):
            total += force(params, pos[0] - pos[j])
        total /= n
        radial.append(float(np.dot(total, pos[0] / big_r)))
    mags = [abs(v) for v in radial]
    assert mags[0] > mags[1] > mags[2]
    assert mags[2] < 1e-8


def test_converged_cloud_rings_at_the_predicted_radius():
    params = KernelParams(2, 3.0, 1.75)
    system, stats = run_to_convergence(params, 64, seed=0, tol=1e-5)
    big_r = radius(params)
    assert system.iteration <= 300
    assert abs(stats.mean_radius - big_r) / big_r < 1e-4
    assert stats.std_radius / stats.mean_radius < 1e-4


def test_ball_energy_gap_shrinks_with_n():
    params = KernelParams(2, 2.0, -1.0)
    target = energy(params)
    big_r = radius(params)
    e_gaps, r_gaps = [], []
    for n, budget in ((64, 400), (256, 500), (1024, 260)):
        try:
            system, stats = run_to_convergence(
                params, n, seed=2, tol=1e-3, max_iter=budget
            )
        except NonConvergence as exc:
            system, stats = exc.partial
        e_gaps.append(abs(discrete_energy(system) - target) / abs(target))
        r_gaps.append(abs(stats.max_radius - big_r) / big_r)
    assert e_gaps[0] > e_gaps[1] > e_gaps[2]
    assert r_gaps[0] > r_gaps[1] > r_gaps[2]
    assert e_gaps[2] < 0.05


def test_radial_stats_hand_built():
    pos = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.0, 0.0]]
    system = ParticleSystem(positions=pos, params=KernelParams(2, 2.0, 1.0))
    stats = radial_stats(system)
    assert stats.mean_radius == 0.8
    assert abs(stats.std_radius - 0.4) < 1e-15
    assert stats.max_radius == 1.0
    assert stats.center == (0.0, 0.0)
    data = stats.to_dict()
    assert data == {
        "mean_radius": 0.8,
        "std_radius": stats.std_radius,
        "max_radius": 1.0,
        "center": [0.0, 0.0],
    }
    assert isinstance(stats, RadialStats)


def test_initial_positions_fill_twice_the_predicted_radius():
    rng = np.random.default_rng(0)
    params = KernelParams(2, 3.0, 1.75)
    pos = _initial_positions(params, 200, rng)
    norms = np.sqrt(np.sum(pos * pos, axis=1))
    assert np.max(norms) <= 2.0 * radius(params) + 1e-12
    unsupported = KernelParams(3, 3.0, 0.1)
    pos = _initial_positions(unsupported, 200, rng)
    norms = np.sqrt(np.sum(pos * pos, axis=1))
    assert np.max(norms) <= 1.0 + 1e-12


def test_run_to_convergence_gates_and_partial_state():
    params = KernelParams(2, 2.0, -1.0)
    with pytest.raises(DomainError):
        run_to_convergence(params, 2, seed=0)
    with pytest.raises(DomainError):
        run_to_convergence(params, 32, seed=0, tol=0.0)
    with pytest.raises(DomainError):
        run_to_convergence(params, 32, seed=0, max_iter=0)
    with pytest.raises(NonConvergence) as exc:
        run_to_convergence(params, 16, seed=1, tol=1e-12, max_iter=3)
    system, stats = exc.value.partial
    assert system.iteration == 3
    assert isinstance(stats, RadialStats)
