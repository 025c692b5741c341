import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitkit import dense_linalg, sampling
from orbitkit.errors import CellMassMismatch, InexactProfile, NotInClosure, SpectrumMismatch, SpectrumTooClose
from orbitkit.orbit_analysis import (
    KERNEL_DIM_MISMATCH,
    SPECTRUM_MISMATCH,
    construct_intertwiner,
    derivative_bound,
    epsilon_partition,
    finite_rank_unitary_sequence,
    intertwine_diagonal,
    lagrange_coefficients,
    lagrange_spectral_projector,
    orbit_verdict,
)
from orbitkit.spectral_core import INFINITE, SpectralProfile as SP, materialize, profile_of
from orbitkit.symmetric_norms import NormSpec

SEPARABLE = [NormSpec.operator(), NormSpec.trace(), NormSpec.schatten(2), NormSpec.kyfan(3)]


def harmonic(n, **kw):
    return SP.from_values([1 / k for k in range(1, n + 1)], **kw)


def chain_holds(v):
    if v.same_unitary_orbit:
        assert v.in_unitary_orbit_closure
    if v.in_unitary_orbit_closure:
        assert v.in_groupoid_orbit_closure
    if v.same_groupoid_orbit:
        assert v.in_groupoid_orbit_closure


def test_verdict_identical():
    a = SP(((1, 2), (2, 1)))
    v = orbit_verdict(a, a)
    assert (v.same_unitary_orbit, v.in_unitary_orbit_closure, v.same_groupoid_orbit, v.in_groupoid_orbit_closure) == (True,) * 4


def test_verdict_kernel_mismatch():
    v = orbit_verdict(SP(((1, 1),), INFINITE), SP(((1, 1),), 5))
    assert v.same_groupoid_orbit and not v.same_unitary_orbit
    assert KERNEL_DIM_MISMATCH in v.reasons


def test_verdict_missing_point():
    a = harmonic(10, essential_points=(0,))
    b = SP.from_values([1 / k for k in range(2, 11)], essential_points=(0,))
    v = orbit_verdict(a, b)
    assert not v.in_groupoid_orbit_closure
    assert SPECTRUM_MISMATCH in v.reasons


def test_verdict_closure_without_orbit():
    # b has the same spectrum as a but one eigenvalue with infinite rank is
    # split differently: essential points decide closure membership
    a = SP(((1, 1), (0.5, 1)), 0, (0,))
    b = SP(((1, 1), (0.5, 1)), 3, (0,))
    v = orbit_verdict(a, b)
    assert v.in_unitary_orbit_closure and not v.same_unitary_orbit


def test_verdict_needs_exact():
    with pytest.raises(InexactProfile):
        orbit_verdict(SP(((1, 1),), tail_bound=0.1), SP(((1, 1),)))


def test_partition_examples():
    assert len(epsilon_partition(SP.from_values([1, 1.05]), 0.2).cells) == 1
    assert len(epsilon_partition(SP.from_values([1, 2]), 0.5).cells) == 2
    p = harmonic(20)
    part = epsilon_partition(p, 0.1)
    seen = sorted(i for _, members in part.cells for i in members)
    assert seen == list(range(20))
    for _, members in part.cells:
        for i in members:
            for j in members:
                assert abs(p.values[i] - p.values[j]) <= 0.1


def test_intertwiner_examples():
    a = SP(((1, 1), (2, 2), (3j, 1)), 2)
    b = SP(((3j, 1), (1, 1), (2, 2)), 1)
    cert = construct_intertwiner(a, b, 0.3, 8)
    assert cert.achieved_error == 0
    cert = construct_intertwiner(SP.from_values([1, 0.9]), SP.from_values([0.9, 1]), 0.15, 2)
    assert cert.achieved_error == pytest.approx(0.1, abs=1e-12)
    assert cert.certified_bound == pytest.approx(0.3)
    with pytest.raises(NotInClosure):
        construct_intertwiner(SP(((1, 2),)), SP(((1, 1),)), 0.1, 3)


def test_intertwine_diagonal_mass():
    with pytest.raises(CellMassMismatch):
        intertwine_diagonal([1, 1, 0], [1, 0, 0], 0.1)


def test_approx_seq_examples():
    a = SP.from_values([1, 0.5, 0.25])
    b = SP.from_values([0.25, 1, 0.5])
    for spec in SEPARABLE:
        assert finite_rank_unitary_sequence(a, b, 3, 5).error_in(spec) == 0
    p = harmonic(10)
    q = SP(tuple(reversed(p.eigenvalues)))
    step = finite_rank_unitary_sequence(p, q, 5, 10)
    tail = 2 * sum(1 / k for k in range(6, 11))
    assert step.error_in(NormSpec.trace()) <= tail + 1e-12
    assert step.bound_in(NormSpec.trace()) == pytest.approx(tail)


def test_approx_seq_needs_closure():
    with pytest.raises(NotInClosure):
        finite_rank_unitary_sequence(SP(((1, 1),), 1), SP(((1, 1),), 2), 1, 4)


def test_lagrange_examples():
    p = SP.from_values([1, 2], kernel_dim=1)
    a, _ = materialize(p, 3)
    np.testing.assert_allclose(lagrange_spectral_projector(p, 1, a), np.diag([1, 0, 0]), atol=1e-14)
    np.testing.assert_allclose(lagrange_spectral_projector(p, 2, a), np.diag([0, 1, 0]), atol=1e-14)
    with pytest.raises(SpectrumTooClose):
        lagrange_coefficients(SP.from_values([1, 1 + 1e-8]), 1)
    with pytest.raises(SpectrumMismatch):
        lagrange_spectral_projector(p, 1, np.diag([1, 2, 5]))


@given(st.integers(0, 2**32 - 1), st.floats(1e-9, 1e-4))
def test_lagrange_perturbation(seed, delta):
    gen = np.random.default_rng(seed)
    p = sampling.profile(gen, 6, min_gap=0.3, kernel_max=2)
    n = p.rank + p.kernel_dim
    a, _ = materialize(p, n)
    u = sampling.unitary(gen, n)
    d = np.diag(a) + delta * gen.uniform(-1, 1, n)
    x = u @ np.diag(d) @ u.conj().T
    base = u @ a @ u.conj().T
    dist = dense_linalg.operator_norm(x - base)
    for j in range(1, len(p.values) + 1):
        fx = lagrange_spectral_projector(p, j, x)
        fa = lagrange_spectral_projector(p, j, base)
        radius = max(dense_linalg.operator_norm(base), dense_linalg.operator_norm(x))
        assert dense_linalg.operator_norm(fx - fa) <= derivative_bound(p, j, radius) * dist + 1e-9
        g = derivative_bound(p, j, radius)
        assert dense_linalg.operator_norm(fx @ fx - fx) <= 3 * g * dist + 1e-9


@given(st.integers(0, 2**32 - 1))
def test_lagrange_idempotent_within_tolerance(seed):
    gen = np.random.default_rng(seed)
    p = sampling.profile(gen, 6, min_gap=0.3, kernel_max=2)
    n = p.rank + p.kernel_dim
    a, _ = materialize(p, n)
    u = sampling.unitary(gen, n)
    x = u @ np.diag(np.diag(a) + 1e-10 * gen.uniform(-1, 1, n)) @ u.conj().T
    for j in range(1, len(p.values) + 1):
        fx = lagrange_spectral_projector(p, j, x)
        assert dense_linalg.operator_norm(fx @ fx - fx) <= 1e-8


@given(st.integers(0, 2**32 - 1))
def test_verdict_chain(seed):
    gen = np.random.default_rng(seed)
    a = sampling.profile(gen, 6, kernel_max=2)
    b = sampling.profile(gen, 6, kernel_max=2)
    pool = [a, b, SP(a.eigenvalues, b.kernel_dim), SP(tuple(reversed(a.eigenvalues)), a.kernel_dim, (0,)),
            SP(a.eigenvalues, INFINITE, (0,))]
    for x in pool:
        for y in pool:
            chain_holds(orbit_verdict(x, y))


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.5))
def test_intertwiner_certificate(seed, eps):
    gen = np.random.default_rng(seed)
    a = sampling.profile(gen, 12, min_gap=0.05, kernel_max=3)
    b = SP(tuple(gen.permutation(np.array(a.eigenvalues, dtype=object))), int(gen.integers(0, 4)))
    dim = a.rank + max(a.kernel_dim, b.kernel_dim) + 1
    cert = construct_intertwiner(a, b, eps, dim)
    assert np.array_equal(cert.v.conj().T @ cert.v, cert.initial_proj)
    assert np.array_equal(cert.v @ cert.v.conj().T, cert.final_proj)
    assert cert.achieved_error <= cert.certified_bound + 1e-9


@given(st.integers(0, 2**32 - 1))
def test_approx_errors_converge_and_respect_bound(seed):
    gen = np.random.default_rng(seed)
    a = sampling.profile(gen, 10, min_gap=0.05, kernel_max=2)
    b = SP(tuple(gen.permutation(np.array(a.eigenvalues, dtype=object))), a.kernel_dim)
    dim = a.rank + a.kernel_dim
    n_distinct = len(a.eigenvalues)
    for spec in SEPARABLE:
        bounds = []
        for m in range(n_distinct + 1):
            step = finite_rank_unitary_sequence(a, b, m, dim)
            assert step.error_in(spec) <= step.bound_in(spec) + 1e-9
            bounds.append(step.bound_in(spec))
        assert step.error_in(spec) <= 1e-12
        assert all(y <= x + 1e-12 for x, y in zip(bounds, bounds[1:]))


def test_oracle_equivalence_small(gen):
    for _ in range(20):
        n = int(gen.integers(2, 9))
        p = sampling.profile(gen, n, min_gap=0.1, kernel_max=0)
        dim = n
        a, _ = materialize(p, dim)
        p_a = np.diag((np.abs(np.diag(a)) > 0).astype(complex))
        v = sampling.partial_isometry(gen, p_a)
        b = v @ a @ v.conj().T
        assert orbit_verdict(profile_of(a), profile_of(b)).same_groupoid_orbit
