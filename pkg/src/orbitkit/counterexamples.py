"""Finite sections of three constructions about orbits of compact normal operators.

* ``isclosed_escape``: finite permutations of a diagonal operator converge
  to its shift, which has one more kernel dimension and so leaves the orbit.
* ``nonseparable_demo``: two unitarily equivalent diagonal operators whose
  difference, in the infinite construction, stays large in a Ratio norm
  under every finite alignment.
* ``shift_topology_demo``: a sequence in the groupoid orbit that converges in
  norm while every exact intertwiner stays at distance 1 from ``p_a``.

Every construction is infinite-dimensional; the finite sections keep one
extra coordinate ("overflow") to stand in for the part of the space past the
truncation, and the reports carry both measured values and analytic bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dense_linalg
from .errors import BadIndex, NotBiNormalizing, NotDecreasing, ReferenceTooShort
from .orbit_analysis import intertwine_diagonal, orbit_verdict
from .spectral_core import profile_of
from .symmetric_norms import NormSpec, ideal_norm, ratio_partials


def _strictly_decreasing(eigs) -> np.ndarray:
    x = np.asarray(eigs, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise NotDecreasing("need at least two values")
    if np.any(x <= 0) or np.any(np.diff(x) >= 0):
        raise NotDecreasing("values must be positive and strictly decreasing")
    return x


def _cycle(dim: int, idx: Sequence[int]) -> np.ndarray:
    # Unitary sending basis vector idx[k] to idx[k+1] and the last back to the first.
    u = np.eye(dim, dtype=np.complex128)
    for k, i in enumerate(idx):
        j = idx[(k + 1) % len(idx)]
        u[:, i] = 0
        u[j, i] = 1.0
    return u


def _kernel_dim(diag) -> int:
    return int(np.sum(np.abs(diag) == 0))


# -- escaping permutations --------------------------------------------------


@dataclass(frozen=True)
class EscapeReport:
    n: int
    distance: float
    bound: float
    limit_outside_orbit: bool
    kernel_dim_limit: int
    kernel_dim_orbit: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "distance": self.distance,
            "bound": self.bound,
            "limit_outside_orbit": self.limit_outside_orbit,
            "kernel_dim_limit": self.kernel_dim_limit,
            "kernel_dim_orbit": self.kernel_dim_orbit,
        }

    def rows(self) -> list[dict]:
        return [{"n": self.n, "distance": self.distance, "bound": self.bound}]


def escape_operators(eigs, n: int):
    """Dense ``(a, a_n, a_shift)`` on ``N + 1`` coordinates.

    ``a = sum x_i q_i``, ``a_n`` is ``a`` conjugated by the cycle
    ``q_1 -> q_2 -> ... -> q_{n+1} -> q_1`` and ``a_shift = sum x_i q_{i+1}``.
    """
    x = _strictly_decreasing(eigs)
    N = x.size
    if not 1 <= n < N:
        raise BadIndex(f"n must lie in 1..{N - 1}")
    a = np.diag(np.concatenate([x, [0.0]]).astype(np.complex128))
    shift = np.diag(np.concatenate([[0.0], x]).astype(np.complex128))
    u = _cycle(N + 1, list(range(n + 1)))
    return a, u @ a @ u.conj().T, shift


def isclosed_escape(eigs, spec: NormSpec, n: int) -> EscapeReport:
    """Distance from the ``n``-th permuted operator to the shifted limit.

    Kernel dimensions are counted on the first ``N`` coordinates, the finite
    window on which the truncated operators agree with the infinite ones.
    """
    x = _strictly_decreasing(eigs)
    a, a_n, shift = escape_operators(x, n)
    s = dense_linalg.singular_values_of(a_n - shift)
    distance = ideal_norm(s, spec)
    bound = 2.0 * float(x[n:].sum())
    N = x.size
    k_orbit = _kernel_dim(np.diag(a)[:N])
    k_limit = _kernel_dim(np.diag(shift)[:N])
    return EscapeReport(n, distance, bound, k_limit > k_orbit, k_limit, k_orbit)


def escape_sweep(eigs, spec: NormSpec) -> list[EscapeReport]:
    x = _strictly_decreasing(eigs)
    return [isclosed_escape(x, spec, n) for n in range(1, x.size)]


# -- non-separable ideal ----------------------------------------------------


@dataclass
class NonseparableReport:
    N: int
    partial_ratios_a: np.ndarray
    partial_ratios_b: np.ndarray
    partial_ratios_diff: np.ndarray
    aligned_errors: np.ndarray  # aligned_errors[m] = ratio norm of b - u_m a u_m*
    same_unitary_orbit: bool

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "partial_ratios_a": self.partial_ratios_a,
            "partial_ratios_b": self.partial_ratios_b,
            "partial_ratios_diff": self.partial_ratios_diff,
            "aligned_errors": self.aligned_errors,
            "same_unitary_orbit": self.same_unitary_orbit,
        }

    def rows(self) -> list[dict]:
        return [
            {"m": m, "distance": float(d), "bound": None}
            for m, d in enumerate(self.aligned_errors)
        ]


def _ratio_spec(reference) -> NormSpec:
    if isinstance(reference, NormSpec):
        if reference.kind != "ratio":
            raise NotBiNormalizing(f"{reference.kind} is not a ratio norm")
        return reference
    return NormSpec.ratio(reference)


def nonseparable_pair(N: int, reference) -> tuple[np.ndarray, np.ndarray]:
    """``a`` carries ``r_k`` on the even basis vectors ``e_2k``, ``b`` on ``e_{2k-1}`` (1-based)."""
    r = np.asarray(reference[:N], dtype=float)
    a = np.zeros(2 * N, dtype=np.complex128)
    b = np.zeros(2 * N, dtype=np.complex128)
    a[1::2] = r
    b[0::2] = r
    return np.diag(a), np.diag(b)


def pair_swap(N: int, m: int) -> np.ndarray:
    """Permutation unitary exchanging ``e_{2k-1}`` and ``e_2k`` for ``k <= m``."""
    u = np.eye(2 * N, dtype=np.complex128)
    for k in range(m):
        i, j = 2 * k, 2 * k + 1
        u[[i, j]] = u[[j, i]]
    return u


def nonseparable_demo(reference, N: int) -> NonseparableReport:
    """Ratio-norm distances between ``b`` and finite alignments of ``a``.

    ``reference`` is a ratio ``NormSpec`` or a reference sequence; it has to
    be flagged bi-normalizing and hold at least ``2N`` terms.
    """
    spec = _ratio_spec(reference)
    if not spec.bi_normalizing:
        raise NotBiNormalizing("reference sequence is not flagged bi-normalizing")
    ref = np.asarray(spec.reference)
    if ref.size < 2 * N:
        raise ReferenceTooShort(f"need {2 * N} reference terms, got {ref.size}")
    a, b = nonseparable_pair(N, ref)

    def partials(x):
        return ratio_partials(dense_linalg.singular_values_of(x), ref)

    errors = np.empty(N + 1)
    for m in range(N + 1):
        u = pair_swap(N, m)
        errors[m] = ideal_norm(dense_linalg.singular_values_of(b - u @ a @ u.conj().T), spec)
    verdict = orbit_verdict(profile_of(a), profile_of(b))
    return NonseparableReport(
        N, partials(a), partials(b), partials(b - a), errors, verdict.same_unitary_orbit
    )


# -- quotient topology versus norm topology ---------------------------------


@dataclass
class ShiftReport:
    n: int
    distance: float
    bound: float
    shift_defect: float  # ||u*u - p_a||
    ww_defect_window: float  # ||ww* - (p_a - p_n)|| off the overflow coordinate
    ww_defect_full: float  # ||ww* - (p_a - p_n + p_overflow)|| on the whole space
    w_distance: float  # ||w - p_a||
    same_groupoid_orbit: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def rows(self) -> list[dict]:
        return [{"n": self.n, "distance": self.distance, "bound": self.bound}]


def shift_operators(eigs, n: int, q_rank: int = 2):
    """Dense pieces of the construction on ``N * q_rank + 1`` coordinates.

    ``Q_k`` occupies coordinates ``(k-1) q .. k q - 1`` and ``xi_k`` is its
    first coordinate; the final coordinate plays ``xi_{N+1}``. Returns
    ``(a, u, u_n, b_n, xi)``.
    """
    lam = _strictly_decreasing(eigs)
    N = lam.size
    if not 2 <= n < N:
        raise BadIndex(f"n must lie in 2..{N - 1}")
    if q_rank < 1:
        raise BadIndex("q_rank must be positive")
    dim = N * q_rank + 1
    xi = [k * q_rank for k in range(N)] + [dim - 1]
    a = np.diag(np.concatenate([np.repeat(lam, q_rank), [0.0]]).astype(np.complex128))
    u = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(N):
        u[xi[k + 1], xi[k]] = 1.0
        for j in range(xi[k] + 1, xi[k] + q_rank):
            u[j, j] = 1.0  # Q_k - p_k
    u_n = _cycle(dim, xi[:n])
    b_n = u_n.conj().T @ u @ a @ u.conj().T @ u_n
    return a, u, u_n, b_n, xi


def shift_topology_demo(eigs, n: int, q_rank: int = 2) -> ShiftReport:
    lam = _strictly_decreasing(eigs)
    a, u, _, b_n, xi = shift_operators(lam, n, q_rank)
    dim = a.shape[0]
    p_a = np.diag((np.abs(np.diag(a)) > 0).astype(np.complex128))
    p_n = np.zeros_like(p_a)
    p_n[xi[n - 1], xi[n - 1]] = 1.0
    p_over = np.zeros_like(p_a)
    p_over[dim - 1, dim - 1] = 1.0

    w, _ = intertwine_diagonal(np.diag(a), np.diag(b_n).copy(), 0.0)
    ww = w @ w.conj().T
    window = slice(0, dim - 1)
    target = p_a - p_n
    verdict = orbit_verdict(profile_of(a), profile_of(b_n))
    return ShiftReport(
        n=n,
        distance=dense_linalg.operator_norm(b_n - a),
        bound=2.0 * float(lam[n - 1]),
        shift_defect=dense_linalg.operator_norm(u.conj().T @ u - p_a),
        ww_defect_window=dense_linalg.operator_norm((ww - target)[window, window]),
        ww_defect_full=dense_linalg.operator_norm(ww - target - p_over),
        w_distance=dense_linalg.operator_norm(w - p_a),
        same_groupoid_orbit=verdict.same_groupoid_orbit,
    )
