"""Orbit equivalence, orbit closures and explicit intertwiners for normal operators.

Two kinds of orbits are compared: the unitary orbit ``{u a u*}`` and the
groupoid orbit ``{v a v* : v* v = p_a}`` where ``p_a`` is the range
projection of ``a``. For profiles (point spectrum plus flagged essential
points) membership and closure membership reduce to comparing spectra as
sets, multiplicities of isolated points and ranks of spectral projections,
with infinite rank matching only infinite rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import polynomial as P

from . import dense_linalg
from .errors import (
    CellMassMismatch,
    InexactProfile,
    NotInClosure,
    SpectrumMismatch,
    SpectrumTooClose,
)
from .spectral_core import (
    INFINITE,
    SpectralProfile,
    canonical_key,
    materialize,
    validate_profile,
)
from .symmetric_norms import NormSpec, ideal_norm

SPECTRUM_MISMATCH = "SPECTRUM_MISMATCH"
ISOLATED_MULTIPLICITY_MISMATCH = "ISOLATED_MULTIPLICITY_MISMATCH"
KERNEL_DIM_MISMATCH = "KERNEL_DIM_MISMATCH"
ESSENTIAL_MISMATCH = "ESSENTIAL_MISMATCH"
MULTISET_MISMATCH = "MULTISET_MISMATCH"


@dataclass(frozen=True)
class OrbitVerdict:
    same_unitary_orbit: bool
    in_unitary_orbit_closure: bool
    same_groupoid_orbit: bool
    in_groupoid_orbit_closure: bool
    reasons: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "same_unitary_orbit": self.same_unitary_orbit,
            "in_unitary_orbit_closure": self.in_unitary_orbit_closure,
            "same_groupoid_orbit": self.same_groupoid_orbit,
            "in_groupoid_orbit_closure": self.in_groupoid_orbit_closure,
            "reasons": list(self.reasons),
        }


@dataclass(frozen=True)
class PartialIsometryCert:
    v: np.ndarray
    initial_proj: np.ndarray
    final_proj: np.ndarray
    epsilon: float
    certified_bound: float
    achieved_error: float

    def to_dict(self, include_matrix: bool = False) -> dict:
        d = {
            "dim": int(self.v.shape[0]),
            "epsilon": self.epsilon,
            "certified_bound": self.certified_bound,
            "achieved_error": self.achieved_error,
            "initial_rank": int(round(np.trace(self.initial_proj).real)),
            "final_rank": int(round(np.trace(self.final_proj).real)),
        }
        if include_matrix:
            d["v"] = self.v
        return d


@dataclass(frozen=True)
class PartitionCells:
    cells: tuple[tuple[complex, tuple[int, ...]], ...]
    diameter_bound: float

    def to_dict(self) -> dict:
        return {
            "diameter_bound": self.diameter_bound,
            "cells": [{"center": c, "members": list(m)} for c, m in self.cells],
        }


class ApproximationStep(NamedTuple):
    u: np.ndarray
    error_in: Callable[[NormSpec], float]
    bound_in: Callable[[NormSpec], float]


# -- verdicts ---------------------------------------------------------------


def _match_tol(*profiles: SpectralProfile, rel: float) -> float:
    mods = [abs(v) for p in profiles for v in p.values]
    mods += [abs(z) for p in profiles for z in p.essential_points]
    scale = max(mods, default=0.0)
    return rel * scale if scale > 0 else 1e-12


def _find(value: complex, pool, tol: float):
    for i, w in enumerate(pool):
        if abs(value - w) <= tol:
            return i
    return None


def _same_set(xs, ys, tol) -> bool:
    return all(_find(x, ys, tol) is not None for x in xs) and all(
        _find(y, xs, tol) is not None for y in ys
    )


def _spectrum(p: SpectralProfile, with_zero: bool) -> list[complex]:
    pts = list(p.values) + list(p.essential_points)
    if with_zero or p.kernel_dim != 0:
        pts.append(0j)
    return pts


def _rank_at(p: SpectralProfile, z: complex, tol: float):
    if _find(z, p.essential_points, tol) is not None:
        return INFINITE
    i = _find(z, p.values, tol)
    return p.eigenvalues[i][1] if i is not None else 0


def orbit_verdict(a: SpectralProfile, b: SpectralProfile, tol: float = 1e-9) -> OrbitVerdict:
    """Decide orbit membership and orbit-closure membership of ``b`` relative to ``a``.

    ``tol`` is the relative tolerance for identifying two spectral points.
    """
    for p in (a, b):
        validate_profile(p)
        if not p.is_exact:
            raise InexactProfile("verdicts need exact profiles (tail_bound 0)")
    t = _match_tol(a, b, rel=tol)
    reasons: list[str] = []

    def note(code):
        if code not in reasons:
            reasons.append(code)

    nonzero_pts = list(a.values) + [v for v in b.values if _find(v, a.values, t) is None]
    nonzero_pts += [z for z in a.essential_points + b.essential_points if abs(z) > t]

    same_multiset = len(a.values) == len(b.values) and all(
        _find(v, b.values, t) is not None
        and b.eigenvalues[_find(v, b.values, t)][1] == m
        for v, m in a.eigenvalues
    )
    if not same_multiset:
        note(MULTISET_MISMATCH)
    ess_equal = _same_set(a.essential_points, b.essential_points, t)
    if not ess_equal:
        note(ESSENTIAL_MISMATCH)
    kernel_equal = a.kernel_dim == b.kernel_dim
    if not kernel_equal:
        note(KERNEL_DIM_MISMATCH)

    spec_equal = _same_set(_spectrum(a, False), _spectrum(b, False), t)
    spec0_equal = _same_set(_spectrum(a, True), _spectrum(b, True), t)
    if not spec0_equal or not spec_equal:
        note(SPECTRUM_MISMATCH)

    nonzero_ranks_equal = True
    isolated_mult_equal = True
    for z in nonzero_pts:
        ra, rb = _rank_at(a, z, t), _rank_at(b, z, t)
        if ra != rb:
            nonzero_ranks_equal = False
            if ra != INFINITE and rb != INFINITE:
                isolated_mult_equal = False
                note(ISOLATED_MULTIPLICITY_MISMATCH)
    zero_essential = _find(0j, a.essential_points, t) is not None
    zero_isolated_ok = zero_essential or kernel_equal

    same_unitary = same_multiset and kernel_equal and ess_equal
    in_unitary_closure = (
        spec_equal and ess_equal and isolated_mult_equal and nonzero_ranks_equal
        and zero_isolated_ok
    )
    same_groupoid = same_multiset and ess_equal
    in_groupoid_closure = spec0_equal and nonzero_ranks_equal
    return OrbitVerdict(
        same_unitary, in_unitary_closure, same_groupoid, in_groupoid_closure, tuple(reasons)
    )


# -- partitions and intertwiners -------------------------------------------


def _default_eps(values) -> float:
    vals = list(values)
    gaps = [abs(x - y) for i, x in enumerate(vals) for y in vals[i + 1:]]
    gaps = [g for g in gaps if g > 0]
    return 0.5 * min(gaps) if gaps else 0.0


def _greedy_cells(values, eps: float) -> list[list[int]]:
    # Canonical order; an eigenvalue joins the nearest cell it is within eps
    # of entirely, otherwise it opens a new cell.
    order = sorted(range(len(values)), key=lambda i: canonical_key(values[i]))
    cells: list[list[int]] = []
    for i in order:
        best, best_dist = None, None
        for c, members in enumerate(cells):
            if all(abs(values[i] - values[j]) <= eps for j in members):
                d = abs(values[i] - values[members[0]])
                if best is None or d < best_dist:
                    best, best_dist = c, d
        if best is None:
            cells.append([i])
        else:
            cells[best].append(i)
    return cells


def epsilon_partition(p: SpectralProfile, eps: float) -> PartitionCells:
    """Group the eigenvalues of ``p`` into cells of diameter at most ``eps``.

    Eigenvalues are visited in canonical order; each cell's center is the
    first eigenvalue that opened it. ``members`` index the profile's listed
    eigenvalues.
    """
    validate_profile(p)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    values = list(p.values)
    cells = _greedy_cells(values, eps)
    return PartitionCells(
        tuple((values[c[0]], tuple(sorted(c))) for c in cells), float(eps)
    )


def _unique_values(values, tol: float) -> list[complex]:
    out: list[complex] = []
    for v in values:
        if _find(v, out, tol) is None:
            out.append(complex(v))
    return out


def intertwine_diagonal(da, db, eps: float = 0.0, tol: float = 1e-12):
    """Partial isometry ``v`` with ``v* v = p_a``, ``v v* = p_b`` for diagonal ``a``, ``b``.

    The joint nonzero spectrum is cut into cells of diameter ``eps`` (or half
    the smallest gap when ``eps`` is 0). Inside each cell the ``a``-basis
    vectors are sent to the ``b``-basis vectors in index order, so ``v`` is a
    0/1 matrix and ``||v a v* - b|| <= eps``.

    Returns ``(v, effective_eps)``.
    """
    da = np.asarray(da, dtype=np.complex128)
    db = np.asarray(db, dtype=np.complex128)
    if da.shape != db.shape:
        raise ValueError("diagonals differ in length")
    scale = max(float(np.abs(da).max(initial=0)), float(np.abs(db).max(initial=0)))
    t = tol * scale if scale > 0 else tol
    nz_a = [i for i in range(da.size) if abs(da[i]) > t]
    nz_b = [i for i in range(db.size) if abs(db[i]) > t]
    values = _unique_values([da[i] for i in nz_a] + [db[i] for i in nz_b], t)
    if eps == 0:
        eps = _default_eps(values)
    v = np.zeros((da.size, da.size), dtype=np.complex128)
    for cell in _greedy_cells(values, eps):
        cell_vals = [values[c] for c in cell]
        src = [i for i in nz_a if _find(da[i], cell_vals, t) is not None]
        dst = [i for i in nz_b if _find(db[i], cell_vals, t) is not None]
        if len(src) != len(dst):
            raise CellMassMismatch(
                f"cell around {cell_vals[0]} holds {len(src)} a-vectors and {len(dst)} b-vectors"
            )
        for i, j in zip(src, dst):
            v[j, i] = 1.0
    return v, float(eps)


def construct_intertwiner(
    a: SpectralProfile, b: SpectralProfile, eps: float, total_dim: int
) -> PartialIsometryCert:
    """Explicit ``v`` with ``v* v = p_a`` and ``||v a v* - b|| <= 2 eps``.

    Both profiles are materialized on ``total_dim`` coordinates. Passing
    ``eps = 0`` uses half the smallest gap of the joint spectrum, which makes
    the match exact on finite spectra.
    """
    verdict = orbit_verdict(a, b)
    if not verdict.in_groupoid_orbit_closure:
        raise NotInClosure("b is not in the groupoid orbit closure of a: " + ",".join(verdict.reasons))
    am, _ = materialize(a, total_dim)
    bm, _ = materialize(b, total_dim)
    v, eff = intertwine_diagonal(np.diag(am), np.diag(bm), eps)
    p_a = np.diag((np.abs(np.diag(am)) > 0).astype(np.complex128))
    p_b = np.diag((np.abs(np.diag(bm)) > 0).astype(np.complex128))
    err = dense_linalg.operator_norm(v @ am @ v.conj().T - bm)
    return PartialIsometryCert(v, p_a, p_b, eff, 2 * eff, err)


def finite_rank_unitary_sequence(
    a: SpectralProfile, b: SpectralProfile, m: int, total_dim: int
) -> ApproximationStep:
    """Permutation unitary aligning the ``m`` leading eigenvalue blocks of ``a`` with ``b``.

    The leading blocks (canonical order of the joint spectrum) of ``a`` are
    sent onto the matching blocks of ``b``; every other coordinate stays
    fixed where possible and the leftovers are matched in index order, so
    ``u`` differs from the identity only on finitely many coordinates.

    ``error_in(spec)`` evaluates ``||u a u* - b||`` in ``spec`` and
    ``bound_in(spec)`` the tail estimate ``||a - a p_m|| + ||b - b q_m||``.
    """
    verdict = orbit_verdict(a, b)
    if not verdict.in_unitary_orbit_closure:
        raise NotInClosure("b is not in the unitary orbit closure of a: " + ",".join(verdict.reasons))
    if m < 0:
        raise ValueError("m must be non-negative")
    am, _ = materialize(a, total_dim)
    bm, _ = materialize(b, total_dim)
    da, db = np.diag(am), np.diag(bm)
    t = _match_tol(a, b, rel=1e-12)
    joint = sorted(_unique_values(list(a.values) + list(b.values), t), key=canonical_key)

    sigma: dict[int, int] = {}
    for value in joint[:m]:
        src = [i for i in range(total_dim) if da[i] != 0 and abs(da[i] - value) <= t]
        dst = [j for j in range(total_dim) if db[j] != 0 and abs(db[j] - value) <= t]
        sigma.update(zip(src, dst))
    taken = set(sigma.values())
    free_src = [i for i in range(total_dim) if i not in sigma]
    for i in free_src:
        if i not in taken:
            sigma[i] = i
            taken.add(i)
    rest_src = [i for i in range(total_dim) if i not in sigma]
    rest_dst = [j for j in range(total_dim) if j not in taken]
    sigma.update(zip(rest_src, rest_dst))

    u = np.zeros((total_dim, total_dim), dtype=np.complex128)
    for i, j in sigma.items():
        u[j, i] = 1.0
    diff = u @ am @ u.conj().T - bm
    diff_s = dense_linalg.singular_values_of(diff)

    aligned = set(joint[:m])
    a_tail = np.sort(np.abs([x for x in da if x != 0 and x not in aligned]))[::-1]
    b_tail = np.sort(np.abs([x for x in db if x != 0 and x not in aligned]))[::-1]

    def error_in(spec: NormSpec) -> float:
        return ideal_norm(diff_s, spec)

    def bound_in(spec: NormSpec) -> float:
        return ideal_norm(a_tail, spec) + ideal_norm(b_tail, spec)

    return ApproximationStep(u, error_in, bound_in)


# -- spectral projectors from Lagrange polynomials --------------------------


def _nodes(p: SpectralProfile) -> list[complex]:
    nodes = list(p.values)
    if p.kernel_dim != 0:
        nodes.append(0j)
    return nodes


def _min_gap(nodes) -> float:
    return min(
        (abs(x - y) for i, x in enumerate(nodes) for y in nodes[i + 1:]), default=np.inf
    )


def lagrange_coefficients(p: SpectralProfile, j: int) -> np.ndarray:
    """Monomial coefficients (lowest degree first) of the polynomial that is 1
    at the ``j``-th listed eigenvalue (1-based) and 0 at every other node,
    zero included when the kernel is nontrivial."""
    validate_profile(p)
    nodes = _nodes(p)
    if not 1 <= j <= len(p.values):
        raise IndexError(f"eigenvalue index {j} outside 1..{len(p.values)}")
    if _min_gap(nodes) < 1e-6:
        raise SpectrumTooClose("nodes closer than 1e-6")
    target = nodes[j - 1]
    others = [z for k, z in enumerate(nodes) if k != j - 1]
    coeffs = P.polyfromroots(others) if others else np.array([1.0 + 0j])
    return coeffs / P.polyval(target, coeffs)


def derivative_bound(p: SpectralProfile, j: int, radius: float) -> float:
    """``sum_k k |alpha_k| radius^(k-1)``: Lipschitz constant of the projector
    polynomial on operators of norm at most ``radius``."""
    coeffs = lagrange_coefficients(p, j)
    k = np.arange(coeffs.size)
    return float(np.sum(k[1:] * np.abs(coeffs[1:]) * radius ** (k[1:] - 1)))


def horner(coeffs, x) -> np.ndarray:
    x = dense_linalg.as_operator(x)
    eye = np.eye(x.shape[0], dtype=np.complex128)
    out = coeffs[-1] * eye
    for c in coeffs[-2::-1]:
        out = out @ x + c * eye
    return out


def lagrange_spectral_projector(p: SpectralProfile, j: int, x) -> np.ndarray:
    """Evaluate the ``j``-th Lagrange polynomial of ``p`` on the matrix ``x``.

    ``x`` must be normal with every eigenvalue within a quarter of the
    smallest node gap of some node. For ``x = materialize(p)`` the result is
    the spectral projection onto the ``j``-th eigenvalue.
    """
    coeffs = lagrange_coefficients(p, j)
    nodes = _nodes(p)
    window = _min_gap(nodes) / 4
    eig = dense_linalg.normal_eigen(x)
    for value in eig.values:
        if min(abs(value - z) for z in nodes) > window:
            raise SpectrumMismatch(f"eigenvalue {value} is not near any node")
    return horner(coeffs, x)
