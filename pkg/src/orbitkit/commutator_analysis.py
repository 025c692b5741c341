"""The commutator map ``delta_a(x) = xa - ax`` and what can be computed about it."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from . import dense_linalg
from .errors import (
    DimensionMismatch,
    ExpectationNonzero,
    InitialSpaceMismatch,
    NotPartialIsometry,
    RepeatedBlockValue,
    TooFewEigenvalues,
)
from .expectations import conditional_expectation
from .spectral_core import (
    INFINITE,
    ProjectionFamily,
    SpectralProfile,
    materialize,
    profile_of,
    validate_profile,
)

log = logging.getLogger(__name__)

# x_ij = y_ij / (mu_j - mu_i) solves xa - ax = y on Ker E; the opposite sign
# is tried only if the residual check rejects this one.
DIVISOR_SIGN = +1


@dataclass(frozen=True)
class ClosedRangeWitness:
    index_pair: tuple[int, int]
    gap: float
    witness_norm_lower: float
    commutator_norm: float
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TangentSplit:
    dim_total: int
    dim_isotropy: int
    dim_complement: int
    range_dim: int

    def to_dict(self) -> dict:
        return asdict(self)


def delta(a, x) -> np.ndarray:
    a = dense_linalg.as_operator(a)
    x = dense_linalg.as_operator(x)
    if a.shape != x.shape:
        raise DimensionMismatch(f"{a.shape} vs {x.shape}")
    return x @ a - a @ x


def block_values_of(p: SpectralProfile, fam: ProjectionFamily) -> np.ndarray:
    """Value of ``a`` on each block of ``fam``: the listed eigenvalues, then 0 for the kernel."""
    validate_profile(p)
    n_eig = len(p.eigenvalues)
    if len(fam.blocks) not in (n_eig, n_eig + 1):
        raise DimensionMismatch(
            f"family has {len(fam.blocks)} blocks for {n_eig} eigenvalues"
        )
    for (value, mult), block in zip(p.eigenvalues, fam.blocks):
        if len(block) != mult:
            raise DimensionMismatch(f"block for {value} has size {len(block)}, expected {mult}")
    values = np.zeros(len(fam.blocks), dtype=np.complex128)
    values[:n_eig] = p.values
    return values


def solve_commutator(a_profile: SpectralProfile, fam: ProjectionFamily, y) -> np.ndarray:
    """Solve ``xa - ax = y`` for ``y`` in the kernel of the block expectation.

    ``a`` is the block-diagonal operator of ``a_profile`` laid out on ``fam``
    (as returned by ``materialize``). The returned ``x`` has zero diagonal
    blocks and off-diagonal blocks ``y_ij / (mu_j - mu_i)``.

    Raises
    ------
    ExpectationNonzero
        If ``E(y)`` is not zero to ``1e-10``.
    RepeatedBlockValue
        If two blocks carry the same value of ``a`` (to 1e-12 relative).
    """
    y = dense_linalg.as_operator(y)
    if y.shape[0] != fam.dim:
        raise DimensionMismatch(f"matrix dim {y.shape[0]} vs family dim {fam.dim}")
    mu = block_values_of(a_profile, fam)
    scale = max(float(np.abs(mu).max()), 1.0)
    for i in range(mu.size):
        for j in range(i + 1, mu.size):
            if abs(mu[i] - mu[j]) <= 1e-12 * scale:
                raise RepeatedBlockValue(f"blocks {i} and {j} share value {mu[i]}")
    y_norm = float(np.linalg.norm(y))
    if np.linalg.norm(conditional_expectation(y, fam)) > 1e-10 * max(y_norm, 1.0):
        raise ExpectationNonzero("y has a nonzero block-diagonal part")
    if y_norm == 0:
        return np.zeros_like(y)

    labels = fam.labels()
    mu_row = mu[labels][:, None]
    mu_col = mu[labels][None, :]
    same = labels[:, None] == labels[None, :]
    diff = np.where(same, 1.0, mu_col - mu_row)
    a = np.diag(mu[labels])
    for sign in (DIVISOR_SIGN, -DIVISOR_SIGN):
        x = np.where(same, 0, y / (sign * diff))
        residual = np.linalg.norm(x @ a - a @ x - y)
        if residual <= 1e-9 * y_norm:
            if sign != DIVISOR_SIGN:
                log.warning("commutator solve needed the flipped divisor sign")
            return x
    raise ArithmeticError("commutator solve failed its residual check")


def closed_range_witnesses(a_profile: SpectralProfile) -> list[ClosedRangeWitness]:
    """Rank-two witnesses ``z = xi_j (x) xi_{j+1} + xi_{j+1} (x) xi_j`` for consecutive eigenvalues.

    Each ``z`` has ``E(z) = 0`` and norm at least one, while
    ``||delta_a(z)||`` equals the gap between the two eigenvalues, so the
    smallest ratio bounds from above how well ``delta_a`` can be inverted.
    Along a family of profiles whose spectra accumulate, that minimum tends
    to zero.
    """
    p = a_profile.canonical()
    validate_profile(p)
    if len(p.eigenvalues) < 2:
        raise TooFewEigenvalues("need at least two eigenvalues")
    kernel = p.kernel_dim if p.kernel_dim != INFINITE else 0
    a, fam = materialize(p, p.rank + kernel)
    starts = [block[0] for block in fam.blocks[: len(p.eigenvalues)]]
    out = []
    for j in range(len(starts) - 1):
        i, k = starts[j], starts[j + 1]
        z = np.zeros_like(a)
        z[i, k] = z[k, i] = 1.0
        d = delta(a, z)
        support = [i, k]
        comm_norm = dense_linalg.operator_norm(d[np.ix_(support, support)])
        lower = dense_linalg.operator_norm(z[np.ix_(support, support)])
        gap = abs(p.values[j] - p.values[j + 1])
        out.append(ClosedRangeWitness((j, j + 1), gap, lower, comm_norm, comm_norm / lower))
    return out


def min_witness_ratio(a_profile: SpectralProfile) -> float:
    return min(w.ratio for w in closed_range_witnesses(a_profile))


def _skew_basis(r: int):
    # Real basis of the r x r skew-hermitian matrices (real dimension r^2).
    for k in range(r):
        z = np.zeros((r, r), dtype=np.complex128)
        z[k, k] = 1j
        yield z
    for k in range(r):
        for l in range(k + 1, r):
            z = np.zeros((r, r), dtype=np.complex128)
            z[k, l], z[l, k] = 1.0, -1.0
            yield z
            z = np.zeros((r, r), dtype=np.complex128)
            z[k, l] = z[l, k] = 1j
            yield z


def tangent_split(a_profile: SpectralProfile, v0) -> TangentSplit:
    """Dimension count of the tangent splitting at a partial isometry ``v0``.

    With ``a0 = v0 a v0*`` and ``p0 = v0 v0*`` of rank ``r``: the tangent
    space has real dimension ``r^2``, the isotropy part is the skew-hermitian
    commutant of ``a0`` on ``Ran p0`` (``sum m_k^2``), and ``range_dim`` is
    the rank of ``z -> [z, a0]`` on skew-hermitian ``z``, computed from an
    explicit real matrix of that map with cutoff ``1e-9 ||a0||``.
    """
    v0 = dense_linalg.as_operator(v0)
    n = v0.shape[0]
    a, _ = materialize(a_profile, n)
    p_a = np.diag((np.abs(np.diag(a)) > 0).astype(np.complex128))
    if not dense_linalg.is_projection(v0.conj().T @ v0, 1e-9):
        raise NotPartialIsometry("v0* v0 is not a projection")
    if not dense_linalg.isometry_check(v0, p_a).is_isometry:
        raise InitialSpaceMismatch("v0* v0 differs from the range projection of a")

    a0 = v0 @ a @ v0.conj().T
    p0 = v0 @ v0.conj().T
    eig = dense_linalg.hermitian_eigen((p0 + p0.conj().T) / 2)
    w = eig.vectors[:, eig.values > 0.5]
    r = w.shape[1]
    a_c = w.conj().T @ a0 @ w

    mults = [m for _, m in profile_of(a_c).eigenvalues] if r else []
    dim_total = r * r
    dim_isotropy = sum(m * m for m in mults)

    if r == 0:
        return TangentSplit(0, 0, 0, 0)
    columns = []
    for z in _skew_basis(r):
        c = z @ a_c - a_c @ z
        columns.append(np.concatenate([c.real.ravel(), c.imag.ravel()]))
    m = np.array(columns).T  # (2 r^2) x (r^2)
    square = np.zeros((m.shape[0], m.shape[0]), dtype=np.complex128)
    square[:, : m.shape[1]] = m
    # threshold against ||a0||, not against the map itself: a zero map has
    # only round-off singular values
    s = dense_linalg.singular_values_of(square)
    range_dim = int(np.sum(s > 1e-9 * dense_linalg.operator_norm(a_c)))
    return TangentSplit(dim_total, dim_isotropy, dim_total - dim_isotropy, range_dim)
