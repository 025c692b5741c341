"""Dense complex linear algebra built on cyclic Jacobi rotations.

Everything here works on square ``complex128`` numpy arrays. The heavy
inner loops are compiled with numba; the public functions add validation,
ordering and residual bookkeeping around them.

Tolerances are relative to the norm of the input, falling back to an
absolute ``1e-12`` when the input is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .errors import (
    NoConvergence,
    NotAProjection,
    NotHermitian,
    NotNormal,
    SingularInput,
)

ABS_TOL = 1e-12
MAX_SWEEPS = 100
OFF_DIAGONAL_TOL = 1e-13


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    residual: float


@dataclass(frozen=True)
class PolarFactors:
    isometric_factor: np.ndarray
    positive_factor: np.ndarray


class IsometryReport(NamedTuple):
    is_isometry: bool
    defect: float
    final_defect: float


def as_operator(x) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _scale(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def _rel_tol(x: np.ndarray, rel: float) -> float:
    s = _scale(x)
    return rel * s if s > 0 else ABS_TOL


# -- compiled kernels -------------------------------------------------------


@numba.njit(cache=True)
def _rotation(app, aqq, apq):
    # Unitary J with J* [[app, apq], [conj(apq), aqq]] J diagonal.
    r = abs(apq)
    ph = apq / r
    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    cph = np.conj(ph)
    return c + 0j, s + 0j, -s * cph, c * cph


@numba.njit(cache=True)
def _jacobi_kernel(a, v, tol_off, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        off = np.sqrt(off)
        if off <= tol_off or sweep == max_sweeps:
            return sweep, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq.real == 0.0 and apq.imag == 0.0:
                    continue
                jpp, jpq, jqp, jqq = _rotation(a[p, p].real, a[q, q].real, apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * jpp + akq * jqp
                    a[k, q] = akp * jpq + akq * jqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(jpp) * apk + np.conj(jqp) * aqk
                    a[q, k] = np.conj(jpq) * apk + np.conj(jqq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * jpp + vkq * jqp
                    v[k, q] = vkp * jpq + vkq * jqq
    return max_sweeps, 0.0


@numba.njit(cache=True)
def _one_sided_kernel(b, v, max_sweeps):
    # Hestenes polish: rotate column pairs of b and v together until the
    # columns of b are mutually orthogonal; keeps b = x v invariant.
    n = b.shape[1]
    m = b.shape[0]
    eps = 1e-15
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0j
                for k in range(m):
                    alpha += b[k, p].real ** 2 + b[k, p].imag ** 2
                    beta += b[k, q].real ** 2 + b[k, q].imag ** 2
                    gamma += np.conj(b[k, p]) * b[k, q]
                if abs(gamma) <= eps * np.sqrt(alpha * beta) or abs(gamma) == 0.0:
                    continue
                rotated = True
                jpp, jpq, jqp, jqq = _rotation(alpha, beta, gamma)
                for k in range(m):
                    bkp = b[k, p]
                    bkq = b[k, q]
                    b[k, p] = bkp * jpp + bkq * jqp
                    b[k, q] = bkp * jpq + bkq * jqq
                for k in range(v.shape[0]):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * jpp + vkq * jqp
                    v[k, q] = vkp * jpq + vkq * jqq
        if not rotated:
            return sweep
    return max_sweeps


# -- public API -------------------------------------------------------------


def hermitian_eigen(h) -> EigenDecomposition:
    """Eigen-decomposition of a hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues come back real and sorted non-increasing; ``vectors`` holds
    the matching orthonormal eigenvectors as columns.

    Raises
    ------
    NotHermitian
        If ``||h - h*|| > 1e-10 ||h||``.
    NoConvergence
        If the off-diagonal mass is still above ``1e-13 ||h||_F`` after
        100 sweeps.
    """
    h = as_operator(h)
    if np.linalg.norm(h - h.conj().T) > _rel_tol(h, 1e-10):
        raise NotHermitian("matrix is not hermitian")
    n = h.shape[0]
    a = np.ascontiguousarray((h + h.conj().T) / 2)
    v = np.eye(n, dtype=np.complex128)
    tol_off = _rel_tol(h, OFF_DIAGONAL_TOL)
    sweeps, off = _jacobi_kernel(a, v, tol_off, MAX_SWEEPS)
    if off > tol_off:
        raise NoConvergence(f"off-diagonal mass {off:.3e} after {sweeps} sweeps")
    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    v = v[:, order]
    residual = float(np.linalg.norm(h @ v - v * values))
    return EigenDecomposition(values, v, residual)


def normal_eigen(x) -> EigenDecomposition:
    """Diagonalize a normal matrix through its commuting hermitian parts.

    ``Re x`` is diagonalized first; inside each cluster of nearly equal
    real eigenvalues (within ``1e-8 ||x||``) the imaginary part is
    diagonalized on the restricted subspace. Returned values are Rayleigh
    quotients of ``x`` on the final eigenvectors.
    """
    x = as_operator(x)
    scale = _scale(x)
    comm = x.conj().T @ x - x @ x.conj().T
    if np.linalg.norm(comm) > (1e-9 * scale**2 if scale > 0 else ABS_TOL):
        raise NotNormal("matrix is not normal")
    re_part = (x + x.conj().T) / 2
    im_part = (x - x.conj().T) / 2j
    base = hermitian_eigen(re_part)
    vecs = base.vectors.copy()
    group_tol = 1e-8 * scale if scale > 0 else ABS_TOL

    n = x.shape[0]
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and base.values[stop - 1] - base.values[stop] <= group_tol:
            stop += 1
        if stop - start > 1:
            w = vecs[:, start:stop]
            block = w.conj().T @ im_part @ w
            inner = hermitian_eigen((block + block.conj().T) / 2)
            vecs[:, start:stop] = w @ inner.vectors
        start = stop

    values = np.einsum("ij,ij->j", vecs.conj(), x @ vecs)
    residual = float(np.linalg.norm(x @ vecs - vecs * values))
    return EigenDecomposition(values, vecs, residual)


def _complete_basis(u: np.ndarray, filled: np.ndarray) -> np.ndarray:
    # Gram-Schmidt the standard basis against the already filled columns.
    n = u.shape[0]
    basis = [u[:, j] for j in range(u.shape[1]) if filled[j]]
    extra = []
    for k in range(n):
        if len(basis) + len(extra) == n:
            break
        e = np.zeros(n, dtype=np.complex128)
        e[k] = 1.0
        for _ in range(2):
            for b in basis + extra:
                e = e - (b.conj() @ e) * b
        nrm = np.linalg.norm(e)
        if nrm > 1e-8:
            extra.append(e / nrm)
    it = iter(extra)
    out = u.copy()
    for j in range(u.shape[1]):
        if not filled[j]:
            out[:, j] = next(it)
    return out


def svd(x):
    """Singular value decomposition ``x = L diag(s) R*``.

    Right vectors come from the Jacobi eigen-decomposition of ``x* x``,
    followed by a one-sided Jacobi pass on ``x R`` so the left vectors are
    orthonormal to working precision. Left columns belonging to numerically
    zero singular values are completed to an orthonormal basis.

    Returns
    -------
    s : ndarray
        Non-increasing singular values.
    left, right : ndarray
        Unitary factors.
    """
    x = as_operator(x)
    n = x.shape[0]
    gram = x.conj().T @ x
    right = hermitian_eigen((gram + gram.conj().T) / 2).vectors
    b = np.ascontiguousarray(x @ right)
    right = np.ascontiguousarray(right)
    _one_sided_kernel(b, right, 30)
    s = np.linalg.norm(b, axis=0)
    order = np.argsort(-s, kind="stable")
    s, b, right = s[order], b[:, order], right[:, order]
    thresh = n * np.finfo(float).eps * s[0] if s[0] > 0 else 0.0
    filled = s > max(thresh, 1e-300)
    left = np.zeros_like(b)
    left[:, filled] = b[:, filled] / s[filled]
    if not np.all(filled):
        left = _complete_basis(left, filled)
    return s, left, right


def singular_values_of(x) -> np.ndarray:
    return svd(x)[0]


def operator_norm(x) -> float:
    return float(svd(x)[0][0])


def polar(t) -> PolarFactors:
    s, left, right = svd(t)
    return PolarFactors(left @ right.conj().T, (right * s) @ right.conj().T)


def polar_unitary(t) -> np.ndarray:
    """Unitary factor ``t |t|^{-1}`` of an invertible matrix."""
    s, left, right = svd(t)
    if s[0] == 0 or s[-1] < 1e-10 * s[0]:
        raise SingularInput("polar unitary needs an invertible matrix")
    return left @ right.conj().T


def numeric_rank(x, tol: float = 1e-9) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = svd(x)[0]
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def is_projection(p, tol: float = 1e-10) -> bool:
    p = as_operator(p)
    return (
        operator_norm(p - p.conj().T) <= tol
        and operator_norm(p @ p - p) <= tol
    )


def isometry_check(v, p) -> IsometryReport:
    """Check ``v* v = p`` for an orthogonal projection ``p``.

    The report also carries ``||vv* - (vv*)^2||``, which vanishes exactly
    when ``v`` is a partial isometry.
    """
    v = as_operator(v)
    p = as_operator(p)
    if v.shape != p.shape:
        raise ValueError("shape mismatch")
    if not is_projection(p):
        raise NotAProjection("p is not an orthogonal projection")
    defect = operator_norm(v.conj().T @ v - p)
    final = v @ v.conj().T
    final_defect = operator_norm(final - final @ final)
    return IsometryReport(defect <= 1e-9, defect, final_defect)
