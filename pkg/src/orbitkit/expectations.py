"""Block-diagonal conditional expectations ``E(x) = sum_k p_k x p_k``."""

from __future__ import annotations

import numpy as np

from . import dense_linalg
from .errors import CommutantMismatch, DimensionMismatch, InconsistentFamily
from .spectral_core import ProjectionFamily


def block_mask(fam: ProjectionFamily) -> np.ndarray:
    labels = fam.labels()
    return labels[:, None] == labels[None, :]


def conditional_expectation(x, fam: ProjectionFamily) -> np.ndarray:
    """Keep the entries of ``x`` whose row and column lie in the same block."""
    x = dense_linalg.as_operator(x)
    if x.shape[0] != fam.dim:
        raise DimensionMismatch(f"matrix dim {x.shape[0]} vs family dim {fam.dim}")
    return np.where(block_mask(fam), x, 0)


def block_values(a, fam: ProjectionFamily, tol: float = 1e-12) -> np.ndarray:
    """Value of the diagonal, block-constant ``a`` on each block of ``fam``.

    Raises ``InconsistentFamily`` unless ``a`` is diagonal, constant on every
    block and takes distinct values on distinct blocks.
    """
    a = dense_linalg.as_operator(a)
    if a.shape[0] != fam.dim:
        raise DimensionMismatch(f"matrix dim {a.shape[0]} vs family dim {fam.dim}")
    scale = max(float(np.abs(a).max()), 1.0)
    diag = np.diag(a)
    if np.abs(a - np.diag(diag)).max() > tol * scale:
        raise InconsistentFamily("operator is not diagonal")
    values = np.empty(len(fam.blocks), dtype=np.complex128)
    for k, block in enumerate(fam.blocks):
        vals = diag[list(block)]
        if np.abs(vals - vals[0]).max() > tol * scale:
            raise InconsistentFamily(f"operator is not constant on block {k}")
        values[k] = vals[0]
    for i in range(values.size):
        for j in range(i + 1, values.size):
            if abs(values[i] - values[j]) <= tol * scale:
                raise InconsistentFamily(f"blocks {i} and {j} share the value {values[i]}")
    return values


def commutant_check(x, a, fam: ProjectionFamily, tol: float = 1e-9) -> bool:
    """Decide whether ``x`` commutes with ``a`` in two independent ways.

    The commutator test ``||xa - ax|| <= tol ||a|| ||x||`` and the
    expectation test ``||E(x) - x|| <= tol ||x||`` must agree; a
    disagreement means ``x`` sits in the ambiguous band between the two
    thresholds and raises ``CommutantMismatch``.
    """
    x = dense_linalg.as_operator(x)
    a = dense_linalg.as_operator(a)
    block_values(a, fam)
    nx = dense_linalg.operator_norm(x)
    na = dense_linalg.operator_norm(a)
    commutes = dense_linalg.operator_norm(x @ a - a @ x) <= tol * na * nx
    fixed = dense_linalg.operator_norm(conditional_expectation(x, fam) - x) <= tol * nx
    if commutes != fixed:
        raise CommutantMismatch("commutator and expectation tests disagree")
    return bool(commutes)
