"""Random operators and profiles for property checks.

All generators take a ``numpy.random.Generator``; ``rng()`` builds one from
the ``ORBITKIT_SEED`` environment variable so that whole suites can be
replayed.
"""

from __future__ import annotations

import os

import numpy as np

from . import dense_linalg
from .spectral_core import ProjectionFamily, SpectralProfile

SEED_VAR = "ORBITKIT_SEED"
DEFAULT_SEED = 1729


def rng(seed: int | None = None) -> np.random.Generator:
    if seed is None:
        seed = int(os.environ.get(SEED_VAR, DEFAULT_SEED))
    return np.random.default_rng(seed)


def complex_matrix(gen: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return gen.standard_normal((n, m)) + 1j * gen.standard_normal((n, m))


def hermitian(gen: np.random.Generator, n: int) -> np.ndarray:
    z = complex_matrix(gen, n)
    return (z + z.conj().T) / 2


def unitary(gen: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(complex_matrix(gen, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def family(gen: np.random.Generator, n: int, blocks: int | None = None) -> ProjectionFamily:
    """Random partition of ``range(n)`` into at most ``blocks`` nonempty blocks."""
    blocks = int(gen.integers(1, n + 1)) if blocks is None else min(blocks, n)
    labels = np.concatenate([np.arange(blocks), gen.integers(0, blocks, n - blocks)])
    gen.shuffle(labels)
    return ProjectionFamily.from_labels(labels.tolist())


def spread_values(gen: np.random.Generator, count: int, min_gap: float,
                  radius: float = 2.0, real: bool = False) -> list[complex]:
    """``count`` nonzero points in a disc, pairwise and from 0 at least ``min_gap`` apart."""
    out: list[complex] = []
    while len(out) < count:
        z = gen.uniform(-radius, radius)
        if not real:
            z = complex(z, gen.uniform(-radius, radius))
        z = complex(z)
        if abs(z) >= min_gap and all(abs(z - w) >= min_gap for w in out):
            out.append(z)
    return out


def profile(gen: np.random.Generator, max_rank: int, min_gap: float = 1e-1,
            kernel_max: int = 3, real: bool = False) -> SpectralProfile:
    """Finite profile with random multiplicities, rank at most ``max_rank``."""
    rank = int(gen.integers(1, max_rank + 1))
    mults = []
    while sum(mults) < rank:
        mults.append(int(gen.integers(1, rank - sum(mults) + 1)))
    values = spread_values(gen, len(mults), min_gap, real=real)
    return SpectralProfile(tuple(zip(values, mults)), int(gen.integers(0, kernel_max + 1)))


def partial_isometry(gen: np.random.Generator, p) -> np.ndarray:
    """Random ``v`` with ``v* v = p`` for an orthogonal projection ``p``.

    The range of ``p`` is sent isometrically onto a random subspace spanned
    by columns of a random unitary.
    """
    p = dense_linalg.as_operator(p)
    n = p.shape[0]
    eig = dense_linalg.hermitian_eigen((p + p.conj().T) / 2)
    basis = eig.vectors[:, eig.values > 0.5]
    r = basis.shape[1]
    if r == 0:
        return np.zeros_like(p)
    # the polar unitary of a random full-rank matrix is a random unitary frame
    u = dense_linalg.polar_unitary(complex_matrix(gen, n))
    return u[:, :r] @ basis.conj().T
