"""Spectral profiles of normal operators and their dense materializations."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import dense_linalg
from .errors import (
    BadMultiplicity,
    DimensionTooSmall,
    DuplicateEigenvalue,
    NotNormal,
    ZeroListedAsEigenvalue,
)

INFINITE = math.inf

DEFAULT_CLUSTER_TOL = 1e-9


def canonical_key(value: complex) -> tuple[float, float, float]:
    """Sort key: decreasing modulus, then argument in [0, 2pi), then real part."""
    arg = cmath.phase(value) % (2 * math.pi)
    return (-abs(value), arg, value.real)


@dataclass(frozen=True)
class SpectralProfile:
    """Point spectrum of a normal operator.

    ``eigenvalues`` lists the nonzero eigenvalues with their multiplicities;
    the kernel is tracked separately. ``essential_points`` marks where the
    spectrum accumulates with infinite spectral rank, and ``tail_bound`` is
    the operator-norm size of whatever a truncation dropped.
    """

    eigenvalues: tuple[tuple[complex, int], ...] = ()
    kernel_dim: int | float = 0
    essential_points: tuple[complex, ...] = ()
    tail_bound: float = 0.0
    compact: bool = False

    def __post_init__(self):
        eigs = tuple((complex(v), int(m)) for v, m in self.eigenvalues)
        object.__setattr__(self, "eigenvalues", eigs)
        object.__setattr__(
            self, "essential_points", tuple(complex(z) for z in self.essential_points)
        )
        kd = self.kernel_dim
        if kd != INFINITE:
            kd = int(kd)
        object.__setattr__(self, "kernel_dim", kd)
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    @classmethod
    def from_values(cls, values: Iterable[complex], kernel_dim=0, **kw) -> "SpectralProfile":
        """Build from a flat list of simple eigenvalues."""
        return cls(tuple((v, 1) for v in values), kernel_dim, **kw)

    @property
    def values(self) -> tuple[complex, ...]:
        return tuple(v for v, _ in self.eigenvalues)

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.eigenvalues)

    @property
    def is_exact(self) -> bool:
        return self.tail_bound == 0.0

    def canonical(self) -> "SpectralProfile":
        eigs = tuple(sorted(self.eigenvalues, key=lambda vm: canonical_key(vm[0])))
        ess = tuple(sorted(self.essential_points, key=canonical_key))
        return SpectralProfile(eigs, self.kernel_dim, ess, self.tail_bound, self.compact)


def validate_profile(p: SpectralProfile) -> None:
    """Raise if ``p`` breaks a profile invariant; return ``None`` otherwise."""
    seen = set()
    for value, mult in p.eigenvalues:
        if value == 0:
            raise ZeroListedAsEigenvalue("zero belongs in kernel_dim")
        if mult < 1:
            raise BadMultiplicity(f"multiplicity {mult} for eigenvalue {value}")
        if value in seen:
            raise DuplicateEigenvalue(f"eigenvalue {value} listed twice")
        seen.add(value)
    if p.kernel_dim != INFINITE and p.kernel_dim < 0:
        raise BadMultiplicity("negative kernel dimension")
    if p.tail_bound < 0 or math.isnan(p.tail_bound):
        raise ValueError("tail_bound must be non-negative")
    if p.compact and any(z != 0 for z in p.essential_points):
        raise ValueError("compact profile with a nonzero essential point")


def singular_values(p: SpectralProfile, total_dim: int | None = None) -> np.ndarray:
    """Moduli of the eigenvalues with multiplicity, non-increasing, kernel zeros last.

    An infinite kernel needs ``total_dim``; the sequence is then padded (or
    the kernel part cut) to that length.
    """
    validate_profile(p)
    mods = np.repeat([abs(v) for v, _ in p.eigenvalues], [m for _, m in p.eigenvalues])
    mods = np.sort(mods)[::-1]
    if total_dim is None:
        if p.kernel_dim == INFINITE:
            raise ValueError("infinite kernel: pass total_dim to truncate")
        return np.concatenate([mods, np.zeros(p.kernel_dim)])
    if total_dim < mods.size:
        raise DimensionTooSmall(f"total_dim {total_dim} < rank {mods.size}")
    return np.concatenate([mods, np.zeros(total_dim - mods.size)])


@dataclass(frozen=True)
class ProjectionFamily:
    """Partition of ``range(dim)`` into blocks, i.e. orthogonal projections summing to 1."""

    dim: int
    blocks: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.dim < 1:
            raise ValueError("dim must be positive")
        flat = [i for b in blocks for i in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        if sorted(flat) != list(range(self.dim)):
            raise ValueError("blocks must partition range(dim)")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "ProjectionFamily":
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    def labels(self) -> np.ndarray:
        out = np.empty(self.dim, dtype=int)
        for k, b in enumerate(self.blocks):
            out[list(b)] = k
        return out

    def projection(self, k: int) -> np.ndarray:
        p = np.zeros((self.dim, self.dim), dtype=np.complex128)
        idx = list(self.blocks[k])
        p[idx, idx] = 1.0
        return p


def materialize(p: SpectralProfile, total_dim: int) -> tuple[np.ndarray, ProjectionFamily]:
    """Diagonal matrix of ``p`` on ``total_dim`` coordinates plus its eigen-blocks.

    Eigenvalue blocks follow the listed order of the profile; remaining
    coordinates form the kernel block, which comes last.
    """
    validate_profile(p)
    need = p.rank + (p.kernel_dim if p.kernel_dim != INFINITE else 0)
    if total_dim < max(need, 1):
        raise DimensionTooSmall(f"need at least {max(need, 1)} coordinates, got {total_dim}")
    diag = np.zeros(total_dim, dtype=np.complex128)
    blocks = []
    pos = 0
    for value, mult in p.eigenvalues:
        diag[pos:pos + mult] = value
        blocks.append(tuple(range(pos, pos + mult)))
        pos += mult
    if pos < total_dim:
        blocks.append(tuple(range(pos, total_dim)))
    return np.diag(diag), ProjectionFamily(total_dim, tuple(blocks))


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    # Single-linkage clustering: chain together values within tol.
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def profile_of(x, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectralProfile:
    """Recover the spectral profile of a normal matrix.

    Eigenvalues within ``cluster_tol * ||x||`` of each other merge, and those
    within the same distance of zero go to the kernel. The result is in
    canonical order.
    """
    x = dense_linalg.as_operator(x)
    scale = dense_linalg.operator_norm(x) if np.any(x) else 0.0
    comm = x.conj().T @ x - x @ x.conj().T
    limit = cluster_tol * scale**2 if scale > 0 else dense_linalg.ABS_TOL
    if dense_linalg.operator_norm(comm) > limit:
        raise NotNormal("matrix is not normal within tolerance")
    if scale == 0:
        return SpectralProfile((), x.shape[0])
    values = dense_linalg.normal_eigen(x).values
    tol = cluster_tol * scale
    kernel = 0
    eigs = []
    for group in _cluster(values, tol):
        center = complex(np.mean(values[group]))
        if np.min(np.abs(values[group])) <= tol:
            kernel += len(group)
        else:
            eigs.append((center, len(group)))
    return SpectralProfile(tuple(eigs), kernel).canonical()
