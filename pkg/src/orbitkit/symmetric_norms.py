"""Symmetric norming functions on singular-value sequences.

A symmetric norm on finite-rank operators is a function of the singular
values alone. ``NormSpec`` names one of a few concrete families; the
``Ratio`` family compares Ky Fan partial sums against a reference sequence
and is the one that produces non-separable ideals when the reference is
bi-normalizing (tends to zero with a divergent sum).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dense_linalg
from .errors import ReferenceTooShort, UnsortedInput

KINDS = ("operator", "schatten", "kyfan", "trace", "ratio")


def looks_bi_normalizing(reference: Sequence[float]) -> bool:
    """Heuristic for a finite prefix: decays and its second half still carries mass.

    Harmonic-type sequences keep roughly ``log 2`` of mass in the second half
    of any prefix while summable ones lose it geometrically. Callers that
    know better should pass the flag explicitly.
    """
    r = np.asarray(reference, dtype=float)
    if r.size < 4 or r[0] <= 0:
        return False
    half = r[r.size // 2:]
    return bool(r[-1] <= 0.5 * r[0] and half.sum() >= 0.1 * r[0])


@dataclass(frozen=True)
class NormSpec:
    kind: str
    p: float | None = None
    k: int | None = None
    reference: tuple[float, ...] | None = None
    bi_normalizing: bool | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "schatten":
            if self.p is None or not self.p >= 1:
                raise ValueError("Schatten norms need p >= 1")
        if self.kind == "kyfan":
            if self.k is None or int(self.k) < 1:
                raise ValueError("Ky Fan norms need k >= 1")
            object.__setattr__(self, "k", int(self.k))
        if self.kind == "ratio":
            if not self.reference:
                raise ValueError("ratio norm needs a reference sequence")
            ref = tuple(float(r) for r in self.reference)
            if any(r <= 0 for r in ref):
                raise ValueError("ratio reference must be strictly positive")
            if any(b > a for a, b in zip(ref, ref[1:])):
                raise ValueError("ratio reference must be non-increasing")
            object.__setattr__(self, "reference", ref)
            if self.bi_normalizing is None:
                object.__setattr__(self, "bi_normalizing", looks_bi_normalizing(ref))

    @classmethod
    def operator(cls) -> "NormSpec":
        return cls("operator")

    @classmethod
    def trace(cls) -> "NormSpec":
        return cls("trace")

    @classmethod
    def schatten(cls, p: float) -> "NormSpec":
        return cls("schatten", p=float(p))

    @classmethod
    def kyfan(cls, k: int) -> "NormSpec":
        return cls("kyfan", k=int(k))

    @classmethod
    def ratio(cls, reference: Sequence[float], bi_normalizing: bool | None = None) -> "NormSpec":
        return cls("ratio", reference=tuple(reference), bi_normalizing=bi_normalizing)

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        """Parse the CLI form: ``operator``, ``trace``, ``schatten:2``, ``kyfan:3``,
        ``ratio:1,0.5,0.25`` or ``ratio:harmonic:128``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        if kind in ("operator", "trace"):
            return cls(kind)
        if kind == "schatten":
            return cls.schatten(float(rest))
        if kind == "kyfan":
            return cls.kyfan(int(rest))
        if kind == "ratio":
            family, _, length = rest.partition(":")
            if family == "harmonic":
                n = int(length)
                return cls.ratio([1.0 / k for k in range(1, n + 1)], bi_normalizing=True)
            return cls.ratio([float(t) for t in rest.split(",")])
        raise ValueError(f"cannot parse norm spec {text!r}")

    def to_dict(self) -> dict:
        if self.kind == "schatten":
            return {"kind": "schatten", "p": self.p}
        if self.kind == "kyfan":
            return {"kind": "kyfan", "k": self.k}
        if self.kind == "ratio":
            return {
                "kind": "ratio",
                "reference": list(self.reference),
                "bi_normalizing": self.bi_normalizing,
            }
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "NormSpec":
        kind = d["kind"]
        if kind == "schatten":
            return cls.schatten(d["p"])
        if kind == "kyfan":
            return cls.kyfan(d["k"])
        if kind == "ratio":
            return cls.ratio(d["reference"], d.get("bi_normalizing"))
        return cls(kind)


@dataclass(frozen=True)
class MajorizationReport:
    dominated: bool
    first_violation: int | None
    partial_sums_x: np.ndarray
    partial_sums_y: np.ndarray


def _check_sorted(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise ValueError("expected a 1-d sequence")
    if np.any(s < 0):
        raise ValueError("singular values must be non-negative")
    if s.size > 1:
        slack = 1e-12 * max(float(s.max()), 1.0)
        if np.any(np.diff(s) > slack):
            raise UnsortedInput("sequence is not non-increasing")
    return s


def ideal_norm(s, spec: NormSpec) -> float:
    """Evaluate the symmetric norm ``spec`` on a non-increasing sequence."""
    s = _check_sorted(s)
    if s.size == 0:
        return 0.0
    if spec.kind == "operator":
        return float(s[0])
    if spec.kind == "trace":
        return float(s.sum())
    if spec.kind == "kyfan":
        return float(s[: spec.k].sum())
    if spec.kind == "schatten":
        top = s[0]
        if top == 0:
            return 0.0
        # factor out the largest entry to keep large p from overflowing
        return float(top * np.sum((s / top) ** spec.p) ** (1.0 / spec.p))
    return _ratio_norm(s, spec.reference)


def ratio_partials(s, reference) -> np.ndarray:
    """``(sum_{k<=n} s_k) / (sum_{k<=n} r_k)`` for every ``n`` up to the last nonzero ``s``."""
    s = np.asarray(s, dtype=float)
    ref = np.asarray(reference, dtype=float)
    nonzero = np.flatnonzero(s > 0)
    length = int(nonzero[-1]) + 1 if nonzero.size else 1
    if length > ref.size:
        raise ReferenceTooShort(
            f"{length} nonzero singular values but reference has {ref.size} terms"
        )
    return np.cumsum(s[:length]) / np.cumsum(ref[:length])


def _ratio_norm(s, reference) -> float:
    return float(np.max(ratio_partials(s, reference)))


def ky_fan_majorizes(sx, sy, tol: float = 0.0) -> MajorizationReport:
    """Test ``sum_{k<=n} sx_k <= sum_{k<=n} sy_k + tol`` for every ``n``.

    ``first_violation`` is the (1-based) smallest ``n`` that fails.
    """
    sx = _check_sorted(sx)
    sy = _check_sorted(sy)
    n = max(sx.size, sy.size)
    px = np.cumsum(np.pad(sx, (0, n - sx.size)))
    py = np.cumsum(np.pad(sy, (0, n - sy.size)))
    bad = np.flatnonzero(px > py + tol)
    first = int(bad[0]) + 1 if bad.size else None
    return MajorizationReport(first is None, first, px, py)


def maximal_norm(x, spec: NormSpec) -> tuple[float, np.ndarray]:
    """Norms of the Schmidt truncations of ``x``.

    ``partials[n-1]`` is the norm of the operator keeping only the ``n``
    leading singular values; the sequence is non-decreasing and its last
    entry is returned as the value.
    """
    s = dense_linalg.singular_values_of(x)
    partials = np.empty(s.size)
    for n in range(1, s.size + 1):
        truncated = np.concatenate([s[:n], np.zeros(s.size - n)])
        partials[n - 1] = ideal_norm(truncated, spec)
    return float(partials[-1]), partials


def norm_of(x, spec: NormSpec) -> float:
    """Norm of a dense matrix: ``ideal_norm`` of its singular values."""
    return ideal_norm(dense_linalg.singular_values_of(x), spec)
