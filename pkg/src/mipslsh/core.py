"""Domain types and the preprocessing that makes MIPS hashable.

Vectors are plain float64 numpy arrays. A single point is 1-D, a set of
points is a 2-D ``(n, d)`` array. ``Dataset`` and ``QuerySet`` wrap read-only
copies of such arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerance for "unit norm" and "inside the unit ball" checks.
NORM_TOL = 1e-12

SIMPLE_LSH = "simple-lsh"
SIMPLE_ALSH = "simple-alsh"
L2_ALSH = "l2-alsh"
SIGN_ALSH = "sign-alsh"
SCHEMES = (SIMPLE_LSH, SIMPLE_ALSH, L2_ALSH, SIGN_ALSH)


class DomainError(ValueError):
    """A point lies outside the domain a transform or hash is defined on."""


def as_points(points, name: str = "points") -> np.ndarray:
    """Return ``points`` as a finite float64 array of shape ``(n, d)``."""
    arr = np.array(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"{name}: expected a 1-D vector or (n, d) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: coordinates must be finite")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Database points, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points, "dataset")
        if pts.shape[0] == 0:
            raise ValueError("dataset is empty")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def norm_bound_ok(self) -> bool:
        return bool(np.all(np.linalg.norm(self.points, axis=1) <= 1.0 + NORM_TOL))

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class QuerySet:
    """Query points, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points, "queries")
        if pts.shape[0] == 0:
            raise ValueError("query set is empty")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def normalized(self) -> bool:
        norms = np.linalg.norm(self.points, axis=1)
        return bool(np.all(np.abs(norms - 1.0) <= NORM_TOL))

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class ThresholdPair:
    """The (S, cS) gap: similarity threshold ``S`` and approximation ratio ``c``."""

    S: float
    c: float

    def __post_init__(self):
        if not (0.0 < self.S <= 1.0):
            raise ValueError(f"S must lie in (0, 1], got {self.S}")
        if not (0.0 < self.c < 1.0):
            raise ValueError(f"c must lie in (0, 1), got {self.c}")

    @property
    def cS(self) -> float:
        return self.c * self.S


@dataclass(frozen=True)
class CollisionPair:
    p1: float
    p2: float

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must be a probability, got {p}")


def normalize_queries(qs: QuerySet) -> QuerySet:
    """Scale every query to unit L2 norm.

    The norm of a query does not change its argmax, so this is free.
    Raises ``ValueError`` naming the first zero-norm query.
    """
    norms = np.linalg.norm(qs.points, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValueError(f"query {int(zero[0])} has zero norm and cannot be normalized")
    return QuerySet(qs.points / norms[:, None])


def rescale_dataset(ds: Dataset) -> tuple[Dataset, float]:
    """Divide every point by the largest norm if it exceeds 1.

    A single global scale keeps the argmax of ``q @ x`` intact; per-point
    normalization would not.
    """
    max_norm = float(np.max(np.linalg.norm(ds.points, axis=1)))
    if max_norm <= 1.0:
        return ds, 1.0
    return Dataset(ds.points / max_norm), max_norm


def hashing_quality(p: CollisionPair) -> float:
    """rho = log(p1) / log(p2); lower is better."""
    if p.p1 <= p.p2:
        raise ValueError(f"not an LSH: p1={p.p1} must exceed p2={p.p2}")
    if p.p1 >= 1.0 or p.p2 <= 0.0:
        raise ValueError(f"degenerate collision pair (p1={p.p1}, p2={p.p2}): logs undefined or zero")
    return math.log(p.p1) / math.log(p.p2)
