"""Random hash draws, K-symbol codes and Hamming distances.

Reproducibility
---------------
Draw ``i`` of a family seeded with ``seed`` is a pure function of
``(seed, i, dim)``.  Draws are generated in blocks of ``BLOCK`` consecutive
indices; block ``j`` comes from a Philox-4x64 counter-based generator keyed by
``numpy.random.SeedSequence(seed, spawn_key=(0, j))``.  Within a block the
Gaussian directions are sampled first (numpy's ziggurat ``standard_normal``,
row-major ``(BLOCK, dim)``), then ``BLOCK`` uniforms on [0, 1) that become the
L2 offsets ``b = u * r``.  Because of this layout a code of length K is always
a prefix of a longer code built from the same seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import L2_ALSH, as_points
from .transforms import transform

BLOCK = 256
RNG_ALGORITHM = "philox4x64-ziggurat-block256"

INTEGER = "integer"
BIT = "bit"


@dataclass(frozen=True, eq=False)
class L2HashDraw:
    a: np.ndarray
    b: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not (0.0 <= self.b < self.r):
            raise ValueError(f"b must lie in [0, r), got b={self.b}, r={self.r}")


@dataclass(frozen=True, eq=False)
class SignHashDraw:
    a: np.ndarray


def substream(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for the stream named by ``key`` under ``seed``.

    Key prefixes in use: ``(0, block)`` hash draws, ``(1,)`` query sampling,
    ``(2, query, K)`` tie-breaking, ``(3,)`` synthetic data, ``(4,)`` SVD start.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def gaussian_draws(seed: int, K: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A, u)``: K Gaussian directions of length ``dim`` and K uniforms on [0, 1)."""
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if dim < 1:
        raise ValueError(f"dim must be at least 1, got {dim}")
    nblocks = -(-K // BLOCK)
    A = np.empty((nblocks * BLOCK, dim))
    u = np.empty(nblocks * BLOCK)
    for j in range(nblocks):
        rng = substream(seed, 0, j)
        A[j * BLOCK:(j + 1) * BLOCK] = rng.standard_normal((BLOCK, dim))
        u[j * BLOCK:(j + 1) * BLOCK] = rng.random(BLOCK)
    return A[:K], u[:K]


def l2_offsets(u: np.ndarray, r: float) -> np.ndarray:
    # u * r can round up to r; keep b strictly below r
    return np.minimum(u * r, np.nextafter(r, 0.0))


def l2_symbol(z, draw: L2HashDraw) -> int:
    z = np.asarray(z, dtype=np.float64)
    if z.shape != draw.a.shape:
        raise ValueError(f"dimension mismatch: point {z.shape} vs draw {draw.a.shape}")
    return int(math.floor((float(draw.a @ z) + draw.b) / draw.r))


def sign_bit(z, draw: SignHashDraw) -> int:
    """sign(a.z) with sign(0) = +1."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != draw.a.shape:
        raise ValueError(f"dimension mismatch: point {z.shape} vs draw {draw.a.shape}")
    return 1 if float(draw.a @ z) >= 0.0 else -1


def l2_symbols(Z: np.ndarray, A: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    return np.floor((Z @ A.T + b) / r).astype(np.int64)


def sign_bits(Z: np.ndarray, A: np.ndarray) -> np.ndarray:
    return np.where(Z @ A.T >= 0.0, 1, -1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class HashCode:
    symbols: np.ndarray
    alphabet: str

    @property
    def K(self) -> int:
        return self.symbols.shape[0]


@dataclass(frozen=True, eq=False)
class HashCodes:
    """A set of codes, one row of ``K`` symbols per point."""

    symbols: np.ndarray
    alphabet: str

    @property
    def K(self) -> int:
        return self.symbols.shape[1]

    def __len__(self) -> int:
        return self.symbols.shape[0]

    def __getitem__(self, i: int) -> HashCode:
        return HashCode(self.symbols[i], self.alphabet)

    def take(self, rows) -> HashCodes:
        return HashCodes(self.symbols[np.asarray(rows)], self.alphabet)

    def prefix(self, K: int) -> HashCodes:
        if not 1 <= K <= self.K:
            raise ValueError(f"prefix length {K} outside [1, {self.K}]")
        return HashCodes(self.symbols[:, :K], self.alphabet)


def build_codes(scheme: str, params, points, side: str, K: int, seed: int) -> HashCodes:
    """Hash ``points`` with K independent draws of ``scheme``'s hash family.

    Data points go through ``P`` and queries through the query-side map; both
    sides share the same K draws, so codes from the two sides are comparable.
    """
    Z = transform(scheme, params, as_points(points, side), side)
    A, u = gaussian_draws(seed, K, Z.shape[1])
    if scheme == L2_ALSH:
        return HashCodes(l2_symbols(Z, A, l2_offsets(u, params.r), params.r), INTEGER)
    return HashCodes(sign_bits(Z, A), BIT)


def hamming(c1: HashCode, c2: HashCode) -> int:
    if c1.alphabet != c2.alphabet:
        raise ValueError(f"alphabet mismatch: {c1.alphabet} vs {c2.alphabet}")
    if c1.K != c2.K:
        raise ValueError(f"length mismatch: {c1.K} vs {c2.K}")
    return int(np.count_nonzero(c1.symbols != c2.symbols))


def hamming_matrix(queries: HashCodes, items: HashCodes, chunk: int = 64) -> np.ndarray:
    """Pairwise Hamming distances, shape ``(len(queries), len(items))``."""
    if queries.alphabet != items.alphabet:
        raise ValueError(f"alphabet mismatch: {queries.alphabet} vs {items.alphabet}")
    if queries.K != items.K:
        raise ValueError(f"length mismatch: {queries.K} vs {items.K}")
    K = queries.K
    if queries.alphabet == BIT:
        # for +-1 codes, <a, b> = K - 2 * hamming; exact in float64 for K < 2**53
        dots = queries.symbols.astype(np.float64) @ items.symbols.astype(np.float64).T
        return np.rint((K - dots) / 2.0).astype(np.int64)
    out = np.empty((len(queries), len(items)), dtype=np.int64)
    for s in range(0, len(queries), chunk):
        q = queries.symbols[s:s + chunk, None, :]
        out[s:s + chunk] = np.count_nonzero(q != items.symbols[None, :, :], axis=2)
    return out
