"""Spin configurations, fixed-magnetization sectors and the full-space bit encoding.

A configuration is the sorted tuple of down-spin sites ``1 <= x_1 < ... < x_m <= L``.
In the full ``2**L`` space site ``x`` is bit ``x - 1`` and a set bit means spin down.
Sectors are ordered colexicographically, which is the same as ordering the bit
masks numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

MAX_L_FULL = 20
MAX_L_SECTOR = 24


@dataclass(frozen=True)
class SpinConfiguration:
    L: int
    downs: tuple[int, ...]

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"chain length must be >= 1, got {self.L}")
        downs = tuple(int(x) for x in self.downs)
        object.__setattr__(self, "downs", downs)
        if any(b <= a for a, b in zip(downs, downs[1:])):
            raise ValueError(f"down sites must be strictly increasing: {downs}")
        if downs and (downs[0] < 1 or downs[-1] > self.L):
            raise ValueError(f"down sites must lie in [1, {self.L}]: {downs}")

    @property
    def m(self) -> int:
        return len(self.downs)

    @property
    def mask(self) -> int:
        return sum(1 << (x - 1) for x in self.downs)

    @classmethod
    def from_mask(cls, L: int, mask: int) -> "SpinConfiguration":
        return cls(L, tuple(x + 1 for x in range(L) if (mask >> x) & 1))


@dataclass(frozen=True)
class SectorBasis:
    L: int
    m: int
    masks: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.masks)

    @property
    def configs(self) -> list[SpinConfiguration]:
        return [SpinConfiguration.from_mask(self.L, int(b)) for b in self.masks]

    def positions(self) -> np.ndarray:
        """Integer array of shape (dim, m) holding the 1-based down sites of each config."""
        out = np.zeros((self.dim, self.m), dtype=np.int64)
        col = np.zeros(self.dim, dtype=np.int64)
        for x in range(self.L):
            hit = ((self.masks >> x) & 1).astype(bool)
            out[hit, col[hit]] = x + 1
            col[hit] += 1
        return out


def enumerate_sector(L: int, m: int) -> SectorBasis:
    """All ``binomial(L, m)`` configurations with ``m`` down spins, in colex order."""
    if L < 1 or L > MAX_L_SECTOR:
        raise ValueError(f"L must be in [1, {MAX_L_SECTOR}], got {L}")
    if m < 0 or m > L:
        raise ValueError(f"m must be in [0, L={L}], got {m}")
    masks = np.fromiter(
        (sum(1 << x for x in c) for c in combinations(range(L), m)),
        dtype=np.int64,
        count=comb(L, m),
    )
    masks.sort()
    return SectorBasis(L, m, masks)


def index_of(basis: SectorBasis, config: SpinConfiguration) -> int:
    # colex rank: sum_i C(x_i - 1, i) with i counted from 1
    if config.L != basis.L or config.m != basis.m:
        raise ValueError(
            f"configuration (L={config.L}, m={config.m}) is not in sector (L={basis.L}, m={basis.m})"
        )
    return sum(comb(x - 1, i) for i, x in enumerate(config.downs, start=1))


def config_of(basis: SectorBasis, index: int) -> SpinConfiguration:
    if not 0 <= index < basis.dim:
        raise IndexError(f"index {index} out of range for sector of dimension {basis.dim}")
    downs = []
    rest = index
    for i in range(basis.m, 0, -1):
        c = i - 1
        while comb(c + 1, i) <= rest:
            c += 1
        downs.append(c + 1)
        rest -= comb(c, i)
    return SpinConfiguration(basis.L, tuple(reversed(downs)))


def embed_sector(basis: SectorBasis, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (basis.dim,):
        raise ValueError(f"expected a sector vector of length {basis.dim}, got shape {v.shape}")
    if basis.L > MAX_L_FULL:
        raise ValueError(f"full space is limited to L <= {MAX_L_FULL}")
    out = np.zeros(1 << basis.L, dtype=complex)
    out[basis.masks] = v
    return out


def restrict_to_sector(basis: SectorBasis, full) -> np.ndarray:
    full = np.asarray(full)
    if full.shape != (1 << basis.L,):
        raise ValueError(f"expected a full-space vector of length {1 << basis.L}")
    return full[basis.masks]


def popcounts(L: int) -> np.ndarray:
    """Number of down spins of every full-space basis index."""
    idx = np.arange(1 << L, dtype=np.int64)
    counts = np.zeros_like(idx)
    for x in range(L):
        counts += (idx >> x) & 1
    return counts
