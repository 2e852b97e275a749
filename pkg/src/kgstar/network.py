"""Star-shaped network of n half-axes with branch-wise constant coefficients."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BandIndexOutOfRange,
    BranchCountTooSmall,
    NegativePotential,
    NonPositiveSpeed,
    UnsortedPotentials,
    ValidationError,
)

# spectral operations reject energies closer than this to any threshold a_l
THRESHOLD_GUARD = 1e-9


@dataclass(frozen=True)
class SpectralBand:
    j: int
    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return not self.lo < self.hi

    def __contains__(self, lam) -> bool:
        return self.lo < lam < self.hi


@dataclass(frozen=True)
class StarNetwork:
    """n semi-infinite branches N_1..N_n glued at the origin.

    Branch k carries the operator -c_k d^2/dx^2 + a_k. Indices are 1-based
    throughout the public API.
    """

    c: tuple
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        _check(self.c, self.a)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def c_arr(self) -> np.ndarray:
        return np.asarray(self.c)

    @property
    def a_arr(self) -> np.ndarray:
        return np.asarray(self.a)

    def coeffs(self, k: int) -> tuple[float, float]:
        """(c_k, a_k) for the 1-based branch index k."""
        if not 1 <= k <= self.n:
            raise BandIndexOutOfRange(f"branch {k} not in 1..{self.n}")
        return self.c[k - 1], self.a[k - 1]

    def bands(self) -> list[SpectralBand]:
        return [band(self, j) for j in range(1, self.n + 1)]

    def threshold_distance(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.min(np.abs(lam[..., None] - self.a_arr), axis=-1)


def _check(c, a):
    if len(c) != len(a) or len(c) == 0:
        raise ValidationError(f"c and a must be non-empty and of equal length, got {len(c)} and {len(a)}")
    if len(c) < 2:
        raise BranchCountTooSmall(f"need n >= 2 branches, got {len(c)}")
    if not all(math.isfinite(v) for v in c + a):
        raise ValidationError("coefficients must be finite")
    bad = [k + 1 for k, ck in enumerate(c) if ck <= 0]
    if bad:
        raise NonPositiveSpeed(f"c_k must be positive; offending branches {bad}")
    if a[0] < 0:
        raise NegativePotential(f"a_1 = {a[0]} < 0")
    if any(a[k + 1] < a[k] for k in range(len(a) - 1)):
        raise UnsortedPotentials(f"potentials must be non-decreasing, got {a}")


def validate_network(c, a) -> StarNetwork:
    return StarNetwork(tuple(c), tuple(a))


def band(net: StarNetwork, j: int) -> SpectralBand:
    """Energy band (a_j, a_{j+1}) of multiplicity j, with a_{n+1} = +inf."""
    if not 1 <= j <= net.n:
        raise BandIndexOutOfRange(f"band index {j} not in 1..{net.n}")
    hi = net.a[j] if j < net.n else math.inf
    return SpectralBand(j, net.a[j - 1], hi)
