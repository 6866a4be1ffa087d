"""Domain types: points in [-1,1]^d, uniform grids, quantized states, orbits.

The grid on each axis has K+1 nodes a_k = 2k/K - 1 (k = 0..K), spacing 2/K.
Quantization snaps each coordinate to the nearest node, resolving exact
midpoints toward the larger node; the resulting l2 error never exceeds
sqrt(d)/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, OutOfRange

# Values this far outside [-1,1] are clamped to the boundary; anything
# farther is rejected.  Tolerates floating-point overshoot of map evaluation.
CLAMP_BAND = 1e-12


def _clamp_coord(x: float) -> float:
    x = float(x)
    if x > 1.0:
        if x - 1.0 > CLAMP_BAND:
            raise OutOfRange(f"coordinate {x!r} outside [-1,1]")
        return 1.0
    if x < -1.0:
        if -1.0 - x > CLAMP_BAND:
            raise OutOfRange(f"coordinate {x!r} outside [-1,1]")
        return -1.0
    return x


@dataclass(frozen=True)
class Point:
    """A state vector in [-1,1]^d.  Immutable; validated on construction."""

    coords: tuple[float, ...]

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(_clamp_coord(c) for c in coords))
        if not self.coords:
            raise DimensionMismatch("a point needs at least one coordinate")

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def to_json(self):
        return list(self.coords)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [-1,1]^d with K+1 nodes per axis."""

    K: int
    d: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")

    def node(self, k: int) -> float:
        """Axis node a_k = 2k/K - 1."""
        return 2.0 * k / self.K - 1.0

    def axis_nodes(self) -> np.ndarray:
        return np.array([self.node(k) for k in range(self.K + 1)])

    @property
    def spacing(self) -> float:
        return 2.0 / self.K

    @property
    def state_count(self) -> int:
        """Total number of grid states, (K+1)^d."""
        return (self.K + 1) ** self.d

    def to_json(self):
        return {"K": self.K, "d": self.d}


@dataclass(frozen=True)
class GridState:
    """A grid point identified by its integer index vector.

    Indices are stored exactly so states can be compared, hashed and used
    as transition-table keys without floating-point ambiguity.
    """

    indices: tuple[int, ...]
    grid: GridSpec

    def __init__(self, indices, grid: GridSpec):
        idx = tuple(int(i) for i in indices)
        if len(idx) != grid.d:
            raise DimensionMismatch(
                f"{len(idx)} indices for a grid of dimension {grid.d}"
            )
        for i in idx:
            if not 0 <= i <= grid.K:
                raise OutOfRange(f"index {i} outside 0..{grid.K}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "grid", grid)

    def decode(self) -> Point:
        return Point(self.grid.node(i) for i in self.indices)

    def decode_array(self) -> np.ndarray:
        return np.array([self.grid.node(i) for i in self.indices])

    def to_json(self):
        return list(self.indices)


@dataclass(frozen=True)
class OrbitSeries:
    """Samples y(0)..y(H) of an orbit y(t+1) = map(y(t))."""

    d: int
    horizon: int
    samples: tuple[Point, ...] = field(repr=False)

    def __init__(self, samples):
        samples = tuple(samples)
        if not samples:
            raise ValueError("an orbit needs at least the initial sample")
        d = samples[0].d
        for p in samples:
            if p.d != d:
                raise DimensionMismatch("orbit samples of mixed dimension")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "horizon", len(samples) - 1)
        object.__setattr__(self, "samples", samples)

    def as_array(self) -> np.ndarray:
        """Shape (H+1, d)."""
        return np.array([p.coords for p in self.samples], dtype=float)


def _quantize_axis(c: float, g: GridSpec) -> int:
    # Nearest node with exact midpoints resolved to the larger node.  In
    # node-index space u = (c+1)K/2 the decision boundary sits at the
    # half-integers; away from it the float computation is already exact,
    # on it we fall back to rational arithmetic so ties resolve by the
    # true values of c and the nodes 2k/K - 1, not their roundings.
    K = g.K
    u = (c + 1.0) * K / 2.0
    k = math.floor(u)
    frac = u - k
    if abs(frac - 0.5) > 1e-9:
        idx = k + 1 if frac > 0.5 else k
    else:
        uq = (Fraction(c) + 1) * K / 2
        kq = math.floor(uq)
        idx = kq + 1 if uq - kq >= Fraction(1, 2) else kq
    return min(max(idx, 0), K)


def quantize(p: Point, g: GridSpec) -> GridState:
    """Snap a point to the nearest grid state (midpoint ties go up)."""
    if p.d != g.d:
        raise DimensionMismatch(f"point dimension {p.d} != grid dimension {g.d}")
    return GridState((_quantize_axis(c, g) for c in p.coords), g)


def quantization_error(p: Point, g: GridSpec) -> float:
    """l2 distance from p to its quantized state; always <= sqrt(d)/K."""
    q = quantize(p, g).decode_array()
    return float(np.linalg.norm(p.as_array() - q))
