"""Geometry on the unit-area sphere.

Convention: points are stored as unit vectors in R^3 and all distances are
central angles in radians (range [0, pi]).  The sphere itself has radius
1/(2*sqrt(pi)) so that its total surface area is 1; that radius only enters
through cap areas, which are returned as fractions of the sphere,
cap_area(R) = (1 - cos R) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPHERE_RADIUS = 1.0 / (2.0 * np.sqrt(np.pi))

_NORM_TOL = 1e-12


def _check_radius(R: float) -> float:
    R = float(R)
    if not np.isfinite(R) or R < 0.0 or R > np.pi:
        raise ValueError(f"angular radius must lie in [0, pi], got {R!r}")
    return R


@dataclass(frozen=True)
class SpherePoint:
    """A validated point on the sphere, stored as a unit 3-vector."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=np.float64)
        if v.shape != (3,):
            raise ValueError(f"expected shape (3,), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("coordinates must be finite")
        if abs(float(v @ v) - 1.0) > 2.0 * _NORM_TOL:
            raise ValueError("vector is not unit length")
        object.__setattr__(self, "vec", v)
        self.vec.setflags(write=False)

    @classmethod
    def from_angles(cls, colat: float, lon: float) -> "SpherePoint":
        """Build from colatitude in [0, pi] and longitude (any real, taken mod 2pi)."""
        colat = float(colat)
        if not 0.0 <= colat <= np.pi:
            raise ValueError(f"colatitude must lie in [0, pi], got {colat!r}")
        s = np.sin(colat)
        return cls(np.array([s * np.cos(lon), s * np.sin(lon), np.cos(colat)]))

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        """Build from any nonzero 3-vector by normalizing it."""
        v = np.asarray(v, dtype=np.float64)
        n = np.linalg.norm(v)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / n)

    @property
    def colat(self) -> float:
        return float(np.arccos(np.clip(self.vec[2], -1.0, 1.0)))

    @property
    def lon(self) -> float:
        return float(np.arctan2(self.vec[1], self.vec[0]) % (2.0 * np.pi))

    def distance_to(self, other: "SpherePoint") -> float:
        return float(angular_distance(self.vec, other.vec))


def as_unit_vectors(p) -> np.ndarray:
    """Coerce a SpherePoint or array-like of shape (..., 3) to a float64 array."""
    if isinstance(p, SpherePoint):
        return p.vec
    v = np.asarray(p, dtype=np.float64)
    if v.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {v.shape}")
    return v


def angular_distance(p, q):
    """Central angle between unit vectors, broadcasting over leading axes."""
    p = as_unit_vectors(p)
    q = as_unit_vectors(q)
    dots = np.sum(p * q, axis=-1)
    return np.arccos(np.clip(dots, -1.0, 1.0))


def cap_area(R) -> float:
    """Area of a spherical cap of angular radius R, as a fraction of the sphere.

    Exact on the unit-area sphere: (1 - cos R) / 2.  For small R this is
    approximately R^2 / 4.
    """
    R = np.asarray(R, dtype=np.float64)
    if np.any(~np.isfinite(R)) or np.any(R < 0.0) or np.any(R > np.pi):
        raise ValueError("angular radius must lie in [0, pi]")
    out = 0.5 * (1.0 - np.cos(R))
    return float(out) if out.ndim == 0 else out


def sample_uniform(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw points uniformly from the sphere surface by inverse transform.

    z is uniform on [-1, 1] and longitude uniform on [0, 2pi); returns shape
    (3,) for size=None, else (size, 3).
    """
    n = 1 if size is None else int(size)
    z = 1.0 - 2.0 * rng.random(n)
    phi = 2.0 * np.pi * rng.random(n)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    pts = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    return pts[0] if size is None else pts
