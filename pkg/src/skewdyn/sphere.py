"""Points of the Riemann sphere in normalized projective coordinates.

A point is a pair ``[a : b]`` with ``|a|^2 + |b|^2 = 1`` and ``z = a / b``;
``b = 0`` is the point at infinity.  Distances use the chordal metric
``2 |a1 b2 - a2 b1|``, which is bounded by 2 and never overflows.

Besides the scalar :class:`SpherePoint`, the module has array helpers that
work on ``(..., 2)`` complex arrays of homogeneous pairs; the rest of the
package uses those for anything bigger than a handful of points.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

#: Moduli above this are mapped to infinity by :func:`from_complex`.
MAX_FINITE = 1e150

DEFAULT_TOL = 1e-9


def _canonical_pair(a: complex, b: complex) -> tuple[complex, complex]:
    n = math.hypot(abs(a), abs(b))
    if n == 0.0 or not math.isfinite(n):
        raise ValueError(f"invalid projective pair ({a!r}, {b!r})")
    a, b = a / n, b / n
    # fix the phase so that the larger component is real and positive
    ref = b if abs(b) >= abs(a) else a
    ph = ref / abs(ref)
    return a / ph, b / ph


@dataclass(frozen=True)
class SpherePoint:
    """A point ``[a : b]`` of the Riemann sphere.

    Construct with :meth:`from_pair`, :func:`from_complex` or
    :meth:`infinity`; the raw constructor assumes an already normalized pair.
    """

    a: complex
    b: complex

    @classmethod
    def from_pair(cls, a: complex, b: complex) -> "SpherePoint":
        return cls(*_canonical_pair(complex(a), complex(b)))

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(1 + 0j, 0j)

    @property
    def is_infinity(self) -> bool:
        return self.b == 0

    def to_complex(self) -> complex:
        """Return ``a / b``; the point at infinity gives ``complex(inf, 0)``."""
        if self.b == 0:
            return complex(math.inf, 0.0)
        return self.a / self.b

    def pair(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)

    def to_json(self):
        return [[self.a.real, self.a.imag], [self.b.real, self.b.imag]]

    def __repr__(self) -> str:
        if self.b == 0:
            return "SpherePoint(inf)"
        return f"SpherePoint({self.to_complex():.12g})"


def from_complex(z: complex) -> SpherePoint:
    """Embed a finite complex number into the sphere.

    Moduli above :data:`MAX_FINITE` are saturated to infinity with a warning.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite coordinate {z!r}")
    r = abs(z)
    if r > MAX_FINITE:
        warnings.warn(f"|z| = {r:.3g} exceeds {MAX_FINITE:g}; mapped to infinity",
                      RuntimeWarning, stacklevel=2)
        return SpherePoint.infinity()
    if r <= 1.0:
        return SpherePoint.from_pair(z, 1.0)
    return SpherePoint.from_pair(1.0, 1.0 / z)


def point_from_json(obj) -> SpherePoint:
    """Parse ``"inf"``, ``[re, im]`` or ``[[re_a, im_a], [re_b, im_b]]``."""
    if isinstance(obj, str):
        if obj.strip().lower() in ("inf", "infinity"):
            return SpherePoint.infinity()
        return from_complex(complex(obj.replace(" ", "")))
    if isinstance(obj, (int, float)):
        return from_complex(obj)
    if len(obj) == 2 and all(isinstance(v, (list, tuple)) for v in obj):
        (ar, ai), (br, bi) = obj
        return SpherePoint.from_pair(complex(ar, ai), complex(br, bi))
    re, im = obj
    return from_complex(complex(re, im))


def spherical_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal distance in ``[0, 2]``."""
    return min(2.0, 2.0 * abs(p.a * q.b - q.a * p.b))


def approx_eq(p: SpherePoint, q: SpherePoint, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return spherical_distance(p, q) < tol


def chordal_complex(z1: complex, z2: complex) -> float:
    """Chordal distance between two finite complex numbers."""
    return 2 * abs(z1 - z2) / math.sqrt((1 + abs(z1) ** 2) * (1 + abs(z2) ** 2))


# ---------------------------------------------------------------------------
# array helpers on (..., 2) complex arrays


def normalize(h: np.ndarray) -> np.ndarray:
    """Scale homogeneous pairs to unit norm (no phase fixing)."""
    h = np.asarray(h, dtype=complex)
    n = np.sqrt(np.abs(h[..., 0]) ** 2 + np.abs(h[..., 1]) ** 2)
    return h / n[..., None]


def canonicalize(h: np.ndarray) -> np.ndarray:
    """Normalize and fix the phase the same way :class:`SpherePoint` does."""
    h = normalize(h)
    a, b = h[..., 0], h[..., 1]
    ref = np.where(np.abs(b) >= np.abs(a), b, a)
    ph = ref / np.abs(ref)
    return h / ph[..., None]


def pairs_from_complex(z) -> np.ndarray:
    """Vectorized :func:`from_complex`; ``inf`` entries become ``[1 : 0]``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (2,), dtype=complex)
    big = ~np.isfinite(z) | (np.abs(z) > 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(np.isfinite(z), 1.0 / np.where(big, z, 1.0), 0.0)
    out[..., 0] = np.where(big, 1.0, z)
    out[..., 1] = np.where(big, inv, 1.0)
    return canonicalize(out)


def pairs_to_complex(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = h[..., 0] / h[..., 1]
    return np.where(h[..., 1] == 0, complex(np.inf, 0.0), z)


def chordal(h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Chordal distance between broadcastable arrays of normalized pairs."""
    d = 2.0 * np.abs(h1[..., 0] * h2[..., 1] - h2[..., 0] * h1[..., 1])
    return np.minimum(d, 2.0)


def to_points(h: np.ndarray) -> list[SpherePoint]:
    h = canonicalize(h)
    return [SpherePoint(complex(a), complex(b)) for a, b in h.reshape(-1, 2)]


def to_pairs(points) -> np.ndarray:
    return np.array([[p.a, p.b] for p in points], dtype=complex).reshape(-1, 2)


def unitary_to(c: np.ndarray) -> np.ndarray:
    """Unitary matrix ``[[a, -conj(b)], [b, conj(a)]]`` sending ``[1:0]`` to ``c``.

    Unitary Moebius maps are chordal isometries.
    """
    c = normalize(np.asarray(c, dtype=complex))
    a, b = c[..., 0], c[..., 1]
    g = np.empty(c.shape[:-1] + (2, 2), dtype=complex)
    g[..., 0, 0] = a
    g[..., 0, 1] = -np.conj(b)
    g[..., 1, 0] = b
    g[..., 1, 1] = np.conj(a)
    return g


def complex_to_str(z: complex) -> str:
    if cmath.isinf(z):
        return "inf"
    return repr(complex(z))
