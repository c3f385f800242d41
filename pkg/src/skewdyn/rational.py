"""Rational maps on the Riemann sphere.

Maps are stored as ascending coefficient arrays for the numerator ``P`` and
denominator ``Q`` and evaluated through their homogenizations

    P_h(z, t) = sum_k p_k z^k t^(d - k),   d = max(deg P, deg Q),

so that infinity and poles need no special casing.  Root finding is a
vectorized Aberth-Ehrlich iteration; preimage fibres are solved after a
unitary change of coordinates that keeps the leading coefficient away from
zero, so fibres containing (or near) infinity are as accurate as any other.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import sphere
from .sphere import SpherePoint

MAX_COMPOSED_DEGREE = 4096
ABERTH_MAXITER = 200
ABERTH_TOL = 1e-12
CLUSTER_TOL = 1e-7
COPRIME_TOL = 1e-8


class RootFindingError(RuntimeError):
    """Aberth iteration failed to meet its residual target."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NonCoprimeError(ValueError):
    """Numerator and denominator vanish simultaneously."""


class DegreeCapError(ValueError):
    """A composition would exceed :data:`MAX_COMPOSED_DEGREE`."""


def trim(c, rtol: float = 0.0) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    k = c.size - 1
    while k > 0 and abs(c[k]) <= rtol * scale:
        k -= 1
    return c[: k + 1].copy()


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial with complex coefficients in ascending order."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = trim(self.coeffs)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        if self.is_zero:
            return -1
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def deriv(self) -> "Poly":
        if self.coeffs.size == 1:
            return Poly(np.zeros(1))
        return Poly(npoly.polyder(self.coeffs))

    def __repr__(self):
        return f"Poly({np.array2string(self.coeffs, precision=6)})"


# ---------------------------------------------------------------------------
# Aberth-Ehrlich


def _horner_logderiv(c: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of rows of monic-or-not polynomials ``c`` (B, n+1)
    at ``z`` (B, k)."""
    p = np.repeat(c[:, -1:], z.shape[1], axis=1)
    dp = np.zeros_like(z)
    for j in range(c.shape[1] - 2, -1, -1):
        dp = dp * z + p
        p = p * z + c[:, j:j + 1]
    return p, dp


def aberth(logderiv, z0: np.ndarray, tol: float = ABERTH_TOL,
           maxiter: int = ABERTH_MAXITER) -> tuple[np.ndarray, bool]:
    """Simultaneous Aberth-Ehrlich iteration on a batch of polynomials.

    ``logderiv(z, rows)`` returns ``p'(z) / p(z)`` for the polynomials selected
    by the boolean mask ``rows``; ``z0`` holds one row of initial guesses per
    polynomial.  Returns the final iterates and whether every root converged.
    """
    z = np.array(z0, dtype=complex, copy=True)
    B, n = z.shape
    done = np.zeros((B, n), dtype=bool)
    eye = np.eye(n, dtype=bool)
    for _ in range(maxiter):
        rows = ~done.all(axis=1)
        if not rows.any():
            break
        zr = z[rows]
        with np.errstate(divide="ignore", invalid="ignore"):
            q = logderiv(zr, rows)
            diff = zr[:, :, None] - zr[:, None, :]
            diff[:, eye] = np.inf
            s = (1.0 / diff).sum(axis=2)
            w = 1.0 / (q - s)
        bad = ~np.isfinite(w)
        if bad.any():
            # exact root (q infinite) gives w = 0; degenerate denominators
            # get a small kick instead of a NaN
            w = np.where(np.isinf(q), 0.0, w)
            bad = ~np.isfinite(w)
            kick = 1e-8 * (1 + np.abs(zr)) * np.exp(1j * (0.3 + np.arange(n)))
            w[bad] = kick[bad]
        w[done[rows]] = 0.0
        zr = zr - w
        z[rows] = zr
        small = np.abs(w) <= tol * np.maximum(1.0, np.abs(zr))
        done[rows] |= small
    return z, bool(done.all())


def _initial_circle(c: np.ndarray) -> np.ndarray:
    """Starting points on a circle sized from the coefficient moduli."""
    n = c.shape[1] - 1
    lead = c[:, -1:]
    mc = np.abs(c[:, :-1] / lead)  # |c_k / c_n|, k < n
    k = np.arange(n)
    with np.errstate(divide="ignore"):
        # Fujiwara bound
        terms = mc ** (1.0 / (n - k))
    terms[:, 0] = (mc[:, 0] / 2.0) ** (1.0 / n)
    upper = 2.0 * terms.max(axis=1)
    geo = mc[:, 0] ** (1.0 / n)
    r = np.where(geo > 0, geo, 0.5 * upper)
    r = np.where(r > 0, r, 1.0)
    ang = 2 * np.pi * np.arange(n) / n + 0.7
    return r[:, None] * np.exp(1j * ang)[None, :]


def _cluster_mean(z: np.ndarray, tol: float = CLUSTER_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Replace each root by the mean of roots within ``tol`` (relative).

    Returns new roots and the per-root cluster size.
    """
    d = np.abs(z[..., :, None] - z[..., None, :])
    near = d <= tol * np.maximum(1.0, np.abs(z))[..., :, None]
    cnt = near.sum(axis=-1)
    mean = (near * z[..., None, :]).sum(axis=-1) / cnt
    return np.where(cnt > 1, mean, z), cnt


def _row_deriv(c: np.ndarray, k: int) -> np.ndarray:
    """k-th derivative of each ascending coefficient row."""
    n = c.shape[1] - 1
    j = np.arange(k, n + 1)
    fall = np.ones(j.size)
    for i in range(k):
        fall *= j - i
    return c[:, k:] * fall


def _polish_clusters(c: np.ndarray, z: np.ndarray, cnt: np.ndarray, steps: int = 3) -> np.ndarray:
    # a k-fold root is a simple root of the (k-1)-th derivative
    z = z.copy()
    for k in np.unique(cnt[cnt > 1]):
        rows = np.any(cnt == k, axis=1)
        ck = _row_deriv(c[rows], int(k) - 1)
        zr = z[rows]
        mask = cnt[rows] == k
        for _ in range(steps):
            p, dp = _horner_logderiv(ck, zr)
            with np.errstate(divide="ignore", invalid="ignore"):
                zn = zr - p / dp
            pn, _ = _horner_logderiv(ck, np.where(np.isfinite(zn), zn, zr))
            ok = mask & np.isfinite(zn) & (np.abs(pn) < np.abs(p))
            zr = np.where(ok, zn, zr)
        z[rows] = zr
    return z


def _solve_rows(c: np.ndarray) -> np.ndarray:
    """All roots of each row of ``c`` (ascending, nonzero leading coefficient)."""
    B, n1 = c.shape
    n = n1 - 1
    if n == 0:
        return np.zeros((B, 0), dtype=complex)
    c = c / c[:, -1:]
    if n == 1:
        return -c[:, :1]
    if n == 2:
        # quadratic formula, stable variant, then Aberth polish below
        b, a0 = c[:, 1], c[:, 0]
        disc = np.sqrt(b * b - 4 * a0)
        sgn = np.where(np.real(np.conj(b) * disc) >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(q != 0, a0 / q, 0.0)
        z0 = np.stack([q, r2], axis=1)
    else:
        z0 = _initial_circle(c)

    def logd(zr, rows):
        p, dp = _horner_logderiv(c[rows], zr)
        return dp / p

    z, _ = aberth(logd, z0)
    z, cnt = _cluster_mean(z)
    z = _polish_clusters(c, z, cnt)
    # one Newton step for simple roots, kept only where it helps
    p, dp = _horner_logderiv(c, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        zn = z - p / dp
    pn, _ = _horner_logderiv(c, np.where(np.isfinite(zn), zn, z))
    better = np.isfinite(zn) & (np.abs(pn) < np.abs(p)) & (cnt == 1)
    return np.where(better, zn, z)


def find_roots(P) -> np.ndarray:
    """All ``deg P`` roots of a polynomial, with multiplicity.

    Clustered roots (within ``1e-7`` relative) are reported as repeated copies
    of the cluster mean.  Raises :class:`RootFindingError` when a residual
    exceeds ``1e-10 * max|coeff| * max(1, |root|)^deg``.
    """
    c = P.coeffs if isinstance(P, Poly) else trim(P)
    deg = c.size - 1
    if deg < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    # exact zero roots are split off; they spoil the circle radius
    nz = 0
    while nz < deg and c[nz] == 0:
        nz += 1
    roots = np.zeros(nz, dtype=complex)
    if nz < deg:
        r = _solve_rows(c[nz:][None, :])[0]
        roots = np.concatenate([roots, r])
    res = np.abs(npoly.polyval(roots, c))
    scale = np.max(np.abs(c)) * np.maximum(1.0, np.abs(roots)) ** deg
    if np.any(res > 1e-10 * scale):
        raise RootFindingError(
            f"root finder did not converge (max scaled residual "
            f"{np.max(res / scale):.3g})", residuals=res)
    return roots


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group a root multiset into ``(root, multiplicity)`` pairs."""
    out: list[list] = []
    for r in np.asarray(roots, dtype=complex):
        for item in out:
            if abs(item[0] - r) <= tol * max(1.0, abs(r)):
                item[1] += 1
                break
        else:
            out.append([complex(r), 1])
    return [(r, m) for r, m in out]


# ---------------------------------------------------------------------------
# homogeneous evaluation


def hom_eval(c: np.ndarray, z: np.ndarray, t: np.ndarray, deriv: bool = False):
    """Evaluate ``sum_k c_k z^k t^(d-k)`` with ``d = len(c) - 1``.

    Horner runs in whichever affine chart has modulus at most one.  With
    ``deriv=True`` also returns the partials in ``z`` and ``t``.
    """
    c = np.asarray(c, dtype=complex)
    d = c.size - 1
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=complex)
    use_t = np.abs(z) <= np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(use_t, z / np.where(use_t, t, 1.0), t / np.where(use_t, 1.0, z))
    s = np.where(use_t, t, z)
    # in the z-chart the coefficients run backwards
    p = np.where(use_t, c[d], c[0]) + 0j * x
    dp = np.zeros_like(x)
    for k in range(d - 1, -1, -1):
        if deriv:
            dp = dp * x + p
        p = p * x + np.where(use_t, c[k], c[d - k])
    if not deriv:
        return p * s ** d
    sd1 = s ** (d - 1) if d >= 1 else np.ones_like(s)
    val = p * s ** d
    d_same = sd1 * dp                  # partial in the chart variable
    d_other = sd1 * (d * p - x * dp)   # partial in the scaling variable
    dz = np.where(use_t, d_same, d_other)
    dt = np.where(use_t, d_other, d_same)
    return val, dz, dt


@dataclass(frozen=True, eq=False)
class RationalMap:
    """``R = P / Q`` with ``P, Q`` coprime (a user contract)."""

    num: Poly
    den: Poly
    degree: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.num, Poly):
            object.__setattr__(self, "num", Poly(self.num))
        if not isinstance(self.den, Poly):
            object.__setattr__(self, "den", Poly(self.den))
        if self.den.is_zero:
            raise ValueError("zero denominator")
        if self.num.is_zero:
            raise ValueError("zero numerator gives a constant map")
        d = max(self.num.degree, self.den.degree)
        if d < 1:
            raise ValueError("rational map must have degree >= 1")
        object.__setattr__(self, "degree", d)
        ph = np.zeros(d + 1, dtype=complex)
        qh = np.zeros(d + 1, dtype=complex)
        ph[: self.num.coeffs.size] = self.num.coeffs
        qh[: self.den.coeffs.size] = self.den.coeffs
        ph.setflags(write=False)
        qh.setflags(write=False)
        object.__setattr__(self, "_ph", ph)
        object.__setattr__(self, "_qh", qh)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalMap":
        return cls(Poly(coeffs), Poly([1.0]))

    @property
    def hom(self) -> tuple[np.ndarray, np.ndarray]:
        return self._ph, self._qh

    def to_json(self) -> dict:
        return {"num": [[c.real, c.imag] for c in self.num.coeffs],
                "den": [[c.real, c.imag] for c in self.den.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "RationalMap":
        def coeffs(lst):
            out = []
            for c in lst:
                out.append(complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c))
            return out
        return cls(Poly(coeffs(obj["num"])), Poly(coeffs(obj.get("den", [[1.0, 0.0]]))))

    def __call__(self, z: complex) -> complex:
        return evaluate(self, sphere.from_complex(z)).to_complex()

    def __repr__(self):
        return f"RationalMap(num={self.num!r}, den={self.den!r})"


def shared_roots(R: RationalMap, tol: float = COPRIME_TOL) -> list[complex]:
    """Heuristic coprimality check: numerator roots that are also denominator roots."""
    if R.num.degree < 1 or R.den.degree < 1:
        return []
    rp = find_roots(R.num)
    rq = find_roots(R.den)
    return [complex(a) for a in rp
            if np.min(np.abs(rq - a)) <= tol * max(1.0, abs(a))]


def evaluate_pairs(R: RationalMap, h: np.ndarray, check: bool = False) -> np.ndarray:
    """Apply ``R`` to an array of normalized pairs; returns normalized pairs."""
    h = np.asarray(h, dtype=complex)
    ph, qh = R.hom
    a = hom_eval(ph, h[..., 0], h[..., 1])
    b = hom_eval(qh, h[..., 0], h[..., 1])
    out = np.stack([a, b], axis=-1)
    n = np.sqrt(np.abs(a) ** 2 + np.abs(b) ** 2)
    if check:
        scale = max(np.max(np.abs(ph)), np.max(np.abs(qh)))
        if np.any(n <= 1e-14 * scale):
            raise NonCoprimeError("P and Q vanish together: input pair is not coprime")
    return out / n[..., None]


def evaluate(R: RationalMap, p: SpherePoint) -> SpherePoint:
    """``R(p)`` on the sphere; poles go to infinity."""
    out = evaluate_pairs(R, np.array([p.a, p.b]), check=True)
    return SpherePoint.from_pair(out[0], out[1])


def derivative_value(R: RationalMap, p) -> complex:
    """Affine derivative ``(P'Q - PQ') / Q^2`` at a finite non-pole point."""
    z = p.to_complex() if isinstance(p, SpherePoint) else complex(p)
    if not math.isfinite(abs(z)):
        raise ValueError("derivative_value needs a finite point; use the 1/z chart")
    q = R.den(z)
    if q == 0:
        raise ValueError(f"{z!r} is a pole")
    P, Q = R.num, R.den
    return complex((P.deriv()(z) * q - P(z) * Q.deriv()(z)) / (q * q))


def chart_derivative_modulus(R: RationalMap, h: np.ndarray) -> np.ndarray:
    """``|R'|`` between the charts ``z`` (when ``|z| <= 1``) and ``1/z`` (otherwise).

    Source chart follows the input point and target chart follows the image,
    so products along an orbit telescope to the derivative of the composition.
    """
    h = np.asarray(h, dtype=complex)
    m = np.maximum(np.abs(h[..., 0]), np.abs(h[..., 1]))
    rep = h / m[..., None]
    ph, qh = R.hom
    P, Pz, Pt = hom_eval(ph, rep[..., 0], rep[..., 1], deriv=True)
    Q, Qz, Qt = hom_eval(qh, rep[..., 0], rep[..., 1], deriv=True)
    jac = Pz * Qt - Pt * Qz
    big = np.maximum(np.abs(P), np.abs(Q))
    return np.abs(jac) / (R.degree * big ** 2)


# ---------------------------------------------------------------------------
# preimages

# Candidate images of infinity for the change of coordinates.  The first is
# the identity; a form of degree d vanishes at no more than d of them.
_CANDIDATES = sphere.normalize(np.array(
    [[1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j],
     [0.6 + 0.3j, 1], [1, 0.55 - 0.35j], [-0.4 + 0.8j, 1], [1, -0.7 - 0.45j],
     [0.15 - 0.9j, 1], [1, 0.25 + 0.95j]], dtype=complex))


@functools.lru_cache(maxsize=64)
def _rotation_tables(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each candidate ``c`` (as unitary ``G``): the matrix taking the
    coefficients of a degree-``d`` form ``H`` to those of ``u -> H(G(u, 1))``,
    plus the lead-evaluation vectors and ``G`` itself."""
    G = sphere.unitary_to(_CANDIDATES)
    K = G.shape[0]
    T = np.zeros((K, d + 1, d + 1), dtype=complex)
    V = np.zeros((K, d + 1), dtype=complex)
    for k in range(K):
        (al, mb), (be, ac) = G[k]
        zlin = np.array([mb, al])   # z = al*u - conj(be)
        tlin = np.array([ac, be])   # t = be*u + conj(al)
        for j in range(d + 1):
            c = npoly.polymul(npoly.polypow(zlin, j), npoly.polypow(tlin, d - j))
            T[k, j, : c.size] = c
            V[k, j] = al ** j * be ** (d - j)
    return T, V, G


def solve_forms(h: np.ndarray) -> np.ndarray:
    """Zeros on the sphere of binary forms given by ascending coefficient rows.

    ``h`` has shape ``(M, d+1)``; the result is ``(M, d, 2)`` normalized pairs,
    multiplicity included (a form with vanishing top coefficient has zeros at
    infinity).
    """
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    M, d1 = h.shape
    d = d1 - 1
    if d == 0:
        return np.zeros((M, 0, 2), dtype=complex)
    T, V, G = _rotation_tables(d)
    norms = np.max(np.abs(h), axis=1)
    if np.any(norms == 0):
        raise NonCoprimeError("form vanishes identically")
    lead = np.abs(h @ V.T) / norms[:, None]        # (M, K)
    choice = np.argmax(lead, axis=1)
    rot = np.einsum("mj,mjk->mk", h / norms[:, None], T[choice])
    u = _solve_rows(rot)                            # (M, d)
    g = G[choice]                                   # (M, 2, 2)
    zz = g[:, None, 0, 0] * u + g[:, None, 0, 1]
    tt = g[:, None, 1, 0] * u + g[:, None, 1, 1]
    return sphere.normalize(np.stack([zz, tt], axis=-1))


def preimage_pairs(R: RationalMap, targets: np.ndarray) -> np.ndarray:
    """All ``deg R`` preimages of each target pair: shape ``(M, deg R, 2)``."""
    targets = np.atleast_2d(np.asarray(targets, dtype=complex))
    ph, qh = R.hom
    h = targets[:, 1:2] * ph[None, :] - targets[:, 0:1] * qh[None, :]
    return solve_forms(h)


def preimages(R: RationalMap, q: SpherePoint) -> list[SpherePoint]:
    """The fibre ``R^{-1}(q)`` with multiplicity (``deg R`` points)."""
    out = preimage_pairs(R, np.array([[q.a, q.b]]))[0]
    return sphere.to_points(out)


# ---------------------------------------------------------------------------
# critical points and composition


def critical_points(R: RationalMap) -> list[SpherePoint]:
    """Distinct critical points of ``R`` on the sphere.

    Finite ones are the zeros of ``P'Q - PQ'``; infinity is critical when that
    polynomial has degree below ``2 deg R - 2``.
    """
    P, Q = R.num.coeffs, R.den.coeffs
    dP = npoly.polyder(P) if P.size > 1 else np.zeros(1)
    dQ = npoly.polyder(Q) if Q.size > 1 else np.zeros(1)
    W = npoly.polysub(npoly.polymul(dP, Q), npoly.polymul(P, dQ))
    W = trim(W, rtol=1e-14)
    degW = 0 if (W.size == 1) else W.size - 1
    if W.size == 1 and W[0] == 0:
        raise ValueError("constant map")
    pts: list[SpherePoint] = []
    if degW >= 1:
        for r, _ in cluster_roots(find_roots(W)):
            pts.append(sphere.from_complex(r))
    if degW < 2 * R.degree - 2:
        pts.append(SpherePoint.infinity())
    return pts


def critical_multiset_size(R: RationalMap) -> int:
    """Number of critical points with multiplicity; always ``2 deg R - 2``."""
    return 2 * R.degree - 2


def compose(R: RationalMap, S: RationalMap) -> RationalMap:
    """``R o S`` with coefficients rescaled to maximum modulus one."""
    d = R.degree * S.degree
    if d > MAX_COMPOSED_DEGREE:
        raise DegreeCapError(f"composed degree {d} exceeds {MAX_COMPOSED_DEGREE}")
    s1, s2 = S.hom
    sc = max(np.max(np.abs(s1)), np.max(np.abs(s2)))
    s1, s2 = s1 / sc, s2 / sc
    rp, rq = R.hom
    dr = R.degree
    pow1 = [np.ones(1, dtype=complex)]
    pow2 = [np.ones(1, dtype=complex)]
    for _ in range(dr):
        pow1.append(npoly.polymul(pow1[-1], s1))
        pow2.append(npoly.polymul(pow2[-1], s2))
    num = np.zeros(d + 1, dtype=complex)
    den = np.zeros(d + 1, dtype=complex)
    for k in range(dr + 1):
        term = npoly.polymul(pow1[k], pow2[dr - k])
        num[: term.size] += rp[k] * term
        den[: term.size] += rq[k] * term
    if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
        raise OverflowError("coefficient overflow in composition")
    sc = max(np.max(np.abs(num)), np.max(np.abs(den)))
    num, den = num / sc, den / sc
    # numerically zero top coefficients would inflate the degree bookkeeping
    return RationalMap(Poly(trim(num, 1e-15)), Poly(trim(den, 1e-15)))


@dataclass(frozen=True, eq=False)
class MapFamily:
    """The generators ``R_1, ..., R_N`` (letters are 1-based)."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        object.__setattr__(self, "maps", maps)
        if not maps:
            raise ValueError("a family needs at least one map")
        if max(R.degree for R in maps) < 2:
            raise ValueError("at least one map must have degree >= 2")

    @property
    def N(self) -> int:
        return len(self.maps)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(R.degree for R in self.maps)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    def __getitem__(self, letter: int) -> RationalMap:
        """Map for a 1-based letter."""
        return self.maps[letter - 1]

    def __len__(self):
        return len(self.maps)

    @classmethod
    def polynomials(cls, *coeff_lists) -> "MapFamily":
        return cls(tuple(RationalMap.polynomial(c) for c in coeff_lists))

    @classmethod
    def from_json(cls, obj, check: bool = True) -> "MapFamily":
        fam = cls(tuple(RationalMap.from_json(m) for m in obj))
        if check:
            for i, R in enumerate(fam.maps, start=1):
                if shared_roots(R):
                    warnings.warn(f"map {i}: numerator and denominator appear "
                                  f"to share a root", RuntimeWarning, stacklevel=2)
        return fam

    def to_json(self) -> list:
        return [R.to_json() for R in self.maps]
