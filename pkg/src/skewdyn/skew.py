"""The skew product ``T(w, z) = (shift w, R_{w_1}(z))`` on words x sphere.

Scalar entry points take and return :class:`PointX`.  Everything that scales
(preimage trees, periodic points, ergodic sums over many points) works on
numpy arrays: ``letters`` arrays of shape ``(M, L)`` holding the leading
letters of each word, and ``(M, 2)`` complex arrays of homogeneous pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import sphere
from .rational import (MapFamily, chart_derivative_modulus, critical_points, evaluate,
                       evaluate_pairs, hom_eval, preimage_pairs, MAX_COMPOSED_DEGREE,
                       DegreeCapError, _cluster_mean, _CANDIDATES, aberth)
from .sphere import SpherePoint
from .symbolic import Word, WordBatch, shift, word_distance

DEFAULT_BUDGET = 1 << 22
DEFAULT_BURN_IN = 50


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its node budget."""


@dataclass(frozen=True)
class PointX:
    word: Word
    z: SpherePoint

    def __str__(self):
        return f"({self.word}, {sphere.complex_to_str(self.z.to_complex())})"


@dataclass(frozen=True, eq=False)
class PointBatch:
    """Many points of X: a :class:`WordBatch` plus ``(M, 2)`` pairs."""

    words: WordBatch
    z: np.ndarray

    def __len__(self):
        return len(self.words)

    @classmethod
    def from_points(cls, pts: Sequence[PointX]) -> "PointBatch":
        return cls(WordBatch.from_words([p.word for p in pts]),
                   sphere.to_pairs([p.z for p in pts]))

    def point(self, i: int) -> PointX:
        a, b = self.z[i]
        return PointX(self.words.word(i), SpherePoint.from_pair(a, b))

    def points(self) -> list[PointX]:
        return [self.point(i) for i in range(len(self))]

    def take(self, idx) -> "PointBatch":
        return PointBatch(self.words.take(idx), self.z[np.asarray(idx)])

    @staticmethod
    def concat(batches: Sequence["PointBatch"]) -> "PointBatch":
        return PointBatch(WordBatch.concat([b.words for b in batches]),
                          np.concatenate([b.z for b in batches]))


def evaluate_function(f, lead: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate a potential or test function on leading letters and pairs.

    ``f`` either has an ``evaluate(lead, z)`` method or is a plain callable on
    :class:`PointX`; the latter is slow and only meant for ad-hoc use.
    """
    if hasattr(f, "evaluate"):
        return np.asarray(f.evaluate(lead, z), dtype=float)
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        w = Word(tuple(int(v) for v in lead[i]), (1,))
        out[i] = f(PointX(w, SpherePoint.from_pair(*z[i])))
    return out


def cylinder_depth(f) -> int:
    return int(getattr(f, "depth", 0))


# ---------------------------------------------------------------------------
# forward dynamics


def apply_T(fam: MapFamily, p: PointX) -> PointX:
    v = p.word.letter(0)
    return PointX(shift(p.word), evaluate(fam[v], p.z))


def iterate_T(fam: MapFamily, p: PointX, n: int) -> PointX:
    for _ in range(n):
        p = apply_T(fam, p)
    return p


def point_distance(p: PointX, q: PointX) -> float:
    return max(word_distance(p.word, q.word), sphere.spherical_distance(p.z, q.z))


def step_pairs(fam: MapFamily, letters: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply ``R_{letters[i]}`` to ``z[i]`` for every row."""
    out = np.empty_like(z)
    for v in np.unique(letters):
        m = letters == v
        out[m] = evaluate_pairs(fam[int(v)], z[m])
    return out


def step_derivative(fam: MapFamily, letters: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape[0])
    for v in np.unique(letters):
        m = letters == v
        out[m] = chart_derivative_modulus(fam[int(v)], z[m])
    return out


def orbit_sums(fam: MapFamily, funcs: Sequence, lead: np.ndarray, z: np.ndarray,
               n: int, derivative: bool = False):
    """Ergodic sums ``sum_{k<n} f(T^k p)`` for each function in ``funcs``.

    ``lead`` must carry at least ``n + max depth`` leading letters.  Returns
    ``(sums (F, M), T^n z, |(T^n)'|)``; the last entry is ``None`` unless
    ``derivative`` is set.
    """
    depths = [cylinder_depth(f) for f in funcs]
    need = n + max(depths, default=0)
    if lead.shape[1] < need:
        raise ValueError(f"need {need} leading letters, got {lead.shape[1]}")
    sums = np.zeros((len(funcs), z.shape[0]))
    dmod = np.ones(z.shape[0]) if derivative else None
    for k in range(n):
        for i, f in enumerate(funcs):
            sums[i] += evaluate_function(f, lead[:, k:k + max(depths[i], 1)], z)
        if derivative:
            dmod = dmod * step_derivative(fam, lead[:, k], z)
        z = step_pairs(fam, lead[:, k], z)
    return sums, z, dmod


def ergodic_sum(fam: MapFamily, f, p: PointX, n: int) -> float:
    """``f(p) + f(Tp) + ... + f(T^{n-1} p)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lead = np.array([p.word.head(n + cylinder_depth(f))], dtype=np.int8)
    sums, _, _ = orbit_sums(fam, [f], lead, p.z.pair()[None, :], n)
    return float(sums[0, 0])


def derivative_Tm(fam: MapFamily, p: PointX, m: int) -> float:
    """``|(T^m)'(p)|`` using the ``z`` / ``1/z`` chart convention.

    Each orbit point is read in the chart ``z`` when ``|z| <= 1`` and ``1/z``
    otherwise, so at periodic points the value is the multiplier modulus.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lead = np.array([p.word.head(m)], dtype=np.int8)
    _, _, d = orbit_sums(fam, [], lead, p.z.pair()[None, :], m, derivative=True)
    return float(d[0])


# ---------------------------------------------------------------------------
# preimage trees


@dataclass(frozen=True, eq=False)
class TreeLevel:
    z: np.ndarray        # (M_k, 2)
    letter: np.ndarray   # (M_k,) letter prepended at this level
    parent: np.ndarray   # (M_k,) index into the previous level


@dataclass(frozen=True, eq=False)
class PreimageTree:
    """Backward tree of depth ``n`` over ``base``.

    Level ``k`` holds points ``q`` with ``T^k q = base``; node labels are the
    letter paths ``(v_k, ..., v_1)``.  A sampled tree has ``sampled=True``
    and one independent backward path per leaf.
    """

    family: MapFamily
    base: PointX
    levels: tuple[TreeLevel, ...]
    sampled: bool = False
    seed: int | None = None

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def leaf_count(self) -> int:
        return int(self.levels[-1].z.shape[0])

    def letter_paths(self, k: int | None = None) -> np.ndarray:
        """Letters ``(v_k, ..., v_1)`` for every node at level ``k``."""
        k = self.depth if k is None else k
        M = self.levels[k].z.shape[0]
        out = np.zeros((M, k), dtype=np.int8)
        idx = np.arange(M)
        for j in range(k):
            lvl = self.levels[k - j]
            out[:, j] = lvl.letter[idx]
            idx = lvl.parent[idx]
        return out

    def lead(self, k: int, s: int) -> np.ndarray:
        """First ``s`` letters of the words of level-``k`` nodes."""
        paths = self.letter_paths(k)
        if s <= k:
            return paths[:, :s]
        tail = np.array(self.base.word.head(s - k), dtype=np.int8)
        return np.concatenate([paths, np.broadcast_to(tail, (paths.shape[0], s - k))], axis=1)

    def level_batch(self, k: int | None = None) -> PointBatch:
        k = self.depth if k is None else k
        return PointBatch(WordBatch.uniform(self.letter_paths(k), self.base.word),
                          self.levels[k].z)

    def leaves(self) -> PointBatch:
        return self.level_batch(self.depth)

    def to_csv(self) -> str:
        """Every node with its depth: ``depth, word, re, im`` (base at depth 0)."""
        lines = ["depth,word,re,im"]
        for k in range(self.depth + 1):
            batch = self.level_batch(k)
            zc = sphere.pairs_to_complex(batch.z)
            for w, z, h in zip(batch.words.strings(), zc, batch.z):
                if h[1] == 0:
                    lines.append(f"{k},{w},inf,inf")
                else:
                    lines.append(f"{k},{w},{float(z.real)!r},{float(z.imag)!r}")
        return "\n".join(lines) + "\n"

    def iter_path_sums(self, funcs: Sequence):
        """Yield ``(k, sums)`` for ``k = 1..depth``, where ``sums[i, j]`` adds
        ``funcs[i]`` over node ``j`` of level ``k`` and its ancestors at levels
        ``k-1, ..., 1`` (the base is excluded).

        For a level-``k`` node ``q`` this is the ergodic sum ``f^k(q)``.
        """
        depth_needed = max([cylinder_depth(f) for f in funcs] + [1])
        acc = np.zeros((len(funcs), 1))
        for j in range(1, self.depth + 1):
            lvl = self.levels[j]
            lead = self.lead(j, depth_needed)
            vals = np.zeros((len(funcs), lvl.z.shape[0]))
            for i, f in enumerate(funcs):
                vals[i] = evaluate_function(f, lead[:, : max(cylinder_depth(f), 1)], lvl.z)
            acc = acc[:, lvl.parent] + vals
            yield j, acc

    def path_sums(self, funcs: Sequence, k: int | None = None) -> np.ndarray:
        k = self.depth if k is None else k
        if k == 0:
            return np.zeros((len(funcs), 1))
        for j, acc in self.iter_path_sums(funcs):
            if j == k:
                return acc
        raise ValueError(f"level {k} beyond depth {self.depth}")


def _root_order(fam: MapFamily) -> tuple[np.ndarray, np.ndarray]:
    letters = np.concatenate([np.full(d, v, dtype=np.int8)
                              for v, d in enumerate(fam.degrees, start=1)])
    return letters, np.cumsum((0,) + fam.degrees)


def expand_level(fam: MapFamily, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All first-order preimages of each point in ``z``.

    Children are ordered by parent, then letter, then root; returns
    ``(child pairs, letters, parent index)``.
    """
    M = z.shape[0]
    D = fam.total_degree
    out = np.empty((M, D, 2), dtype=complex)
    letters, offs = _root_order(fam)
    for v, R in enumerate(fam.maps, start=1):
        out[:, offs[v - 1]:offs[v]] = preimage_pairs(R, z)
    return (out.reshape(M * D, 2), np.tile(letters, M),
            np.repeat(np.arange(M), D))


def enumerate_preimages(fam: MapFamily, base: PointX, n: int,
                        budget: int = DEFAULT_BUDGET) -> PreimageTree:
    """Exhaustive depth-``n`` preimage tree, ``(sum d_i)^n`` leaves."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if fam.total_degree ** n > budget:
        raise BudgetExceeded(
            f"{fam.total_degree}^{n} leaves exceed the budget {budget}; "
            f"use sampled mode")
    levels = [TreeLevel(base.z.pair()[None, :], np.zeros(1, np.int8), np.zeros(1, np.int64))]
    for _ in range(n):
        z, letters, parent = expand_level(fam, levels[-1].z)
        levels.append(TreeLevel(z, letters, parent))
    return PreimageTree(fam, base, tuple(levels))


def _step_rng(seed: int, step: int) -> np.random.Generator:
    # one stream per (seed, step); path i always reads draw i of the stream
    return np.random.default_rng([int(seed), int(step)])


def sample_paths(fam: MapFamily, base: PointX, n: int, paths: int, seed: int) -> PreimageTree:
    """``paths`` independent backward paths of length ``n``.

    Each step picks letter ``v`` with probability ``d_v / sum d`` and then one
    of the ``d_v`` roots uniformly, i.e. every depth-``n`` leaf is equally
    likely.
    """
    D = fam.total_degree
    cdf = np.cumsum(fam.degrees) / D
    z = np.repeat(base.z.pair()[None, :], paths, axis=0)
    levels = [TreeLevel(base.z.pair()[None, :], np.zeros(1, np.int8), np.zeros(1, np.int64))]
    for k in range(1, n + 1):
        # row i of the draw belongs to path i whatever the number of paths
        draw = _step_rng(seed, k).random((paths, 2))
        letters = (np.searchsorted(cdf, draw[:, 0], side="right") + 1).astype(np.int8)
        letters = np.minimum(letters, fam.N)
        u = draw[:, 1]
        new = np.empty_like(z)
        for v in range(1, fam.N + 1):
            m = letters == v
            if not m.any():
                continue
            roots = preimage_pairs(fam[v], z[m])
            j = np.minimum((u[m] * fam[v].degree).astype(int), fam[v].degree - 1)
            new[m] = roots[np.arange(roots.shape[0]), j]
        z = new
        parent = np.zeros(paths, np.int64) if k == 1 else np.arange(paths)
        levels.append(TreeLevel(z, letters, parent))
    return PreimageTree(fam, base, tuple(levels), sampled=True, seed=seed)


def sample_inverse_orbit(fam: MapFamily, base: PointX, n: int, seed: int) -> list[PointX]:
    """One random backward path ``q_1, ..., q_n`` with ``T q_{k} = q_{k-1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tree = sample_paths(fam, base, n, 1, seed)
    return [tree.level_batch(k).point(0) for k in range(1, n + 1)]


def julia_cloud(fam: MapFamily, base: PointX, burn_in: int, count: int, seed: int) -> PointBatch:
    """Backward orbit of length ``burn_in + count``, last ``count`` points."""
    if count < 0 or burn_in < 0:
        raise ValueError("burn_in and count must be nonnegative")
    total = burn_in + count
    if count == 0:
        return PointBatch(WordBatch.from_words([]), np.zeros((0, 2), dtype=complex))
    tree = sample_paths(fam, base, total, 1, seed)
    letters = np.array([tree.levels[k].letter[0] for k in range(1, total + 1)], dtype=np.int8)
    z = np.array([tree.levels[k].z[0] for k in range(burn_in + 1, total + 1)])
    heads = np.zeros((count, total), dtype=np.int8)
    lengths = np.arange(burn_in + 1, total + 1)
    for i, k in enumerate(lengths):
        heads[i, :k] = letters[:k][::-1]
    words = WordBatch(heads, lengths, (base.word,), np.zeros(count, dtype=np.int64))
    return PointBatch(words, z)


def julia_sample(fam: MapFamily, base: PointX, burn_in: int = DEFAULT_BURN_IN,
                 count: int = 1000, seed: int = 0) -> list[PointX]:
    return julia_cloud(fam, base, burn_in, count, seed).points()


# ---------------------------------------------------------------------------
# critical data and regions


def _dedup_pairs(h: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    keep: list[np.ndarray] = []
    for p in h:
        if not keep or np.min(sphere.chordal(np.array(keep), p)) >= tol:
            keep.append(p)
    return np.array(keep, dtype=complex).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class CriticalData:
    """Critical points per map and critical values of orders ``1..n``."""

    points: tuple[tuple[SpherePoint, ...], ...]
    values_by_order: tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.values_by_order)

    def values(self, upto: int | None = None) -> np.ndarray:
        upto = self.order if upto is None else upto
        if upto == 0:
            return np.zeros((0, 2), dtype=complex)
        return _dedup_pairs(np.concatenate(self.values_by_order[:upto]))

    def value_points(self, upto: int | None = None) -> list[SpherePoint]:
        return sphere.to_points(self.values(upto))

    def tau(self, region: "RegionU") -> int:
        """Distinct order-1 critical values inside ``region``."""
        v = self.values(1)
        return int(np.count_nonzero(region.contains(v))) if len(v) else 0


def critical_values_up_to(fam: MapFamily, n: int) -> CriticalData:
    """Forward images of critical points along every letter path of length <= n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    crit = tuple(tuple(critical_points(R)) for R in fam.maps)
    first = [evaluate_pairs(R, sphere.to_pairs(c)) for R, c in zip(fam.maps, crit) if c]
    cur = _dedup_pairs(np.concatenate(first)) if first else np.zeros((0, 2), dtype=complex)
    orders = [cur]
    for _ in range(1, n):
        if len(cur) == 0:
            orders.append(cur)
            continue
        cur = _dedup_pairs(np.concatenate([evaluate_pairs(R, cur) for R in fam.maps]))
        orders.append(cur)
    return CriticalData(crit, tuple(orders))


@dataclass(frozen=True)
class RegionU:
    """Chordal disk on the sphere (times the whole word space)."""

    center: SpherePoint
    radius: float

    def __post_init__(self):
        if not 0 < self.radius < 2:
            raise ValueError("radius must lie in (0, 2)")

    def contains(self, h: np.ndarray) -> np.ndarray:
        return sphere.chordal(np.asarray(h), self.center.pair()) < self.radius

    def boundary(self, K: int) -> np.ndarray:
        """``K`` equally spaced boundary points, counterclockwise around the center."""
        r = self.radius
        rho = r / math.sqrt(4.0 - r * r)     # chordal radius -> modulus at 0
        th = 2 * np.pi * np.arange(K) / K
        # disk around infinity in the u-plane, carried to the center by a
        # unitary map (a chordal isometry)
        u = np.stack([np.ones(K, dtype=complex), rho * np.exp(-1j * th)], axis=1)
        g = sphere.unitary_to(self.center.pair())
        return sphere.normalize(u @ g.T)


def near_critical_values(fam: MapFamily, p: SpherePoint, order: int = 5,
                         tol: float = 1e-6) -> bool:
    vals = critical_values_up_to(fam, order).values()
    return bool(len(vals) and np.min(sphere.chordal(vals, p.pair())) < tol)


# ---------------------------------------------------------------------------
# periodic points


def cycle_words(N: int, m: int) -> np.ndarray:
    """All ``N^m`` letter cycles of length ``m``, lexicographic, shape ``(N^m, m)``."""
    grids = np.indices((N,) * m).reshape(m, -1).T
    return (grids + 1).astype(np.int8)


def _fixed_form_eval(fam: MapFamily, cycles: np.ndarray, z, t, dz=None, dt=None):
    """Evaluate ``H = A t - B z`` where ``(A, B)`` is the homogeneous
    composition along each cycle, at pairs ``(z, t)`` of shape ``(B, n)``.

    Returns ``(log|H|, H'/H)``; the second is ``None`` without ``dz, dt``.
    Intermediate pairs are rescaled every step, the log scale is tracked.
    """
    A, Bv = z.copy(), t.copy()
    deriv = dz is not None
    if deriv:
        Ad = np.broadcast_to(dz, z.shape).copy()
        Bd = np.broadcast_to(dt, z.shape).copy()
    logscale = np.zeros(z.shape)
    for s in range(cycles.shape[1]):
        letters = cycles[:, s]
        for v in np.unique(letters):
            rows = letters == v
            R = fam[int(v)]
            ph, qh = R.hom
            a, b = A[rows], Bv[rows]
            if deriv:
                P, Pz, Pt = hom_eval(ph, a, b, deriv=True)
                Q, Qz, Qt = hom_eval(qh, a, b, deriv=True)
                ad, bd = Ad[rows], Bd[rows]
                Ad[rows] = Pz * ad + Pt * bd
                Bd[rows] = Qz * ad + Qt * bd
            else:
                P = hom_eval(ph, a, b)
                Q = hom_eval(qh, a, b)
            A[rows], Bv[rows] = P, Q
            logscale[rows] *= R.degree
        sc = np.maximum(np.abs(A), np.abs(Bv))
        sc = np.where(sc > 0, sc, 1.0)
        A /= sc
        Bv /= sc
        if deriv:
            Ad /= sc
            Bd /= sc
        logscale += np.log(sc)
    H = A * t - Bv * z
    with np.errstate(divide="ignore"):
        logabs = logscale + np.log(np.abs(H))
    if not deriv:
        return logabs, None
    dH = Ad * t + A * dt - Bd * z - Bv * dz
    with np.errstate(divide="ignore", invalid="ignore"):
        return logabs, dH / H


def _solve_cycle_chunk(fam: MapFamily, cycles: np.ndarray, D: int) -> np.ndarray:
    """Fixed points of the compositions for a chunk of cycles of equal degree."""
    Bn = cycles.shape[0]
    n = D + 1
    G = sphere.unitary_to(_CANDIDATES)                       # (K, 2, 2)
    K = G.shape[0]
    cz = np.broadcast_to(_CANDIDATES[:, 0], (Bn, K)).copy()
    ct = np.broadcast_to(_CANDIDATES[:, 1], (Bn, K)).copy()
    lead, _ = _fixed_form_eval(fam, cycles, cz, ct)
    g = G[np.argmax(lead, axis=1)]                           # (Bn, 2, 2)
    g00, g01 = g[:, 0, 0][:, None], g[:, 0, 1][:, None]
    g10, g11 = g[:, 1, 0][:, None], g[:, 1, 1][:, None]

    def rot(u, rows):
        return (g00[rows] * u + g01[rows], g10[rows] * u + g11[rows],
                g00[rows], g10[rows])

    def logd(u, rows):
        z, t, dz, dt = rot(u, rows)
        return _fixed_form_eval(fam, cycles[rows], z, t, dz, dt)[1]

    ang = 2 * np.pi * np.arange(n) / n + 0.4
    u0 = np.broadcast_to(np.exp(1j * ang), (Bn, n))
    u, _ = aberth(logd, u0)
    u, cnt = _cluster_mean(u)
    allrows = np.ones(Bn, dtype=bool)
    z, t, dz, dt = rot(u, allrows)
    la, q = _fixed_form_eval(fam, cycles, z, t, dz, dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        un = u - 1.0 / q
    ok = np.isfinite(un) & (cnt == 1)
    zn, tn, _, _ = rot(np.where(ok, un, u), allrows)
    la_new, _ = _fixed_form_eval(fam, cycles, zn, tn)
    u = np.where(ok & (la_new < la), un, u)
    z, t, _, _ = rot(u, allrows)
    return sphere.normalize(np.stack([z, t], axis=-1))


def periodic_points(fam: MapFamily, m: int, cycles: np.ndarray | None = None,
                    max_degree: int = MAX_COMPOSED_DEGREE) -> PointBatch:
    """Every point of ``Fix_m(T)`` with multiplicity.

    For each letter cycle ``(t_1..t_m)`` the fixed points of
    ``R_{t_m} o ... o R_{t_1}`` on the sphere are found (``prod d + 1`` of
    them) and paired with the purely periodic word.  The composition is never
    expanded into coefficients: the fixed-point form is evaluated through the
    orbit, which stays well conditioned at high degree.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if cycles is None:
        cycles = cycle_words(fam.N, m)
    cycles = np.atleast_2d(np.asarray(cycles, dtype=np.int8))
    degs = np.array(fam.degrees)[cycles - 1].prod(axis=1)
    if degs.max() > max_degree:
        raise DegreeCapError(f"composed degree {degs.max()} exceeds {max_degree}")
    words_out: list[Word] = []
    z_out: list[np.ndarray] = []
    order = []
    for D in np.unique(degs):
        idx = np.flatnonzero(degs == D)
        n = int(D) + 1
        chunk = max(1, int(4_000_000 // (n * n)))
        for s in range(0, idx.size, chunk):
            sel = idx[s:s + chunk]
            roots = _solve_cycle_chunk(fam, cycles[sel], int(D))
            for r, i in enumerate(sel):
                order.append((i, roots[r]))
    order.sort(key=lambda item: item[0])
    for i, roots in order:
        w = Word.periodic(tuple(int(v) for v in cycles[i]))
        words_out.extend([w] * roots.shape[0])
        z_out.append(roots)
    z = sphere.canonicalize(np.concatenate(z_out))
    return PointBatch(WordBatch.from_words(words_out), z)


def periodic_lead(batch: PointBatch, s: int) -> np.ndarray:
    return batch.words.leading(s)


def periodicity_residual(fam: MapFamily, batch: PointBatch, m: int) -> np.ndarray:
    """Chordal distance between ``T^m`` of each point and the point."""
    lead = batch.words.leading(m)
    _, zm, _ = orbit_sums(fam, [], lead, batch.z, m)
    return sphere.chordal(zm, batch.z)


def default_base(fam: MapFamily) -> PointX:
    """A repelling fixed point of ``R_1`` (largest multiplier) with word ``1 1 1 ...``."""
    pts = periodic_points(fam, 1, cycles=np.array([[1]]))
    lead = np.ones((len(pts), 1), dtype=np.int8)
    _, _, mult = orbit_sums(fam, [], lead, pts.z, 1, derivative=True)
    i = int(np.argmax(mult))
    if mult[i] <= 1.0:
        raise ValueError("R_1 has no repelling fixed point; supply a base point")
    return PointX(Word.periodic((1,)), SpherePoint.from_pair(*pts.z[i]))


# ---------------------------------------------------------------------------
# (A1) diagnostic


def _near_cloud(points: PointBatch, cloud: PointBatch, radius: float) -> np.ndarray:
    """Whether each point lies within ``radius`` of the cloud in the product metric."""
    near = np.zeros(len(points), dtype=bool)
    if len(cloud) == 0 or len(points) == 0:
        return near
    L = 0 if radius > 0.5 else int(math.floor(math.log2(1.0 / radius)))
    lp = points.words.leading(L)
    lc = cloud.words.leading(L)
    for i in range(len(points)):
        ok = np.all(lc == lp[i], axis=1) if L else np.ones(len(cloud), dtype=bool)
        if ok.any():
            d = sphere.chordal(cloud.z[ok], points.z[i])
            near[i] = bool(np.min(d) < radius)
    return near


def check_A1(fam: MapFamily, sample, max_period: int, tol: float = 1e-3,
             radius: float | None = None) -> dict:
    """Look for super-attracting cycles near a Julia-set sample.

    Every periodic point of period ``m <= max_period`` within ``radius``
    (default ``tol``) of the sample must have ``|(T^m)'| > tol``.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    radius = tol if radius is None else radius
    cloud = sample if isinstance(sample, PointBatch) else PointBatch.from_points(list(sample))
    report = {"max_period": max_period, "tol": tol, "radius": radius,
              "sample_size": len(cloud), "checked": 0, "near": 0, "violations": []}
    if len(cloud) == 0:
        report["passed"] = True
        return report
    for m in range(1, max_period + 1):
        pts = periodic_points(fam, m)
        report["checked"] += len(pts)
        near = _near_cloud(pts, cloud, radius)
        if not near.any():
            continue
        sel = pts.take(np.flatnonzero(near))
        report["near"] += len(sel)
        _, _, dmod = orbit_sums(fam, [], sel.words.leading(m), sel.z, m, derivative=True)
        for i in np.flatnonzero(dmod <= tol):
            p = sel.point(int(i))
            report["violations"].append({
                "period": m, "word": str(p.word),
                "z": sphere.complex_to_str(p.z.to_complex()),
                "derivative": float(dmod[i])})
    report["passed"] = not report["violations"]
    return report
