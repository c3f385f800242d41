"""Finite measures on X and the weak* probes used to compare them.

Measures are weighted point clouds (:class:`EmpiricalMeasure`).  Test
functions are products of a cylinder indicator on the word and a bounded
sphere moment ``Re(z^p conj(z)^q) / (1 + |z|^2)^s``; a :class:`Dictionary`
is a finite list of them and :func:`discrepancy` is the largest gap between
two measures over a dictionary.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import sphere
from .rational import MapFamily
from .skew import (DEFAULT_BUDGET, PointBatch, PointX, enumerate_preimages, expand_level,
                   apply_T, periodic_points, point_distance, sample_paths, cylinder_depth,
                   evaluate_function)
from .sphere import SpherePoint
from .symbolic import Cylinder, Word, WordBatch, all_words

DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class TestFunction:
    """``1_C(w) * phi(z)`` with ``phi(z) = Re(z^p conj(z)^q) / (1+|z|^2)^s``.

    ``moment=None`` drops the sphere factor, ``cylinder=None`` the word factor;
    with both absent this is the constant function 1.  Requires
    ``2 s >= p + q`` so that ``|phi| <= 1``.
    """

    cylinder: Cylinder | None = None
    moment: tuple[int, int, int] | None = None

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.moment is not None:
            p, q, s = self.moment
            if min(p, q, s) < 0 or 2 * s < p + q:
                raise ValueError(f"unbounded moment {self.moment}")

    @property
    def depth(self) -> int:
        return 0 if self.cylinder is None else len(self.cylinder)

    @property
    def sup_norm(self) -> float:
        return 1.0

    def sphere_part(self, z: np.ndarray) -> np.ndarray:
        if self.moment is None:
            return np.ones(z.shape[0])
        p, q, s = self.moment
        a, b = z[:, 0], z[:, 1]
        # in normalized coordinates: |a|^(p+q) |b|^(2s-p-q) cos((p-q) arg(a conj b))
        mag = np.abs(a) ** (p + q) * np.abs(b) ** (2 * s - p - q)
        return mag * np.cos((p - q) * np.angle(a * np.conj(b)))

    def evaluate(self, lead: np.ndarray, z: np.ndarray) -> np.ndarray:
        val = self.sphere_part(z)
        if self.cylinder is not None:
            c = np.array(self.cylinder.letters, dtype=np.int8)
            val = val * np.all(lead[:, : len(c)] == c, axis=1)
        return val

    def __call__(self, p: PointX) -> float:
        lead = np.array([p.word.head(self.depth)], dtype=np.int8).reshape(1, -1)
        return float(self.evaluate(lead, p.z.pair()[None, :])[0])

    def label(self) -> str:
        parts = []
        if self.cylinder is not None:
            parts.append("[" + "".join(map(str, self.cylinder.letters)) + "]")
        if self.moment is not None:
            parts.append("m{}{}{}".format(*self.moment))
        return "*".join(parts) or "1"


CONSTANT = TestFunction()
DEFAULT_MOMENTS = ((1, 0, 1), (2, 0, 2), (1, 1, 1), (2, 1, 2))


@dataclass(frozen=True)
class Dictionary:
    functions: tuple[TestFunction, ...]

    def __post_init__(self):
        if not self.functions:
            raise ValueError("empty dictionary")

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    @property
    def depth(self) -> int:
        return max(f.depth for f in self.functions)

    def labels(self) -> list[str]:
        return [f.label() for f in self.functions]


def default_dictionary(N: int, moments=DEFAULT_MOMENTS) -> Dictionary:
    """Constant, cylinder indicators of length 1 and 2, the sphere moments and
    their products with length-1 cylinders: ``1 + (N + N^2) + 4 (1 + N)``."""
    fs = [CONSTANT]
    for s in (1, 2):
        fs += [TestFunction(Cylinder(w)) for w in all_words(N, s)]
    fs += [TestFunction(None, m) for m in moments]
    fs += [TestFunction(Cylinder((v,)), m) for v in range(1, N + 1) for m in moments]
    return Dictionary(tuple(fs))


def sphere_dictionary(moments=DEFAULT_MOMENTS) -> Dictionary:
    return Dictionary((CONSTANT,) + tuple(TestFunction(None, m) for m in moments))


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    points: PointBatch
    weights: np.ndarray
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.points),):
            raise ValueError("one weight per atom")
        if np.any(w < 0):
            raise ValueError("negative weight")
        tot = w.sum()
        if not tot > 0:
            raise ValueError("zero total mass")
        object.__setattr__(self, "weights", w / tot)

    @classmethod
    def uniform(cls, points: PointBatch, **info) -> "EmpiricalMeasure":
        return cls(points, np.full(len(points), 1.0 / len(points)), dict(info))

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[PointX, float]], **info) -> "EmpiricalMeasure":
        atoms = list(atoms)
        return cls(PointBatch.from_points([p for p, _ in atoms]),
                   np.array([w for _, w in atoms], dtype=float), dict(info))

    def __len__(self):
        return len(self.points)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def atoms(self):
        for i in range(len(self)):
            yield self.points.point(i), float(self.weights[i])

    def lead(self, s: int) -> np.ndarray:
        return self.points.words.leading(s)

    def to_csv(self) -> str:
        return points_to_csv(self.points, self.weights)


def integrate(mu: EmpiricalMeasure, h) -> float:
    """``sum_i w_i h(atom_i)``."""
    vals = evaluate_function(h, mu.lead(cylinder_depth(h)), mu.points.z)
    return float(np.dot(mu.weights, vals))


def integrals(mu: EmpiricalMeasure, D: Dictionary) -> np.ndarray:
    lead = mu.lead(D.depth)
    return np.array([np.dot(mu.weights, f.evaluate(lead, mu.points.z)) for f in D])


def discrepancy(mu: EmpiricalMeasure, nu: EmpiricalMeasure, D: Dictionary) -> float:
    """``max_h |int h dmu - int h dnu|`` over the dictionary."""
    return float(np.max(np.abs(integrals(mu, D) - integrals(nu, D))))


def preimage_measure(fam: MapFamily, base: PointX, n: int, budget: int = DEFAULT_BUDGET,
                     mode: str = "auto", samples: int = DEFAULT_SAMPLES,
                     seed: int = 0) -> EmpiricalMeasure:
    """Uniform measure on the ``n``-th preimages of ``base``.

    ``mode="auto"`` enumerates the tree when ``(sum d)^n <= budget`` and
    otherwise averages over ``samples`` random backward paths (each leaf is
    equally likely, so this is an unbiased stand-in).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    exhaustive = fam.total_degree ** n <= budget
    if mode == "exhaustive" or (mode == "auto" and exhaustive):
        tree = enumerate_preimages(fam, base, n, budget)
        return EmpiricalMeasure.uniform(tree.leaves(), kind="preimage", depth=n,
                                        sampled=False)
    if mode not in ("auto", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    tree = sample_paths(fam, base, n, samples, seed)
    return EmpiricalMeasure.uniform(tree.leaves(), kind="preimage", depth=n,
                                    sampled=True, samples=samples, seed=seed)


def fix_points(fam: MapFamily, word: Word, m: int | None = None) -> list[SpherePoint]:
    """Fixed points on the sphere of ``R_{t_m} o ... o R_{t_1}``, with multiplicity.

    ``word`` must be purely periodic; ``m`` (a multiple of its cycle length)
    defaults to the cycle length.
    """
    if not word.is_periodic:
        raise ValueError("word must be purely periodic")
    L = len(word.cycle)
    m = L if m is None else m
    if m % L:
        raise ValueError(f"m = {m} is not a multiple of the cycle length {L}")
    cycle = np.array([word.cycle * (m // L)], dtype=np.int8)
    return sphere.to_points(periodic_points(fam, m, cycles=cycle).z)


def _distinct_count(batch: PointBatch, tol: float = 1e-7) -> int:
    count = 0
    idx = batch.words.tail_index
    for t in np.unique(idx):
        z = batch.z[idx == t]
        d = sphere.chordal(z[:, None, :], z[None, :, :])
        dup = np.triu(d < tol, k=1).any(axis=0)
        count += int(np.count_nonzero(~dup))
    return count


def periodic_measure(fam: MapFamily, m: int) -> EmpiricalMeasure:
    """Uniform measure on ``Fix_m(T)`` counted with multiplicity.

    The atom count is ``(sum d)^m + N^m``; it is reported alongside the
    normalizer ``(sum d)^m + N`` used in the literature, which only agrees at
    ``m = 1``.  Weights use the actual count so the result is a probability.
    """
    pts = periodic_points(fam, m)
    count = len(pts)
    return EmpiricalMeasure.uniform(
        pts, kind="periodic", period=m, count=count,
        distinct=_distinct_count(pts),
        literature_normalizer=fam.total_degree ** m + fam.N,
        normalizer_mismatch=count != fam.total_degree ** m + fam.N)


def orbit_points(fam: MapFamily, p: PointX, n: int) -> list[PointX]:
    out = [p]
    for _ in range(n - 1):
        out.append(apply_T(fam, out[-1]))
    return out


def orbital_measure(fam: MapFamily, p: PointX, n: int) -> EmpiricalMeasure:
    """Weight ``1/n`` on ``p, Tp, ..., T^{n-1} p``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return EmpiricalMeasure.uniform(PointBatch.from_points(orbit_points(fam, p, n)),
                                    kind="orbital", length=n)


def periodic_orbital_measure(fam: MapFamily, p: PointX, m: int,
                             tol: float = 1e-6) -> EmpiricalMeasure:
    """Weight ``1/m`` on the cycle through an ``m``-periodic point."""
    if m < 1:
        raise ValueError("m must be >= 1")
    orbit = orbit_points(fam, p, m)
    back = apply_T(fam, orbit[-1])
    res = point_distance(back, p)
    if res >= tol:
        raise ValueError(f"point is not {m}-periodic (residual {res:.3g})")
    return EmpiricalMeasure.uniform(PointBatch.from_points(orbit),
                                    kind="periodic_orbital", period=m)


# ---------------------------------------------------------------------------
# the averaging operator over first-order preimages


def g_apply(fam: MapFamily, h, p: PointX) -> float:
    """``(1/sum d) * sum_{v, j} h((v w), z_{(v, j)})``."""
    z, letters, _ = expand_level(fam, p.z.pair()[None, :])
    depth = max(cylinder_depth(h), 1)
    tail = np.array(p.word.head(depth - 1), dtype=np.int8)
    lead = np.concatenate([letters[:, None],
                           np.broadcast_to(tail, (len(letters), depth - 1))], axis=1)
    return float(np.mean(evaluate_function(h, lead, z)))


def g_power_values(fam: MapFamily, h, base: PointX, m: int, budget: int = DEFAULT_BUDGET,
                   samples: int = DEFAULT_SAMPLES, seed: int = 0):
    """``(G^k h)(base)`` for ``k = 1..m`` with standard errors (zero when exact)."""
    depth = max(cylinder_depth(h), 1)
    if fam.total_degree ** m <= budget:
        tree = enumerate_preimages(fam, base, m, budget)
        sampled = False
    else:
        tree = sample_paths(fam, base, m, samples, seed)
        sampled = True
    vals, errs = [], []
    for k in range(1, m + 1):
        x = evaluate_function(h, tree.lead(k, depth), tree.levels[k].z)
        vals.append(float(np.mean(x)))
        errs.append(float(np.std(x) / math.sqrt(x.size)) if sampled else 0.0)
    return np.array(vals), np.array(errs), sampled


def g_iterate(fam: MapFamily, h, bases: Sequence[PointX], m: int,
              budget: int = DEFAULT_BUDGET, samples: int = DEFAULT_SAMPLES,
              seed: int = 0) -> dict:
    """Convergence of ``G^k h`` towards a constant across base points.

    Reports per ``k``: the values at each base, their spread (max - min), the
    largest change from ``k-1`` and the Monte Carlo standard error.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rows = []
    table = [g_power_values(fam, h, b, m, budget, samples, seed) for b in bases]
    vals = np.array([t[0] for t in table])   # (bases, m)
    errs = np.array([t[1] for t in table])
    for k in range(m):
        col = vals[:, k]
        rows.append({
            "k": k + 1,
            "values": col.tolist(),
            "spread": float(col.max() - col.min()),
            "change": float(np.max(np.abs(col - vals[:, k - 1]))) if k else None,
            "stderr": float(errs[:, k].max()),
        })
    return {"iterations": rows, "sampled": any(t[2] for t in table),
            "final_spread": rows[-1]["spread"]}


# ---------------------------------------------------------------------------
# serialization


def _fmt(x: float) -> str:
    return repr(float(x))


def points_to_csv(points: PointBatch, weights: np.ndarray | None = None) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    header = ["word", "re", "im"] + (["weight"] if weights is not None else [])
    wr.writerow(header)
    zc = sphere.pairs_to_complex(points.z)
    words = points.words.strings()
    for i in range(len(points)):
        if points.z[i, 1] == 0:
            row = [words[i], "inf", "inf"]
        else:
            row = [words[i], _fmt(zc[i].real), _fmt(zc[i].imag)]
        if weights is not None:
            row.append(_fmt(weights[i]))
        wr.writerow(row)
    return buf.getvalue()


def points_from_csv(text: str) -> tuple[PointBatch, np.ndarray | None]:
    rows = list(csv.DictReader(io.StringIO(text)))
    words = [Word.parse(r["word"]) for r in rows]
    z = []
    for r in rows:
        if r["re"].strip().lower() == "inf":
            z.append(complex(np.inf, 0))
        else:
            z.append(complex(float(r["re"]), float(r["im"])))
    batch = PointBatch(WordBatch.from_words(words),
                       sphere.pairs_from_complex(np.array(z, dtype=complex)))
    weights = None
    if rows and "weight" in rows[0]:
        weights = np.array([float(r["weight"]) for r in rows])
    return batch, weights


def measure_from_csv(text: str) -> EmpiricalMeasure:
    batch, w = points_from_csv(text)
    if w is None:
        return EmpiricalMeasure.uniform(batch)
    return EmpiricalMeasure(batch, w)
