"""Transfer operator, pressure estimators and large-deviation scans.

Every exponential sum is formed in log space, so depths where ``e^{f^n}``
overflows a double are fine.  Potentials have the parametric form

    f(w, z) = a Re(z)/(1+|z|^2) + b/(1+|z|^2) + sum_k c_k 1_{C_k}(w) + const

and evaluate on the same ``(leading letters, pairs)`` arrays as test
functions, so they can be summed along preimage trees and periodic orbits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from . import sphere
from .measures import (DEFAULT_SAMPLES, Dictionary, EmpiricalMeasure, integrals)
from .rational import MapFamily, preimage_pairs
from .skew import (DEFAULT_BUDGET, PointBatch, PointX, PreimageTree, RegionU,
                   _near_cloud, critical_values_up_to, cylinder_depth,
                   default_base, enumerate_preimages, evaluate_function,
                   orbit_sums, periodic_points, sample_paths)
from .symbolic import Cylinder, all_words

MIN_LDP_SAMPLES = 10_000
DEFAULT_LOOP_POINTS = 128
MAX_LOOP_POINTS = 1024


@dataclass(frozen=True)
class Potential:
    """Hoelder potential ``a Re z/(1+|z|^2) + b/(1+|z|^2) + sum c_k 1_{C_k} + const``.

    At ``z = inf`` both sphere terms vanish.  ``const`` is a convenience for
    shifted potentials; it could equally be written as a sum of length-1
    cylinder terms.
    """

    a: float = 0.0
    b: float = 0.0
    cylinders: tuple[tuple[Cylinder, float], ...] = ()
    const: float = 0.0

    def __post_init__(self):
        cyl = tuple((c if isinstance(c, Cylinder) else Cylinder(tuple(c)), float(v))
                    for c, v in self.cylinders)
        if any(len(c) > 2 for c, _ in cyl):
            raise ValueError("cylinder terms have length at most 2")
        vals = (self.a, self.b, self.const) + tuple(v for _, v in cyl)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("potential coefficients must be finite")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "cylinders", cyl)

    @classmethod
    def constant(cls, c: float) -> "Potential":
        return cls(const=c)

    @property
    def depth(self) -> int:
        return max((len(c) for c, _ in self.cylinders), default=0)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.const == 0 and all(
            v == 0 for _, v in self.cylinders)

    def evaluate(self, lead: np.ndarray, z: np.ndarray) -> np.ndarray:
        zr, zt = z[:, 0], z[:, 1]
        # Re z/(1+|z|^2) = Re(a conj b) and 1/(1+|z|^2) = |b|^2 for unit pairs
        val = self.a * np.real(zr * np.conj(zt)) + self.b * np.abs(zt) ** 2 + self.const
        for c, coef in self.cylinders:
            letters = np.array(c.letters, dtype=np.int8)
            val = val + coef * np.all(lead[:, : len(letters)] == letters, axis=1)
        return val

    def __call__(self, p: PointX) -> float:
        lead = np.array([p.word.head(self.depth)], dtype=np.int8).reshape(1, -1)
        return float(self.evaluate(lead, p.z.pair()[None, :])[0])

    def __add__(self, other: "Potential") -> "Potential":
        return Potential(self.a + other.a, self.b + other.b,
                         self.cylinders + other.cylinders, self.const + other.const)

    def scaled(self, t: float) -> "Potential":
        return Potential(t * self.a, t * self.b,
                         tuple((c, t * v) for c, v in self.cylinders), t * self.const)

    def shifted(self, c: float) -> "Potential":
        return Potential(self.a, self.b, self.cylinders, self.const + c)

    def sphere_sup(self) -> float:
        # max of a x + b y over the sphere, with x = Re z/(1+|z|^2), y = 1/(1+|z|^2)
        return 0.5 * (self.b + math.hypot(self.a, self.b))

    def cylinder_sup(self, N: int) -> float:
        if not self.cylinders:
            return 0.0
        L = self.depth
        best = -math.inf
        for w in all_words(N, L):
            best = max(best, sum(v for c, v in self.cylinders if w[: len(c)] == c.letters))
        return best

    def sup(self, N: int) -> float:
        """``sup f`` over words on ``N`` letters times the sphere."""
        return self.sphere_sup() + self.cylinder_sup(N) + self.const

    def lipschitz_bound(self) -> float:
        """Lipschitz constant bound (Hoelder exponent 1) for the product metric.

        The sphere terms are coordinate functions of the unit sphere in R^3
        scaled by 1/2 and the chordal metric is the Euclidean one there; a
        cylinder of length ``L`` is constant on balls of radius ``< 2^-L``.
        """
        cyl = sum(abs(v) for _, v in self.cylinders)
        return 0.5 * math.hypot(self.a, self.b) + (2.0 ** self.depth) * cyl

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "const": self.const,
                "cylinders": [{"letters": list(c.letters), "coef": v}
                              for c, v in self.cylinders]}

    @classmethod
    def from_json(cls, obj: dict) -> "Potential":
        cyl = tuple((Cylinder(tuple(e["letters"])), float(e["coef"]))
                    for e in obj.get("cylinders", ()))
        return cls(float(obj.get("a", 0.0)), float(obj.get("b", 0.0)), cyl,
                   float(obj.get("const", 0.0)))

    def label(self) -> str:
        parts = [f"a={self.a:g}", f"b={self.b:g}"]
        parts += ["c[" + "".join(map(str, c.letters)) + f"]={v:g}" for c, v in self.cylinders]
        if self.const:
            parts.append(f"const={self.const:g}")
        return " ".join(parts)


ZERO = Potential()


# ---------------------------------------------------------------------------
# transfer operator


def _tree(fam: MapFamily, base: PointX, n: int, budget: int, mode: str,
          samples: int, seed: int) -> PreimageTree:
    if mode not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" or (mode == "auto" and fam.total_degree ** n <= budget):
        return enumerate_preimages(fam, base, n, budget)
    return sample_paths(fam, base, n, samples, seed)


def _log_mass(tree: PreimageTree, sums: np.ndarray, k: int) -> float:
    """``log sum e^{sums}`` over level ``k``; sampled trees are rescaled by ``D^k / M``."""
    val = float(logsumexp(sums))
    if tree.sampled:
        val += k * math.log(tree.family.total_degree) - math.log(sums.size)
    return val


def transfer_apply(fam: MapFamily, f: Potential, g, p: PointX, n: int,
                   budget: int = DEFAULT_BUDGET, mode: str = "auto",
                   samples: int = DEFAULT_SAMPLES, seed: int = 0) -> float:
    """``(L_f^n g)(p) = sum_{T^n q = p} e^{f^n(q)} g(q)``.

    Sampled mode returns the unbiased estimate ``(sum d)^n mean(e^{f^n} g)``
    over ``samples`` backward paths.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tree = _tree(fam, p, n, budget, mode, samples, seed)
    S = tree.path_sums([f])[0]
    gv = evaluate_function(g, tree.lead(n, max(cylinder_depth(g), 1)), tree.levels[n].z)
    top = float(S.max())
    total = float(np.sum(np.exp(S - top) * gv))
    if tree.sampled:
        return math.exp(top + n * math.log(fam.total_degree)) * total / S.size
    return math.exp(top) * total


# ---------------------------------------------------------------------------
# pressure


@dataclass
class PressureEstimate:
    value: float
    method: str                  # "preimage" | "periodic"
    depth: int
    trace: list[float]           # estimate per depth/period, first base
    depths: list[int]
    bases: list[str] = field(default_factory=list)
    finals: list[float] = field(default_factory=list)   # last entry per base
    aitken: float | None = None
    spread: float = 0.0
    sampled: bool = False
    stderr: float = 0.0          # Monte Carlo standard error of ``value`` (0 when exact)
    condition: dict | None = None

    @property
    def differences(self) -> list[float]:
        return [b - a for a, b in zip(self.trace, self.trace[1:])]

    @property
    def uncertainty(self) -> float:
        d = self.differences
        return (abs(d[-1]) if d else 0.0) + self.spread + 2.0 * self.stderr

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "depth": self.depth,
                "trace": self.trace, "depths": self.depths, "bases": self.bases,
                "finals": self.finals, "differences": self.differences,
                "aitken": self.aitken, "spread": self.spread,
                "uncertainty": self.uncertainty, "sampled": self.sampled,
                "stderr": self.stderr, "condition": self.condition}

    def to_csv(self) -> str:
        lines = ["depth,estimate"]
        lines += [f"{n},{v!r}" for n, v in zip(self.depths, self.trace)]
        return "\n".join(lines) + "\n"


def _aitken(x: Sequence[float]) -> float | None:
    if len(x) < 3:
        return None
    x0, x1, x2 = x[-3:]
    den = x2 - 2 * x1 + x0
    if abs(den) < 1e-14 * max(1.0, abs(x2)):
        return float(x2)
    return float(x2 - (x2 - x1) ** 2 / den)


def _as_bases(fam: MapFamily, base) -> list[PointX]:
    if base is None:
        return [default_base(fam)]
    if isinstance(base, PointX):
        return [base]
    return list(base)


def pressure_preimage(fam: MapFamily, f: Potential, base=None, n_max: int = 8,
                      budget: int = DEFAULT_BUDGET, mode: str = "auto",
                      samples: int = DEFAULT_SAMPLES, seed: int = 0) -> PressureEstimate:
    """``(1/n) log (L_f^n 1)(p)`` for ``n = 1..n_max``.

    ``base`` is a point, a list of points or ``None`` (default base).  The
    value is the mean of the final entries over the bases, ``spread`` their
    range.  Sampled trees add a Monte Carlo standard error, which enters the
    uncertainty at two standard errors.  ``aitken`` accelerates the one-step growth rates
    ``log L^n 1 - log L^{n-1} 1``, which converge geometrically.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    bases = _as_bases(fam, base)
    traces, rates_first, sampled, errs = [], None, False, []
    for bi, p in enumerate(bases):
        tree = _tree(fam, p, n_max, budget, mode, samples, seed)
        sampled |= tree.sampled
        logs = []
        for k, S in tree.iter_path_sums([f]):
            logs.append(_log_mass(tree, S[0], k))
            last = S[0]
        if tree.sampled:
            # delta method: sd(log mean e^S) = sd(e^S) / (mean e^S sqrt(M))
            w = np.exp(last - last.max())
            errs.append(float(w.std(ddof=1) / (w.mean() * math.sqrt(w.size))) / n_max)
        traces.append([lm / k for k, lm in enumerate(logs, start=1)])
        if bi == 0:
            rates_first = np.diff([0.0] + logs).tolist()
    finals = [t[-1] for t in traces]
    return PressureEstimate(
        value=float(np.mean(finals)), method="preimage", depth=n_max,
        trace=traces[0], depths=list(range(1, n_max + 1)),
        bases=[str(p) for p in bases], finals=finals, aitken=_aitken(rates_first),
        spread=float(max(finals) - min(finals)), sampled=sampled,
        stderr=float(np.sqrt(np.mean(np.square(errs))) / math.sqrt(len(errs))) if errs else 0.0)


def _periodic_sums(fam: MapFamily, f, m: int, extra: Sequence = (), derivative=False):
    pts = periodic_points(fam, m)
    funcs = [f, *extra]
    need = m + max(cylinder_depth(g) for g in funcs)
    sums, _, dmod = orbit_sums(fam, funcs, pts.words.leading(need), pts.z, m,
                               derivative=derivative)
    return pts, sums, dmod


def pressure_periodic(fam: MapFamily, f: Potential, m_max: int,
                      m_min: int = 1) -> PressureEstimate:
    """``(1/m) log sum_{Fix_m} e^{f^m}`` for ``m = m_min..m_max`` (with multiplicity)."""
    if not 1 <= m_min <= m_max:
        raise ValueError("need 1 <= m_min <= m_max")
    trace = []
    for m in range(m_min, m_max + 1):
        _, sums, _ = _periodic_sums(fam, f, m)
        trace.append(float(logsumexp(sums[0])) / m)
    rates = [trace[0]] + [k * b - (k - 1) * a for k, a, b in
                          zip(range(m_min + 1, m_max + 1), trace, trace[1:])]
    return PressureEstimate(value=trace[-1], method="periodic", depth=m_max, trace=trace,
                            depths=list(range(m_min, m_max + 1)), bases=["Fix_m"],
                            finals=[trace[-1]], aitken=_aitken(rates))


@dataclass(frozen=True)
class ConditionCheck:
    holds: bool
    margin: float
    pressure: float
    sup_f: float
    log_N: float
    uncertainty: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "margin": self.margin, "pressure": self.pressure,
                "sup_f": self.sup_f, "log_N": self.log_N, "uncertainty": self.uncertainty}


def condition_from(fam: MapFamily, f: Potential, pressure: float,
                   uncertainty: float) -> ConditionCheck:
    sup_f = f.sup(fam.N)
    margin = pressure - sup_f - math.log(fam.N)
    return ConditionCheck(bool(margin > uncertainty), margin, pressure, sup_f,
                          math.log(fam.N), uncertainty)


def check_condition(fam: MapFamily, f: Potential, estimate: PressureEstimate | None = None,
                    n: int = 8, base=None, budget: int = DEFAULT_BUDGET) -> ConditionCheck:
    """Test ``P(f) > sup f + log N``; true only when the margin exceeds the
    estimate's uncertainty.  Without ``estimate`` the preimage estimator at
    depth ``n`` is used."""
    if estimate is None:
        estimate = pressure_preimage(fam, f, base, n, budget)
    return condition_from(fam, f, estimate.value, estimate.uncertainty)


# ---------------------------------------------------------------------------
# equilibrium approximant and Q


def equilibrium_approx(fam: MapFamily, f: Potential, m: int,
                       condition: ConditionCheck | None = None) -> EmpiricalMeasure:
    """Gibbs-weighted periodic orbits of period ``m``.

    Each ``q`` in ``Fix_m`` spreads ``e^{f^m(q)}`` uniformly over its orbit;
    since ``f^m`` is constant along the orbit and ``Fix_m`` is invariant, the
    atom at ``q`` ends up with weight proportional to ``e^{f^m(q)}``.
    """
    pts, sums, _ = _periodic_sums(fam, f, m)
    S = sums[0]
    logZ = float(logsumexp(S))
    if condition is None:
        # periodic estimate; the extra N^m fixed points bias it by at most this
        unc = math.log1p(fam.N ** m / fam.total_degree ** m) / m
        condition = condition_from(fam, f, logZ / m, unc)
    info = {"kind": "equilibrium", "period": m, "potential": f.label(),
            "condition": condition.to_dict()}
    if not condition.holds:
        msg = (f"pressure condition fails (margin {condition.margin:.4g}); "
               f"the approximant may not reflect a unique equilibrium state")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        info["warning"] = msg
    return EmpiricalMeasure(pts, np.exp(S - logZ), info)


def legendre_Q(fam: MapFamily, f: Potential, g: Potential, depth: int, base=None,
               budget: int = DEFAULT_BUDGET) -> float:
    """``P(f + g) - P(f)`` from preimage estimates at equal depth and base."""
    bases = _as_bases(fam, base)
    pf = pressure_preimage(fam, f, bases, depth, budget).value
    pfg = pressure_preimage(fam, f + g, bases, depth, budget).value
    return pfg - pf


# ---------------------------------------------------------------------------
# large deviations


@dataclass(frozen=True, eq=False)
class NeighborhoodSpec:
    """``{mu : |int g dmu - int g dcenter| < epsilon for every probe g}``.

    ``epsilon = inf`` is the whole space and ``epsilon = 0`` the empty set.
    """

    center: EmpiricalMeasure
    probes: Dictionary
    epsilon: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        object.__setattr__(self, "_values", integrals(self.center, self.probes))

    @property
    def center_values(self) -> np.ndarray:
        return self._values

    def outside(self, values: np.ndarray) -> np.ndarray:
        """``values`` has shape ``(probes, M)``; returns an ``(M,)`` mask."""
        gap = np.abs(values - self._values[:, None])
        return np.any(gap >= self.epsilon, axis=0)


@dataclass
class LDPReport:
    kind: str
    depths: list[int]
    fractions: list[float]
    counts: list[int]
    epsilon: float
    slope: float | None = None
    intercept: float | None = None
    r2: float | None = None
    status: str = "ok"

    @property
    def zero_flags(self) -> list[bool]:
        return [fr == 0.0 for fr in self.fractions]

    @property
    def log_fractions(self) -> list[float | None]:
        return [math.log(fr) if fr > 0 else None for fr in self.fractions]

    def to_dict(self) -> dict:
        eps = self.epsilon if math.isfinite(self.epsilon) else "inf"
        return {"kind": self.kind, "depths": self.depths, "fractions": self.fractions,
                "log_fractions": self.log_fractions, "zero_flags": self.zero_flags,
                "counts": self.counts, "epsilon": eps, "slope": self.slope,
                "intercept": self.intercept, "r2": self.r2, "status": self.status}

    def to_csv(self) -> str:
        lines = ["depth,fraction,log_fraction"]
        for n, fr, lf in zip(self.depths, self.fractions, self.log_fractions):
            lines.append(f"{n},{fr!r},{'' if lf is None else repr(lf)}")
        return "\n".join(lines) + "\n"


def fit_slope(depths: Sequence[int], fractions: Sequence[float]):
    """OLS of log-fraction on depth over nonzero entries: ``(slope, intercept, r2, status)``."""
    pts = [(n, math.log(fr)) for n, fr in zip(depths, fractions) if fr > 0]
    if not pts:
        return None, None, None, "decayed below resolution"
    if len(pts) < 3:
        return None, None, None, "insufficient points"
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    res = y - (slope * x + intercept)
    ss_res = float(res @ res)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    if ss_tot <= 1e-300:
        slope = 0.0
    status = "ok" if len(pts) == len(depths) else "ok (zero fractions dropped)"
    return float(slope), float(intercept), float(r2), status


def _fraction(S: np.ndarray, outside: np.ndarray) -> float:
    if not outside.any():
        return 0.0
    if outside.all():
        return 1.0
    return float(np.exp(logsumexp(S[outside]) - logsumexp(S)))


def _report(kind, depths, fractions, counts, eps) -> LDPReport:
    slope, icpt, r2, status = fit_slope(depths, fractions)
    return LDPReport(kind, list(depths), fractions, counts, eps, slope, icpt, r2, status)


def ldp_preimage_scan(fam: MapFamily, f: Potential, base: PointX | None,
                      nbhd: NeighborhoodSpec, depths: Sequence[int],
                      budget: int = DEFAULT_BUDGET, mode: str = "auto",
                      samples: int = MIN_LDP_SAMPLES, seed: int = 0) -> LDPReport:
    """Gibbs-weighted share of depth-``n`` preimages whose orbital measure lies
    outside the neighborhood.

    One tree of the largest depth serves every ``n``: level ``n`` of it is the
    depth-``n`` preimage set, and the orbital measure of a level-``n`` node
    averages over the node and its ancestors.
    """
    depths = sorted(set(int(n) for n in depths))
    if not depths or depths[0] < 1:
        raise ValueError("depths must be positive")
    base = default_base(fam) if base is None else base
    n_max = depths[-1]
    tree = _tree(fam, base, n_max, budget, mode, samples, seed)
    if tree.sampled and samples < MIN_LDP_SAMPLES:
        raise ValueError(f"sampled scans need at least {MIN_LDP_SAMPLES} paths")
    funcs = [f, *nbhd.probes]
    fractions, counts = [], []
    for k, sums in tree.iter_path_sums(funcs):
        if k not in depths:
            continue
        out = nbhd.outside(sums[1:] / k)
        fractions.append(_fraction(sums[0], out))
        counts.append(int(sums.shape[1]))
    rep = _report("preimage", depths, fractions, counts, nbhd.epsilon)
    return rep


def ldp_periodic_scan(fam: MapFamily, f: Potential, nbhd: NeighborhoodSpec,
                      periods: Sequence[int], julia: PointBatch | None = None,
                      repel_tol: float = 1e-6, radius: float = 1e-3) -> LDPReport:
    """Gibbs-weighted share of periodic orbital measures outside the neighborhood.

    A point of ``Fix_m`` takes part when it is repelling (``|(T^m)'| > 1 +
    repel_tol``) or lies within ``radius`` of the Julia sample ``julia``.
    """
    periods = sorted(set(int(m) for m in periods))
    if not periods or periods[0] < 1:
        raise ValueError("periods must be positive")
    fractions, counts = [], []
    for m in periods:
        pts, sums, dmod = _periodic_sums(fam, f, m, list(nbhd.probes), derivative=True)
        keep = dmod > 1.0 + repel_tol
        if julia is not None and len(julia):
            keep |= _near_cloud(pts, julia, radius)
        counts.append(int(keep.sum()))
        if not keep.any():
            fractions.append(0.0)
            continue
        out = nbhd.outside(sums[1:, keep] / m)
        fractions.append(_fraction(sums[0, keep], out))
    return _report("periodic", periods, fractions, counts, nbhd.epsilon)


# ---------------------------------------------------------------------------
# inverse branches over a disk


@dataclass
class BranchReport:
    m: int
    n_clear: int
    total: int          # (sum d)^m
    gamma: int          # sheets whose lift closes
    undecided: int
    tau: int
    clear: bool         # U avoids critical values of order <= n_clear
    bound: int          # tau * sum_{t=1}^{m-n_clear} (sum d)^t
    K: int

    @property
    def accepted(self) -> bool:
        return self.clear

    @property
    def holds(self) -> bool | None:
        if not self.accepted:
            return None
        return self.total - self.gamma <= self.bound

    def to_dict(self) -> dict:
        return {"m": self.m, "n_clear": self.n_clear, "total": self.total,
                "gamma": self.gamma, "undecided": self.undecided, "tau": self.tau,
                "clear": self.clear, "accepted": self.accepted, "bound": self.bound,
                "lhs": self.total - self.gamma, "holds": self.holds, "K": self.K}


def _lift_once(R, paths: np.ndarray, amb: np.ndarray, ratio: float):
    """Lift every path through ``R^{-1}`` by continuation along the path."""
    P, L, _ = paths.shape
    d = R.degree
    roots = preimage_pairs(R, paths.reshape(-1, 2)).reshape(P, L, d, 2)
    lifted = np.empty((P, d, L, 2), dtype=complex)
    cur = roots[:, 0]
    lifted[:, :, 0] = cur
    bad = np.zeros((P, d), dtype=bool)
    rows = np.arange(P)[:, None]
    for s in range(1, L):
        cand = roots[:, s]
        dist = sphere.chordal(cur[:, :, None, :], cand[:, None, :, :])   # (P, d, d)
        idx = np.argmin(dist, axis=2)
        if d > 1:
            srt = np.sort(dist, axis=2)
            bad |= srt[:, :, 0] > ratio * srt[:, :, 1]
            # two sheets landing on the same root is ambiguous as well
            taken = np.sort(idx, axis=1)
            clash = np.any(taken[:, 1:] == taken[:, :-1], axis=1)
            bad |= clash[:, None]
        cur = cand[rows, idx]
        lifted[:, :, s] = cur
    return (lifted.reshape(P * d, L, 2),
            np.repeat(amb, d) | bad.reshape(-1))


def _lift_loop(fam: MapFamily, loop: np.ndarray, m: int, ratio: float):
    paths = loop[None]
    amb = np.zeros(1, dtype=bool)
    for _ in range(m):
        parts = [_lift_once(R, paths, amb, ratio) for R in fam.maps]
        paths = np.concatenate([p for p, _ in parts])
        amb = np.concatenate([a for _, a in parts])
    return paths, amb


def branch_count(fam: MapFamily, U: RegionU, m: int, n_clear: int,
                 K: int = DEFAULT_LOOP_POINTS, K_cap: int = MAX_LOOP_POINTS,
                 close_tol: float = 1e-6, ratio: float = 0.5) -> BranchReport:
    """Count single-valued inverse branches of ``T^m`` over ``U`` by monodromy.

    The boundary loop of ``U`` is lifted through every depth-``m`` preimage
    sheet; a sheet counts when its lift closes within ``close_tol``.  A step
    whose nearest root is not clearly nearer than the second one (distance
    ratio above ``ratio``) is ambiguous; ``K`` doubles up to ``K_cap`` and
    sheets still ambiguous are reported undecided and not counted.
    """
    if m < 1 or n_clear < 1:
        raise ValueError("m and n_clear must be >= 1")
    crit = critical_values_up_to(fam, n_clear)
    vals = crit.values(n_clear)
    clear = not (len(vals) and bool(np.any(U.contains(vals))))
    tau = crit.tau(U)
    D = fam.total_degree
    bound = tau * sum(D ** t for t in range(1, m - n_clear + 1))
    while True:
        b = U.boundary(K)
        loop = np.concatenate([b, b[:1]])
        paths, amb = _lift_loop(fam, loop, m, ratio)
        if not amb.any() or 2 * K > K_cap:
            break
        K *= 2
    closed = sphere.chordal(paths[:, -1], paths[:, 0]) < close_tol
    gamma = int(np.count_nonzero(closed & ~amb))
    return BranchReport(m, n_clear, D ** m, gamma, int(amb.sum()), tau, clear, bound, K)
