import math

import numpy as np
import pytest

from conftest import Z2, fam_of, pt
from skewdyn.measures import (CONSTANT, TestFunction, default_dictionary, integrate,
                              periodic_measure)
from skewdyn.skew import PointX, RegionU, default_base, point_distance
from skewdyn.sphere import from_complex
from skewdyn.symbolic import Cylinder, Word
from skewdyn.thermo import (ZERO, NeighborhoodSpec, Potential, branch_count, check_condition,
                            equilibrium_approx, fit_slope, ldp_periodic_scan,
                            ldp_preimage_scan, legendre_Q, pressure_periodic,
                            pressure_preimage, transfer_apply)

QUAD = [-0.3, 0, 1]
RE = TestFunction(None, (1, 0, 1))


def random_points(rng, M, N=2, L=6):
    out = []
    for _ in range(M):
        head = tuple(int(v) for v in rng.integers(1, N + 1, L))
        z = complex(*rng.normal(size=2)) * rng.choice([0.3, 1, 4])
        out.append(PointX(Word(head, (int(rng.integers(1, N + 1)),)), from_complex(z)))
    return out


# -- potentials ----------------------------------------------------------------

def test_potential_sup_against_sampling(rng):
    f = Potential(a=0.7, b=-0.4, cylinders=((Cylinder((1,)), 0.2), (Cylinder((2, 1)), -0.5)),
                  const=0.1)
    vals = [f(p) for p in random_points(rng, 4000)]
    assert max(vals) <= f.sup(2) + 1e-12
    assert max(vals) > f.sup(2) - 0.02
    # sphere part alone: dense scan of the sphere
    g = Potential(a=0.7, b=-0.4)
    zs = np.linspace(-3, 3, 301)
    grid = [g(pt("| 1", complex(x, y))) for x in zs for y in zs[::10]]
    assert max(grid) <= g.sup(1) + 1e-12 and max(grid) > g.sup(1) - 1e-3


def test_potential_lipschitz_bound(rng):
    f = Potential(a=0.9, b=0.6, cylinders=((Cylinder((1, 2)), 0.3),))
    L = f.lipschitz_bound()
    P = random_points(rng, 300)
    for p, q in zip(P, P[1:]):
        assert abs(f(p) - f(q)) <= L * point_distance(p, q) + 1e-12
    # nearby points on the sphere with a common word
    for p in P[:50]:
        q = PointX(p.word, from_complex(p.z.to_complex() * (1 + 1e-4j) if not p.z.is_infinity else 1e9))
        assert abs(f(p) - f(q)) <= L * point_distance(p, q) + 1e-12


def test_potential_validation_and_algebra():
    with pytest.raises(ValueError):
        Potential(cylinders=((Cylinder((1, 2, 1)), 1.0),))
    with pytest.raises(ValueError):
        Potential(a=math.nan)
    f = Potential(a=1.0, cylinders=((Cylinder((2,)), 0.5),))
    p = pt("2 | 1", 0.5)
    assert (f + f)(p) == pytest.approx(2 * f(p))
    assert f.scaled(-3)(p) == pytest.approx(-3 * f(p))
    assert f.shifted(0.25)(p) == pytest.approx(f(p) + 0.25)
    assert Potential.from_json(f.to_json()) == f
    assert ZERO.is_zero and ZERO(p) == 0


# -- transfer operator and pressure -------------------------------------------

def test_transfer_apply_constants(z2z3):
    p = default_base(z2z3)
    for n in (1, 2, 3, 4):
        assert transfer_apply(z2z3, ZERO, CONSTANT, p, n) == pytest.approx(5 ** n, rel=1e-12)
        got = transfer_apply(z2z3, Potential.constant(0.3), CONSTANT, p, n)
        assert got == pytest.approx(math.exp(0.3 * n) * 5 ** n, rel=1e-12)


def test_transfer_apply_linear_and_positive(z2z3, rng):
    f = Potential(a=0.4, b=0.2)
    p = default_base(z2z3)
    g1 = Potential(a=1.0)
    g2 = Potential(b=1.0, cylinders=((Cylinder((1,)), 1.0),))
    lhs = transfer_apply(z2z3, f, g1 + g2.scaled(2.5), p, 3)
    rhs = transfer_apply(z2z3, f, g1, p, 3) + 2.5 * transfer_apply(z2z3, f, g2, p, 3)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    pos = Potential(b=1.0).shifted(0.01)
    assert transfer_apply(z2z3, f, pos, p, 3) > 0


def test_transfer_sampled_is_consistent(z2z3):
    p = default_base(z2z3)
    f = Potential(a=0.4)
    exact = transfer_apply(z2z3, f, CONSTANT, p, 5)
    est = transfer_apply(z2z3, f, CONSTANT, p, 5, mode="sampled", samples=20000, seed=4)
    assert est == pytest.approx(exact, rel=0.02)


def test_pressure_zero_potential(z2z3):
    est = pressure_preimage(z2z3, ZERO, n_max=6)
    assert all(abs(v - math.log(5)) < 1e-12 for v in est.trace)
    assert est.differences == pytest.approx([0.0] * 5, abs=1e-12)


def test_pressure_shift():
    fam = fam_of(Z2, QUAD)
    f = Potential(a=0.3, b=0.1)
    base = default_base(fam)
    p0 = pressure_preimage(fam, f, base, 6).value
    p1 = pressure_preimage(fam, f.shifted(0.7), base, 6).value
    assert abs(p1 - p0 - 0.7) < 1e-10


def test_pressure_base_independence():
    fam = fam_of(Z2, QUAD)
    f = Potential(a=0.3)
    est = pressure_preimage(fam, f, [default_base(fam), pt("2 | 1", 0.4 + 1.3j)], 10)
    assert not est.sampled
    assert est.spread < 0.01


def test_pressure_periodic_count():
    fam = fam_of(Z2, Z2)
    est = pressure_periodic(fam, ZERO, 3)
    assert est.value == pytest.approx(math.log(72) / 3, abs=1e-12)
    assert est.trace[0] == pytest.approx(math.log(6), abs=1e-12)


def test_estimate_serialization(z2z3):
    est = pressure_preimage(z2z3, Potential(a=0.2), n_max=4)
    lines = est.to_csv().splitlines()
    assert lines[0] == "depth,estimate" and len(lines) == 5
    d = est.to_dict()
    assert d["value"] == est.value and d["depths"] == [1, 2, 3, 4]


# -- the pressure condition ---------------------------------------------------

def test_condition_examples(z2z3):
    assert check_condition(z2z3, ZERO, n=6).holds          # log 5 > log 2
    small = check_condition(z2z3, Potential(a=0.2, b=0.1), n=6)
    assert small.holds and small.margin > small.uncertainty
    big = check_condition(z2z3, Potential(b=5.0), n=6)
    assert not big.holds and big.margin < 0
    shifted = check_condition(z2z3, Potential.constant(-1.3), n=6)
    assert shifted.margin == pytest.approx(math.log(5) - math.log(2), abs=1e-10)
    single = check_condition(fam_of(Z2), ZERO, n=6)
    assert single.holds and single.margin == pytest.approx(math.log(2), abs=1e-12)


# -- equilibrium approximant --------------------------------------------------

def test_equilibrium_zero_potential_matches_periodic(z2z3):
    eq = equilibrium_approx(z2z3, ZERO, 3)
    nu = periodic_measure(z2z3, 3)
    assert len(eq) == len(nu)
    assert np.allclose(eq.weights, nu.weights, atol=1e-15)
    assert eq.info["condition"]["holds"]


def test_equilibrium_weights_and_monotonicity():
    fam = fam_of(Z2)
    means = []
    for a in (0.0, 0.2, 0.4):
        eq = equilibrium_approx(fam, Potential(a=a), 6)
        assert np.all(eq.weights > 0)
        assert eq.weights.sum() == pytest.approx(1, abs=1e-12)
        means.append(integrate(eq, RE))
    assert means[0] < means[1] < means[2]


def test_equilibrium_warns_when_condition_fails(z2z3):
    with pytest.warns(RuntimeWarning):
        eq = equilibrium_approx(z2z3, Potential(b=5.0), 2)
    assert "warning" in eq.info


# -- the Legendre functional ---------------------------------------------------

def test_legendre_Q_examples(z2z3):
    f = Potential(a=0.2)
    assert legendre_Q(z2z3, f, ZERO, 5) == pytest.approx(0, abs=1e-12)
    assert legendre_Q(z2z3, f, Potential.constant(0.4), 5) == pytest.approx(0.4, abs=1e-10)
    g1 = Potential(a=0.8)
    g2 = Potential(b=-0.6, cylinders=((Cylinder((1,)), 0.5),))
    mid = (g1 + g2).scaled(0.5)
    q1, q2, qm = (legendre_Q(z2z3, f, g, 6) for g in (g1, g2, mid))
    assert qm <= 0.5 * (q1 + q2) + 1e-12
    g = Potential(a=0.5, b=-0.3, cylinders=((Cylinder((2,)), 0.2),))
    q = [legendre_Q(z2z3, f, g.scaled(k), 6) for k in (1, 2, 3)]
    assert q[2] - 2 * q[1] + q[0] >= -1e-3


# -- large deviations -----------------------------------------------------------

def test_ldp_trivial_neighborhoods(z2z3):
    center = equilibrium_approx(z2z3, ZERO, 3)
    D = default_dictionary(2)
    whole = NeighborhoodSpec(center, D, math.inf)
    empty = NeighborhoodSpec(center, D, 0.0)
    r = ldp_preimage_scan(z2z3, ZERO, None, whole, [2, 3, 4])
    assert r.fractions == [0.0, 0.0, 0.0] and all(r.zero_flags)
    assert r.status == "decayed below resolution"
    r = ldp_preimage_scan(z2z3, ZERO, None, empty, [2, 3, 4])
    assert r.fractions == [1.0, 1.0, 1.0]
    assert r.slope == 0 and r.r2 == 1
    r = ldp_periodic_scan(z2z3, ZERO, empty, [2, 3])
    assert r.fractions == [1.0, 1.0]
    with pytest.raises(ValueError):
        NeighborhoodSpec(center, D, -0.1)


def test_ldp_sampled_minimum(z2z3):
    nb = NeighborhoodSpec(equilibrium_approx(z2z3, ZERO, 2), default_dictionary(2), 0.2)
    with pytest.raises(ValueError):
        ldp_preimage_scan(z2z3, ZERO, None, nb, [3], mode="sampled", samples=500)


def test_fit_slope():
    ns = [2, 3, 4, 5]
    s, c, r2, status = fit_slope(ns, [math.exp(-0.5 * n + 0.1) for n in ns])
    assert s == pytest.approx(-0.5) and c == pytest.approx(0.1) and r2 == pytest.approx(1)
    assert status == "ok"
    assert fit_slope(ns, [0.1, 0.0, 0.0, 0.0])[3] == "insufficient points"
    assert fit_slope(ns, [0.3, 0.1, 0.0, 0.01])[3] == "ok (zero fractions dropped)"
    assert fit_slope(ns, [0.0] * 4)[0] is None


def test_ldp_report_csv(z2z3):
    nb = NeighborhoodSpec(equilibrium_approx(z2z3, ZERO, 3), default_dictionary(2), 0.2)
    r = ldp_preimage_scan(z2z3, ZERO, None, nb, [2, 3, 4])
    lines = r.to_csv().splitlines()
    assert lines[0] == "depth,fraction,log_fraction" and len(lines) == 4
    assert r.to_dict()["epsilon"] == 0.2


# -- inverse branches ----------------------------------------------------------

def test_branch_count_examples(z2, z2z3):
    U = RegionU(from_complex(1), 0.4)
    for m in (1, 2, 3, 4):
        rep = branch_count(z2, U, m, 1)
        assert rep.accepted and rep.gamma == 2 ** m and rep.undecided == 0
        assert rep.tau == 0 and rep.holds
    around_zero = branch_count(z2, RegionU(from_complex(0), 0.3), 2, 1)
    assert not around_zero.accepted and around_zero.holds is None
    assert around_zero.gamma == 0
    rep = branch_count(z2z3, RegionU(from_complex(2), 0.3), 2, 1)
    assert rep.accepted and rep.gamma == 25 and rep.holds
    fine = branch_count(z2z3, RegionU(from_complex(2), 0.3), 2, 2, K=256)
    assert fine.clear and fine.gamma == rep.gamma and fine.K == 256


def test_branch_count_validation(z2):
    with pytest.raises(ValueError):
        branch_count(z2, RegionU(from_complex(1), 0.4), 0, 1)
    with pytest.raises(ValueError):
        RegionU(from_complex(1), 2.5)
