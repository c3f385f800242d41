import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import Z2, fam_of, pt
from skewdyn import sphere
from skewdyn.measures import CONSTANT
from skewdyn.rational import MapFamily, RationalMap, Poly
from skewdyn.skew import (BudgetExceeded, PointX, RegionU, apply_T, check_A1,
                          critical_values_up_to, default_base, derivative_Tm,
                          enumerate_preimages, ergodic_sum, iterate_T, julia_cloud,
                          julia_sample, near_critical_values, periodic_points,
                          periodicity_residual, point_distance, sample_inverse_orbit,
                          sample_paths)
from skewdyn.sphere import approx_eq, from_complex, spherical_distance
from skewdyn.symbolic import Cylinder, Word
from skewdyn.thermo import Potential


def zval(p):
    return p.z.to_complex()


def test_apply_T_examples(z2z3):
    q = apply_T(z2z3, pt("1 | 2", 2))
    assert q.word == Word.parse("| 2") and zval(q) == pytest.approx(4)
    q = apply_T(z2z3, pt("| 2", 2))
    assert q.word == Word.parse("| 2") and zval(q) == pytest.approx(8)
    fam = MapFamily((RationalMap(Poly([1, 0, 1]), Poly([0, 1])),))
    assert apply_T(fam, pt("| 1", 0)).z.is_infinity


def test_point_distance_examples():
    p = pt("1 | 2", 0.5)
    assert point_distance(p, p) == 0
    assert point_distance(pt("| 1", 0), pt("| 1", "inf")) == pytest.approx(2)
    assert point_distance(pt("| 1", 3), pt("| 2", 3)) == 0.5


def test_ergodic_sum_examples(z2z3):
    p = pt("1 2 | 1 2 2", 0.7 + 0.1j)
    assert ergodic_sum(z2z3, CONSTANT, p, 7) == pytest.approx(7)
    assert ergodic_sum(z2z3, Potential(), p, 5) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.floats(0, 2 * math.pi), st.floats(0.5, 1.5))
def test_ergodic_cocycle(n, m, th, r):
    fam = fam_of(Z2, [-0.3, 0, 1])
    f = Potential(a=0.7, b=-0.2, cylinders=((Cylinder((1, 2)), 0.4),))
    p = PointX(Word.parse("2 1 | 1 2 2"), from_complex(r * complex(math.cos(th), math.sin(th))))
    lhs = ergodic_sum(fam, f, p, n + m)
    rhs = ergodic_sum(fam, f, p, n) + ergodic_sum(fam, f, iterate_T(fam, p, n), m)
    assert abs(lhs - rhs) < 1e-10


def test_derivative_examples(z2, z2z3):
    assert derivative_Tm(z2, pt("| 1", 1), 1) == pytest.approx(2)
    assert derivative_Tm(z2, pt("| 1", 0), 3) == 0
    d = derivative_Tm(z2z3, pt("1 | 2", 1), 2)
    h = 1e-6
    g = lambda z: (z ** 2) ** 3
    fd = abs((g(1 + h) - g(1 - h)) / (2 * h))
    assert d == pytest.approx(6, rel=1e-12) and abs(fd - d) < 1e-6


def test_derivative_cocycle(rng):
    fam = fam_of(Z2, [0.1j, 0, 1])
    for _ in range(10):
        z = complex(*rng.normal(size=2))
        w = Word(tuple(rng.integers(1, 3, size=4)), (1, 2))
        p = PointX(w, from_complex(z))
        n, m = 2, 3
        lhs = derivative_Tm(fam, p, n + m)
        rhs = derivative_Tm(fam, iterate_T(fam, p, n), m) * derivative_Tm(fam, p, n)
        assert lhs == pytest.approx(rhs, rel=1e-6)


def test_derivative_in_charts():
    fam = MapFamily((RationalMap(Poly([2]), Poly([0, 0, 1])),))     # z -> 2/z^2
    # the cycle 0 <-> inf is super-attracting
    assert derivative_Tm(fam, pt("| 1", 0), 2) == pytest.approx(0, abs=1e-12)
    # 1.3 -> 1.18 -> 1.43: both ends have |z| > 1, so the 1/z chart is used
    R2 = lambda z: 2 / (2 / z ** 2) ** 2
    g = lambda u: 1 / R2(1 / u)
    u0, h = 1 / 1.3, 1e-6
    fd = abs((g(u0 + h) - g(u0 - h)) / (2 * h))
    assert derivative_Tm(fam, pt("| 1", 1.3), 2) == pytest.approx(fd, rel=1e-6)


def test_enumerate_examples(z2, z2z3):
    base = pt("| 1", 1)
    tree = enumerate_preimages(z2z3, base, 2)
    assert tree.leaf_count == 25
    tree = enumerate_preimages(z2, base, 2)
    leaves = sorted(np.round(sphere.pairs_to_complex(tree.levels[2].z), 12), key=lambda c: (c.real, c.imag))
    assert np.allclose(leaves, sorted([1, -1, 1j, -1j], key=lambda c: (c.real, c.imag)))
    with pytest.raises(BudgetExceeded):
        enumerate_preimages(z2z3, base, 9, budget=10**6)


def test_tree_children_map_to_parents(z2z3):
    base = default_base(z2z3)
    tree = enumerate_preimages(z2z3, base, 4)
    for k in range(1, tree.depth + 1):
        batch = tree.level_batch(k)
        parents = tree.levels[k - 1].z[tree.levels[k].parent]
        from skewdyn.skew import step_pairs
        img = step_pairs(z2z3, batch.words.leading(1)[:, 0], batch.z)
        assert np.max(sphere.chordal(img, parents)) < 1e-8
    # leaves carry prepend((v_n..v_1), base word)
    leaf = tree.leaves().point(7)
    back = iterate_T(z2z3, leaf, 4)
    assert back.word == base.word and spherical_distance(back.z, base.z) < 1e-8


def test_leaf_count_is_power(z2z3):
    for n in range(1, 7):
        assert enumerate_preimages(z2z3, pt("| 2", 0.5), n).leaf_count == 5 ** n


def test_sample_inverse_orbit(z2, z2z3):
    path = sample_inverse_orbit(z2, pt("| 1", 1j), 30, seed=4)
    assert all(p.word.letter(0) == 1 for p in path)
    base = pt("| 1", 0.3 + 0.4j)
    path = sample_inverse_orbit(z2z3, base, 40, seed=9)
    prev = base
    for p in path:
        q = apply_T(z2z3, p)
        assert q.word == prev.word and spherical_distance(q.z, prev.z) < 1e-8
        prev = p


def test_letter_frequency_binomial(z2z3):
    tree = sample_paths(z2z3, default_base(z2z3), 10, 10_000, seed=1)
    letters = np.concatenate([tree.levels[k].letter for k in range(1, 11)])
    assert letters.size == 100_000
    assert abs(np.mean(letters == 2) - 0.6) < 0.01


def test_sampling_deterministic(z2z3):
    base = default_base(z2z3)
    a = sample_paths(z2z3, base, 6, 500, seed=3)
    b = sample_paths(z2z3, base, 6, 500, seed=3)
    c = sample_paths(z2z3, base, 6, 500, seed=4)
    assert np.array_equal(a.levels[-1].z, b.levels[-1].z)
    assert not np.array_equal(a.levels[-1].z, c.levels[-1].z)
    # path i does not depend on how many paths are drawn
    d = sample_paths(z2z3, base, 6, 200, seed=3)
    assert np.array_equal(d.levels[-1].z, a.levels[-1].z[:200])


def test_julia_sample_circle(z2):
    pts = julia_sample(z2, pt("| 1", 1), burn_in=50, count=500, seed=0)
    assert max(abs(abs(p.z.to_complex()) - 1) for p in pts) < 1e-6
    both = fam_of(Z2, Z2)
    cloud = julia_cloud(both, pt("| 1", 1j), 50, 500, 2)
    assert np.max(np.abs(np.abs(sphere.pairs_to_complex(cloud.z)) - 1)) < 1e-6
    assert julia_sample(z2, pt("| 1", 1), count=0) == []


def test_julia_cloud_points_are_backward_orbit(z2z3):
    base = default_base(z2z3)
    cloud = julia_cloud(z2z3, base, 5, 20, seed=11)
    pts = cloud.points()
    for a, b in zip(pts[1:], pts[:-1]):
        q = apply_T(z2z3, a)
        assert q.word == b.word and spherical_distance(q.z, b.z) < 1e-8


def as_set(h):
    vals = [complex(np.round(c, 9)) if np.isfinite(c) else complex(np.inf, 0)
            for c in sphere.pairs_to_complex(h)]
    return sorted(vals, key=lambda c: (c.real, c.imag))


def test_critical_values_examples(z2):
    cd = critical_values_up_to(z2, 2)
    assert as_set(cd.values()) == as_set(sphere.pairs_from_complex([0, np.inf]))
    f = fam_of([1, 0, 1])
    assert as_set(critical_values_up_to(f, 1).values()) == as_set(
        sphere.pairs_from_complex([1, np.inf]))
    assert as_set(critical_values_up_to(f, 2).values()) == as_set(
        sphere.pairs_from_complex([1, 2, np.inf]))
    assert len(cd.points[0]) <= 2 * 2 - 2


def test_region_boundary_and_tau(z2):
    U = RegionU(from_complex(1), 0.4)
    b = U.boundary(64)
    assert np.allclose(sphere.chordal(b, from_complex(1).pair()), 0.4)
    assert critical_values_up_to(z2, 1).tau(U) == 0
    assert critical_values_up_to(z2, 1).tau(RegionU(from_complex(0.1), 0.5)) == 1
    with pytest.raises(ValueError):
        RegionU(from_complex(0), 2.0)


def test_near_critical_values(z2):
    assert near_critical_values(z2, from_complex(0))
    assert not near_critical_values(z2, from_complex(1))


def test_A1_examples(z2):
    cloud = julia_cloud(z2, pt("| 1", 1), 50, 2000, 0)
    rep = check_A1(z2, cloud, 4)
    assert rep["passed"] and rep["violations"] == [] and rep["near"] > 0
    assert check_A1(z2, [], 3)["passed"]


def test_A1_flags_superattracting_point(z2):
    # a sample sitting on the super-attracting fixed point 0
    rep = check_A1(z2, [pt("| 1", 0)], 2)
    assert not rep["passed"]
    assert {v["period"] for v in rep["violations"]} == {1, 2}


def test_periodic_points_counts_and_residual():
    fam = fam_of(Z2, Z2)
    for m in (1, 2, 3):
        batch = periodic_points(fam, m)
        assert len(batch) == 4 ** m + 2 ** m
        assert np.max(periodicity_residual(fam, batch, m)) < 1e-8


def test_default_base_is_repelling(z2z3):
    b = default_base(z2z3)
    assert b.word == Word.parse("| 1")
    assert derivative_Tm(z2z3, b, 1) > 1
    assert approx_eq(apply_T(z2z3, b).z, b.z, 1e-12)
