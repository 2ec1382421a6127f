import math
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recdyn import (
    TOL,
    ArcUnion,
    BallUnion,
    Circle,
    DoublingSystem,
    FiniteSpace,
    FiniteSubset,
    FiniteSystem,
    NStepSystem,
    ProductBox,
    ProductSpace,
    RotationSystem,
    dist,
    iterate,
    n_fold,
    open_contains,
    sample_points,
)
from conftest import random_finite_system, random_space


class TestMetrics:
    def test_circle_wraparound(self):
        c = Circle()
        assert abs(c.dist(0.1, 0.9) - 0.2) < 1e-12

    def test_identity_distance_zero(self):
        c = Circle()
        assert c.dist(0.37, 0.37) == 0
        assert FiniteSpace(3).dist(1, 1) == 0

    def test_matrix_lookup(self):
        fs = FiniteSpace(2, [[0, 1], [1, 0]])
        assert fs.dist(0, 1) == 1

    def test_finite_space_rejects_bad_matrices(self):
        with pytest.raises(ValueError):
            FiniteSpace(2, [[0, 1], [2, 0]])          # asymmetric
        with pytest.raises(ValueError):
            FiniteSpace(2, [[0.5, 1], [1, 0]])        # nonzero diagonal
        with pytest.raises(ValueError):
            FiniteSpace(3, [[0, 1, 5], [1, 0, 1], [5, 1, 0]])  # triangle

    def test_finite_space_index_errors(self):
        fs = FiniteSpace(2)
        with pytest.raises(IndexError):
            fs.dist(0, 5)
        with pytest.raises(ValueError):
            fs.dist(0, 1.5)

    @given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True),
           st.floats(0, 1, exclude_max=True))
    @settings(max_examples=200)
    def test_circle_metric_axioms(self, x, y, z):
        c = Circle()
        assert c.dist(x, y) >= 0
        assert abs(c.dist(x, y) - c.dist(y, x)) < 1e-12
        assert c.dist(x, z) <= c.dist(x, y) + c.dist(y, z) + 1e-12
        assert c.dist(x, y) <= 0.5 + 1e-12

    def test_metric_axioms_random_spaces(self, rng):
        for _ in range(200):
            space = random_space(rng)
            pts = [space.random_point(rng) for _ in range(3)]
            x, y, z = pts
            assert space.dist(x, y) >= 0
            assert abs(space.dist(x, y) - space.dist(y, x)) < 1e-12
            assert space.dist(x, z) <= space.dist(x, y) + space.dist(y, z) + TOL

    def test_finite_metric_axioms_exhaustive(self, rng):
        from recdyn.oracle import random_finite_metric
        for _ in range(20):
            n = rng.randrange(2, 6)
            space = FiniteSpace(n, random_finite_metric(rng, n))
            for i in range(n):
                assert space.dist(i, i) == 0
                for j in range(n):
                    for k in range(n):
                        assert space.dist(i, j) <= \
                            space.dist(i, k) + space.dist(k, j) + TOL

    def test_product_distance_is_max(self, rng):
        c = Circle()
        fs = FiniteSpace(3)
        prod = ProductSpace([c, fs])
        for _ in range(200):
            x = (rng.random(), rng.randrange(3))
            y = (rng.random(), rng.randrange(3))
            assert prod.dist(x, y) == max(c.dist(x[0], y[0]),
                                          fs.dist(x[1], y[1]))


class TestIteration:
    def test_rotation(self):
        rot = RotationSystem(0.25)
        assert abs(iterate(rot, 0.0, 3) - 0.75) < 1e-12

    def test_doubling_two_cycle_exact(self):
        dbl = DoublingSystem()
        assert iterate(dbl, Fraction(1, 3), 2) == Fraction(1, 3)
        assert iterate(dbl, Fraction(1, 3), 101) == Fraction(2, 3)

    def test_doubling_floats_become_exact_rationals(self):
        dbl = DoublingSystem()
        out = iterate(dbl, 0.1, 60)
        assert out == 0  # binary fractions shift out

    def test_absorbing_map(self):
        fm = FiniteSystem(FiniteSpace(2), [1, 1])
        assert iterate(fm, 0, 5) == 1

    def test_iterate_additivity(self, rng):
        systems = [RotationSystem(0.3137), DoublingSystem(),
                   random_finite_system(rng)]
        for sys in systems:
            for _ in range(30):
                if isinstance(sys, FiniteSystem):
                    x = sys.space.random_point(rng)
                elif isinstance(sys, DoublingSystem):
                    x = Fraction(rng.randrange(100), 101)
                else:
                    x = rng.random()
                a, b = rng.randrange(64), rng.randrange(64)
                assert iterate(sys, iterate(sys, x, a), b) == \
                    pytest.approx(iterate(sys, x, a + b), abs=1e-9)

    def test_iterate_zero_is_identity(self, rng):
        sys = random_finite_system(rng)
        for x in sys.space.points():
            assert iterate(sys, x, 0) == x

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            iterate(RotationSystem(0.1), 0.0, -1)


class TestProducts:
    def test_single_factor_behaves_like_base(self, rng):
        sys = random_finite_system(rng)
        lifted = n_fold(sys, 1)
        for x in sys.space.points():
            assert iterate(lifted, (x,), 5) == (iterate(sys, x, 5),)

    def test_componentwise_action(self):
        p2 = n_fold(RotationSystem(0.25), 2)
        assert iterate(p2, (0.0, 0.0), 1) == (0.25, 0.25)

    def test_zero_arity_rejected(self):
        with pytest.raises(ValueError):
            n_fold(RotationSystem(0.25), 0)

    def test_iterated_products_flatten(self, rng):
        # the product of products acts exactly like the flat product
        for _ in range(20):
            sys = random_finite_system(rng, max_size=3)
            n, m = rng.randrange(1, 3), rng.randrange(1, 3)
            nested = n_fold(n_fold(sys, n), m)
            flat = n_fold(sys, n * m)
            pts = [sys.space.random_point(rng) for _ in range(n * m)]
            nested_pt = tuple(tuple(pts[i * n:(i + 1) * n]) for i in range(m))
            k = rng.randrange(16)
            got = iterate(nested, nested_pt, k)
            want = iterate(flat, tuple(pts), k)
            assert tuple(c for block in got for c in block) == want

    def test_nstep_system_matches_iteration(self, rng):
        sys = random_finite_system(rng)
        n = rng.randrange(1, 8)
        stepped = NStepSystem(sys, n)
        for x in sys.space.points():
            assert iterate(stepped, x, 3) == iterate(sys, x, 3 * n)


class TestOpenSets:
    def test_wrapping_arc(self):
        c = Circle()
        arc = ArcUnion([(0.9, 0.1)])
        assert open_contains(c, arc, 0.0)
        assert not open_contains(c, arc, 0.5)
        assert not open_contains(c, arc, 0.9)  # endpoints excluded

    def test_finite_subset(self):
        fs = FiniteSpace(3)
        u = FiniteSubset([0, 2])
        assert not open_contains(fs, u, 1)
        assert open_contains(fs, u, 2)

    def test_ball_boundary_excluded(self):
        c = Circle()
        ball = BallUnion([(0.5, 0.1)])
        assert not open_contains(c, ball, 0.6)
        assert open_contains(c, ball, 0.55)

    def test_product_box(self):
        prod = ProductSpace([Circle(), FiniteSpace(2)])
        box = ProductBox([ArcUnion([(0.0, 0.5)]), FiniteSubset([1])])
        assert open_contains(prod, box, (0.25, 1))
        assert not open_contains(prod, box, (0.25, 0))

    def test_empty_declarations_rejected(self):
        with pytest.raises(ValueError):
            FiniteSubset([])
        with pytest.raises(ValueError):
            ArcUnion([(0.3, 0.3)])
        with pytest.raises(ValueError):
            BallUnion([(0.5, 0)])

    def test_samples_lie_inside(self, rng):
        c = Circle()
        for u in (ArcUnion([(0.9, 0.1), (0.4, 0.6)]),
                  BallUnion([(0.25, 0.05)])):
            for x in sample_points(c, u, 64, rng):
                assert open_contains(c, u, x)
        fs = FiniteSpace(4)
        assert sample_points(fs, FiniteSubset([1, 3]), 10, rng) == [1, 3]

    def test_arc_sample_includes_exact_midpoint(self, rng):
        arc = ArcUnion.around(Fraction(1, 3), Fraction(1, 64))
        pts = sample_points(Circle(), arc, 32, rng)
        assert Fraction(1, 3) in pts
