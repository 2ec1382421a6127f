from fractions import Fraction
from itertools import product as cartesian
from random import Random

import pytest

from recdyn import (
    Circle,
    CompactSet,
    FiniteSpace,
    FiniteSubset,
    FiniteSystem,
    HyperSystem,
    RotationSystem,
    VietorisOpen,
    enumerate_compacts,
    hausdorff,
    hausdorff_ball_contains,
    hyper_apply,
    iterate,
    n_fold,
    product_embed,
    vietoris_contains,
)
from recdyn.hyperspace import directed_hausdorff
from conftest import random_compact, random_finite_system, random_space
from oracles import brute_hausdorff


class TestHausdorff:
    def test_identity(self, rng):
        for _ in range(20):
            space = random_space(rng)
            k = random_compact(rng, space)
            assert hausdorff(k, k) == 0

    def test_singletons_collapse_to_distance(self, rng):
        space = Circle()
        for _ in range(20):
            x, y = rng.random(), rng.random()
            got = hausdorff(CompactSet(space, [x]), CompactSet(space, [y]))
            assert got == pytest.approx(space.dist(x, y), abs=1e-12)

    def test_circle_pair(self):
        c = Circle()
        a = CompactSet(c, [0.0, 0.5])
        b = CompactSet(c, [0.25])
        assert hausdorff(a, b) == pytest.approx(0.25, abs=1e-12)

    def test_matches_brute_force(self, rng):
        for _ in range(300):
            space = random_space(rng)
            a, b = random_compact(rng, space), random_compact(rng, space)
            assert hausdorff(a, b) == pytest.approx(
                brute_hausdorff(space, a.points, b.points), abs=1e-12)

    def test_mismatched_spaces_rejected(self):
        a = CompactSet(Circle(), [0.1])
        b = CompactSet(FiniteSpace(2), [0])
        with pytest.raises(ValueError):
            hausdorff(a, b)

    def test_metric_on_enumerated_subsets(self):
        # exhaustive triangle inequality over all non-empty subsets, n <= 4
        space = FiniteSpace(4, [[0, 0.3, 0.7, 1.0],
                                [0.3, 0, 0.5, 0.8],
                                [0.7, 0.5, 0, 0.4],
                                [1.0, 0.8, 0.4, 0]])
        sets = enumerate_compacts(space)
        for a in sets:
            for b in sets:
                assert (hausdorff(a, b) == 0) == (a == b)
                for c in sets:
                    assert hausdorff(a, c) <= \
                        hausdorff(a, b) + hausdorff(b, c) + 1e-12

    def test_union_bound(self, rng):
        for _ in range(2000):
            space = random_space(rng)
            a, b, c, d = (random_compact(rng, space) for _ in range(4))
            assert hausdorff(a.union(b), c.union(d)) <= \
                max(hausdorff(a, c), hausdorff(b, d)) + 1e-9

    def test_subset_monotonicity(self, rng):
        # when a is contained in b, the gap is the directed distance back
        for _ in range(100):
            space = random_space(rng)
            b = random_compact(rng, space, 5)
            pick = rng.randrange(1, len(b.points) + 1)
            a = CompactSet(space, rng.sample(list(b.points), pick))
            assert hausdorff(a, b) == pytest.approx(
                directed_hausdorff(b, a), abs=1e-12)


class TestCompactSets:
    def test_dedup_under_tolerance(self):
        c = Circle()
        k = CompactSet(c, [0.1, 0.1 + 1e-12, 0.5])
        assert len(k) == 2

    def test_dedup_wraparound(self):
        c = Circle()
        k = CompactSet(c, [0.0, 1.0 - 1e-12])
        assert len(k) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            CompactSet(Circle(), [])

    def test_canonical_ordering(self):
        k = CompactSet(Circle(), [0.5, 0.2, 0.9])
        assert k.points == (0.2, 0.5, 0.9)


class TestHyperApply:
    def test_identity_map(self, rng):
        size = 4
        ident = FiniteSystem(FiniteSpace(size), list(range(size)))
        k = random_compact(rng, ident.space)
        assert hyper_apply(ident, k) == k

    def test_image_collapse(self):
        fm = FiniteSystem(FiniteSpace(2), [1, 1])
        k = CompactSet(fm.space, [0, 1])
        assert hyper_apply(fm, k).points == (1,)

    def test_rotation_componentwise(self):
        rot = RotationSystem(0.25)
        k = CompactSet(rot.space, [0.0, 0.5])
        assert hyper_apply(rot, k).points == (0.25, 0.75)

    def test_iterated_application_functorial(self, rng):
        for _ in range(50):
            sys = random_finite_system(rng)
            k = random_compact(rng, sys.space)
            n = rng.randrange(8)
            stepped = k
            for _ in range(n):
                stepped = hyper_apply(sys, stepped)
            assert stepped == hyper_apply(sys, k, n)

    def test_hyper_system_orbit_certificates(self, rng):
        sys = random_finite_system(rng)
        hyper = HyperSystem(sys)
        k = random_compact(rng, sys.space)
        orbit = hyper.orbit(k)
        assert orbit.preperiod is not None
        for m in range(40):
            assert orbit.at(m) == hyper_apply(sys, k, m)


class TestVietoris:
    def setup_method(self):
        self.space = FiniteSpace(3)

    def test_single_open_contains_singleton(self):
        v = VietorisOpen([FiniteSubset([0])])
        assert vietoris_contains(v, CompactSet(self.space, [0]))

    def test_cover_failure(self):
        v = VietorisOpen([FiniteSubset([0])])
        assert not vietoris_contains(v, CompactSet(self.space, [0, 1]))

    def test_meets_all_failure(self):
        v = VietorisOpen([FiniteSubset([0]), FiniteSubset([1])])
        assert not vietoris_contains(v, CompactSet(self.space, [0]))

    def test_ball_membership(self):
        c = Circle()
        k0 = CompactSet(c, [0.0])
        k25 = CompactSet(c, [0.25])
        assert hausdorff_ball_contains(k0, 0.3, k25)
        assert not hausdorff_ball_contains(k0, 0.2, k25)
        assert hausdorff_ball_contains(k0, 0.001, k0)
        with pytest.raises(ValueError):
            hausdorff_ball_contains(k0, 0, k0)


class TestProductEmbedding:
    def test_singleton(self):
        c = Circle()
        out = product_embed([CompactSet(c, [0.25])])
        assert out.points == ((0.25,),)

    def test_two_factor(self):
        fs = FiniteSpace(3)
        out = product_embed([CompactSet(fs, [0, 1]), CompactSet(fs, [2])])
        assert out.points == ((0, 2), (1, 2))

    def test_cardinality_and_injectivity(self):
        # over every pair of subsets of a 3-point space
        fs = FiniteSpace(3)
        seen = {}
        for a in enumerate_compacts(fs):
            for b in enumerate_compacts(fs):
                key = product_embed([a, b]).points
                assert len(key) == len(a) * len(b)
                assert key not in seen
                seen[key] = (a, b)

    def test_commutes_with_coordinatewise_images(self, rng):
        # brute force over all subset pairs of a 3-point space
        for _ in range(10):
            sys = random_finite_system(rng, max_size=3)
            if sys.space.size < 2:
                continue
            prod = n_fold(sys, 2)
            for a in enumerate_compacts(sys.space):
                for b in enumerate_compacts(sys.space):
                    lhs = product_embed([hyper_apply(sys, a),
                                         hyper_apply(sys, b)])
                    rhs = hyper_apply(prod, product_embed([a, b]))
                    assert lhs == rhs

    def test_empty_factor_list_rejected(self):
        with pytest.raises(ValueError):
            product_embed([])


class TestEnumeration:
    def test_counts(self):
        assert len(enumerate_compacts(FiniteSpace(1))) == 1
        assert len(enumerate_compacts(FiniteSpace(2))) == 3
        assert len(enumerate_compacts(FiniteSpace(4))) == 15

    def test_all_distinct(self):
        sets = enumerate_compacts(FiniteSpace(4))
        assert len({k.points for k in sets}) == 15

    def test_bound_enforced(self):
        with pytest.raises(ValueError):
            enumerate_compacts(FiniteSpace(6))
        assert len(enumerate_compacts(FiniteSpace(6), bound=6)) == 63
