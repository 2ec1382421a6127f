import math
from fractions import Fraction
from random import Random

import pytest

from recdyn import (
    ArcUnion,
    BallUnion,
    Circle,
    CompactSet,
    DoublingSystem,
    FamilySpec,
    FiniteSpace,
    FiniteSubset,
    FiniteSystem,
    HyperSystem,
    ReturnWindow,
    RotationSystem,
    StepFuzzySet,
    VietorisOpen,
    ZadehSystem,
    arc_probes,
    d_inf,
    ell_return_set,
    family_eval,
    fuzzy_rec_witness,
    hausdorff,
    hyper_apply,
    hyper_rec_witness,
    is_rec_system,
    iterate,
    point_recurrence,
    quasi_rigidity_search,
    return_set,
    singleton_probes,
    vietoris_contains,
    zadeh_apply,
)
from recdyn.contfrac import GOLDEN_THETA, best_return_times
from recdyn.fuzzy import fuzzy_to_hyper_witness
from conftest import random_finite_system
from oracles import ell_return_by_stepping, return_set_by_stepping

CYCLE3 = FiniteSystem(FiniteSpace(3), [1, 2, 0])
ABSORB = FiniteSystem(FiniteSpace(2), [1, 1])


class TestReturnWindow:
    def test_membership_bounds(self):
        with pytest.raises(ValueError):
            ReturnWindow(10, [0, 11])

    def test_certificate_verified_on_window(self):
        ReturnWindow(20, range(0, 21, 3), certificate=(0, 3))
        with pytest.raises(ValueError):
            ReturnWindow(20, [0, 3, 7], certificate=(0, 3))

    def test_run_length_encoding(self):
        w = ReturnWindow(10, [0, 1, 2, 5, 7, 8])
        assert w.runs() == [(0, 3), (5, 1), (7, 2)]


class TestReturnSets:
    def test_identity_full_window(self):
        ident = FiniteSystem(FiniteSpace(2), [0, 1])
        w = return_set(ident, FiniteSubset([0]), FiniteSubset([0]), 16)
        assert w.members == tuple(range(17))
        assert w.semantics == "exact"

    def test_three_cycle(self):
        w = return_set(CYCLE3, FiniteSubset([0]), FiniteSubset([0]), 30)
        assert set(w.members) == set(range(0, 31, 3))
        assert w.certificate == (0, 3)

    def test_wandering_point(self):
        w = return_set(ABSORB, FiniteSubset([0]), FiniteSubset([0]), 30)
        assert w.members == (0,)

    def test_matches_stepping_oracle(self, rng):
        for _ in range(100):
            sys = random_finite_system(rng)
            size = sys.space.size
            u = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            v = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            w = return_set(sys, u, v, 40)
            want = return_set_by_stepping(
                sys, [p for p in range(size) if u.contains(sys.space, p)],
                lambda x: v.contains(sys.space, x), 40)
            assert list(w.members) == want

    def test_ell_one_equals_plain_return(self, rng):
        for _ in range(50):
            sys = random_finite_system(rng)
            size = sys.space.size
            u = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            assert ell_return_set(sys, u, 1, 40).members == \
                return_set(sys, u, u, 40).members
        rot = RotationSystem(GOLDEN_THETA)
        probe = ArcUnion.around(0.25, 0.04)
        assert ell_return_set(rot, probe, 1, 200, 64).members == \
            return_set(rot, probe, probe, 200, 64).members

    def test_three_cycle_multiplicity(self):
        w = ell_return_set(CYCLE3, FiniteSubset([0]), 2, 30)
        assert set(w.members) == set(range(0, 31, 3))

    def test_multiplicity_monotone(self, rng):
        for _ in range(50):
            sys = random_finite_system(rng)
            size = sys.space.size
            u = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            windows = [ell_return_set(sys, u, ell, 40) for ell in (1, 2, 3)]
            for small, big in zip(windows[1:], windows):
                assert small.member_set() <= big.member_set()

    def test_matches_multiplicity_oracle(self, rng):
        for _ in range(30):
            sys = random_finite_system(rng, max_size=3)
            size = sys.space.size
            u = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            ell = rng.randrange(1, 3)
            got = ell_return_set(sys, u, ell, 20)
            assert list(got.members) == \
                ell_return_by_stepping(sys, sys.space, u, ell, 20)

    def test_certified_periodicity_against_recomputation(self, rng):
        # the certificate claims the tail repeats; re-derive it bare-handed
        for _ in range(50):
            sys = random_finite_system(rng)
            size = sys.space.size
            u = FiniteSubset(rng.sample(range(size),
                                        rng.randrange(1, size + 1)))
            w = ell_return_set(sys, u, 2, 60)
            p, q = w.certificate
            inside = w.member_set()
            for n in range(p, 61 - q):
                assert (n in inside) == (n + q in inside)

    def test_doubling_witnessed_evens(self):
        dbl = DoublingSystem()
        probe = ArcUnion.around(Fraction(1, 3), Fraction(1, 10))
        w = ell_return_set(dbl, probe, 2, 64, witness_budget=64)
        assert w.semantics == "witnessed"
        assert {n for n in range(2, 65, 2)} <= w.member_set()


class TestFamilyEval:
    def test_full_window_satisfies_everything(self):
        w = ReturnWindow(100, range(101), certificate=(0, 1))
        for spec in (FamilySpec.infinite_exact(), FamilySpec.cofinite_exact(),
                     FamilySpec.infinite_window(50), FamilySpec.thick_window(10),
                     FamilySpec.syndetic_window(1), FamilySpec.contains_ap(10)):
            assert family_eval(w, spec).holds

    def test_multiples_of_three(self):
        w = ReturnWindow(60, range(0, 61, 3), certificate=(0, 3))
        assert family_eval(w, FamilySpec.infinite_exact()).holds
        assert not family_eval(w, FamilySpec.cofinite_exact()).holds
        assert not family_eval(w, FamilySpec.thick_window(2)).holds

    def test_evens_are_syndetic_with_progressions(self):
        w = ReturnWindow(100, range(0, 101, 2))
        assert family_eval(w, FamilySpec.syndetic_window(2)).holds
        assert family_eval(w, FamilySpec.contains_ap(10)).holds

    def test_exact_variants_demand_certificates(self):
        w = ReturnWindow(100, range(0, 101, 2))
        with pytest.raises(ValueError):
            family_eval(w, FamilySpec.infinite_exact())

    def test_window_too_short_for_certificate(self):
        w = ReturnWindow(4, [0, 3], certificate=(0, 6))
        with pytest.raises(ValueError):
            family_eval(w, FamilySpec.infinite_exact())

    def test_upward_monotone_in_parameters(self, rng):
        # a verdict that holds keeps holding as the requirement relaxes
        for _ in range(200):
            horizon = 64
            members = sorted(rng.sample(range(horizon + 1),
                                        rng.randrange(1, horizon + 1)))
            w = ReturnWindow(horizon, members)
            for build in (FamilySpec.thick_window, FamilySpec.infinite_window,
                          FamilySpec.contains_ap):
                ok = [family_eval(w, build(k)).holds for k in range(1, 12)]
                assert all(a >= b for a, b in zip(ok, ok[1:]))
            ok = [family_eval(w, FamilySpec.syndetic_window(g)).holds
                  for g in range(1, 12)]
            assert all(b >= a for a, b in zip(ok, ok[1:]))

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValueError):
            FamilySpec.thick_window(0)
        with pytest.raises(ValueError):
            FamilySpec(FamilySpec.infinite_exact().kind, 3)


class TestSystemVerdicts:
    def test_identity_recurrent_over_any_probes(self):
        ident = FiniteSystem(FiniteSpace(3), [0, 1, 2])
        report = is_rec_system(ident, singleton_probes(ident.space), 2,
                               FamilySpec.infinite_exact(), 64)
        assert report.all_recurrent
        assert report.semantics == "exact"

    def test_absorber_fails_at_probe_zero(self):
        report = is_rec_system(ABSORB, singleton_probes(ABSORB.space), 1,
                               FamilySpec.infinite_exact(), 64)
        assert not report.all_recurrent
        assert report.failing() == ["{0}"]

    def test_golden_rotation_arc_probes(self):
        rot = RotationSystem(GOLDEN_THETA)
        report = is_rec_system(rot, arc_probes(12, 0.05), 3,
                               FamilySpec.infinite_window(5), 2000,
                               witness_budget=32)
        assert report.all_recurrent
        assert report.semantics == "witnessed"


class TestWitnesses:
    def test_vietoris_witness_on_cycle(self):
        v = VietorisOpen([FiniteSubset([0]), FiniteSubset([1])])
        k = hyper_rec_witness(CYCLE3, v, 3, 1)
        assert k is not None and k.points == (0, 1)

    def test_no_witness_for_absorber(self):
        assert hyper_rec_witness(
            ABSORB, VietorisOpen([FiniteSubset([0])]), 1, 1) is None

    def test_vietoris_single_open_point_witness(self):
        v = VietorisOpen([FiniteSubset([2])])
        k = hyper_rec_witness(CYCLE3, v, 3, 2)
        assert k is not None and k.points == (2,)

    def test_ball_witness_verified(self, rng):
        for _ in range(20):
            size = rng.randrange(2, 5)
            table = list(range(size))
            rng.shuffle(table)
            sys = FiniteSystem(FiniteSpace(size), table)
            x = rng.randrange(size)
            n = sys.orbit(x).period
            target = CompactSet(sys.space, [x])
            k = hyper_rec_witness(sys, (target, 0.5), n, 2)
            assert k is not None
            for j in range(3):
                assert hausdorff(target, hyper_apply(sys, k, j * n)) < 0.5

    def test_fuzzy_witness_identity(self):
        ident = FiniteSystem(FiniteSpace(2), [0, 1])
        chi = StepFuzzySet.characteristic(CompactSet(ident.space, [0]))
        v = fuzzy_rec_witness(ident, chi, 0.5, 7, 2)
        assert v == chi

    def test_fuzzy_witness_on_cycle(self):
        chi = StepFuzzySet.characteristic(CompactSet(CYCLE3.space, [0]))
        v = fuzzy_rec_witness(CYCLE3, chi, 0.5, 3, 2)
        assert v is not None
        assert fuzzy_to_hyper_witness(v).points == (0,)

    def test_fuzzy_witness_none_for_absorber(self):
        chi = StepFuzzySet.characteristic(CompactSet(ABSORB.space, [0]))
        assert fuzzy_rec_witness(ABSORB, chi, 0.5, 1, 1) is None

    def test_fuzzy_witness_golden_rotation_two_level(self):
        rot = RotationSystem(GOLDEN_THETA)
        c = rot.space
        u = StepFuzzySet(c, [0.5, 1],
                         [CompactSet(c, [0.0, 0.25]), CompactSet(c, [0.0])])
        v = fuzzy_rec_witness(rot, u, 0.2, 89, 2)
        assert v is not None
        for j in range(3):
            assert d_inf(u, zadeh_apply(rot, v, 89 * j)) < 0.2

    def test_extraction_inequality_chain(self, rng):
        # whenever the fuzzy orbit stays near a characteristic target, the
        # extracted top cut stays Hausdorff-near the target set
        for _ in range(30):
            size = rng.randrange(2, 5)
            table = list(range(size))
            rng.shuffle(table)
            sys = FiniteSystem(FiniteSpace(size), table)
            k = CompactSet(sys.space, [rng.randrange(size)])
            n = sys.orbit(k.points[0]).period
            chi = StepFuzzySet.characteristic(k)
            v = fuzzy_rec_witness(sys, chi, 0.5, n, 1)
            assert v is not None
            back = fuzzy_to_hyper_witness(v)
            for j in range(2):
                assert hausdorff(k, hyper_apply(sys, back, j * n)) < 0.5


class TestPointRecurrence:
    def test_fixed_point(self):
        fix = FiniteSystem(FiniteSpace(2), [0, 1])
        pr = point_recurrence(fix, 0, 0.5, 50)
        assert pr.window.members == tuple(range(51))
        assert pr.max_ap == 12

    def test_golden_rotation_fibonacci_returns(self):
        rot = RotationSystem(GOLDEN_THETA)
        pr = point_recurrence(rot, 0.0, 0.05, 1000)
        for q in (13, 21, 34, 55, 89):
            assert q in pr.window.member_set()
        assert 14 not in pr.window.member_set()

    def test_wandering_orbit(self):
        pr = point_recurrence(ABSORB, 0, 0.5, 50)
        assert pr.window.members == (0,)
        assert pr.max_ap == 0

    def test_hyper_and_fuzzy_layers(self):
        hyper = HyperSystem(CYCLE3)
        k = CompactSet(CYCLE3.space, [0, 1])
        pr = point_recurrence(hyper, k, 0.5, 30)
        assert set(pr.window.members) == set(range(0, 31, 3))
        zadeh = ZadehSystem(CYCLE3)
        chi = StepFuzzySet.characteristic(k)
        prf = point_recurrence(zadeh, chi, 0.5, 30)
        assert prf.window.members == pr.window.members


class TestQuasiRigidity:
    def test_identity_takes_every_time(self):
        ident = FiniteSystem(FiniteSpace(3), [0, 1, 2])
        qr = quasi_rigidity_search(ident, [0, 1, 2], [0.5, 0.25, 0.125], 100)
        assert qr.times == (1, 2, 3)
        assert qr.complete

    def test_permutation_multiples_of_order(self):
        perm = FiniteSystem(FiniteSpace(5), [1, 0, 3, 4, 2])  # order 6
        qr = quasi_rigidity_search(perm, list(range(5)),
                                   [0.5, 0.25, 0.125], 100)
        assert qr.times == (6, 12, 18)
        assert all(r == 0 for r in qr.residuals)

    def test_golden_rotation_matches_convergent_oracle(self):
        rot = RotationSystem(GOLDEN_THETA)
        schedule = [0.1 * 2.0 ** -k for k in range(8)]
        qr = quasi_rigidity_search(rot, rot.space.grid(20), schedule, 10_000)
        assert list(qr.times) == best_return_times(GOLDEN_THETA, schedule,
                                                   10_000)

    def test_horizon_exhaustion_is_reported(self):
        rot = RotationSystem(GOLDEN_THETA)
        qr = quasi_rigidity_search(rot, [0.0], [0.1, 1e-7], 100)
        assert qr.times == (5,)
        assert qr.unserved_eps == (1e-7,)

    def test_schedule_validation(self):
        ident = FiniteSystem(FiniteSpace(2), [0, 1])
        with pytest.raises(ValueError):
            quasi_rigidity_search(ident, [0], [0.1, 0.1], 10)
        with pytest.raises(ValueError):
            quasi_rigidity_search(ident, [], [0.1], 10)
