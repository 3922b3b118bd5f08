import random

import pytest

from desctl import fms
from desctl.automata import Alphabet, Automaton, is_sublanguage
from desctl.compose import parallel
from desctl.control import (AlphabetError, SupervisorSet, check_controllability,
                            check_nonconflicting, closed_loop, supcon)
from desctl.espec import equivalent
from oracles import (enumerate_violations, nonblocking_oracle,
                     random_automaton)


@pytest.fixture(scope="module")
def plant():
    return fms.build_total()


@pytest.fixture(scope="module")
def plant_alt():
    return fms.build_total("sec2")


@pytest.fixture(scope="module")
def sups():
    return SupervisorSet((fms.build_supervisor(1), fms.build_supervisor(2)))


def toy_plant():
    """u (uncontrollable) then b, cyclically."""
    alph = Alphabet((("u", False), ("b", True)))
    return Automaton("toy", alph, ("t0", "t1"),
                     {("t0", "u"): "t1", ("t1", "b"): "t0"}, "t0", ("t0",))


class TestClosedLoop:
    def test_no_supervisors_is_the_plant(self, plant):
        assert closed_loop(plant, SupervisorSet(())) is plant

    def test_self_supervision_identity(self):
        c1 = fms.build("C1")
        eq, _ = equivalent(closed_loop(c1, [c1]), c1)
        assert eq

    def test_initial_enabled_events(self, plant, sups):
        loop = closed_loop(plant, sups)
        assert loop.active(loop.initial) == (
            "C1.load", "C2.load", "R.pick5", "R.pick6", "R.pick7")

    def test_foreign_event_rejected(self, plant):
        alien = Automaton("alien", Alphabet((("zz.zz", True),)), ("q",),
                          {}, "q", ("q",))
        with pytest.raises(AlphabetError):
            closed_loop(plant, [alien])


class TestControllability:
    def test_plant_supervised_by_itself(self, plant):
        report = check_controllability(plant, plant)
        assert report.controllable and report.counterexample is None

    def test_supervisors_controllable_under_default_partition(self, plant):
        for cat in (1, 2):
            report = check_controllability(plant, fms.build_supervisor(cat))
            assert report.controllable

    def test_supervisors_fail_under_alternate_partition(self, plant_alt):
        # Both supervisors declare C3.load but disable it at their initial
        # state, and the alternate partition makes it uncontrollable; the
        # violation is reachable by the empty string.
        for cat in (1, 2):
            sup = fms.build_supervisor(cat, "sec2")
            report = check_controllability(plant_alt, sup)
            assert not report.controllable
            assert report.counterexample == ((), "C3.load")

    def test_counterexample_matches_enumeration_oracle(self, plant_alt):
        for cat in (1, 2):
            sup = fms.build_supervisor(cat, "sec2")
            violations = enumerate_violations(plant_alt, sup, 3)
            assert violations
            shortest = min(violations,
                           key=lambda v: (len(v[0]),
                                          plant_alt.alphabet.events.index(v[1])))
            report = check_controllability(plant_alt, sup)
            assert report.counterexample == shortest

    def test_counterexample_is_replayable(self, plant_alt):
        sup = fms.build_supervisor(1, "sec2")
        s, e = check_controllability(plant_alt, sup).counterexample
        qp, qs = plant_alt.initial, sup.initial
        for x in s:
            qp = plant_alt.step(qp, x)
            qs = sup.step(qs, x) if x in sup.alphabet else qs
            assert qp is not None and qs is not None
        assert not plant_alt.alphabet.is_controllable(e)
        assert plant_alt.step(qp, e) is not None
        assert e in sup.alphabet and sup.step(qs, e) is None

    def test_random_instances_agree_with_oracle(self):
        rng = random.Random(40)
        for _ in range(40):
            plant = random_automaton(rng, ["a", "b", "u"], name="p",
                                     uncontrollable=["u"])
            sup = random_automaton(rng, ["a", "u"], name="s",
                                   uncontrollable=["u"])
            report = check_controllability(plant, sup)
            violations = enumerate_violations(plant, sup, 6)
            if report.controllable:
                assert not violations
            else:
                assert violations
                s, e = report.counterexample
                assert len(s) <= min(len(v[0]) for v in violations)

    def test_alphabet_violation(self):
        sup = Automaton("s", Alphabet((("x", True),)), ("q",), {}, "q", ("q",))
        with pytest.raises(AlphabetError):
            check_controllability(toy_plant(), sup)


class TestNonconflicting:
    def test_empty_supervisor_set_on_trim_plant(self, plant):
        assert check_nonconflicting(plant, SupervisorSet(())).nonconflicting

    def test_single_supervisor_agrees_with_monolithic_trim(self, plant):
        s1 = fms.build_supervisor(1)
        report = check_nonconflicting(plant, [s1])
        loop = closed_loop(plant, [s1])
        assert report.nonconflicting == (len(loop.trim().states) == len(loop.states))

    def test_both_supervisors_agree_with_independent_oracle(self, plant, sups):
        report = check_nonconflicting(plant, sups)
        verdict, witness = nonblocking_oracle(plant, list(sups), 10 ** 6)
        assert report.nonconflicting == verdict
        if not verdict:
            assert report.counterexample == witness

    def test_conflicting_pair_detected(self):
        # Two supervisors that each insist on a different first event.
        alph = Alphabet((("a", True), ("b", True)))
        plant = Automaton("p", alph, ("p0", "p1"),
                          {("p0", "a"): "p1", ("p0", "b"): "p1"}, "p0", ("p1",))
        want_a = Automaton("wa", Alphabet((("a", True), ("b", True))), ("w0", "w1"),
                           {("w0", "a"): "w1"}, "w0", ("w1",))
        want_b = Automaton("wb", Alphabet((("a", True), ("b", True))), ("v0", "v1"),
                           {("v0", "b"): "v1"}, "v0", ("v1",))
        report = check_nonconflicting(plant, [want_a, want_b])
        assert not report.nonconflicting
        assert report.counterexample == ()
        verdict, witness = nonblocking_oracle(plant, [want_a, want_b], 100)
        assert not verdict and witness == ()

    def test_random_instances_agree_with_oracle(self):
        rng = random.Random(41)
        for _ in range(30):
            plant = random_automaton(rng, ["a", "b", "c"], name="p").trim()
            if plant.is_empty:
                continue
            sup = random_automaton(rng, ["a", "b"], name="s")
            report = check_nonconflicting(plant, [sup])
            verdict, _ = nonblocking_oracle(plant, [sup], 10 ** 6)
            assert report.nonconflicting == verdict


class TestSupcon:
    def test_full_behavior_is_supremal(self, plant):
        result = supcon(plant, plant)
        eq, _ = equivalent(result, plant)
        assert eq

    def test_uncontrollable_root_violation_empties_the_result(self):
        plant = toy_plant()
        no_u = Automaton("spec", plant.alphabet, ("k0",), {}, "k0", ("k0",))
        assert supcon(plant, no_u).is_empty

    def test_default_partition_supervisor_is_a_fixpoint(self, plant):
        s1 = fms.build_supervisor(1)
        result = supcon(plant, s1)
        loop = closed_loop(plant, [s1])
        if len(loop.trim().states) == len(loop.states):
            eq, _ = equivalent(result, loop)
            assert eq

    def test_alternate_partition_collapses_to_empty(self, plant_alt):
        # C3.load is uncontrollable here and disabled at the initial product
        # state, so the deletion fixpoint removes everything.
        result = supcon(plant_alt, fms.build_supervisor(1, "sec2"))
        assert result.is_empty

    def test_post_conditions_on_the_corpus(self, plant):
        for cat in (1, 2):
            sup = fms.build_supervisor(cat)
            result = supcon(plant, sup)
            assert check_controllability(plant, result).controllable
            ok, _ = is_sublanguage(result, parallel([plant, sup], delimiter="/"))
            assert ok
            assert result.trim().states == result.states

    def test_post_conditions_on_random_instances(self):
        rng = random.Random(42)
        for _ in range(50):
            plant = random_automaton(rng, ["a", "b", "u", "v"], name="p",
                                     uncontrollable=["u", "v"]).trim()
            if plant.is_empty:
                continue
            spec = random_automaton(rng, ["a", "b", "u"], name="k",
                                    uncontrollable=["u"])
            result = supcon(plant, spec)
            assert check_controllability(plant, result).controllable
            if not result.is_empty:
                ok, witness = is_sublanguage(result, parallel([plant, spec]))
                assert ok, witness
                assert result.trim().states == result.states

    def test_monotone_in_the_specification(self):
        rng = random.Random(43)
        done = 0
        while done < 20:
            plant = random_automaton(rng, ["a", "b", "u"], name="p",
                                     uncontrollable=["u"]).trim()
            big = random_automaton(rng, ["a", "b", "u"], name="k",
                                   uncontrollable=["u"])
            if plant.is_empty or not big.transitions:
                continue
            # A sub-specification: drop some transitions from the larger one.
            kept = {k: v for k, v in big.transitions.items() if rng.random() < 0.7}
            small = Automaton("k2", big.alphabet, big.states, kept,
                              big.initial, big.marked)
            lo = supcon(plant, small)
            hi = supcon(plant, big)
            ok, witness = is_sublanguage(lo, hi)
            # supcon(small)'s language must stay inside supcon(big)'s.
            sub, _ = is_sublanguage(small, big)
            if sub:
                assert ok, witness
                done += 1

    def test_alphabet_violation(self):
        spec = Automaton("k", Alphabet((("zz", True),)), ("q",), {}, "q", ("q",))
        with pytest.raises(AlphabetError):
            supcon(toy_plant(), spec)
