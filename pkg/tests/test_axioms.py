import json
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from tsallis_lab.axioms import (
    FAIL,
    HEURISTIC_PASS,
    PASS,
    SampleSpec,
    check_boundedness_estimate,
    check_continuity_sampled,
    check_expansibility,
    check_generalized_additivity,
    check_maximality,
    check_pairwise_additivity,
    check_sign_constancy,
    check_symmetry_delta2,
    exit_status,
    full_report,
    generalized_residual,
    pairwise_residual,
    reports_to_json,
)
from tsallis_lab.functionals import (
    CallableFunctional,
    make_tabulated,
    perturb,
    shannon_functional,
    tsallis_functional,
)
from tsallis_lab.simplex import compose, from_rationals, grid_up_to, uniform

SMALL = SampleSpec(max_denominator=4, max_length=4, samples=30, seed=1)


def V(*xs):
    return from_rationals([Q(x) for x in xs])


def zero_functional():
    return CallableFunctional(lambda v: 0, "zero")


def test_pairwise_instance_values():
    T2 = tsallis_functional(2)
    v = V("1/2", "1/4", "1/4")
    assert T2(v).exact == Q(5, 8)
    assert pairwise_residual(T2, 2, v, 2).exact == 0
    P = perturb(T2, V("1/2", "1/2"), Q(1, 1000))
    # (1/2, 1/2) is both the merged vector and the conditional pair here:
    # -delta - (1/2)**2 * delta
    assert pairwise_residual(P, 2, v, 2).exact == Q(-1, 800)
    rep = check_pairwise_additivity(P, 2, SMALL)
    assert rep.verdict == FAIL and rep.witness is not None
    assert rep.max_residual >= Q(1, 1000)


def test_pairwise_vacuous_on_delta1():
    rep = check_pairwise_additivity(tsallis_functional(2), 2,
                                    SampleSpec(max_denominator=1, max_length=1, samples=0))
    assert rep.verdict == PASS and rep.instances == 0


def test_generalized_instance_values():
    T3 = tsallis_functional(3)
    q = V("1/2", "1/2")
    nested = compose(q, [q, q])
    assert T3(nested.flatten()).exact == Q(15, 32)
    assert generalized_residual(T3, 3, nested).exact == 0
    S = shannon_functional()
    nested = compose(q, [q, V(1)])
    assert abs(float(generalized_residual(S, 1, nested))) < 1e-30


def test_generalized_forces_h_of_one_zero():
    shifted = CallableFunctional(lambda v: Q(1, 7) if len(v) == 1 else 0, "bump")
    rep = check_generalized_additivity(shifted, 2, SMALL)
    assert rep.verdict == FAIL


def test_expansibility():
    T2 = tsallis_functional(2)
    assert check_expansibility(T2, SMALL).verdict == PASS
    assert check_expansibility(shannon_functional(), SMALL).verdict == PASS
    T = make_tabulated({V("1/2", "1/2", 0): 1}, T2)
    rep = check_expansibility(T, SMALL)
    assert rep.verdict == FAIL
    assert rep.max_residual.exact == Q(1, 2)


def test_maximality():
    T2 = tsallis_functional(2)
    assert check_maximality(T2, SampleSpec(12, 2, 0)).verdict == PASS
    neg = CallableFunctional(lambda v: -T2(v), "neg")
    rep = check_maximality(neg, SMALL)
    assert rep.verdict == FAIL
    assert rep.witness.vectors["v"] != uniform(len(rep.witness.vectors["v"]))


def test_continuity_tsallis_smooth():
    rep = check_continuity_sampled(tsallis_functional(2), SampleSpec(100, 2, 0))
    assert rep.verdict == HEURISTIC_PASS and rep.heuristic
    assert float(rep.max_residual) <= 4 / 100
    assert check_continuity_sampled(zero_functional(), SMALL).verdict == HEURISTIC_PASS


def test_continuity_detects_spike():
    spiked = perturb(tsallis_functional(2), V("1/3", "2/3"), 1)
    rep = check_continuity_sampled(spiked, SampleSpec(90, 2, 0))
    assert rep.verdict == FAIL
    assert abs(float(rep.max_residual) - 1) < 0.05


def test_symmetry():
    assert check_symmetry_delta2(tsallis_functional(3), SMALL).verdict == PASS
    first = CallableFunctional(lambda v: v[0], "first")
    rep = check_symmetry_delta2(first, SMALL)
    assert rep.verdict == FAIL
    assert rep.witness.vectors["v"] == V(1, 0)
    assert rep.max_residual.exact == 1


def test_sign_constancy():
    T2 = tsallis_functional(2)
    assert check_sign_constancy(T2, SMALL).verdict == PASS
    shifted = CallableFunctional(lambda v: T2(v) - Q(1, 4), "shifted")
    assert check_sign_constancy(shifted, SMALL).verdict == FAIL
    assert check_sign_constancy(zero_functional(), SMALL).verdict == PASS


def test_boundedness():
    rep = check_boundedness_estimate(tsallis_functional(2), SMALL)
    assert rep.verdict == HEURISTIC_PASS and rep.max_residual.exact == Q(1, 2)
    rep = check_boundedness_estimate(shannon_functional(), SMALL)
    assert abs(float(rep.max_residual) - 0.6931471805599453) < 1e-15
    assert check_boundedness_estimate(zero_functional(), SMALL).max_residual.exact == 0


def test_full_report_tsallis_and_zero():
    reports = full_report(tsallis_functional(3), 3, SMALL)
    assert exit_status(reports) == 0
    assert [r.axiom for r in reports][:2] == ["pairwise_additivity", "generalized_additivity"]
    assert exit_status(full_report(zero_functional(), 2, SMALL)) == 0


def test_full_report_perturbed():
    P = perturb(tsallis_functional(3), V("1/4", "3/4"), Q(1, 100))
    reports = full_report(P, 3, SMALL)
    assert reports[0].verdict == FAIL
    assert exit_status(reports) == 1


def test_reports_deterministic():
    a = reports_to_json(full_report(tsallis_functional(Q(3, 2)), Q(3, 2), SMALL))
    b = reports_to_json(full_report(tsallis_functional(Q(3, 2)), Q(3, 2), SMALL))
    assert a == b
    doc = json.loads(a)
    assert doc["reports"][0]["mode"] == "float"
    assert set(doc["reports"][0]) >= {"axiom", "verdict", "instances", "max_residual", "witness"}


def test_float_mode_passes_within_tolerance():
    rep = check_pairwise_additivity(tsallis_functional(Q(3, 2)), Q(3, 2), SMALL)
    assert rep.verdict == PASS and rep.mode == "float"
    assert float(rep.max_residual) <= 1e-10


_GRID = grid_up_to(4, 4)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(_GRID),
       st.sampled_from([Q(1, 10**9), Q(-3, 10**9), Q(1, 1000), Q(-7, 3)]))
def test_perturbation_detected_exact(at, delta):
    P = perturb(tsallis_functional(2), at, delta)
    rep = check_pairwise_additivity(P, 2, SampleSpec(4, 4, 0))
    assert rep.verdict == FAIL
    assert rep.max_residual >= abs(delta)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(_GRID))
def test_perturbation_detected_float(at):
    delta = Q(1, 10**9)
    P = perturb(tsallis_functional(Q(3, 2)), at, delta)
    rep = check_pairwise_additivity(P, Q(3, 2), SampleSpec(4, 4, 0))
    assert rep.verdict == FAIL
    assert float(rep.max_residual) >= 1e-9 * (1 - 1e-6)
