"""Tests for the series evaluator: certified values, derivatives, routes."""

import math

import mpmath as mp
import numpy as np
import pytest

from partheta import (
    Approx,
    DomainError,
    EvalConfig,
    NoConvergence,
    theta,
    theta_dq,
    theta_dx,
    theta_dx2,
    theta_family,
    theta_to_accuracy,
    peak_term_log10,
)

from _oracle import theta_ref, theta_dq_ref

# values pinned by the brute-force high-precision reference in _oracle.py
FROZEN_THETA = [
    (0.3, -5.0, 0.087520885429977480767558431848231),
    (0.7, -20.0, 0.57992806189098427891806745025833),
    (0.95, -1.5, 0.40498065875214533544978506300496),
    (0.1, 50.0, 8.625625312515625078125039062502),
    (-0.5, 3.0, -1.131778581148767571759925135231),
    (-0.9, -10.0, 551457.13120593145821103984882442),
    (0.99, -2.0, 0.33407905106149403260349431625858),
    (0.5, -8.0, 0.11742785561386859260760974327497),
]


@pytest.mark.parametrize("q,x,expected", FROZEN_THETA)
def test_theta_matches_reference(q, x, expected):
    a = theta(q, x)
    assert abs(float(a.value) - expected) <= a.err + 1e-13 * abs(expected)
    assert a.err <= 1e-8 * max(1.0, abs(expected))


def test_theta_trivial_arguments():
    assert theta(0.0, 123.4).value == 1.0
    assert theta(0.37, 0.0).value == 1.0
    one = theta(0.37, 0.0)
    assert one.err < 1e-13


def test_frozen_derivatives():
    dx = theta_dx(0.3, -5.0)
    assert abs(float(dx.value) - 0.081767194452873562464990204221563) <= dx.err + 1e-15
    dxx = theta_dx2(0.3, -5.0)
    assert abs(float(dxx.value) - 0.033865793563995971467126066250561) <= dxx.err + 1e-15
    dq = theta_dq(0.3, -5.0)
    assert abs(float(dq.value) - 0.048288157618606103380416023413996) <= dq.err + 1e-15
    dq2 = theta_dq(-0.4, 7.0)
    assert abs(float(dq2.value) - 3.855488777302582811943889888244) <= dq2.err + 1e-14


def test_family_agrees_with_single_calls():
    fam = theta_family(0.35, -4.2, orders=2)
    assert len(fam) == 3
    singles = [theta(0.35, -4.2), theta_dx(0.35, -4.2), theta_dx2(0.35, -4.2)]
    for got, ref in zip(fam, singles):
        tol = got.err + ref.err + 1e-16 * max(1.0, abs(float(ref.value)))
        assert abs(float(got.value) - float(ref.value)) <= tol


def test_certified_error_covers_truth_on_random_panel():
    """Certified |value - truth| <= err over a seeded parameter sweep."""
    rng = np.random.default_rng(20240817)
    checked = 0
    while checked < 60:
        q = float(rng.uniform(-0.9, 0.9))
        if abs(q) < 0.02:
            continue
        mag = 10.0 ** rng.uniform(-2, 3)
        x = float(rng.choice([-1.0, 1.0]) * mag)
        if peak_term_log10(q, x) > 60:
            continue
        a = theta(q, x)
        ref = theta_ref(q, x, dps=40)
        diff = abs(mp.mpf(repr(float(a.value))) - ref) if not isinstance(
            a.value, mp.mpf) else abs(a.value - ref)
        assert float(diff) <= a.err + 1e-25 * max(1.0, float(abs(ref))), (q, x)
        checked += 1


def test_dq_routes_agree():
    pts = [(0.3, -5.0), (0.7, 2.3), (-0.6, -1.2), (0.45, 30.0), (-0.25, 14.0)]
    for q, x in pts:
        a = theta_dq(q, x, route="series")
        b = theta_dq(q, x, route="pde")
        scale = max(1.0, abs(float(a.value)))
        assert abs(float(a.value) - float(b.value)) <= 1e-11 * scale, (q, x)


def test_dq_auto_route_near_zero_q():
    a = theta_dq(1e-5, 3.0)
    ref = theta_dq_ref(1e-5, 3.0, dps=40)
    assert abs(float(a.value) - float(ref)) <= a.err + 1e-20
    with pytest.raises(DomainError):
        theta_dq(0.0, 3.0, route="pde")
    got = theta_dq(0.0, 3.0)  # series route handles q = 0
    assert abs(float(got.value) - 3.0) <= got.err + 1e-15


def test_reduction_threshold_invariance():
    vals = []
    for thr in (0.5, 1.0, 2.0):
        cfg = EvalConfig(reduction_threshold=thr)
        vals.append(theta(0.6, -123.4, cfg))
    for a in vals[1:]:
        tol = vals[0].err + a.err + 1e-15 * max(1.0, abs(float(vals[0].value)))
        assert abs(float(a.value) - float(vals[0].value)) <= tol
    assert vals[0].reductions_used != vals[2].reductions_used


def test_reduction_counts_reported():
    a = theta(0.5, -8.0)
    assert a.reductions_used >= 1
    assert a.terms_used > a.reductions_used
    b = theta(0.5, 0.4)
    assert b.reductions_used == 0


def test_functional_equation_property():
    """theta(q, x) = 1 + q x theta(q, q x) on a seeded panel."""
    rng = np.random.default_rng(7)
    for _ in range(40):
        q = float(rng.uniform(-0.8, 0.8))
        x = float(rng.uniform(-30, 30))
        if abs(q) < 0.05:
            continue
        lhs = theta(q, x)
        rhs = theta(q, q * x)
        resid = float(lhs.value) - (1.0 + q * x * float(rhs.value))
        tol = lhs.err + abs(q * x) * rhs.err + 1e-12 * max(1.0, abs(float(lhs.value)))
        assert abs(resid) <= tol, (q, x)


def test_heat_identity_property():
    """2 q theta_q equals x^2 theta_xx + 2 x theta_x on a seeded panel."""
    rng = np.random.default_rng(11)
    for _ in range(25):
        q = float(rng.uniform(0.05, 0.85)) * float(rng.choice([-1.0, 1.0]))
        x = float(rng.uniform(-12, 12))
        dq = theta_dq(q, x, route="series")
        fam = theta_family(q, x, orders=2)
        lhs = 2 * q * float(dq.value)
        rhs = x * x * float(fam[2].value) + 2 * x * float(fam[1].value)
        scale = max(1.0, abs(lhs), abs(rhs))
        assert abs(lhs - rhs) <= 1e-10 * scale, (q, x)


def test_to_accuracy_hits_tight_target():
    a = theta_to_accuracy(0.9, -50.0, 1e-30)
    assert a.err <= 1e-30
    # the reference itself needs ~31 extra digits to absorb the 1e30 term peak
    ref = theta_ref(0.9, -50.0, dps=85)
    assert abs(mp.mpmathify(a.value) - ref) <= mp.mpf("2e-30")


def test_to_accuracy_rejects_bad_target():
    with pytest.raises(DomainError):
        theta_to_accuracy(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        theta_to_accuracy(0.5, 1.0, -1e-9)


def test_to_accuracy_raises_when_unreachable():
    # the digit cap stops escalation well before this subnormal target
    with pytest.raises(NoConvergence):
        theta_to_accuracy(0.9, -50.0, 1e-310)


def test_domain_validation():
    with pytest.raises(DomainError):
        theta(1.0, 2.0)
    with pytest.raises(DomainError):
        theta(-1.2, 2.0)
    with pytest.raises(DomainError):
        theta_family(0.5, 1.0, orders=3)
    with pytest.raises(DomainError):
        theta_dq(0.5, 1.0, route="magic")


def test_config_validation():
    with pytest.raises(DomainError):
        EvalConfig(precision_digits=8)
    with pytest.raises(DomainError):
        EvalConfig(tail_tol=0.0)
    with pytest.raises(DomainError):
        EvalConfig(max_terms=2)
    with pytest.raises(DomainError):
        EvalConfig(reduction_threshold=3.0)


def test_peak_term_estimate_tracks_actual_peak():
    for q, x in [(0.5, -8.0), (0.3, -50.0), (0.9, -200.0), (0.8, 35.0)]:
        est = peak_term_log10(q, x)
        with mp.workdps(40):
            peak = mp.mpf(0)
            for j in range(4000):
                t = abs(mp.mpf(q) ** (j * (j + 1) // 2) * mp.mpf(x) ** j)
                if t > peak:
                    peak = t
            actual = float(mp.log10(peak))
        assert abs(est - actual) <= 1.0, (q, x)
    assert peak_term_log10(0.5, 0.7) == 0.0
    assert peak_term_log10(0.0, 9.0) == 0.0


def test_complex_argument():
    z = 1.0 + 2.0j
    a = theta(0.4, z)
    ref = theta_ref(0.4, z, dps=40)
    assert abs(complex(a.value) - complex(ref)) <= a.err + 1e-14


def test_high_precision_backend_kicks_in_near_boundary():
    a = theta(0.97, -3.0)
    assert isinstance(a.value, mp.mpf)
    assert a.err <= 1e-12
    assert a.terms_used > 40


def test_approx_is_floatable():
    a = theta(0.2, 1.5)
    assert float(a) == float(a.value)
    assert isinstance(a, Approx)
