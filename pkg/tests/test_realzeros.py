"""Real zero machinery: brackets, refinement, orderings, curve traces."""

import io

import numpy as np
import pytest

from partheta import DomainError
from partheta.errors import CoalescenceSuspected, NoSignChange, StepCollapse
from partheta.realzeros import (
    Bracket,
    ZeroCurve,
    bracket_real_zeros_qpos,
    ordering_check_qneg,
    refine_zero,
    sign_pattern_check,
    trace_curve,
    zero_curve_csv,
    zeros_qneg,
    halfpower_slope_check,
    root_on_power_curve,
)

XI1_01 = -11.25180120987569359940051361741
XI2_01 = -99.85789301361329213949365136192
ZETA1_02 = -25.127947624114471613654161603354
ETA1_02 = 4.2894524698278521887652420937776
QT1 = 0.309249338600077480027483
QB1 = -0.727133325455786800848464


def test_bracket_validation():
    Bracket(-2.0, -1.0, 1, -1)
    Bracket(-3.0, -3.0, 0, 0)
    with pytest.raises(DomainError):
        Bracket(-1.0, -2.0, 1, -1)
    with pytest.raises(DomainError):
        Bracket(-2.0, -1.0, 1, 1)


def test_qpos_brackets_and_refinement():
    brs = bracket_real_zeros_qpos(0.1, 4)
    assert len(brs) == 4
    assert brs[0].lo <= XI1_01 <= brs[0].hi
    assert brs[1].lo <= XI2_01 <= brs[1].hi
    x1, r1 = refine_zero(0.1, brs[0])
    x2, r2 = refine_zero(0.1, brs[1])
    assert abs(x1 - XI1_01) <= 1e-10 * abs(XI1_01)
    assert abs(x2 - XI2_01) <= 1e-10 * abs(XI2_01)
    # ordering from the origin outward and wall containment per pair
    xs = [refine_zero(0.1, b)[0] for b in brs]
    assert xs[0] > xs[1] > xs[2] > xs[3]
    assert -1e2 < xs[1] < xs[0] < -1e1
    assert -1e4 < xs[3] < xs[2] < -1e3


def test_small_q_first_bracket_containment():
    q = 1e-3
    br = bracket_real_zeros_qpos(q, 1)[0]
    assert -(q ** -2.0) <= br.lo <= br.hi <= -1.0


def test_wall_interlacing_property():
    rng = np.random.default_rng(1234)
    for q in rng.uniform(0.02, 0.10, size=4):
        q = float(q)
        xs = [refine_zero(q, b)[0] for b in bracket_real_zeros_qpos(q, 4)]
        for j in (1, 2):
            deep, shallow = xs[2 * j - 1], xs[2 * j - 2]
            assert -(q ** (-2.0 * j)) < deep < shallow < -(q ** (-2.0 * j + 1)), (q, j)


def test_refine_zero_degenerate_bracket():
    x, resid = refine_zero(0.1, Bracket(XI1_01, XI1_01, 0, 0))
    assert x == XI1_01
    assert resid < 1e-12


def test_coalescence_flagged_near_double_zero():
    with pytest.raises(CoalescenceSuspected):
        bracket_real_zeros_qpos(0.3092493386001, 2)


def test_qneg_zero_lists():
    negs, pos = zeros_qneg(-0.2, 4)
    assert len(negs) == 4 and len(pos) == 4
    assert abs(negs[0] - ZETA1_02) <= 1e-9 * abs(ZETA1_02)
    assert abs(pos[0] - ETA1_02) <= 1e-9 * abs(ETA1_02)
    assert all(n < 0 for n in negs) and all(p > 0 for p in pos)
    assert negs[0] > negs[1] > negs[2] > negs[3]
    assert pos[0] < pos[1] < pos[2] < pos[3]


def test_qneg_near_minus_one_keeps_only_first_positive_zero():
    negs, pos = zeros_qneg(-0.99, 1)
    assert negs == []
    assert len(pos) == 1
    assert 1.0 < pos[0] < 1.1


def test_qneg_ordering_chains():
    assert ordering_check_qneg(-0.1, 4)
    assert ordering_check_qneg(-0.2, 4)
    with pytest.raises(NoSignChange):
        ordering_check_qneg(-0.99, 4)


def test_sign_patterns():
    assert sign_pattern_check(0.01, 0)
    assert sign_pattern_check(0.3092, 0)
    assert sign_pattern_check(0.4, 1)


def test_power_curve_roots():
    r = root_on_power_curve(1.5)
    assert r is not None
    q, x = r
    assert abs(q - 0.292488975972784) < 1e-9
    assert abs(x - (-6.321727143375196)) < 1e-6
    assert root_on_power_curve(2.5) is None
    assert root_on_power_curve(3.0) is None
    assert halfpower_slope_check(1)
    assert halfpower_slope_check(2)


def test_trace_validation():
    with pytest.raises(DomainError):
        trace_curve("nope", 1, [0.1, 0.2])
    with pytest.raises(DomainError):
        trace_curve("q_pos", 0, [0.1, 0.2])
    with pytest.raises(DomainError):
        trace_curve("q_pos", 1, [0.1])
    with pytest.raises(DomainError):
        trace_curve("q_pos", 1, [0.2, 0.1])
    with pytest.raises(DomainError):
        trace_curve("q_pos", 1, [-0.1, -0.2])
    with pytest.raises(DomainError):
        trace_curve("q_neg_negative_zeros", 1, [0.1, 0.2])
    with pytest.raises(StepCollapse):
        trace_curve("q_pos", 1, [0.1, 0.1 + 1e-14])


def test_trace_without_fold():
    grid = np.geomspace(0.05, 0.15, 7)
    c = trace_curve("q_pos", 1, grid)
    assert isinstance(c, ZeroCurve)
    assert c.turning_point is None
    assert len(c.samples) == 2 * len(grid)
    assert len(c.branch_labels) == len(c.samples)
    half = len(grid)
    assert all(b == "lower_branch" for b in c.branch_labels[:half])
    assert all(b == "upper_branch" for b in c.branch_labels[half:])


def test_trace_through_fold_qpos():
    grid = np.concatenate([np.geomspace(0.02, 0.28, 12),
                           np.linspace(0.29, 0.3093, 8)])
    c = trace_curve("q_pos", 1, grid)
    assert c.turning_point is not None
    q_star, x_star = c.turning_point
    assert abs(q_star - QT1) <= 1e-5
    assert abs(x_star - (-7.50325596424419236565431)) <= 1e-3
    assert max(x for _, x in c.samples) <= -6.095
    lo = [s for s, b in zip(c.samples, c.branch_labels) if b == "lower_branch"]
    up = [s for s, b in zip(c.samples, c.branch_labels) if b == "upper_branch"]
    assert all(lo[i][0] < lo[i + 1][0] for i in range(len(lo) - 1))
    assert all(up[i][0] > up[i + 1][0] for i in range(len(up) - 1))
    assert c.turning_point not in c.samples


def test_trace_through_fold_qneg():
    grid = -np.concatenate([np.geomspace(0.1, 0.65, 12),
                            np.linspace(0.66, 0.7275, 10)])
    c = trace_curve("q_neg_negative_zeros", 1, grid)
    assert c.turning_point is not None
    assert abs(c.turning_point[0] - QB1) <= 1e-5
    assert max(x for _, x in c.samples) <= -2.699


def test_zero_curve_csv_roundtrip():
    grid = np.geomspace(0.05, 0.15, 5)
    c = trace_curve("q_pos", 1, grid)
    text = zero_curve_csv([c])
    lines = text.strip().splitlines()
    assert lines[0] == "regime,index,branch,q,x"
    assert len(lines) == 1 + len(c.samples)
    first = lines[1].split(",")
    assert first[0] == "q_pos" and first[1] == "1" and first[2] == "lower_branch"
    q0, x0 = float(first[3]), float(first[4])
    assert (q0, x0) == c.samples[0]
