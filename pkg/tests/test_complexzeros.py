"""Winding counts, pair tracking, interlacing crossings, containment audits.

Frozen digits come from tests/_oracle: winding_ref for the counts,
zero_polish_ref (mp Newton on 50-digit sums) for zero positions and
crossing parameters.  All were generated offline and pasted in so the
suite never trusts the module under test for its own expected values.
"""

import json
import math

import numpy as np
import pytest

from partheta.errors import BoundaryTooClose, DomainError
from partheta.complexzeros import (
    PairTrack,
    Region,
    audit_json,
    containment_audit,
    count_zeros,
    crossing_via_interlacing,
    master_region,
    no_crossing_qneg,
    pair_count,
    pair_track_csv,
    track_pair,
    ysharp_pair,
)

# polished zero positions (upper-half representatives)
Z413 = complex(-4.653635219932041674434, 3.121116784851506963103)
Z41 = complex(-4.71568095377376825787185, 3.096500691692880598212003)
Z574 = (complex(-8.700080405253288027005, 3.352400205751316511187),
        complex(-1.850577989532438552543, 3.562755376967828020224))
ZN85 = (complex(-3.433970649969082858649, 0.3551060571472721695553),
        complex(2.141513603066884338978, 0.8025990655980072166085),
        complex(-1.879912552987119121273, 1.05262287820636835759))

QT1 = 0.309249338600077480027483     # birth of the first pair
QD1 = 0.7264719828211905             # imaginary-axis crossings
QD2 = 0.8413177298506727
QD3 = 0.887798102269054
X95 = complex(1.239956638438120603613, 0.9164455164766626192336)

YS731 = (2.130926519649497, 2.8184825062979226)


def test_count_zeros_reference_regions():
    assert count_zeros(0.2, Region(-5.0, 5.0, 1.0, 50.0)) == 0
    big = Region(-200.0, 20.0, 0.01, 140.0)
    assert count_zeros(0.41, big) == 1
    assert count_zeros(0.55, big) == 2


def test_count_zeros_density_invariant():
    box = Region(-200.0, 20.0, 0.01, 140.0)
    assert count_zeros(0.41, box, density=2) == count_zeros(0.41, box)


def test_count_zeros_conjugate_reflection():
    # both pairs of q=0.574 sit in the upper box; the reflected box must
    # see their conjugates
    upper = Region(-10.0, -1.2, 3.0, 4.0)
    lower = Region(-10.0, -1.2, -4.0, -3.0)
    assert count_zeros(0.574, upper) == 2
    assert count_zeros(0.574, lower) == 2


def test_count_zeros_domain():
    box = Region(-5.0, 5.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        count_zeros(0.0, box)
    with pytest.raises(DomainError):
        count_zeros(1.2, box)
    with pytest.raises(DomainError):
        count_zeros(0.4, (-5.0, 5.0, 1.0, 2.0))
    with pytest.raises(DomainError):
        count_zeros(0.4, box, density=0)
    with pytest.raises(DomainError):
        count_zeros(0.4, box, density=1.5)


def test_region_validation_and_contains():
    with pytest.raises(DomainError):
        Region(3.0, -3.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        Region(-3.0, 3.0, 2.0, 2.0)
    with pytest.raises(DomainError):
        Region(-3.0, math.inf, 1.0, 2.0)
    r = Region(-1.0, 1.0, 0.0, 2.0)
    assert r.contains(0.5 + 1.0j)
    assert not r.contains(1.5 + 1.0j)
    assert not r.contains(0.95 + 1.0j, margin=0.1)


def test_count_zeros_boundary_through_zero():
    # right edge passes through the lone zero of q=0.413
    pinned = Region(-53.4, -4.653635219932042, 0.01, 140.0)
    with pytest.raises(BoundaryTooClose):
        count_zeros(0.413, pinned)


def test_pair_count_around_first_birth():
    assert pair_count(0.3) == 0
    assert pair_count(0.31) == 1


def test_pair_count_small_q_deep_walls():
    # the master region reaches |x| ~ 1e16 where the series peak dwarfs
    # the value; the count must still come out clean
    assert pair_count(0.05) == 0


def test_pair_count_qneg():
    assert pair_count(-0.5) == 0
    assert pair_count(-0.8) == 2
    assert pair_count(-0.85) == 3


def test_pair_count_domain():
    with pytest.raises(DomainError):
        pair_count(0.0)
    with pytest.raises(DomainError):
        pair_count(-1.0)


def test_master_region_geometry():
    r = master_region(0.41)
    jm = math.ceil(math.pi / (2.0 * 0.59)) + 2
    assert r.re_max == 20.0
    assert r.im_min == 0.01 and r.im_max == 140.0
    assert r.re_min == -(2.0 * 0.41 ** (-2 * jm - 2))
    s = master_region(-0.6)
    jm = math.ceil(math.pi / (2.0 * 0.4)) + 2
    assert s.re_max == 2.0 * 0.6 ** (-2 * jm - 2) == -s.re_min
    with pytest.raises(DomainError):
        master_region(0.41, j_max=0)


def test_containment_audit_qpos():
    rep = containment_audit(0.41)
    assert rep.pair_count == 1
    assert abs(rep.zeros[0] - Z41) < 1e-9
    assert rep.residuals[0] <= 1e-10
    assert rep.conj_residuals[0] <= 1e-10
    assert rep.all_contained and rep.violations == []
    assert abs(rep.min_abs_re - abs(Z41.real)) < 1e-9


def test_containment_audit_qneg_three_pairs():
    rep = containment_audit(-0.85)
    assert rep.pair_count == 3
    for got, want in zip(rep.zeros, ZN85):
        assert abs(got - want) < 1e-9
    assert rep.all_contained
    assert (np.abs(rep.zeros.imag) < 132.0).all()
    assert abs(rep.min_abs_re - 1.879912552987119121273) < 1e-9
    assert rep.min_abs_re > 0
    assert (rep.residuals <= 1e-10).all()
    assert (rep.conj_residuals <= 1e-10).all()


def test_containment_audit_no_pairs():
    rep = containment_audit(0.05)
    assert rep.pair_count == 0
    assert rep.min_abs_re is None
    assert rep.all_contained
    doc = json.loads(audit_json(rep))
    assert doc["pair_count"] == 0
    assert doc["zeros"] == []
    assert doc["min_abs_re"] is None


def test_crossing_via_interlacing_first_three():
    assert abs(crossing_via_interlacing(1) - QD1) < 5e-12
    assert abs(crossing_via_interlacing(2) - QD2) < 5e-12
    assert abs(crossing_via_interlacing(3) - QD3) < 5e-12


def test_ysharp_pair_values():
    y1, y2 = ysharp_pair(1, 0.731)
    assert abs(y1 - YS731[0]) < 1e-9
    assert abs(y2 - YS731[1]) < 1e-9
    with pytest.raises(DomainError):
        ysharp_pair(1, -0.5)


def test_interlacing_inequality_flips_at_crossing():
    # below the crossing the even-part zeros satisfy y1 < q y2; above it
    # the order reverses, so the gap q y2 - y1 changes sign there
    q_lo = QD1 - 0.005
    y1, y2 = ysharp_pair(1, q_lo)
    assert y1 < y2 and q_lo * y2 - y1 > 0
    q_hi = QD1 + 0.005
    y1, y2 = ysharp_pair(1, q_hi)
    assert abs(y1 - 2.1332059322851515) < 1e-9
    assert abs(y2 - 2.8088453228776316) < 1e-9
    assert y1 < y2 and q_hi * y2 - y1 < 0
    assert y2 < y1 / q_hi


def test_interlacing_gap_magnitudes_near_crossings():
    windows = {1: (1.2e-5, 1.7e-5), 2: (3.0e-5, 3.8e-5), 3: (4.8e-5, 6.0e-5)}
    for j, qd in ((1, QD1), (2, QD2), (3, QD3)):
        lo, hi = windows[j]
        for sgn in (-1.0, 1.0):
            y1, y2 = ysharp_pair(j, qd + sgn * 1e-6)
            gap = (qd + sgn * 1e-6) * y2 - y1
            assert lo < abs(gap) < hi
            assert math.copysign(1.0, gap) == -sgn
    # far below the crossing the gap is order one, not marginal
    y1, y2 = ysharp_pair(1, 0.35)
    assert abs(0.35 * y2 - y1 - 8.93175) < 1e-3


def test_track_pair_first_fold():
    tr = track_pair(1, np.linspace(0.32, 0.95, 160))
    assert tr.pair_index == 1
    assert abs(tr.birth_q - QT1) < 1e-10
    assert tr.crossing_q is not None
    assert abs(tr.crossing_q - QD1) < 1e-8
    assert tr.post_crossing_contained
    assert (tr.x_samples.imag > 0).all()
    before = tr.x_samples[tr.q_samples < tr.crossing_q]
    after = tr.x_samples[tr.q_samples >= tr.crossing_q]
    assert (before.real < 0).all()
    assert (after.real > -1e-9).all()
    assert abs(tr.x_samples[-1] - X95) < 1e-9


def test_track_pair_domain():
    with pytest.raises(DomainError):
        track_pair(1, np.array([0.5, 0.4]))
    with pytest.raises(DomainError):
        track_pair(1, np.array([0.30, 0.5]))      # starts below the birth
    with pytest.raises(DomainError):
        track_pair(1, np.array([0.5]))
    with pytest.raises(DomainError):
        track_pair(1, np.array([0.5, 1.0]))


def test_pair_track_validation():
    with pytest.raises(DomainError):
        PairTrack(1, np.array([0.4, 0.5]), np.array([1j]), 0.3, None, True)
    with pytest.raises(DomainError):
        PairTrack(1, np.array([0.4]), np.array([1.0 - 1.0j]), 0.3, None, True)


def test_no_crossing_qneg():
    ys = np.linspace(0.0, 40.0, 81)
    assert no_crossing_qneg(-0.9, ys)
    assert no_crossing_qneg(-0.1, ys)
    assert no_crossing_qneg(-0.727133, np.linspace(0.0, 50.0, 101))
    with pytest.raises(DomainError):
        no_crossing_qneg(0.3, ys)
    with pytest.raises(DomainError):
        no_crossing_qneg(-1.0, ys)
    with pytest.raises(DomainError):
        no_crossing_qneg(-0.5, np.array([]))
    with pytest.raises(DomainError):
        no_crossing_qneg(-0.5, np.array([math.nan]))


def test_pair_track_csv_layout():
    tr = PairTrack(pair_index=1,
                   q_samples=np.array([0.4, 0.75]),
                   x_samples=np.array([-1.0 + 2.0j, 0.5 + 1.5j]),
                   birth_q=QT1, crossing_q=QD1,
                   post_crossing_contained=True)
    csv = pair_track_csv([tr])
    lines = csv.strip().split("\n")
    assert lines[0] == "pair_index,q,re_x,im_x,crossed_flag"
    assert len(lines) == 3
    cells = lines[1].split(",")
    assert cells[0] == "1" and cells[4] == "0"
    assert float(cells[1]) == 0.4 and float(cells[2]) == -1.0
    cells = lines[2].split(",")
    assert cells[4] == "1"
    assert float(cells[2]) == 0.5 and float(cells[3]) == 1.5
    assert pair_track_csv([tr]) == csv
    # an uncrossed track never sets the flag
    un = PairTrack(2, np.array([0.4, 0.5]),
                   np.array([-1.0 + 2.0j, -0.9 + 1.9j]), QT1, None, True)
    rows = pair_track_csv([tr, un]).strip().split("\n")
    assert len(rows) == 5
    assert rows[3].split(",")[0] == "2"
    assert rows[3].split(",")[4] == "0" and rows[4].split(",")[4] == "0"


def test_audit_json_roundtrip():
    rep = containment_audit(0.41)
    blob = audit_json(rep)
    assert audit_json(rep) == blob
    doc = json.loads(blob)
    assert doc["pair_count"] == 1
    assert doc["q"] == 0.41
    assert doc["violations"] == []
    z = doc["zeros"][0]
    assert z["re"] == rep.zeros[0].real
    assert z["im"] == rep.zeros[0].imag
    assert z["contained"] is True
    assert z["abs_re"] == abs(rep.zeros[0].real)
    assert doc["min_abs_re"] == rep.min_abs_re
    assert doc["region"]["re_max"] == rep.region.re_max
