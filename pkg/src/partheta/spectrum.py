"""Double zeros of x -> theta(q, x): fold parameters, bounds, asymptotics.

A zero-pair curve ends where its two branches meet; there theta and
theta_x vanish together while theta_xx does not.  This module solves for
those points with a damped two-dimensional Newton iteration, sweeps them
out in order on both sides of q = 0, and checks the computed heights
against closed-form bound sequences and the large-index limits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from mpmath import mp

from .errors import (
    CoalescenceSuspected,
    DomainError,
    NoConvergence,
    NoSignChange,
    SingularJacobian,
)
from .evaluate import DEFAULT_CONFIG, EvalConfig, theta, theta_dq, theta_family
from .realzeros import _pair_probe_qpos, refine_zero, trace_curve

E_PI = math.exp(math.pi)            # limit of the q > 0 fold heights
RESIDUAL_TOL = 1e-12

# closed left end from the s = 15 lower bound, open right end at -e^1.4
QPOS_BAND = (-38.8396001, -4.055199)
QNEG_BAND = (-13.29, 23.65)

# third q > 0 fold parameter, rounded; precondition guard for the
# rightmost-zero bound, which assumes the first three pairs are complex
THIRD_FOLD_Q = 0.630628

_FOUR_ROOT_LN2 = 4.0 * math.sqrt(math.log(2.0))


@dataclass(frozen=True)
class SpectralPoint:
    """A parameter q_star at which theta(q_star, .) has a double real zero.

    y_double is that zero, second_deriv the value of theta_xx there, and
    the residuals are |theta| and |theta_x| at the returned point.  index
    labels the position in the increasing-|q_star| order of the regime;
    for q < 0 the parity of index fixes the sign structure (odd points are
    negative local minima, even ones positive local maxima).
    """

    regime: str
    index: int
    q_star: float
    y_double: float
    residual_theta: float
    residual_dtheta: float
    second_deriv: float

    def __post_init__(self):
        if self.regime not in ("q_pos", "q_neg"):
            raise DomainError(f"unknown regime {self.regime!r}")
        if self.index < 1 or self.index != int(self.index):
            raise DomainError("index must be a positive integer")
        if self.residual_theta < 0 or self.residual_dtheta < 0:
            raise DomainError("residuals are absolute values")
        if self.second_deriv == 0:
            raise DomainError("second_deriv must be nonzero at a double zero")
        if self.regime == "q_pos":
            if not 0 < self.q_star < 1:
                raise DomainError("q_pos needs q_star in (0, 1)")
            if self.y_double >= 0 or self.second_deriv <= 0:
                raise DomainError(
                    "a q_pos double zero is a local minimum below x = 0")
        else:
            if not -1 < self.q_star < 0:
                raise DomainError("q_neg needs q_star in (-1, 0)")
            if self.index % 2 == 1:
                if self.y_double >= 0 or self.second_deriv <= 0:
                    raise DomainError(
                        "odd q_neg points are negative local minima")
            elif self.y_double <= 0 or self.second_deriv >= 0:
                raise DomainError(
                    "even q_neg points are positive local maxima")


class BoundSequences(NamedTuple):
    """Closed-form bound row: height of fold s lies in [lambda_s, mu_s)."""

    s: int
    lambda_s: float
    mu_s: float


class AsymptoticRow(NamedTuple):
    index: int
    q_star: float
    q_limit: float          # 1 - pi / (2 index)
    q_dev_scaled: float     # index * (q_star - q_limit)
    y_double: float
    y_dev: float            # y_double + e^pi


# ----- the 2x2 Newton solve ---------------------------------------------------


def _fd_step(q) -> float:
    """Step for the theta_xq central difference, shrinking toward |q| = 1."""
    return 1e-7 * (1.0 - abs(float(q)))


def _dz_state(q, x, cfg: EvalConfig):
    """(theta, theta_x, theta_xx, theta_q, theta_xq) at (q, x)."""
    fam = theta_family(q, x, cfg, orders=2)
    tq = theta_dq(q, x, cfg).value
    h = _fd_step(q)
    txq = (theta_family(q + h, x, cfg, orders=1)[1].value
           - theta_family(q - h, x, cfg, orders=1)[1].value) / (2 * h)
    return fam[0].value, fam[1].value, fam[2].value, tq, txq


def _dz_norm(q, x, cfg: EvalConfig):
    fam = theta_family(q, x, cfg, orders=1)
    return abs(fam[0].value) + abs(x * fam[1].value)


def _dz_newton(q, x, cfg: EvalConfig, rounds: int, step_floor: float):
    """Damped Newton on (theta, theta_x); arithmetic follows the inputs.

    Steps are halved (at most 40 times) until the residual norm drops;
    a step that cannot be made to drop ends the iteration and leaves the
    verdict to the caller's residual check.
    """
    qsign = 1.0 if q > 0 else -1.0
    nrm = _dz_norm(q, x, cfg)
    for _ in range(rounds):
        t0, t1, t2, tq, txq = _dz_state(q, x, cfg)
        det = tq * t2 - t1 * txq
        dscale = abs(tq * t2) + abs(t1 * txq)
        if det == 0 or abs(det) <= 1e-14 * dscale:
            raise SingularJacobian(
                "Newton system for the double zero is singular near "
                f"q={float(q):.9g}, x={float(x):.9g} "
                "(a triple zero would look like this)")
        du = (t1 * t1 - t0 * t2) / det
        dv = (txq * t0 - tq * t1) / det
        lam = 1.0
        accepted = False
        for _ in range(40):
            qn = q + lam * du
            xn = x + lam * dv
            if 0 < qsign * qn < 1 and xn * x > 0:
                nn = _dz_norm(qn, xn, cfg)
                if nn < nrm:
                    q, x, nrm = qn, xn, nn
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            break
        if (abs(du) <= step_floor * max(1.0, abs(float(q)))
                and abs(dv) <= step_floor * max(1.0, abs(float(x)))):
            break
    return q, x


def find_double_zero(seed_q, seed_x, cfg: EvalConfig | None = None,
                     index: int | None = None) -> SpectralPoint:
    """Solve theta = theta_x = 0 jointly for (q, x) from the given seed.

    A damped Newton pass in float arithmetic gets within rounding of the
    point; a short high-precision polish then drives both residuals below
    1e-12.  The Jacobian uses the heat-equation route for theta_q and a
    central difference in q (step 1e-7 (1 - |q|)) for theta_xq.

    index labels the point's position within its regime.  When omitted the
    smallest sign-consistent label is used; callers that know the true
    position (the spectrum sweepers) pass it explicitly.

    Raises NoConvergence when the residuals will not drop to tolerance and
    SingularJacobian when the 2x2 system degenerates.
    """
    cfg = cfg or DEFAULT_CONFIG
    q0, x0 = float(seed_q), float(seed_x)
    if not 0 < abs(q0) < 1:
        raise DomainError("seed_q must lie in (-1, 0) or (0, 1)")
    if x0 == 0:
        raise DomainError("seed_x must be nonzero")

    q1, x1 = _dz_newton(q0, x0, cfg, rounds=30, step_floor=1e-12)

    digits = max(32, cfg.precision_digits)
    mp_cfg = EvalConfig(precision_digits=digits,
                        tail_tol=10.0 ** (-(digits - 4)),
                        max_terms=max(cfg.max_terms, 20000),
                        reduction_threshold=cfg.reduction_threshold)
    with mp.workdps(digits + 10):
        qm, xm = _dz_newton(mp.mpf(float(q1)), mp.mpf(float(x1)), mp_cfg,
                            rounds=12, step_floor=10.0 ** (-digits + 6))
        fam = theta_family(qm, xm, mp_cfg, orders=2)
        res0 = float(abs(fam[0].value))
        res1 = float(abs(fam[1].value))
        sd = float(fam[2].value)
        qs, xs = float(qm), float(xm)

    if res0 > RESIDUAL_TOL or res1 > RESIDUAL_TOL:
        raise NoConvergence(
            f"double-zero residuals stalled at |theta|={res0:.3g}, "
            f"|theta_x|={res1:.3g} near q={qs:.9g}, x={xs:.9g}")
    scale = 10.0 ** min(max(0.0, _peak_log10(qs, xs)), 300.0)
    if abs(sd) <= 1e-8 * scale:
        raise SingularJacobian(
            f"theta_xx = {sd:.3g} at the converged point; a double zero "
            "must have nonzero curvature")

    if index is None:
        index = 1 if (qs > 0 or xs < 0) else 2
    return SpectralPoint(regime="q_pos" if qs > 0 else "q_neg", index=index,
                         q_star=qs, y_double=xs, residual_theta=res0,
                         residual_dtheta=res1, second_deriv=sd)


def _peak_log10(q, x) -> float:
    from .evaluate import peak_term_log10

    return peak_term_log10(q, x)


# ----- independent re-verification ---------------------------------------------


def _window_extremum(qv: float, xc: float, orient: float, cfg: EvalConfig):
    """Minimum of orient * theta over a +-2% window around xc.

    Golden-section on the smooth local dip; returns (value, err bound).
    """
    lo, hi = sorted((0.98 * xc, 1.02 * xc))
    invphi = (math.sqrt(5.0) - 1) / 2

    def val(xx):
        a = theta(qv, xx, cfg)
        return orient * float(a.value), a.err

    u1 = hi - invphi * (hi - lo)
    u2 = lo + invphi * (hi - lo)
    f1, e1 = val(u1)
    f2, e2 = val(u2)
    best, berr = (f1, e1) if f1 < f2 else (f2, e2)
    for _ in range(80):
        if hi - lo < 1e-12 * abs(xc):
            break
        if f1 < f2:
            hi, u2, f2, e2 = u2, u1, f1, e1
            u1 = hi - invphi * (hi - lo)
            f1, e1 = val(u1)
        else:
            lo, u1, f1, e1 = u1, u2, f2, e2
            u2 = lo + invphi * (hi - lo)
            f2, e2 = val(u2)
        if min(f1, f2) < best:
            best, berr = (f1, e1) if f1 < f2 else (f2, e2)
    return best, berr


def verify_fold_sign_change(point: SpectralPoint,
                            cfg: EvalConfig | None = None,
                            dq: float = 1e-6) -> bool:
    """Certify the fold by the sign of the windowed extremum across q_star.

    On the side of q_star where the pair is still real the local extremum
    of theta pokes through zero; on the other side it stays clear.  True
    when both signs resolve beyond their error bounds.
    """
    cfg = cfg or DEFAULT_CONFIG
    orient = 1.0 if point.second_deriv > 0 else -1.0
    toward_real = -dq if point.regime == "q_pos" else dq
    vr, er = _window_extremum(point.q_star + toward_real, point.y_double,
                              orient, cfg)
    vc, ec = _window_extremum(point.q_star - toward_real, point.y_double,
                              orient, cfg)
    return vr < -3.0 * er and vc > 3.0 * ec


def _rightmost_audit(point: SpectralPoint, cfg: EvalConfig) -> None:
    """No real zero may sit between y_double and 0 at q = q_star.

    Re-probes the cells of the earlier pairs, all of which must come back
    free of sign changes (those pairs left the real axis at smaller q).
    """
    for m in range(1, point.index):
        try:
            _pair_probe_qpos(point.q_star, m, cfg)
        except NoSignChange:
            continue
        except CoalescenceSuspected as exc:
            raise NoConvergence(
                f"pair {m} is near-double at q_star={point.q_star:.9g}; "
                "the rightmost-zero audit cannot certify") from exc
        raise NoConvergence(
            f"pair {m} still has real zeros at q_star={point.q_star:.9g}, "
            f"so y={point.y_double:.9g} is not the rightmost")


# ----- ordered sweeps -----------------------------------------------------------

_QPOS_GRID_START = (0.12, 0.22, 0.33, 0.42, 0.48, 0.54)
_QNEG_GRID_START = {
    "q_neg_negative_zeros": (-0.45, -0.60, -0.68),
    "q_neg_positive_zeros": (-0.45, -0.62, -0.70),
}


def _seed_grid_qpos(j: int):
    lo = _QPOS_GRID_START[j - 1] if j <= 6 else min(0.60 + 0.02 * (j - 6), 0.88)
    return np.linspace(lo, 0.97, 30)


def _seed_grid_qneg(regime: str, nu: int):
    starts = _QNEG_GRID_START[regime]
    lo = starts[nu - 1] if nu <= 3 else -min(0.70 + 0.04 * (nu - 3), 0.92)
    return np.linspace(lo, -0.985, 30)


def fold_qpos(j: int, cfg: EvalConfig | None = None) -> SpectralPoint:
    """Locate the fold of real-zero pair j for q > 0, without sweep audits.

    Traces the pair curve over a seed grid to its turning point and hands
    that to the double-zero solver.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise DomainError("pair index must be a positive integer")
    curve = trace_curve("q_pos", j, _seed_grid_qpos(j), cfg)
    if curve.turning_point is None:
        raise NoConvergence(f"no fold found for pair {j} on the seed grid")
    return find_double_zero(curve.turning_point[0], curve.turning_point[1],
                            cfg, index=j)


def spectrum_qpos(j_max: int, cfg: EvalConfig | None = None):
    """The first j_max fold parameters for q > 0, strictly increasing.

    Each pair curve is traced to its fold to seed the Newton solve.  Every
    point is re-verified two independent ways: the windowed extremum of
    theta changes sign across q_star, and no real zero remains to the
    right of y_double.  Tested through j_max = 6; higher indices work but
    want patience as the folds crowd toward q = 1.
    """
    cfg = cfg or DEFAULT_CONFIG
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    pts = []
    for j in range(1, j_max + 1):
        pt = fold_qpos(j, cfg)
        if not verify_fold_sign_change(pt, cfg):
            raise NoConvergence(
                f"fold sign-change audit failed at q_star={pt.q_star:.9g}")
        _rightmost_audit(pt, cfg)
        pts.append(pt)
    for a, b in zip(pts, pts[1:]):
        if not a.q_star < b.q_star:
            raise NoConvergence("fold parameters failed to increase with index")
    return pts


def spectrum_qneg(j_max: int, cfg: EvalConfig | None = None):
    """The first j_max fold parameters for q < 0, ordered by |q_star|.

    Odd positions come from the negative-zero pairs, even positions from
    the positive-zero pairs; on the q axis the two families interleave.
    The values decrease toward -1 for the computed range; a violation of
    that trend is reported as a warning rather than an error, since only
    the large-index tail is guaranteed monotone.
    """
    cfg = cfg or DEFAULT_CONFIG
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    pts = []
    for j in range(1, j_max + 1):
        if j % 2:
            regime, nu = "q_neg_negative_zeros", (j + 1) // 2
        else:
            regime, nu = "q_neg_positive_zeros", j // 2
        curve = trace_curve(regime, nu, _seed_grid_qneg(regime, nu), cfg)
        if curve.turning_point is None:
            raise NoConvergence(f"no fold found for {regime} pair {nu}")
        pt = find_double_zero(curve.turning_point[0], curve.turning_point[1],
                              cfg, index=j)
        if not verify_fold_sign_change(pt, cfg):
            raise NoConvergence(
                f"fold sign-change audit failed at q_star={pt.q_star:.9g}")
        pts.append(pt)
    for a, b in zip(pts, pts[1:]):
        if not b.q_star < a.q_star:
            warnings.warn(
                f"fold parameters out of order at indices {a.index}, "
                f"{b.index}: {a.q_star:.9g} vs {b.q_star:.9g}")
    return pts


# ----- bounds and limits --------------------------------------------------------


def _flat_rate(x: float) -> float:
    """Exponent -2x log(1 - 4 sqrt(log 2)/(2x - 1)) of the lower bound."""
    return -2.0 * x * math.log1p(-_FOUR_ROOT_LN2 / (2.0 * x - 1.0))


def _verify_flat_bound() -> None:
    grid = np.linspace(3.0, 100.0, 971)
    vals = [_flat_rate(float(t)) for t in grid]
    if any(b >= a for a, b in zip(vals, vals[1:])):
        raise ArithmeticError(
            "lower-bound exponent is not decreasing on [3, 100]")
    if abs(math.exp(_flat_rate(15.0)) - 38.83960007) > 1e-7:
        raise ArithmeticError("lower-bound anchor at s = 15 is off")
    s = 1e7
    mu_tail = -math.exp(-2.0 * s * math.log1p(-1.4 / (2.0 * s - 1.0)))
    if abs(mu_tail + math.exp(1.4)) > 1e-5:
        raise ArithmeticError("upper-bound sequence does not approach -e^1.4")


def bound_sequences(s_range):
    """Rows (s, lambda_s, mu_s) of the closed-form double-zero bounds.

    lambda_s = -(1 - 4 sqrt(ln 2)/(2s - 1))^(-2s) and
    mu_s = -(1 - 1.4/(2s - 1))^(-2s), both valid from s = 3.  Each call
    also checks that the lower-bound exponent decreases on [3, 100], that
    its s = 15 anchor and the -e^1.4 limit come out right, and that both
    sequences increase along the requested range.
    """
    out = []
    for s in s_range:
        si = int(s)
        if si != s or si < 3:
            raise DomainError("bound sequences need integer s >= 3")
        lam = -math.exp(_flat_rate(float(si)))
        mu = -math.exp(-2.0 * si * math.log1p(-1.4 / (2.0 * si - 1.0)))
        out.append(BoundSequences(si, lam, mu))
    _verify_flat_bound()
    for a, b in zip(out, out[1:]):
        if b.s == a.s + 1 and not (b.mu_s > a.mu_s and b.lambda_s > a.lambda_s):
            raise ArithmeticError("bound sequences must increase in s")
    return out


def double_zero_bounds_check(points, regime: str) -> bool:
    """All computed double-zero heights lie in the regime's band.

    q_pos: [-38.8396001, -4.055199), closed left and open right; q_neg:
    the open interval (-13.29, 23.65).  Empty input passes.
    """
    if regime == "q_pos":
        lo, hi = QPOS_BAND
        closed_left = True
    elif regime == "q_neg":
        lo, hi = QNEG_BAND
        closed_left = False
    else:
        raise DomainError(f"unknown regime {regime!r}")
    for p in points:
        if p.regime != regime:
            raise DomainError(
                f"point with regime {p.regime!r} in a {regime!r} check")
        if not ((lo <= p.y_double if closed_left else lo < p.y_double)
                and p.y_double < hi):
            return False
    return True


def asymptotic_report(points):
    """Deviation table against the large-index limits of the q > 0 folds.

    Columns: 1 - pi/(2j), the scaled gap j (q_star - 1 + pi/(2j)), and the
    gap of y_double from -e^pi.  The scaled gap should shrink in magnitude
    down the table; the trend is reported, not asserted.
    """
    rows = []
    for p in points:
        if p.regime != "q_pos":
            raise DomainError("asymptotic_report applies to q_pos points")
        ql = 1.0 - math.pi / (2 * p.index)
        rows.append(AsymptoticRow(p.index, p.q_star, ql,
                                  p.index * (p.q_star - ql),
                                  p.y_double, p.y_double + E_PI))
    return rows


def first_two_zeros_bound(q, cfg: EvalConfig | None = None,
                          j_limit: int = 24) -> bool:
    """True when the two rightmost real zeros at q both exceed -156.

    Valid above the third fold parameter (about 0.630628), where the first
    three pairs are complex; the scan walks the remaining cells outward
    until one still brackets a real pair.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not THIRD_FOLD_Q < qf < 1:
        raise DomainError(
            f"first_two_zeros_bound needs q in ({THIRD_FOLD_Q}, 1)")
    for j in range(4, j_limit + 1):
        try:
            deep, shallow = _pair_probe_qpos(qf, j, cfg)
        except NoSignChange:
            continue
        except CoalescenceSuspected as exc:
            if exc.x is not None:
                return abs(exc.x) < 156.0
            raise
        x_hi, _ = refine_zero(qf, shallow, cfg)
        x_lo, _ = refine_zero(qf, deep, cfg)
        return x_hi > -156.0 and x_lo > -156.0
    raise NoConvergence(
        f"no real pair found in cells 4..{j_limit} at q={qf:.6g}")


# ----- serialization ------------------------------------------------------------


def _g17(v) -> str:
    return "%.17g" % float(v)


_COLUMNS = ("q_star", "y_double", "residual_theta", "residual_dtheta",
            "second_deriv")


def spectrum_csv(points) -> str:
    """CSV rows regime,index,q_star,... at 17 significant digits."""
    lines = ["regime,index," + ",".join(_COLUMNS)]
    for p in points:
        lines.append("%s,%d," % (p.regime, p.index)
                     + ",".join(_g17(getattr(p, c)) for c in _COLUMNS))
    return "\n".join(lines) + "\n"


def spectrum_json(points) -> str:
    """JSON mirror of the CSV report, numbers at 17 significant digits."""
    rows = []
    for p in points:
        fields = ['"regime": "%s"' % p.regime, '"index": %d' % p.index]
        fields += ['"%s": %s' % (c, _g17(getattr(p, c))) for c in _COLUMNS]
        rows.append("{" + ", ".join(fields) + "}")
    return '{"points": [' + ", ".join(rows) + "]}\n"
