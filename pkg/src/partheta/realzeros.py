"""Real zeros of theta(q, .): bracketing, refinement, and curve tracing.

For q in (0, 1) every real zero is negative and the zeros come in pairs
xi_(2j), xi_(2j-1) squeezed between consecutive powers -q^(-2j) and
-q^(-2j+1); each pair merges into a double zero at a spectral value of q and
then leaves the real axis.  For q in (-1, 0) there are infinitely many
negative zeros zeta and positive zeros eta, with analogous pairing.  The
traced pairs form curves in the (q, x) plane with two power-asymptotic
branches joined at a fold, and the fold location is the entry point for the
spectrum computations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import (
    CoalescenceSuspected,
    DomainError,
    LostTrack,
    MultipleRootsFound,
    NoConvergence,
    NoSignChange,
    StepCollapse,
    TailNotConverged,
)
from .evaluate import (
    DEFAULT_CONFIG,
    Approx,
    EvalConfig,
    family_to_accuracy,
    peak_term_log10,
    theta_family,
)
from .identities import phi_k

REGIMES = ("q_pos", "q_neg_negative_zeros", "q_neg_positive_zeros")

LOWER = "lower_branch"
UPPER = "upper_branch"


@dataclass(frozen=True)
class Bracket:
    """Sign-change interval [lo, hi] with certified endpoint signs.

    A degenerate bracket (lo == hi) marks an exactly-known zero and its
    signs are not constrained.
    """

    lo: float
    hi: float
    sign_lo: int
    sign_hi: int

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise DomainError("bracket needs lo <= hi")
        if self.lo < self.hi and self.sign_lo * self.sign_hi != -1:
            raise DomainError("bracket endpoints must have opposite signs")


@dataclass
class ZeroCurve:
    """A traced zero-pair curve in the (q, x) plane.

    samples run along the curve: lower branch with |q| increasing, then
    (after the fold, when reached) the upper branch with |q| decreasing.
    branch_labels aligns with samples; the branch of smaller |x| is
    lower_branch.  turning_point is the fold apex (q at the spectral value)
    when the trace reached it, else None.
    """

    regime: str
    index: int
    samples: list = field(default_factory=list)
    branch_labels: list = field(default_factory=list)
    turning_point: tuple | None = None


# ----- certified evaluation helpers ------------------------------------------


def _absf(v) -> float:
    try:
        return abs(float(v))
    except (TypeError, OverflowError):
        return abs(complex(v))


def _scale_spec(q, x) -> float:
    """max(1, largest |term| of the defining series), as a float."""
    return 10.0 ** min(max(peak_term_log10(q, x), 0.0), 300.0)


def _ladder(q, x, cfg: EvalConfig, orders: int = 0, res_floor: float = 0.0):
    """Evaluate theta (and derivatives) until the value is sign-resolved.

    Escalates precision until err <= max(|value|/4, res_floor/4); gives up
    quietly at the precision cap and returns the best result, leaving the
    caller to compare err against |value|.
    """
    fam = theta_family(q, x, cfg, orders=orders)
    for _ in range(14):
        v = _absf(fam[0].value)
        e = fam[0].err
        if e <= max(0.25 * v, 0.25 * res_floor):
            return fam
        target = max(res_floor * 0.2, min(e * 1e-10, 0.2 * v if v > e else e * 1e-10))
        target = max(target, 1e-280)
        try:
            fam = family_to_accuracy(q, x, target, cfg, orders=orders)
        except NoConvergence:
            return fam
        if target <= 1e-280 or e <= max(0.25 * v, 1e-279):
            return fam
    return fam


def _signed_value(q, x, cfg: EvalConfig, zero_floor: float):
    """(sign, Approx): sign is 0 when |value| <= max(2 err, zero_floor)."""
    fam = _ladder(q, x, cfg, orders=0, res_floor=zero_floor)
    a = fam[0]
    v = float(a.value.real) if isinstance(a.value, complex) else float(a.value)
    if abs(v) <= max(2 * a.err, zero_floor):
        return 0, a
    return (1 if v > 0 else -1), a


def _geomid(a: float, b: float) -> float:
    """Geometric midpoint preserving the common sign of a and b."""
    s = 1.0 if a > 0 else -1.0
    return s * math.sqrt(abs(a) * abs(b))


# ----- pair probing -----------------------------------------------------------


def _dip_probe(q, xa: float, xb: float, cfg: EvalConfig, want: int,
               vscale: float, coarse: int = 9):
    """Search the open cell (xa, xb) for a dip below zero of want * theta.

    Both endpoints are known to carry sign `want`; vscale is the natural
    |theta| magnitude on the cell.  Works on a log|x| grid, then
    golden-sections around the smallest sample.  Returns ("crossing", x_neg)
    when a point of the opposite sign is found, else ("min", x_min, Approx)
    for the smallest achieved value.
    """
    sx = 1.0 if xa > 0 else -1.0
    ua, ub = math.log(abs(xa)), math.log(abs(xb))
    floor = 1e-14 * max(vscale, 1e-300)

    def val(u):
        x = sx * math.exp(u)
        fam = _ladder(q, x, cfg, orders=0, res_floor=floor)
        v = fam[0].value
        return (float(v.real) if isinstance(v, complex) else float(v)), fam[0]

    pts = []
    for i in range(1, coarse + 1):
        u = ua + (ub - ua) * i / (coarse + 1)
        v, ap = val(u)
        if want * v < -2 * ap.err:
            return ("crossing", sx * math.exp(u))
        pts.append((u, want * v))
    k = min(range(len(pts)), key=lambda i: pts[i][1])
    lo = pts[k - 1][0] if k > 0 else ua
    hi = pts[k + 1][0] if k < len(pts) - 1 else ub
    invphi = (math.sqrt(5.0) - 1) / 2
    u1 = hi - invphi * (hi - lo)
    u2 = lo + invphi * (hi - lo)
    f1, a1 = val(u1)
    f2, a2 = val(u2)
    f1 *= want
    f2 *= want
    best = (pts[k][0], pts[k][1], None)
    for _ in range(60):
        for u, f, ap in ((u1, f1, a1), (u2, f2, a2)):
            if f < -2 * ap.err:
                return ("crossing", sx * math.exp(u))
            if f < best[1]:
                best = (u, f, ap)
        if abs(hi - lo) < 1e-13:
            break
        if f1 < f2:
            hi, u2, f2, a2 = u2, u1, f1, a1
            u1 = hi - invphi * (hi - lo)
            f1, a1 = val(u1)
            f1 *= want
        else:
            lo, u1, f1, a1 = u1, u2, f2, a2
            u2 = lo + invphi * (hi - lo)
            f2, a2 = val(u2)
            f2 *= want
    if best[2] is None:
        v, ap = val(best[0])
        best = (best[0], want * v, ap)
    return ("min", sx * math.exp(best[0]), best[2])


def _wall_scale(q: float, j: int) -> float:
    """Natural |theta| magnitude at the cell walls of pair j.

    theta(q, -q^(-m)) equals q^m phi_(m+1)(q) exactly, which dodges the
    cancellation of the raw series there.
    """
    out = 0.0
    for m in (2 * j, 2 * j - 1):
        try:
            t = 10.0 ** (m * math.log10(q)) * abs(float(phi_k(q, m + 1.0).value))
        except OverflowError:
            t = 0.0
        out = max(out, t)
    return max(out, 1e-300)


def _pair_probe_qpos(q: float, j: int, cfg: EvalConfig):
    """Brackets (deep, shallow) for the pair xi_(2j), xi_(2j-1) of theta(q, .).

    The cell is (-q^(-2j), -q^(-2j+1)); theta is positive at the exact power
    points and the pair sits at the interior dip.  For small q a zero can hug
    its wall so closely that the float-rounded wall lands past it and
    evaluates negative; such a zero is treated as pinned to the wall
    (degenerate bracket).  Raises CoalescenceSuspected when the dip bottoms
    out near zero without crossing, NoSignChange when the pair has left the
    real axis at this q.
    """
    xl = -(q ** float(-2 * j))
    xr = -(q ** float(-2 * j + 1))
    sl, _ = _signed_value(q, xl, cfg, 0.0)
    sr, _ = _signed_value(q, xr, cfg, 0.0)
    if sl <= 0 and sr <= 0:
        return Bracket(xl, xl, 0, 0), Bracket(xr, xr, 0, 0)
    if sl <= 0:
        return Bracket(xl, xl, 0, 0), Bracket(xl, xr, -1, 1)
    if sr <= 0:
        return Bracket(xl, xr, 1, -1), Bracket(xr, xr, 0, 0)
    cell_scale = _wall_scale(q, j)
    out = _dip_probe(q, xl, xr, cfg, want=1, vscale=cell_scale)
    if out[0] == "crossing":
        xneg = out[1]
        deep = Bracket(xl, xneg, 1, -1)
        shallow = Bracket(xneg, xr, -1, 1)
        return deep, shallow
    _, xmin, ap = out
    vmin = max(_absf(ap.value), ap.err)
    if vmin <= 1e-10 * cell_scale:
        raise CoalescenceSuspected(
            f"pair {j} dip at x={xmin:.6g} has |theta|={vmin:.3g}, "
            "too close to a double zero to split", q=q, x=xmin)
    raise NoSignChange(
        f"pair {j} is not on the real axis at q={q:.6g} "
        f"(dip minimum {vmin:.3g} at x={xmin:.6g})")


def bracket_real_zeros_qpos(q: float, n: int, cfg: EvalConfig | None = None):
    """Brackets for the first n real zeros xi_1 .. xi_n, ordered from xi_1.

    Built from the power grid -q^(-m): the pair (xi_(2j), xi_(2j-1)) lives in
    the cell between -q^(-2j) and -q^(-2j+1) and is split at the interior
    sign dip.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("bracket_real_zeros_qpos needs q in (0, 1)")
    if n < 1:
        raise DomainError("need n >= 1")
    out = []
    for j in range(1, (n + 1) // 2 + 1):
        deep, shallow = _pair_probe_qpos(qf, j, cfg)
        out.append(shallow)     # xi_(2j-1)
        out.append(deep)        # xi_(2j)
    return out[:n]


# ----- refinement -------------------------------------------------------------


def refine_zero(q: float, b: Bracket, cfg: EvalConfig | None = None):
    """Polish a bracketed zero; returns (x, residual).

    Newton steps via theta_dx whenever they stay inside the bracket,
    bisection otherwise; the residual reported is |theta| at the returned
    point.  Residual acceptance scales with the largest series term.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if b.lo == b.hi:
        fam = _ladder(qf, b.lo, cfg, orders=0)
        return b.lo, _absf(fam[0].value)
    lo, hi = b.lo, b.hi
    slo = b.sign_lo
    S = _scale_spec(qf, 0.5 * (lo + hi))
    res_tol = 1e-13 * S
    x = 0.5 * (lo + hi)
    floor = 0.0
    for _ in range(200):
        fam = _ladder(qf, x, cfg, orders=1, res_floor=floor)
        f_ap, d_ap = fam[0], fam[1]
        f = float(f_ap.value.real) if isinstance(f_ap.value, complex) \
            else float(f_ap.value)
        resid = abs(f)
        width = hi - lo
        tight = width <= 5e-16 * max(abs(lo), abs(hi))
        if tight or (resid <= max(2 * f_ap.err, floor)
                     and resid <= res_tol and width <= 1e-10 * abs(x)):
            return x, max(resid, f_ap.err)
        if resid <= 2 * f_ap.err:
            # sign not resolved even after escalation: call it converged
            return x, max(resid, f_ap.err)
        if (1 if f > 0 else -1) == slo:
            lo = x
        else:
            hi = x
        d = float(d_ap.value.real) if isinstance(d_ap.value, complex) \
            else float(d_ap.value)
        xn = None
        if d_ap.err < 0.5 * abs(d) and d != 0:
            step = f / d
            cand = x - step
            if lo < cand < hi and abs(step) <= 0.7 * (hi - lo):
                xn = cand
                floor = 0.05 * abs(d) * max(abs(step), 1e-16 * abs(x))
        if xn is None:
            xn = 0.5 * (lo + hi)
            floor = 0.05 * abs(d) * (hi - lo) if d_ap.err < 0.5 * abs(d) else 0.0
        x = xn
    raise NoConvergence("refine_zero: 200 iterations without meeting tolerance")


# ----- q < 0 scanning ---------------------------------------------------------


def _scan_side(q: float, sgn: int, max_exp: float, need: int, cfg: EvalConfig):
    """Walk |x| = 1 .. v^(-max_exp) geometrically on one side, refine zeros.

    Same-sign cells get a midpoint dip check so that near-coalesced pairs
    are still split.  Returns zeros ordered by increasing |x|.
    """
    v = -q
    ratio = v ** -0.25
    zeros = []
    x_prev = sgn * 1.0
    s_prev, a_prev = _signed_value(q, x_prev, cfg, 0.0)
    steps = int(math.ceil(max_exp / 0.25)) + 2
    for _ in range(steps):
        x_cur = x_prev * ratio
        s_cur, a_cur = _signed_value(q, x_cur, cfg, 0.0)
        if s_prev != 0 and s_cur != 0:
            lo, hi = (x_prev, x_cur) if x_prev < x_cur else (x_cur, x_prev)
            if s_cur * s_prev < 0:
                bl, bh = (s_prev, s_cur) if x_prev < x_cur else (s_cur, s_prev)
                z, _ = refine_zero(q, Bracket(lo, hi, bl, bh), cfg)
                zeros.append(z)
            else:
                mid = _geomid(x_prev, x_cur)
                sm, am = _signed_value(q, mid, cfg, 0.0)
                small = 0.5 * min(_absf(a_prev.value), _absf(a_cur.value))
                if sm != 0 and sm != s_prev:
                    bl, bh = (s_prev, sm) if x_prev < mid else (sm, s_prev)
                    zl, zh = (x_prev, mid) if x_prev < mid else (mid, x_prev)
                    z1, _ = refine_zero(q, Bracket(zl, zh, bl, bh), cfg)
                    bl, bh = (sm, s_cur) if mid < x_cur else (s_cur, sm)
                    zl, zh = (mid, x_cur) if mid < x_cur else (x_cur, mid)
                    z2, _ = refine_zero(q, Bracket(zl, zh, bl, bh), cfg)
                    zeros.extend(sorted((z1, z2), key=abs))
                elif sm != 0 and _absf(am.value) < small:
                    cell = max(_absf(a_prev.value), _absf(a_cur.value))
                    out = _dip_probe(q, x_prev, x_cur, cfg,
                                     want=s_prev, vscale=cell)
                    if out[0] == "crossing":
                        xneg = out[1]
                        zl, zh = sorted((x_prev, xneg))
                        z1, _ = refine_zero(
                            q, Bracket(zl, zh, s_prev, -s_prev), cfg)
                        zl, zh = sorted((xneg, x_cur))
                        z2, _ = refine_zero(
                            q, Bracket(zl, zh, -s_cur, s_cur), cfg)
                        zeros.extend(sorted((z1, z2), key=abs))
                    else:
                        _, xmin, ap = out
                        vmin = max(_absf(ap.value), ap.err)
                        cell = max(_absf(a_prev.value), _absf(a_cur.value))
                        if vmin <= 1e-10 * cell:
                            raise CoalescenceSuspected(
                                "near-double zero while scanning",
                                q=q, x=xmin)
        x_prev, s_prev, a_prev = x_cur, s_cur, a_cur
        if len(zeros) >= need:
            break
    return zeros


def zeros_qneg(q: float, n: int, cfg: EvalConfig | None = None):
    """First n negative zeros zeta and n positive zeros eta for q in (-1, 0).

    Ordered by increasing |x| (zeta_1, zeta_2, ... and eta_1, eta_2, ...).
    The scan grid is geometric with ratio |q|^(-1/4), anchored at |x| = 1
    since no zero lies in [-1, 1].  Either list may come back shorter than n
    when the corresponding pairs have already coalesced and left the real
    axis (q beyond their spectral values); near -1 only eta_1 remains.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not -1 < qf < 0:
        raise DomainError("zeros_qneg needs q in (-1, 0)")
    if n < 1:
        raise DomainError("need n >= 1")
    negs = _scan_side(qf, -1, 2 * n + 1.0, n, cfg)
    if len(negs) < n:
        negs = _scan_side(qf, -1, 2 * n + 3.0, n, cfg)
    pos = _scan_side(qf, +1, 2 * n + 0.5, n, cfg)
    if len(pos) < n:
        pos = _scan_side(qf, +1, 2 * n + 2.5, n, cfg)
    return negs[:n], pos[:n]


def _polish_mp(q: float, x0: float, digits: int, cfg: EvalConfig):
    """Newton-polish a zero in mpmath; returns (x: mpf, err_bound: float-ish).

    Needed where consecutive chain quantities agree to more digits than a
    float can hold.  Must be called inside an mp.workdps context at least as
    wide as digits.
    """
    from mpmath import mp

    wcfg = EvalConfig(precision_digits=digits, tail_tol=cfg.tail_tol,
                      max_terms=cfg.max_terms,
                      reduction_threshold=cfg.reduction_threshold)
    x = mp.mpf(x0)
    step = mp.mpf(1)
    for _ in range(10):
        f, d = theta_family(q, x, wcfg, orders=1)
        if d.value == 0:
            break
        step = f.value / d.value
        x = x - step
        if abs(step) <= mp.mpf(10) ** (-digits + 4) * abs(x):
            break
    err = 4 * abs(step) + abs(x) * mp.mpf(10) ** (-digits + 6)
    return x, err


def ordering_check_qneg(q: float, n: int, cfg: EvalConfig | None = None) -> bool:
    """Verify the two interleaving chains of zeros and their q-multiples.

    Negative axis: ... < zeta_4 < zeta_3 < q eta_4 < q eta_3 < zeta_2
                   < zeta_1 < q eta_2 < 0
    Positive axis: 0 < eta_1 < q zeta_1 < q zeta_2 < eta_2 < eta_3
                   < q zeta_3 < q zeta_4 < ...
    using the first n zeros of each sign; true iff every available
    inequality holds strictly.  Consecutive chain members can agree to far
    more digits than a float holds (the gaps shrink like high powers of
    |q|), so the zeros are Newton-polished in mpmath and compared there,
    escalating precision until every gap is certified either way.
    """
    from mpmath import mp

    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    zetas, etas = zeros_qneg(qf, n, cfg)
    if len(zetas) < n or len(etas) < n:
        raise NoSignChange(
            f"only {len(zetas)} negative / {len(etas)} positive real zeros "
            f"at q={qf:.6g}, cannot check the first {n}")
    for digits in (60, 120, 240):
        with mp.workdps(digits + 15):
            zp = [_polish_mp(qf, x, digits, cfg) for x in zetas]
            ep = [_polish_mp(qf, x, digits, cfg) for x in etas]
            z = {i + 1: zp[i] for i in range(n)}
            e = {i + 1: ep[i] for i in range(n)}
            verdict = _check_chains(mp.mpf(qf), z, e)
        if verdict is not None:
            return verdict
    return False


def _check_chains(qm, z, e):
    """True/False when every chain gap is certified, None when under-resolved."""
    n = len(z)
    desc = [(qm * 0, qm * 0)]
    m = 1
    while True:
        blk = [(e, 2, True), (z, 1, False), (z, 2, False)] if m == 1 else \
              [(e, 2 * m - 1, True), (e, 2 * m, True),
               (z, 2 * m - 1, False), (z, 2 * m, False)]
        done = False
        for src, idx, mul in blk:
            if idx not in src:
                done = True
                break
            xv, xe = src[idx]
            desc.append((qm * xv if mul else xv, abs(qm) * xe if mul else xe))
        if done:
            break
        m += 1
    asc = [(qm * 0, qm * 0)]
    m = 1
    while True:
        blk = [(e, 1, False), (z, 1, True), (z, 2, True), (e, 2, False)] \
            if m == 1 else \
            [(e, 2 * m - 1, False), (z, 2 * m - 1, True),
             (z, 2 * m, True), (e, 2 * m, False)]
        done = False
        for src, idx, mul in blk:
            if idx not in src:
                done = True
                break
            xv, xe = src[idx]
            asc.append((qm * xv if mul else xv, abs(qm) * xe if mul else xe))
        if done:
            break
        m += 1
    for chain, op in ((desc, 1), (asc, -1)):
        for i in range(len(chain) - 1):
            (a, ea), (b, eb) = chain[i], chain[i + 1]
            gap = (a - b) if op == 1 else (b - a)
            if gap <= 0:
                if abs(gap) <= 5 * (ea + eb):
                    return None
                return False
            if gap <= 5 * (ea + eb):
                return None
    return True


# ----- curve tracing ----------------------------------------------------------


def _locate_pair(regime: str, index: int, q: float, cfg: EvalConfig):
    """(x_lower, x_upper) for the pair forming the curve at parameter q.

    lower is the branch of smaller |x|.
    """
    if regime == "q_pos":
        deep, shallow = _pair_probe_qpos(q, index, cfg)
        xl, _ = refine_zero(q, shallow, cfg)
        xu, _ = refine_zero(q, deep, cfg)
    elif regime == "q_neg_negative_zeros":
        negs, _ = zeros_qneg(q, 2 * index, cfg)
        if len(negs) < 2 * index:
            raise NoSignChange(f"pair {index} has no real members at q={q:.6g}")
        xl, xu = negs[2 * index - 2], negs[2 * index - 1]
    elif regime == "q_neg_positive_zeros":
        _, pos = zeros_qneg(q, 2 * index + 1, cfg)
        if len(pos) < 2 * index + 1:
            raise NoSignChange(f"pair {index} has no real members at q={q:.6g}")
        xl, xu = pos[2 * index - 1], pos[2 * index]
    else:
        raise DomainError(f"unknown regime {regime!r}")
    return xl, xu


def _march_zero(q: float, x_pred: float, halfgap: float, cfg: EvalConfig):
    """Re-bracket a zero near a predicted location and refine it."""
    h = max(1e-4 * halfgap, 1e-12 * abs(x_pred))
    for _ in range(60):
        a, b = x_pred - h, x_pred + h
        sa, _ = _signed_value(q, a, cfg, 0.0)
        sb, _ = _signed_value(q, b, cfg, 0.0)
        if sa * sb == -1:
            z, _ = refine_zero(q, Bracket(a, b, sa, sb), cfg)
            return z
        h *= 1.7
        if h > halfgap:
            raise LostTrack(
                f"no sign change within the pair gap near x={x_pred:.6g}, q={q:.6g}")
    raise LostTrack("bracket expansion stalled")


def _theta_ratio_fold(q: float, x: float, cfg: EvalConfig) -> bool:
    """True when the x-derivative collapses against the q-derivative at (q, x).

    The comparison is taken in logarithmic coordinates, |x theta_x| against
    |q theta_q|, so that the huge raw d/dq values near q = 0 (where the pair
    sits far out at x ~ -q^-2j and d/dq picks up a factor ~ |x|/q from the
    chain of powers) do not masquerade as a fold.
    """
    from .evaluate import theta_dq
    fam = _ladder(q, x, cfg, orders=1)
    dx = _absf(fam[1].value) * abs(x)
    try:
        dq = _absf(theta_dq(q, x, cfg).value) * abs(q)
    except DomainError:
        return False
    return dx < 1e-4 * dq


def _q_of_x(x: float, q_from: float, dq0: float, s_dir: float,
            cfg: EvalConfig, q_limit: float):
    """Solve theta(q, x) = 0 for q marching from q_from toward q_limit.

    The start sign is the in-dip sign; expansion doubles the step (capped
    at 0.02 so narrow sign bands between later zero pairs are not hopped
    over) until the sign flips, then bisection.  Raises StepCollapse if no
    flip occurs or the evaluation degenerates approaching |q| = 1.
    """
    s0, _ = _signed_value(q_from, x, cfg, 0.0)
    if s0 == 0:
        return q_from
    d = min(max(abs(dq0), 1e-9), 0.02)
    qa = q_from
    qb = None
    for _ in range(200):
        cand = qa + s_dir * d
        if s_dir * (cand - q_limit) >= 0:
            cand = q_limit
        if 1 - abs(cand) < 1e-6:
            break
        try:
            s, _ = _signed_value(cand, x, cfg, 0.0)
        except TailNotConverged:
            break
        if s == 0:
            return cand
        if s != s0:
            qb = cand
            break
        qa = cand
        if cand == q_limit:
            break
        d = min(d * 2, 0.02)
    if qb is None:
        raise StepCollapse(
            f"no q-crossing along x={x:.6g} between {q_from:.6g} and {q_limit:.6g}")
    for _ in range(200):
        qm = 0.5 * (qa + qb)
        if abs(qb - qa) <= 1e-15 * max(abs(qa), abs(qb)):
            return qm
        s, _ = _signed_value(qm, x, cfg, 0.0)
        if s == 0:
            return qm
        if s == s0:
            qa = qm
        else:
            qb = qm
    return 0.5 * (qa + qb)


def _fold_trace(regime: str, q_last: float, xl: float, xu: float,
                dq_last: float, cfg: EvalConfig):
    """Resolve the fold beyond q_last; returns (fold_pts, turning_point).

    q as a function of x across the pair interval has its extremum at the
    fold apex.  Staged window shrinking (13 samples per stage, re-centered
    on the extremal triple) localizes the apex, then iterated parabolic
    vertex refinement polishes it.  fold_pts are all accepted (q, x) arc
    samples, turning_point the apex.
    """
    s_dir = 1.0 if q_last > 0 else -1.0
    q_limit = s_dir * (1 - 1e-9)
    all_pts: list[tuple[float, float]] = []
    lo0, hi0 = (xl, xu) if xl < xu else (xu, xl)
    wlo, whi = lo0, hi0
    triple = None
    for _ in range(8):
        stage = []
        for i in range(1, 14):
            x = wlo + (whi - wlo) * i / 14
            try:
                qx = _q_of_x(x, q_last, dq_last, s_dir, cfg, q_limit)
            except StepCollapse:
                continue
            stage.append((x, qx))
        if len(stage) < 5:
            if all_pts:
                break
            raise StepCollapse("fold arc could not be sampled")
        all_pts.extend(stage)
        stage.sort()
        k = max(range(len(stage)), key=lambda i: s_dir * stage[i][1])
        if k == 0:
            # apex sits left of this window; re-open down to the pair endpoint
            triple = None
            wlo, whi = lo0, stage[1][0]
            continue
        if k == len(stage) - 1:
            triple = None
            wlo, whi = stage[k - 1][0], hi0
            continue
        triple = [stage[k - 1], stage[k], stage[k + 1]]
        wlo, whi = stage[k - 1][0], stage[k + 1][0]
        if whi - wlo <= 1e-9 * max(abs(wlo), abs(whi)):
            break
    if triple is None:
        pts = sorted(all_pts)
        k = max(range(len(pts)), key=lambda i: s_dir * pts[i][1])
        turning = (pts[k][1], pts[k][0])
        return [(qx, x) for (x, qx) in pts], turning
    pts = list(triple)
    for _ in range(30):
        pts.sort()
        k = max(range(len(pts)), key=lambda i: s_dir * pts[i][1])
        if k == 0 or k == len(pts) - 1:
            break
        (x0, q0), (x1, q1), (x2, q2) = pts[k - 1], pts[k], pts[k + 1]
        d1 = (q1 - q0) / (x1 - x0)
        d2 = (q2 - q1) / (x2 - x1)
        curv = (d2 - d1) / (x2 - x0)
        if curv == 0 or s_dir * curv > 0:
            break
        xv = 0.5 * ((x0 + x1) - d1 / curv)
        if not (x0 < xv < x2) or any(abs(xv - p[0]) < 5e-16 * abs(xv) for p in pts):
            break
        try:
            qv = _q_of_x(xv, q_last, dq_last, s_dir, cfg, q_limit)
        except StepCollapse:
            break
        pts.append((xv, qv))
        all_pts.append((xv, qv))
        if abs(qv - q1) < 1e-13 * max(1.0, abs(qv)) and abs(xv - x1) < 1e-10 * abs(xv):
            break
    pts.sort()
    k = max(range(len(pts)), key=lambda i: s_dir * pts[i][1])
    turning = (pts[k][1], pts[k][0])
    seen = set()
    arc = []
    for (x, qx) in sorted(all_pts):
        key = round(x, 12) if abs(x) < 1 else x
        if key in seen or (x, qx) == (pts[k][0], pts[k][1]):
            continue
        seen.add(key)
        arc.append((qx, x))
    return arc, turning


def trace_curve(regime: str, index: int, q_grid, cfg: EvalConfig | None = None) -> ZeroCurve:
    """Trace the zero-pair curve through the given q grid.

    Secant predictor plus re-bracketed refinement per branch; when the pair
    stops splitting (or |theta_x| drops far below |theta_q|), the trace
    switches to x-parametrization and solves q(x) across the last known pair
    interval, recording the fold apex as turning_point.
    """
    cfg = cfg or DEFAULT_CONFIG
    if regime not in REGIMES:
        raise DomainError(f"regime must be one of {REGIMES}")
    if index < 1:
        raise DomainError("index must be a positive integer")
    grid = [float(g) for g in q_grid]
    if len(grid) < 2:
        raise DomainError("q_grid needs at least two points")
    for g in grid:
        if regime == "q_pos" and not 0 < g < 1:
            raise DomainError("q_pos grid values must lie in (0, 1)")
        if regime != "q_pos" and not -1 < g < 0:
            raise DomainError("q_neg grid values must lie in (-1, 0)")
    if any(abs(grid[i + 1]) <= abs(grid[i]) for i in range(len(grid) - 1)):
        raise DomainError("q_grid must be ordered with |q| strictly increasing")
    if any(abs(grid[i + 1] - grid[i]) < 1e-12 for i in range(len(grid) - 1)):
        raise StepCollapse("q_grid spacing below 1e-12")

    lower: list[tuple[float, float]] = []
    upper: list[tuple[float, float]] = []
    turning = None
    fold_pts: list[tuple[float, float]] = []
    prev = None     # (q, xl, xu)
    prev2 = None
    for gi, q in enumerate(grid):
        if prev is None or prev2 is None:
            try:
                xl, xu = _locate_pair(regime, index, q, cfg)
            except (NoSignChange, CoalescenceSuspected):
                if prev is None:
                    raise
                dq = abs(q - prev[0])
                fold_pts, turning = _fold_trace(
                    regime, prev[0], prev[1], prev[2], dq, cfg)
                break
        else:
            (qa, xla, xua), (qb, xlb, xub) = prev2, prev
            t = (q - qb) / (qb - qa)
            # extrapolate in log|x|: branches grow like powers of q, and a
            # linear step can overshoot straight through x = 0
            sgn = 1.0 if xlb > 0 else -1.0
            pl = sgn * math.exp(math.log(abs(xlb))
                                + (math.log(abs(xlb)) - math.log(abs(xla))) * t)
            pu = sgn * math.exp(math.log(abs(xub))
                                + (math.log(abs(xub)) - math.log(abs(xua))) * t)
            gap = abs(pu - pl)
            try:
                if gap <= 1e-9 * max(abs(pl), abs(pu)):
                    raise LostTrack("branches predicted to cross")
                xl = _march_zero(q, pl, 0.45 * gap, cfg)
                xu = _march_zero(q, pu, 0.45 * gap, cfg)
                if xl * xu <= 0 or abs(xl) >= abs(xu):
                    raise LostTrack("branch ordering lost")
            except (LostTrack, NoSignChange, CoalescenceSuspected):
                # the secant predictor can overrun on a coarse grid; a fresh
                # probe at this q settles whether the pair is really gone.
                # A probe result far from the prediction means the pair
                # vanished and a different one answered, so fold instead.
                try:
                    xl, xu = _locate_pair(regime, index, q, cfg)
                    mid_prev = 0.5 * (xlb + xub)
                    halfw = 0.5 * abs(xub - xlb)
                    tol = 3 * halfw + 0.05 * abs(mid_prev)
                    if abs(0.5 * (xl + xu) - mid_prev) > tol:
                        raise LostTrack("re-probe landed on a different pair")
                except (NoSignChange, CoalescenceSuspected, LostTrack, IndexError):
                    dq = abs(q - qb)
                    fold_pts, turning = _fold_trace(regime, qb, xlb, xub, dq, cfg)
                    break
        lower.append((q, xl))
        upper.append((q, xu))
        prev2 = prev
        prev = (q, xl, xu)
        pair_tight = abs(xu - xl) < 0.2 * abs(xl)
        if (gi >= 2 and gi < len(grid) - 1 and pair_tight
                and _theta_ratio_fold(q, xl, cfg)):
            dq = abs(grid[gi + 1] - q)
            fold_pts, turning = _fold_trace(regime, q, xl, xu, dq, cfg)
            break

    samples: list[tuple[float, float]] = list(lower)
    labels = [LOWER] * len(lower)
    if turning is not None:
        xstar = turning[1]
        qfloor = abs(lower[-1][0]) if lower else 0.0
        lo_side = []
        for p in sorted((p for p in fold_pts if abs(p[1]) < abs(xstar)),
                        key=lambda p: abs(p[0])):
            if abs(p[0]) > (abs(lo_side[-1][0]) if lo_side else qfloor):
                lo_side.append(p)
        qceil = abs(upper[-1][0]) if upper else 0.0
        hi_side = []
        for p in sorted((p for p in fold_pts if abs(p[1]) >= abs(xstar)),
                        key=lambda p: -abs(p[0])):
            if abs(p[0]) > qceil and (not hi_side or abs(p[0]) < abs(hi_side[-1][0])):
                hi_side.append(p)
        samples.extend(lo_side)
        labels.extend([LOWER] * len(lo_side))
        samples.extend(hi_side)
        labels.extend([UPPER] * len(hi_side))
    samples.extend(reversed(upper))
    labels.extend([UPPER] * len(upper))
    return ZeroCurve(regime=regime, index=index, samples=samples,
                     branch_labels=labels, turning_point=turning)


# ----- sign patterns ----------------------------------------------------------


def sign_pattern_check(q: float, j_regime: int, cfg: EvalConfig | None = None) -> bool:
    """Check the sign alternation when the first j_regime pairs are complex.

    With xi_(2j+1), xi_(2j+2), ... the remaining real zeros, theta must be
    positive on (xi_(2j+1), infinity), negative between the next pair, and
    so on.  Samples midpoints (geometric) of consecutive zero intervals and
    several points to the right of the largest zero.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("sign_pattern_check needs q in (0, 1)")
    if j_regime < 0:
        raise DomainError("j_regime must be >= 0")
    j = j_regime
    zs = []
    for k in (j + 1, j + 2):
        deep, shallow = _pair_probe_qpos(qf, k, cfg)
        zs.append(refine_zero(qf, shallow, cfg)[0])
        zs.append(refine_zero(qf, deep, cfg)[0])
    z1, z2, z3, z4 = zs      # xi_(2j+1) > xi_(2j+2) > xi_(2j+3) > xi_(2j+4)
    probes = [(0.5 * z1, 1), (0.1 * z1, 1), (0.0, 1), (1.0, 1), (abs(z1), 1),
              (_geomid(z2, z1), -1),
              (_geomid(z3, z2), 1),
              (_geomid(z4, z3), -1)]
    for x, want in probes:
        s, _ = _signed_value(qf, x, cfg, 0.0)
        if s != want:
            return False
    return True


# ----- power-curve intersections ------------------------------------------------


def _power_curve_roots(a: float, cfg: EvalConfig):
    """All sign-change roots of q -> theta(q, -q^(-a)) on (0, 1).

    Uses theta(q, -q^(-a)) = phi_(1-a)(q), which sidesteps the catastrophic
    cancellation of the direct series at x = -q^(-a).
    """
    k = 1.0 - a
    qs = []
    g = 1e-4
    while g < 0.5:
        qs.append(g)
        g *= 1.18
    g = 0.5
    while g < 0.999:
        qs.append(g)
        g += 0.004
    qs.append(0.999)
    roots = []
    s_prev = None
    q_prev = None
    for qv in qs:
        ap = phi_k(qv, k, cfg)
        v = float(ap.value)
        s = 0 if abs(v) <= 4 * ap.err else (1 if v > 0 else -1)
        if s_prev is not None and s != 0 and s_prev != 0 and s != s_prev:
            lo, hi = q_prev, qv
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                am = phi_k(mid, k, cfg)
                vm = float(am.value)
                sm = 0 if abs(vm) <= 4 * am.err else (1 if vm > 0 else -1)
                if sm == 0 or hi - lo <= 1e-15 * mid:
                    lo = hi = mid
                    break
                if sm == s_prev:
                    lo = mid
                else:
                    hi = mid
            qr = 0.5 * (lo + hi)
            roots.append((qr, -(qr ** (-a))))
        if s != 0:
            s_prev, q_prev = s, qv
    return roots


def root_on_power_curve(a: float, cfg: EvalConfig | None = None):
    """Intersection of the zero set with x = -q^(-a); None when there is none.

    For integer a the value theta(q, -q^(-a)) equals q^a phi_(a+1)(q) > 0, so
    no root exists.  Multiple sign changes are reported with a
    MultipleRootsFound warning and the largest-q root is returned.
    """
    cfg = cfg or DEFAULT_CONFIG
    af = float(a)
    if not af > 0:
        raise DomainError("root_on_power_curve needs a > 0")
    if af.is_integer():
        for qv in (0.1, 0.4, 0.8):
            ap = phi_k(qv, af + 1, cfg)
            if not float(ap.value) > 0:
                raise NoSignChange(
                    "positivity of q^a phi_(a+1) failed, which contradicts "
                    "the closed form for integer a")
        return None
    roots = _power_curve_roots(af, cfg)
    if not roots:
        return None
    if len(roots) > 1:
        warnings.warn(MultipleRootsFound(
            f"{len(roots)} intersections with x=-q^(-{af}) found; "
            "returning the largest-q one"))
    return roots[-1]


def halfpower_slope_check(s: int, cfg: EvalConfig | None = None) -> bool:
    """At every root of theta(q, -q^(-2s+1/2)), check theta_dx > 0.

    Scans for the intersections of the half-power curve (exponent
    a = 2s - 1/2) and certifies the sign of the x-derivative at each; true
    when every found intersection has a strictly positive derivative (and
    vacuously true when none is found).
    """
    cfg = cfg or DEFAULT_CONFIG
    if s < 1:
        raise DomainError("halfpower_slope_check needs integer s >= 1")
    a = 2 * s - 0.5
    roots = _power_curve_roots(a, cfg)
    for qr, xr in roots:
        fam = _ladder(qr, xr, cfg, orders=1)
        d_ap = fam[1]
        d = float(d_ap.value.real) if isinstance(d_ap.value, complex) \
            else float(d_ap.value)
        if d_ap.err >= 0.25 * abs(d):
            tgt = max(abs(d) * 1e-6, 1e-200)
            fam = family_to_accuracy(qr, xr, tgt, cfg, orders=1)
            d_ap = fam[1]
            d = float(d_ap.value)
        if not (d > 0 and d_ap.err < 0.25 * abs(d)):
            return False
    return True


# ----- serialization ------------------------------------------------------------


def zero_curve_csv(curves) -> str:
    """CSV rows regime,index,branch,q,x at 17 significant digits."""
    lines = ["regime,index,branch,q,x"]
    for c in curves:
        for (qv, xv), lab in zip(c.samples, c.branch_labels):
            lines.append("%s,%d,%s,%.17g,%.17g" % (c.regime, c.index, lab, qv, xv))
    return "\n".join(lines) + "\n"
