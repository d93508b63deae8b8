"""Complex zeros: winding counts, conjugate-pair tracking, containment audits.

Counting runs the argument principle around axis-aligned rectangles with
adaptive phase refinement.  Tracking continues the pair born at each fold
through increasing q by complex Newton steps and records where it crosses
the imaginary axis; an independent route to the same crossing goes through
the even/odd split of theta(q, iy) into two real series, whose positive
zeros interlace and collide exactly at the crossing.
"""

from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryTooClose,
    CoalescenceSuspected,
    DomainError,
    LostTrack,
    MultipleRootsFound,
    NoConvergence,
    NoSignChange,
    PhaseJump,
)
from .evaluate import (
    DEFAULT_CONFIG,
    EvalConfig,
    family_to_accuracy,
    peak_term_log10,
    theta,
    theta_family,
)
from .realzeros import (
    _dip_probe,
    _ladder,
    _pair_probe_qpos,
    _signed_value,
    _wall_scale,
    refine_zero,
    zeros_qneg,
)
from .spectrum import fold_qpos

STRIP_IM_BOUND = 132.0
HALF_DISK_RADIUS = 18.0
MASTER_IM_MAX = 140.0
MASTER_IM_MIN = 1e-2
MASTER_RE_MAX = 20.0
BOUNDARY_CLEARANCE = 1e-3
CROSSING_RE_TOL = 1e-9

_MAX_WALK_DEPTH = 64
_HALF_PI = 0.5 * math.pi
_SPLIT_FRACTIONS = (0.5, 0.46, 0.54, 0.42, 0.58, 0.37, 0.63, 0.31, 0.69)


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle in the x-plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("region corners must be finite")
        if not self.re_min < self.re_max:
            raise DomainError("need re_min < re_max")
        if not self.im_min < self.im_max:
            raise DomainError("need im_min < im_max")

    def contains(self, x: complex, margin: float = 0.0) -> bool:
        return (self.re_min + margin <= x.real <= self.re_max - margin
                and self.im_min + margin <= x.imag <= self.im_max - margin)


@dataclass
class PairTrack:
    """One conjugate pair followed in q, upper-half representative only."""

    pair_index: int
    q_samples: np.ndarray
    x_samples: np.ndarray
    birth_q: float
    crossing_q: float | None
    post_crossing_contained: bool

    def __post_init__(self):
        self.q_samples = np.asarray(self.q_samples, dtype=float)
        self.x_samples = np.asarray(self.x_samples, dtype=complex)
        if self.q_samples.shape != self.x_samples.shape:
            raise DomainError("sample arrays must align")
        if self.x_samples.size and not (self.x_samples.imag > 0).all():
            raise DomainError("samples must stay in the open upper half-plane")


# ----- argument-principle counting ---------------------------------------------


def _require_q(q: float) -> float:
    qf = float(q)
    if not 0 < abs(qf) < 1:
        raise DomainError("need 0 < |q| < 1")
    return qf


def _geometric_breaks(q: float, lo: float, hi: float):
    """Breakpoints tracking the real-zero ladder on a horizontal span.

    Real zeros sit near -|q|^-k (and +|q|^-k when q < 0), so half-power
    steps in |q| keep every initial segment commensurate with the local
    zero spacing.
    """
    out = []
    aq = abs(q)
    for sgn in (-1.0, 1.0):
        edge = -lo if sgn < 0 else hi
        if edge <= 1.0:
            continue
        kmax = int(math.ceil(2.0 * math.log(edge) / -math.log(aq))) + 1
        for k in range(1, kmax + 1):
            v = sgn * aq ** (-0.5 * k)
            if lo < v < hi:
                out.append(v)
    return out


_MARKER_CACHE: dict[tuple, object] = {}


def _cell_marker_qpos(q: float, j: int, cfg: EvalConfig):
    """Abscissa at or between the members of real-zero pair j, q in (0, 1).

    A boundary sample there stops the phase walk from striding over both
    members of a nearly coalesced pair at once, which would silently slip
    the winding by a whole turn: the two near-merged zeros turn the phase
    through 2 pi inside one stride, invisible to endpoint differences.
    None when a member pins its cell wall, which only happens far from
    coalescence where the members do not churn jointly.
    """
    key = ("pos", q, cfg.precision_digits, j)
    if key not in _MARKER_CACHE:
        xl = -(q ** float(-2 * j))
        xr = -(q ** float(-2 * j + 1))
        sl, _ = _signed_value(q, xl, cfg, 0.0)
        sr, _ = _signed_value(q, xr, cfg, 0.0)
        if sl <= 0 or sr <= 0:
            _MARKER_CACHE[key] = None
        else:
            out = _dip_probe(q, xl, xr, cfg, want=1, vscale=_wall_scale(q, j))
            _MARKER_CACHE[key] = float(out[1])
    return _MARKER_CACHE[key]


def _axis_markers_qneg(q: float, extent: float, cfg: EvalConfig):
    """Real zeros plus midpoints of same-side neighbours, q in (-1, 0).

    Near a spectral value two neighbouring zeros pinch together and the
    midpoint sample splits them for the phase walk.  Log-spaced filler on
    the inner gaps guards the window where a freshly complex pair still
    hovers close to the axis.
    """
    lam = -math.log(-q)
    key = ("neg", q, cfg.precision_digits)
    have = _MARKER_CACHE.get(key)
    if have is not None and have[0] >= extent:
        return have[1]
    n = min(80, int(math.ceil(math.log(max(extent, 2.0)) / lam)) + 2)
    zetas, etas = zeros_qneg(q, n, cfg)
    marks: list[float] = []
    for side in (zetas, etas):
        vals = sorted(side, key=abs)
        marks.extend(float(v) for v in vals)
        for a, b in zip(vals, vals[1:]):
            marks.append(math.copysign(math.sqrt(abs(a) * abs(b)), a))
    inner = math.log(min(extent, 32.0))
    for sgn in (-1.0, 1.0):
        m = 0
        while m * lam < inner:
            for i in range(1, 9):
                marks.append(sgn * math.exp(m * lam + lam * i / 9.0))
            m += 1
    _MARKER_CACHE[key] = (extent, marks)
    return marks


def _horizontal_marks(q: float, lo: float, hi: float, y: float,
                      cfg: EvalConfig):
    if abs(y) >= 2.0:
        return []
    if q > 0:
        lam = -math.log(q)
        if lo >= -1.0:
            return []
        jmax = min(60, int((math.log(-lo) / lam + 1.0) // 2) + 1)
        out = []
        for j in range(1, jmax + 1):
            mk = _cell_marker_qpos(q, j, cfg)
            if mk is not None and lo < mk < hi:
                out.append(mk)
        return out
    extent = max(-lo, hi, 2.0)
    return [v for v in _axis_markers_qneg(q, extent, cfg) if lo < v < hi]


def _boundary_points(q: float, region: Region, cfg: EvalConfig,
                     density: int = 1):
    """Closed boundary loop, counterclockwise, as a list of complex points."""
    lin = 16 * density

    def horizontal(a: float, b: float, y: float):
        lo, hi = min(a, b), max(a, b)
        pts = list(np.linspace(a, b, lin, endpoint=False))
        pts += _geometric_breaks(q, lo, hi)
        pts += _horizontal_marks(q, lo, hi, y, cfg)
        pts = sorted(set(pts), reverse=a > b)
        return [complex(t, y) for t in pts]

    def vertical(y0: float, y1: float, xr: float):
        return [complex(xr, t) for t in np.linspace(y0, y1, lin, endpoint=False)]

    loop = (horizontal(region.re_min, region.re_max, region.im_min)
            + vertical(region.im_min, region.im_max, region.re_max)
            + horizontal(region.re_max, region.re_min, region.im_max)
            + vertical(region.im_max, region.im_min, region.re_min))
    return loop


def _clearance_check(q: float, pts, vals, cfg: EvalConfig):
    """Estimate the distance from the boundary to the nearest zero.

    Candidate graze points are the smallest |theta| in absolute terms and
    relative to the local series peak (the two differ wildly when the
    region spans many decades); each gets a Newton distance estimate.
    """
    mags = [abs(complex(v.value)) for v in vals]
    i_abs = int(np.argmin(mags))
    rel = [m / 10.0 ** max(0.0, min(300.0, peak_term_log10(q, abs(p))))
           for m, p in zip(mags, pts)]
    i_rel = int(np.argmin(rel))
    for i in {i_abs, i_rel}:
        if mags[i] <= 10 * vals[i].err:
            raise BoundaryTooClose(
                f"theta indistinguishable from zero on the boundary "
                f"near x={pts[i]}")
        t0, t1 = _ladder(q, pts[i], cfg, orders=1)
        d1 = abs(complex(t1.value))
        if d1 > 0 and abs(complex(t0.value)) / d1 < BOUNDARY_CLEARANCE:
            raise BoundaryTooClose(
                f"zero within {BOUNDARY_CLEARANCE} of the boundary "
                f"near x={pts[i]}")


def _boundary_value(q: float, x: complex, cfg: EvalConfig):
    """Contour sample resolved well past the sign margin.

    The ladder stops once the error is a quarter of the value, which is
    enough for sign work but leaves the phase fuzzy; push on to a percent
    so the walk's vanishing test (10x error) has honest headroom.
    """
    ap = _ladder(q, x, cfg, orders=0)[0]
    v = abs(complex(ap.value))
    if v > 0 and ap.err > 0.02 * v:
        try:
            ap = family_to_accuracy(q, x, 0.01 * v, cfg, orders=0)[0]
        except NoConvergence:
            pass
    return ap


def count_zeros(q: float, region: Region, cfg: EvalConfig | None = None,
                density: int = 1) -> int:
    """Number of zeros of theta(q, .) strictly inside the rectangle.

    Walks the boundary accumulating phase increments, halving any segment
    whose increment is not clearly below pi/2.  The total winding has to
    land within 1e-3 of an integer.  density multiplies the per-edge
    sample count; the result must not depend on it.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = _require_q(q)
    if not isinstance(region, Region):
        raise DomainError("region must be a Region")
    if not isinstance(density, (int, np.integer)) or density < 1:
        raise DomainError("density must be a positive integer")
    pts = _boundary_points(qf, region, cfg, density)
    vals = [_boundary_value(qf, p, cfg) for p in pts]
    _clearance_check(qf, pts, vals, cfg)

    total = 0.0
    npts = len(pts)
    for i in range(npts):
        a, b = pts[i], pts[(i + 1) % npts]
        va, vb = vals[i], vals[(i + 1) % npts]
        total += _segment_phase(qf, a, b, va, vb, cfg, 0)
    w = total / (2.0 * math.pi)
    k = round(w)
    if abs(w - k) > 1e-3 or k < 0:
        raise PhaseJump(f"winding {w:.6f} is not a usable count")
    return int(k)


def _segment_phase(q, a, b, va, vb, cfg, depth) -> float:
    if (abs(complex(va.value)) <= 10 * va.err
            or abs(complex(vb.value)) <= 10 * vb.err):
        raise BoundaryTooClose(
            f"theta vanishes on the contour between x={a} and x={b}")
    dphi = cmath.phase(complex(vb.value) / complex(va.value))
    if abs(dphi) < _HALF_PI:
        return dphi
    m = 0.5 * (a + b)
    if m == a or m == b:
        # subdivision exhausted at float resolution with the phase still
        # swinging: a zero sits on the contour as far as we can tell
        raise BoundaryTooClose(
            f"zero pinned on the contour between x={a} and x={b}")
    if depth >= _MAX_WALK_DEPTH:
        raise PhaseJump(
            f"phase step {dphi:.3f} rad would not subdivide below pi/2 "
            f"between x={a} and x={b}")
    thr = 1e-6 * (1.0 + abs(a))
    if thr < abs(b - a) <= 2 * thr:
        f0, f1 = _ladder(q, m, cfg, orders=1)
        d1 = abs(complex(f1.value))
        if d1 > 0 and abs(complex(f0.value)) / d1 < BOUNDARY_CLEARANCE:
            raise BoundaryTooClose(
                f"zero within {BOUNDARY_CLEARANCE} of the contour near x={m}")
    vm = _boundary_value(q, m, cfg)
    return (_segment_phase(q, a, m, va, vm, cfg, depth + 1)
            + _segment_phase(q, m, b, vm, vb, cfg, depth + 1))


def _pairs_upper_bound(q: float) -> int:
    """Crude overestimate of how many pairs can have been born by q."""
    return int(math.ceil(math.pi / (2.0 * (1.0 - abs(q))))) + 2


def master_region(q: float, j_max: int | None = None,
                  scale: float = 1.0) -> Region:
    """Upper-half rectangle wide enough to hold every conjugate pair.

    The imaginary extent passes the strip constant 132 with margin; the
    real extent follows the real-zero ladder, doubled.  For q < 0 the
    rectangle is symmetric since positive real zeros (and pairs born from
    them) exist there too.
    """
    qf = _require_q(q)
    jm = _pairs_upper_bound(qf) if j_max is None else int(j_max)
    if jm < 1:
        raise DomainError("j_max must be >= 1")
    r = 2.0 * scale * abs(qf) ** (-2 * jm - 2)
    re_max = MASTER_RE_MAX if qf > 0 else r
    return Region(-r, re_max, MASTER_IM_MIN, MASTER_IM_MAX)


def pair_count(q: float, cfg: EvalConfig | None = None,
               j_max: int | None = None) -> int:
    """Number of complex conjugate pairs of theta(q, .)."""
    cfg = cfg or DEFAULT_CONFIG
    qf = _require_q(q)
    last: BoundaryTooClose | None = None
    for attempt in range(6):
        region = master_region(qf, j_max, scale=1.17 ** attempt)
        try:
            return count_zeros(qf, region, cfg)
        except BoundaryTooClose as exc:
            last = exc
    raise last


# ----- locating individual zeros -------------------------------------------------


def _newton_zero(q: float, x0: complex, cfg: EvalConfig,
                 iters: int = 60) -> complex:
    """Polish a complex zero by Newton steps; raises on stall or flight."""
    x = complex(x0)
    for _ in range(iters):
        t0, t1 = theta_family(q, x, cfg, orders=1)
        if t1.value == 0:
            raise NoConvergence(f"flat derivative at x={x}")
        step = complex(t0.value) / complex(t1.value)
        x -= step
        if not (math.isfinite(x.real) and math.isfinite(x.imag)) or abs(x) > 1e8:
            raise NoConvergence(f"Newton flight from seed x={x0}")
        if abs(step) <= 1e-13 * (1.0 + abs(x)):
            break
    scale = 10.0 ** max(0.0, peak_term_log10(q, abs(x)))
    resid = abs(theta(q, x, cfg).value)
    if resid > 1e-9 * scale:
        raise NoConvergence(
            f"residual {resid:.3g} too large after Newton from x={x0}")
    return x


def _split_region(region: Region, fr: float, fi: float):
    rm = region.re_min + fr * (region.re_max - region.re_min)
    im = region.im_min + fi * (region.im_max - region.im_min)
    return (Region(region.re_min, rm, region.im_min, im),
            Region(rm, region.re_max, region.im_min, im),
            Region(region.re_min, rm, im, region.im_max),
            Region(rm, region.re_max, im, region.im_max))


def _locate_zeros(q: float, region: Region, cfg: EvalConfig,
                  count: int | None = None, depth: int = 0):
    """All zeros inside the region via quadtree winding plus Newton polish."""
    if count is None:
        count = count_zeros(q, region, cfg)
    if count == 0:
        return []
    small = max(region.re_max - region.re_min,
                region.im_max - region.im_min) < 0.25
    if small:
        center = complex(0.5 * (region.re_min + region.re_max),
                         0.5 * (region.im_min + region.im_max))
        try:
            x = _newton_zero(q, center, cfg)
        except NoConvergence:
            x = None
        if x is not None and region.contains(x):
            if count > 1:
                warnings.warn(
                    f"{count} zeros share a box around {x}; reporting one "
                    "representative", MultipleRootsFound)
            return [x] * count
    if depth > 48:
        raise NoConvergence("zero localization exceeded subdivision budget")
    for fr in _SPLIT_FRACTIONS:
        for fi in _SPLIT_FRACTIONS:
            quads = _split_region(region, fr, fi)
            try:
                counts = [count_zeros(q, sub, cfg) for sub in quads]
            except (BoundaryTooClose, PhaseJump):
                continue
            if sum(counts) != count:
                continue
            out = []
            for sub, c in zip(quads, counts):
                if c:
                    out.extend(_locate_zeros(q, sub, cfg, c, depth + 1))
            return out
    raise NoConvergence(
        f"could not split region {region} without grazing a zero")


# ----- pair tracking ------------------------------------------------------------

_FOLD_CACHE: dict[tuple, object] = {}


def _fold(j: int, cfg: EvalConfig):
    key = (j, cfg.precision_digits, cfg.tail_tol)
    pt = _FOLD_CACHE.get(key)
    if pt is None:
        pt = fold_qpos(j, cfg)
        _FOLD_CACHE[key] = pt
    return pt


def _continue_zero(q: float, x_prev: complex, cfg: EvalConfig) -> complex:
    """One continuation step: Newton from the previous sample, re-acquire
    through a local winding search when Newton wanders."""
    try:
        x = _newton_zero(q, x_prev, cfg)
    except NoConvergence:
        x = None
    if x is not None:
        if x.imag < 0:
            x = x.conjugate()
        if abs(x - x_prev) <= 0.6 * (1.0 + abs(x_prev)):
            return x
    return _reacquire(q, x_prev, cfg)


def _reacquire(q: float, x_prev: complex, cfg: EvalConfig) -> complex:
    w = max(0.3, 0.15 * abs(x_prev))
    for _ in range(4):
        lo_im = max(MASTER_IM_MIN / 2, x_prev.imag - w)
        hi_im = max(lo_im + 1e-3, x_prev.imag + w)
        region = Region(x_prev.real - w, x_prev.real + w, lo_im, hi_im)
        try:
            zs = _locate_zeros(q, region, cfg)
        except (BoundaryTooClose, PhaseJump, NoConvergence):
            zs = []
        if zs:
            return min(zs, key=lambda z: abs(z - x_prev))
        w *= 2.0
    raise LostTrack(f"no zero recovered near x={x_prev} at q={q}")


def track_pair(j: int, q_grid, cfg: EvalConfig | None = None) -> PairTrack:
    """Follow the pair born at fold j along an increasing q grid.

    The seed leaves the double zero perpendicular to the real axis; the
    crossing of the imaginary axis, if the grid reaches it, is refined by
    bisection in q and recorded on the track.
    """
    cfg = cfg or DEFAULT_CONFIG
    grid = np.asarray(q_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("q_grid must be a 1-d grid with at least two points")
    if not (np.diff(grid) > 0).all():
        raise DomainError("q_grid must increase strictly")
    if not (0 < grid[0] and grid[-1] < 1):
        raise DomainError("q_grid must stay inside (0, 1)")
    fold = _fold(j, cfg)
    if grid[0] <= fold.q_star:
        raise DomainError(
            f"q_grid must start above the birth point {fold.q_star:.9g}")

    eps = 1e-4 * (1.0 - fold.q_star)
    x = complex(fold.y_double, eps)
    xs = []
    for qv in grid:
        x = _continue_zero(float(qv), x, cfg)
        xs.append(x)
    xs = np.asarray(xs, dtype=complex)

    crossing_q = None
    idx = None
    for i in range(1, xs.size):
        if xs[i - 1].real < 0 <= xs[i].real:
            idx = i
            break
    if idx is not None:
        lo, hi = float(grid[idx - 1]), float(grid[idx])
        xl = complex(xs[idx - 1])
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            xm = _continue_zero(mid, xl, cfg)
            if xm.real < 0:
                lo, xl = mid, xm
            else:
                hi = mid
            if hi - lo < 1e-13 or abs(xm.real) <= CROSSING_RE_TOL:
                break
        crossing_q = 0.5 * (lo + hi)

    contained = True
    if crossing_q is not None:
        after = xs[grid >= crossing_q]
        contained = bool(
            (after.real >= -CROSSING_RE_TOL).all()
            and (np.abs(after) < HALF_DISK_RADIUS).all())
    return PairTrack(pair_index=j, q_samples=grid, x_samples=xs,
                     birth_q=fold.q_star, crossing_q=crossing_q,
                     post_crossing_contained=contained)


# ----- the interlacing route to the crossing -------------------------------------


def ysharp_pair(j: int, q: float, cfg: EvalConfig | None = None):
    """Positive zeros number 2j-1 and 2j of the even part of theta(q, iy).

    The even part is theta(q^4, -y^2/q), so its positive zeros are the
    real zeros of theta(q^4, .) mapped through y = sqrt(-q t).
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("need q in (0, 1)")
    deep, shallow = _pair_probe_qpos(qf ** 4, j, cfg)
    t_deep, _ = refine_zero(qf ** 4, deep, cfg)
    t_shallow, _ = refine_zero(qf ** 4, shallow, cfg)
    return math.sqrt(-qf * t_shallow), math.sqrt(-qf * t_deep)


def _interlace_gap(j: int, q: float, cfg: EvalConfig) -> float:
    lo, hi = ysharp_pair(j, q, cfg)
    return q * hi - lo


def crossing_via_interlacing(j: int, cfg: EvalConfig | None = None) -> float:
    """Crossing parameter of pair j from the collision of interlaced zeros.

    Solves q * y2(q) = y1(q) where y1 < y2 are the (2j-1)-th and 2j-th
    positive zeros of the even component; at the root the odd component
    vanishes at the same height, so theta(q, iy) itself has a zero there.
    The root is hunted downward from the fourth root of the birth value,
    where the gap function is negative, until it turns positive.
    """
    cfg = cfg or DEFAULT_CONFIG
    fold = _fold(j, cfg)
    top = fold.q_star ** 0.25
    sampled = []
    hi_q = hi_h = None
    lo_q = lo_h = None
    step = 1e-4
    qv = top - step
    while qv > 0.05:
        try:
            hv = _interlace_gap(j, qv, cfg)
        except (CoalescenceSuspected, NoSignChange):
            qv = top - (top - qv) * 1.7
            continue
        sampled.append((qv, hv))
        if hv < 0:
            hi_q, hi_h = qv, hv
        else:
            lo_q, lo_h = qv, hv
            break
        qv = top - (top - qv) * 1.7
    if hi_q is None or lo_q is None:
        msg = ", ".join(f"h({a:.6f})={b:+.3e}" for a, b in sampled)
        raise NoSignChange(f"gap function never changed sign: {msg}")

    for _ in range(80):
        mid = 0.5 * (lo_q + hi_q)
        if hi_q - lo_q <= 4e-16 * hi_q:
            break
        try:
            hm = _interlace_gap(j, mid, cfg)
        except (CoalescenceSuspected, NoSignChange) as exc:
            raise NoConvergence(
                f"zero pair unresolvable at q={mid:.12g} during bisection"
            ) from exc
        if hm < 0:
            hi_q = mid
        else:
            lo_q = mid
    q_dagger = 0.5 * (lo_q + hi_q)

    _, y2 = ysharp_pair(j, q_dagger, cfg)
    resid = abs(theta(q_dagger, complex(0.0, y2), cfg).value)
    if resid > 1e-9:
        raise NoConvergence(
            f"imaginary-axis residual {resid:.3g} exceeds 1e-9 at "
            f"q={q_dagger:.12g}")
    return q_dagger


# ----- the negative-q barrier ----------------------------------------------------


def no_crossing_qneg(q: float, y_grid, cfg: EvalConfig | None = None) -> bool:
    """Check Re theta(q, iy) > 0 on a grid, q in (-1, 0).

    The real part equals theta(rho^4, y^2/rho) with rho = -q, a value of
    theta at nonnegative argument, hence provably positive; this verifies
    the numerical margin is comfortable (each value above ten times its
    error bound), so no zero sits on the imaginary axis.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not -1 < qf < 0:
        raise DomainError("need q in (-1, 0)")
    grid = np.asarray(y_grid, dtype=float)
    if grid.size == 0 or not np.isfinite(grid).all():
        raise DomainError("y_grid must be nonempty and finite")
    rho = -qf
    for y in grid.ravel():
        f1 = theta(rho ** 4, (y * y) / rho, cfg)
        if not f1.value > 10 * f1.err:
            return False
    return True


# ----- containment audit ----------------------------------------------------------


@dataclass
class AuditReport:
    """Where the complex zeros sit, and whether the containment sets hold."""

    q: float
    region: Region
    zeros: np.ndarray
    residuals: np.ndarray
    conj_residuals: np.ndarray
    contained: np.ndarray
    violations: list[str]
    min_abs_re: float | None

    @property
    def pair_count(self) -> int:
        return int(self.zeros.size)

    @property
    def all_contained(self) -> bool:
        return not self.violations


def _containment_ok(q: float, x: complex) -> bool:
    if q > 0:
        if x.real < 0:
            return abs(x.imag) < STRIP_IM_BOUND
        return abs(x) < HALF_DISK_RADIUS
    return abs(x.imag) < STRIP_IM_BOUND


def containment_audit(q: float, cfg: EvalConfig | None = None) -> AuditReport:
    """Locate every conjugate pair and test it against the containment sets.

    For q > 0 zeros must lie in the union of the left strip of height 132
    and the half-disk of radius 18; for q < 0 only the strip bound is
    claimed, and the smallest |Re x| is reported since no vertical
    zero-free band is known there.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = _require_q(q)
    region = None
    zeros = None
    last: Exception | None = None
    for attempt in range(6):
        region = master_region(qf, None, scale=1.17 ** attempt)
        try:
            zeros = _locate_zeros(qf, region, cfg)
            break
        except BoundaryTooClose as exc:
            last = exc
    if zeros is None:
        raise last
    zeros = np.asarray(sorted(zeros, key=lambda z: (z.imag, z.real)),
                       dtype=complex)
    residuals = np.array([abs(theta(qf, complex(z), cfg).value) for z in zeros])
    conj = np.array(
        [abs(theta(qf, complex(z).conjugate(), cfg).value) for z in zeros])
    contained = np.array([_containment_ok(qf, complex(z)) for z in zeros],
                         dtype=bool)
    violations = [
        f"zero at {complex(z)} escapes the containment set"
        for z, ok in zip(zeros, contained) if not ok
    ]
    min_abs_re = float(np.min(np.abs(zeros.real))) if zeros.size else None
    return AuditReport(q=qf, region=region, zeros=zeros, residuals=residuals,
                       conj_residuals=conj, contained=contained,
                       violations=violations, min_abs_re=min_abs_re)


# ----- serialization --------------------------------------------------------------


def _g17(v) -> str:
    return "%.17g" % float(v)


def pair_track_csv(tracks) -> str:
    """CSV rows pair_index,q,re_x,im_x,crossed_flag for one or more tracks."""
    lines = ["pair_index,q,re_x,im_x,crossed_flag"]
    for tr in tracks:
        for qv, xv in zip(tr.q_samples, tr.x_samples):
            crossed = int(tr.crossing_q is not None and qv >= tr.crossing_q)
            lines.append(
                f"{tr.pair_index},{_g17(qv)},{_g17(xv.real)},"
                f"{_g17(xv.imag)},{crossed}")
    return "\n".join(lines) + "\n"


def audit_json(report: AuditReport) -> str:
    """Deterministic JSON for an audit, one record per located zero."""
    zs = []
    for z, r, rc, ok in zip(report.zeros, report.residuals,
                            report.conj_residuals, report.contained):
        zs.append(
            '{"re": %s, "im": %s, "residual": %s, "conj_residual": %s, '
            '"contained": %s, "abs_re": %s}'
            % (_g17(z.real), _g17(z.imag), _g17(r), _g17(rc),
               "true" if ok else "false", _g17(abs(z.real))))
    min_re = "null" if report.min_abs_re is None else _g17(report.min_abs_re)
    body = (
        '{"q": %s, "pair_count": %d, "region": {"re_min": %s, "re_max": %s, '
        '"im_min": %s, "im_max": %s}, "zeros": [%s], "violations": %s, '
        '"min_abs_re": %s}'
        % (_g17(report.q), report.pair_count, _g17(report.region.re_min),
           _g17(report.region.re_max), _g17(report.region.im_min),
           _g17(report.region.im_max), ", ".join(zs),
           json.dumps(report.violations), min_re))
    return body
