"""Twelve-check battery reproducing the headline quantitative claims.

Each check reduces to one scalar: a worst-case deviation against a
tolerance, a failure count against zero, or a value against an interval.
The report serializes deterministically for fixed precision and seed,
apart from the wall-clock runtime_seconds fields.

Tolerance ladder: identity residuals are allowed their propagated error
budgets plus a float cushion of 10^(5 - precision), so a precision-15
run works at the relaxed 1e-10 cushion and higher precision tightens it.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .complexzeros import (
    containment_audit,
    crossing_via_interlacing,
    no_crossing_qneg,
    pair_count,
    track_pair,
)
from .errors import DomainError, MultipleRootsFound
from .evaluate import (
    DEFAULT_CONFIG,
    EvalConfig,
    theta,
    theta_dq,
    theta_dx,
    theta_family,
)
from .identities import (
    imag_axis_decomposition,
    jacobi_theta,
    k1_k2,
    phi_k,
    phi_neg_halfint_identity_residual,
    phi_partial_sum_dq,
    phi_square_product,
    phi_small,
    psi_decomposition,
    tail_G,
    theta_at_one_product,
)
from .realzeros import (
    bracket_real_zeros_qpos,
    halfpower_slope_check,
    refine_zero,
    root_on_power_curve,
    trace_curve,
    zeros_qneg,
)
from .spectrum import bound_sequences, double_zero_bounds_check, spectrum_qpos, spectrum_qneg

DEFAULT_SEED = 20260821

# six-decimal reference tables for the spectral sweeps
QPOS_TABLE = (0.309249, 0.516959, 0.630628, 0.701265, 0.749269, 0.783984)
QNEG_TABLE = (-0.727133, -0.783742, -0.841601, -0.861257, -0.887952, -0.897904)
# double-zero locations for q < 0, indices 1..6 (odd negative, even positive)
Y_QNEG_TABLE = (-2.991, 2.907, -3.621, 3.523, -3.908, 3.823)

LAMBDA_15 = -38.83960007
MU_14 = -4.440852689
Y_BAND_LO = -38.8396001
Y_BAND_HI = -4.055199


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float | tuple
    computed: float
    tolerance: float
    passed: bool
    runtime_seconds: float


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple

    @property
    def n_pass(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def n_fail(self) -> int:
        return len(self.checks) - self.n_pass

    @property
    def all_passed(self) -> bool:
        return self.n_fail == 0


# ----- the individual checks ------------------------------------------------


def _check_spectral_qpos(cfg, seed, cache, points):
    pts = spectrum_qpos(6, cfg)
    cache["qpos6"] = pts
    dev = max(abs(p.q_star - t) for p, t in zip(pts, QPOS_TABLE))
    return dev, 0.0, 5e-7, dev <= 5e-7


def _check_spectral_qneg(cfg, seed, cache, points):
    pts = spectrum_qneg(6, cfg)
    cache["qneg6"] = pts
    dev = max(abs(p.q_star - t) for p, t in zip(pts, QNEG_TABLE))
    return dev, 0.0, 5e-7, dev <= 5e-7


def _check_double_zeros_qneg(cfg, seed, cache, points):
    pts = cache.get("qneg6") or spectrum_qneg(6, cfg)
    dev = max(abs(p.y_double - t) for p, t in zip(pts, Y_QNEG_TABLE))
    in_band = double_zero_bounds_check(pts, "q_neg")
    return dev, 0.0, 5e-4, dev <= 5e-4 and in_band


def _check_double_zero_bounds_qpos(cfg, seed, cache, points):
    pts = cache.get("qpos6") or spectrum_qpos(6, cfg)
    rows = bound_sequences(range(3, 16))
    lam15 = rows[-1].lambda_s
    mu14 = rows[-2].mu_s
    dev = max(abs(lam15 - LAMBDA_15) / 1e-7, abs(mu14 - MU_14) / 1e-8)
    in_band = all(Y_BAND_LO <= p.y_double < Y_BAND_HI for p in pts)
    return dev, 0.0, 1.0, dev <= 1.0 and in_band


def _check_asymptotics(cfg, seed, cache, points):
    pts = cache.get("qpos6") or spectrum_qpos(6, cfg)
    epi = math.exp(math.pi)
    ry = abs(pts[5].y_double + epi) / abs(pts[0].y_double + epi)
    rq = (abs(pts[5].q_star - (1 - math.pi / 12))
          / abs(pts[0].q_star - (1 - math.pi / 2)))
    r = max(ry, rq)
    return r, (0.0, 1.0), 0.0, 0.0 <= r <= 1.0


def _check_pair_count_midpoints(cfg, seed, cache, points):
    pts = cache.get("qpos6") or spectrum_qpos(6, cfg)
    worst = 0
    for j in range(1, 5):
        mid = 0.5 * (pts[j - 1].q_star + pts[j].q_star)
        worst = max(worst, abs(pair_count(mid, cfg) - j))
    return float(worst), 0.0, 0.0, worst == 0


def _check_crossing_two_routes(cfg, seed, cache, points):
    pts = cache.get("qpos6") or spectrum_qpos(6, cfg)
    worst = 0.0
    contained = True
    for j in (1, 2, 3):
        grid = np.linspace(pts[j - 1].q_star + 0.01, 0.95, 120)
        tr = track_pair(j, grid, cfg)
        qd = crossing_via_interlacing(j, cfg)
        if tr.crossing_q is None:
            return math.inf, 0.0, 1e-6, False
        worst = max(worst, abs(tr.crossing_q - qd))
        contained = contained and tr.post_crossing_contained
    return worst, 0.0, 1e-6, worst <= 1e-6 and contained


def _check_no_crossing_qneg(cfg, seed, cache, points):
    ys = np.linspace(0.0, 150.0, 151)
    fails = sum(1 for q in np.linspace(-0.99, -0.01, 50)
                if not no_crossing_qneg(float(q), ys, cfg))
    rep = containment_audit(-0.85, cfg)
    strip_ok = bool((np.abs(rep.zeros.imag) < 132.0).all())
    axis_ok = rep.min_abs_re is not None and rep.min_abs_re > 0
    ok = fails == 0 and strip_ok and axis_ok and rep.pair_count > 0
    return float(fails), 0.0, 0.0, ok


def _identity_batteries(cfg, seed, points, cushion):
    """Yield (battery_name, failure_count) over the nine identities."""

    def fails(idx, fn):
        rng = np.random.default_rng([seed, idx])
        n = 0
        for _ in range(points):
            if not fn(rng):
                n += 1
        return n

    def functional(rng):
        q = float(rng.choice([-1.0, 1.0])) * (0.05 + 0.85 * float(rng.random()))
        x = float(rng.uniform(-30, 30))
        lhs = theta(q, x, cfg)
        rhs = theta(q, q * x, cfg)
        resid = abs(float(lhs.value) - 1.0 - q * x * float(rhs.value))
        tol = (lhs.err + abs(q * x) * rhs.err
               + cushion * max(1.0, abs(float(lhs.value))))
        return resid <= tol

    def pde(rng):
        q = float(rng.choice([-1.0, 1.0])) * (0.05 + 0.8 * float(rng.random()))
        x = float(rng.uniform(-12, 12))
        dq = theta_dq(q, x, cfg, route="series")
        fam = theta_family(q, x, cfg, orders=2)
        lhs = 2 * q * float(dq.value)
        rhs = x * x * float(fam[2].value) + 2 * x * float(fam[1].value)
        tol = (2 * abs(q) * dq.err + x * x * fam[2].err + 2 * abs(x) * fam[1].err
               + cushion * max(1.0, abs(lhs), abs(rhs)))
        return abs(lhs - rhs) <= tol

    def jacobi_split(rng):
        q = 0.05 + 0.85 * float(rng.random())
        x = float(rng.choice([-1.0, 1.0])) * 10.0 ** float(rng.uniform(-1, 2))
        full = jacobi_theta(q, x, cfg)
        head = theta(q, x, cfg)
        tail = tail_G(q, x, cfg)
        resid = abs(float(full.value) - float(head.value) - float(tail.value))
        tol = (full.err + head.err + tail.err
               + cushion * max(1.0, abs(float(full.value))))
        return resid <= tol

    def phi_square(rng):
        q = 0.05 + 0.87 * float(rng.random())
        p = phi_square_product(q, cfg)
        s = phi_small(q * q, cfg)
        return abs(float(p.value) - float(s.value)) <= p.err + s.err + cushion

    def at_one(rng):
        q = float(rng.choice([-1.0, 1.0])) * (0.05 + 0.85 * float(rng.random()))
        p = theta_at_one_product(q, cfg)
        s = theta(q, 1.0, cfg)
        return abs(float(p.value) - float(s.value)) <= p.err + s.err + cushion

    def reflection(rng):
        q = 0.05 + 0.85 * float(rng.random())
        s = int(rng.integers(1, 4))
        chk = phi_neg_halfint_identity_residual(q, s, cfg)
        return chk.residual <= chk.bound + cushion

    def psi_split(rng):
        v = 0.05 + 0.85 * float(rng.random())
        x = float(rng.uniform(-4, 4))
        p1, p2 = psi_decomposition(v, x, cfg)
        d = theta(-v, x, cfg)
        resid = abs(float(p1.value) + float(p2.value) - float(d.value))
        tol = p1.err + p2.err + d.err + cushion * max(1.0, abs(float(d.value)))
        return resid <= tol

    def imag_split(rng):
        q = float(rng.choice([-1.0, 1.0])) * (0.05 + 0.85 * float(rng.random()))
        y = float(rng.uniform(-4, 4))
        f1, f2 = imag_axis_decomposition(q, y, cfg)
        z = theta(q, complex(0.0, y), cfg)
        val = complex(z.value)
        ok_re = abs(val.real - float(f1.value)) <= z.err + f1.err + cushion
        ok_im = (abs(val.imag - q * y * float(f2.value))
                 <= z.err + abs(q * y) * f2.err + cushion)
        return ok_re and ok_im

    def k_parts(rng):
        q = 0.05 + 0.85 * float(rng.random())
        y = float(rng.uniform(-3, 3))
        K1, K2 = k1_k2(q, y, cfg)
        d = theta_dx(q, complex(0.0, y), cfg)
        val = complex(d.value)
        tol1 = d.err + cushion * max(1.0, abs(K1))
        tol2 = d.err + cushion * max(1.0, abs(K2))
        return abs(val.real - K1) <= tol1 and abs(val.imag - K2) <= tol2

    batteries = (("functional_equation", functional), ("pde", pde),
                 ("jacobi_split", jacobi_split), ("phi_square", phi_square),
                 ("theta_at_one", at_one), ("reflection", reflection),
                 ("psi_split", psi_split), ("imag_axis_split", imag_split),
                 ("dx_imag_axis", k_parts))
    for idx, (name, fn) in enumerate(batteries):
        yield name, fails(idx, fn)


def _check_identity_suite(cfg, seed, cache, points):
    cushion = 10.0 ** (5 - cfg.precision_digits)
    total = sum(n for _, n in _identity_batteries(cfg, seed, points, cushion))
    return float(total), 0.0, 0.0, total == 0


def _phi_left_derivative(k: float, cfg) -> float:
    """Richardson one-sided difference of phi_k at q = 1 (phi_k(1) = 1/2)."""
    def quot(h):
        return (0.5 - float(phi_k(1.0 - h, k, cfg).value)) / h
    d1 = quot(1e-3)
    d2 = quot(5e-4)
    return 2.0 * d2 - d1


def _check_phi_k_suite(cfg, seed, cache, points):
    fails = 0
    ks = (0.7, 1.0, 2.0, 5.0)
    for k in ks:
        target = -(2 * k - 1) / 8
        for m in range(1, 7):
            d = phi_partial_sum_dq(1.0, k, m, cfg)
            if abs(float(d.value) - target) > 1e-12:
                fails += 1
        if abs(_phi_left_derivative(k, cfg) - target) > 1e-3:
            fails += 1
    for i in range(1, 201):
        q = i / 201.0
        v = float(phi_k(q, 3.0, cfg).value)
        if not 1.0 / (1.0 + q ** 2) < v < 1.0 / (1.0 + q ** 3):
            fails += 1
    for k in (0.5, 1.0, 2.0):
        vals = [float(phi_k(q, k, cfg).value)
                for q in np.linspace(0.0, 0.5, 101)]
        if any(b >= a for a, b in zip(vals, vals[1:])):
            fails += 1
    return float(fails), 0.0, 0.0, fails == 0


def _check_power_curves(cfg, seed, cache, points):
    fails = 0
    for a in (1.5, 3.5):
        with warnings.catch_warnings(record=True) as log:
            warnings.simplefilter("always")
            root = root_on_power_curve(a, cfg)
        multi = any(isinstance(w.message, MultipleRootsFound) for w in log)
        if root is None or multi:
            fails += 1
            continue
        qr, xr = root
        if abs(float(theta(qr, xr, cfg).value)) > 1e-9:
            fails += 1
    for a in (2.5, 3.0):
        if root_on_power_curve(a, cfg) is not None:
            fails += 1
    for s in (1, 2):
        if not halfpower_slope_check(s, cfg):
            fails += 1
    return float(fails), 0.0, 0.0, fails == 0


def _check_curve_atlas(cfg, seed, cache, points):
    fails = 0
    grid = np.concatenate([np.geomspace(1e-3, 0.25, 40),
                           np.linspace(0.255, 0.3093, 25)])
    c1 = trace_curve("q_pos", 1, grid, cfg)
    if c1.turning_point is None or max(x for _, x in c1.samples) > -6.095:
        fails += 1
    cn = trace_curve("q_neg_negative_zeros", 1,
                     np.linspace(-0.05, -0.735, 50), cfg)
    if cn.turning_point is None or max(x for _, x in cn.samples) > -2.699:
        fails += 1
    # branch asymptotes x ~ -q^-1 and -q^-2 at q = 1e-3
    br = bracket_real_zeros_qpos(1e-3, 2, cfg)
    xi1 = refine_zero(1e-3, br[0], cfg)[0]
    xi2 = refine_zero(1e-3, br[1], cfg)[0]
    if abs(xi1 * 1e-3 + 1.0) > 0.05:
        fails += 1
    if abs(xi2 * 1e-6 + 1.0) > 0.05:
        fails += 1
    eta1 = zeros_qneg(-0.99, 1, cfg)[1][0]
    if not 1.0 < eta1 < 1.1:
        fails += 1
    return float(fails), 0.0, 0.0, fails == 0


_CHECKS = (
    ("spectral_table_qpos", _check_spectral_qpos),
    ("spectral_table_qneg", _check_spectral_qneg),
    ("double_zeros_qneg", _check_double_zeros_qneg),
    ("double_zero_bounds_qpos", _check_double_zero_bounds_qpos),
    ("asymptotic_monotone_approach", _check_asymptotics),
    ("pair_count_midpoints", _check_pair_count_midpoints),
    ("crossing_two_routes", _check_crossing_two_routes),
    ("no_crossing_qneg_scan", _check_no_crossing_qneg),
    ("identity_suite", _check_identity_suite),
    ("phi_k_suite", _check_phi_k_suite),
    ("power_curve_roots", _check_power_curves),
    ("curve_atlas", _check_curve_atlas),
)


def check_names() -> tuple:
    return tuple(name for name, _ in _CHECKS)


def run_check(name: str, precision: int = 15, seed: int = DEFAULT_SEED,
              points: int = 1000, cache: dict | None = None) -> CheckResult:
    """Run one named check and time it."""
    table = dict(_CHECKS)
    if name not in table:
        raise DomainError(f"unknown check {name!r}")
    cfg = EvalConfig(precision_digits=precision,
                     tail_tol=DEFAULT_CONFIG.tail_tol,
                     max_terms=DEFAULT_CONFIG.max_terms,
                     reduction_threshold=DEFAULT_CONFIG.reduction_threshold)
    cache = cache if cache is not None else {}
    t0 = time.perf_counter()
    computed, expected, tol, ok = table[name](cfg, seed, cache, points)
    dt = time.perf_counter() - t0
    return CheckResult(name=name, expected=expected, computed=computed,
                       tolerance=tol, passed=bool(ok), runtime_seconds=dt)


def verify_paper(precision: int = 15, seed: int = DEFAULT_SEED,
                 points: int = 1000) -> VerifyReport:
    """Run the full battery in order and collect the report.

    points is the sample count per identity battery (the ninth check);
    the other checks are deterministic in everything but runtime.
    """
    if precision < 15:
        raise DomainError("precision must be at least 15")
    if points < 1:
        raise DomainError("points must be positive")
    cache: dict = {}
    results = [run_check(name, precision, seed, points, cache)
               for name, _ in _CHECKS]
    return VerifyReport(checks=tuple(results))


# ----- serialization ---------------------------------------------------------


def _g17(v: float) -> str:
    return "%.17g" % float(v)


def verify_json(report: VerifyReport) -> str:
    """Schema: {"checks": [{name, expected, computed, tolerance, pass,
    runtime_seconds}], "summary": {"pass": n, "fail": m}}."""
    rows = []
    for c in report.checks:
        if isinstance(c.expected, tuple):
            exp = "[%s, %s]" % (_g17(c.expected[0]), _g17(c.expected[1]))
        else:
            exp = _g17(c.expected)
        rows.append(
            '{"name": %s, "expected": %s, "computed": %s, "tolerance": %s, '
            '"pass": %s, "runtime_seconds": %.3f}'
            % (json.dumps(c.name), exp, _g17(c.computed), _g17(c.tolerance),
               "true" if c.passed else "false", c.runtime_seconds))
    return ('{"checks": [%s], "summary": {"pass": %d, "fail": %d}}'
            % (", ".join(rows), report.n_pass, report.n_fail))


def verify_text(report: VerifyReport) -> str:
    lines = []
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        lines.append("%s  %-28s computed=%-12.6g tolerance=%-10.4g (%.1fs)"
                     % (mark, c.name, c.computed, c.tolerance,
                        c.runtime_seconds))
    lines.append("summary: %d passed, %d failed"
                 % (report.n_pass, report.n_fail))
    return "\n".join(lines) + "\n"
