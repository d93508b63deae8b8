"""Evaluation of the partial theta series and its low-order derivatives.

The series is

    theta(q, x) = sum_{j >= 0} q^(j(j+1)/2) x^j,   |q| < 1,

entire in x.  Direct summation is poorly conditioned for large |x| because the
pre-peak terms are huge, so evaluation proceeds in two phases:

1. argument reduction: theta(q, x) = P_n(q, x) + q^(n(n+1)/2) x^n theta(q, q^n x)
   where P_n is the exact n-term prefix of the series, applied until
   |q^n x| <= reduction_threshold;
2. direct summation of the reduced series with a geometric tail bound
   |term_J| / (1 - |q^J x_red|), valid as soon as |q^J x_red| < 1.

Every result carries a certified absolute error: the tail bound plus a rounding
model (number of operations times unit roundoff times the running magnitude of
intermediates, which is what actually limits accuracy under cancellation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import mpmath
from mpmath import mp

from .errors import DomainError, NoConvergence, TailNotConverged

Number = Union[float, complex, mpmath.mpf, mpmath.mpc]

#: digits beyond which the mpmath backend is used instead of float64
_FLOAT_DIGIT_LIMIT = 16
#: hard cap for automatic precision escalation
_MAX_DIGITS = 320
#: peak term magnitude (log10) above which float64 would overflow mid-sum
_FLOAT_OVERFLOW_LOG10 = 250.0


@dataclass(frozen=True)
class EvalConfig:
    """Summation controls shared by every operation in the package.

    precision_digits: working significant digits; values above 16 select the
        software high-precision backend.
    tail_tol: absolute bound at which the certified series tail is accepted.
    max_terms: budget for reduction steps plus summed terms.
    reduction_threshold: |q^n x| level at which argument reduction stops.
    """

    precision_digits: int = 15
    tail_tol: float = 1e-13
    max_terms: int = 20000
    reduction_threshold: float = 1.0

    def __post_init__(self) -> None:
        if self.precision_digits < 15:
            raise DomainError("precision_digits must be at least 15")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")
        if self.max_terms < 8:
            raise DomainError("max_terms must be at least 8")
        if not 0 < self.reduction_threshold <= 2:
            raise DomainError("reduction_threshold must lie in (0, 2]")


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class Approx:
    """A computed value with a certified absolute error bound."""

    value: Number
    err: float
    terms_used: int
    reductions_used: int

    def __float__(self) -> float:
        return float(self.value)


class Point(NamedTuple):
    """A (q, x) sample on a curve in the strip |q| < 1."""

    q: float
    x: float


def _require_q(q) -> None:
    if abs(q) >= 1:
        raise DomainError(f"need |q| < 1, got q = {q!r}")


def peak_term_log10(q, x) -> float:
    """log10 of the largest term magnitude in the series for theta(q, x).

    This measures the cancellation suffered at negative x: the achievable
    absolute accuracy is roughly 10**(peak - working_digits).
    """
    aq, ax = abs(q), abs(x)
    if aq == 0 or ax <= 1:
        return 0.0
    lq = math.log10(aq)
    lx = math.log10(ax)
    jstar = -lx / lq - 0.5
    best = 0.0
    for j in {0, max(0, math.floor(jstar)), max(0, math.ceil(jstar))}:
        best = max(best, j * (j + 1) / 2 * lq + j * lx)
    return best


def _auto_digits(q, cfg: EvalConfig) -> int:
    """Apply the backend selection policy for a given q and config."""
    digits = cfg.precision_digits
    if 1 - abs(q) < 0.05 or cfg.tail_tol < 1e-13:
        digits = max(digits, 30, math.ceil(-math.log10(cfg.tail_tol)) + 10)
    return digits


def _theta_family(q, x, cfg: EvalConfig, dmax: int):
    """Evaluate theta and its first dmax x-derivatives in one pass.

    Returns a list of Approx, one per derivative order 0..dmax.
    """
    _require_q(q)
    digits = _auto_digits(q, cfg)
    if digits <= _FLOAT_DIGIT_LIMIT and peak_term_log10(q, x) > _FLOAT_OVERFLOW_LOG10:
        digits = 32  # float64 would overflow on the pre-peak terms
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            qb = mp.mpmathify(q)
            xb = mp.mpmathify(x)
            eps = mp.eps
            return _theta_family_core(qb, xb, cfg, dmax, eps)
    return _theta_family_core(float(q), _as_float_or_complex(x), cfg, dmax, 2.0**-53)


def _as_float_or_complex(x):
    """Coerce to float, or to complex when the imaginary part is nonzero."""
    if isinstance(x, (complex, mpmath.mpc)):
        xc = complex(x)
        return xc if xc.imag != 0 else xc.real
    return float(x)


def _theta_family_core(q, x, cfg: EvalConfig, dmax: int, eps):
    thr = cfg.reduction_threshold
    tol = cfg.tail_tol
    zero = q * 0
    one = zero + 1

    # --- phase 1: argument reduction -------------------------------------
    n = 0
    qn = one            # q^n
    t = one             # q^(T_n) x^n
    pref = [zero, zero, zero]
    pmag = [abs(one), zero * 0, zero * 0]
    while abs(qn * x) > thr:
        pref[0] += t
        if dmax >= 1 and n >= 1:
            pref[1] += n * t / x
        if dmax >= 2 and n >= 2:
            pref[2] += n * (n - 1) * t / (x * x)
        a = abs(t)
        for d in range(dmax + 1):
            pa = abs(pref[d])
            if pa > pmag[d]:
                pmag[d] = pa
            if a > pmag[d]:
                pmag[d] = a
        n += 1
        qn = qn * q
        t = t * qn * x
        if n > cfg.max_terms:
            raise TailNotConverged(
                f"argument reduction exceeded {cfg.max_terms} steps at q={q}, x={x}"
            )
    xr = qn * x
    big = t             # q^(T_n) x^n, multiplies the reduced series

    # combination coefficients: output order e uses reduced series order d with
    # weight c[e][d]  (from differentiating  big(x) * theta(q, q^n x)  in x)
    c = [[zero] * 3 for _ in range(3)]
    c[0][0] = big
    if dmax >= 1:
        c[1][0] = big * n / x if n else zero
        c[1][1] = big * qn
    if dmax >= 2:
        c[2][0] = big * n * (n - 1) / (x * x) if n >= 2 else zero
        c[2][1] = 2 * big * n * qn / x if n else zero
        c[2][2] = big * qn * qn
    cscale = [max(abs(c[e][d]) for e in range(dmax + 1)) for d in range(dmax + 1)]

    # --- phase 2: reduced direct summation -------------------------------
    s = [zero, zero, zero]
    smag = [zero * 0, zero * 0, zero * 0]
    g = [None, None, None]      # g[d] = q^(T_j) xr^(j-d), switched on at j = d
    tails = [None, None, None]
    qT = one                    # q^(T_j)
    qpow = one                  # q^j
    absxr = abs(xr)
    absq = abs(q)
    rj = 1.0                    # |q|^j as float, |q|^{j+1}*|xr| drives the bound
    j = 0
    while True:
        if j > cfg.max_terms:
            raise TailNotConverged(
                f"reduced series needed more than {cfg.max_terms} terms at q={q}"
            )
        if j <= dmax:
            g[j] = qT
        terms = []
        for d in range(dmax + 1):
            if j < d:
                terms.append(zero)
                continue
            f = 1 if d == 0 else (j if d == 1 else j * (j - 1))
            terms.append(f * g[d])
        # try to stop before adding term j: geometric bound on sum_{i>=j}
        if j >= dmax + 1:
            rnext = rj * float(absq) * float(absxr)
            ok = True
            for d in range(dmax + 1):
                ratio = rnext * (j + 1) / (j + 1 - d)
                if ratio >= 1:
                    ok = False
                    break
                bound = abs(terms[d]) / (1 - ratio)
                tails[d] = bound
                if bound * cscale[d] > tol:
                    ok = False
                    break
            if ok:
                break
        for d in range(dmax + 1):
            if j < d:
                continue
            s[d] += terms[d]
            a = abs(terms[d])
            if a > smag[d]:
                smag[d] = a
            a = abs(s[d])
            if a > smag[d]:
                smag[d] = a
        qpow = qpow * q
        qT = qT * qpow
        for d in range(dmax + 1):
            if g[d] is not None:
                g[d] = g[d] * qpow * xr
        rj *= float(absq)
        j += 1

    # --- assemble outputs --------------------------------------------------
    out = []
    ops = n + j + 10
    for e in range(dmax + 1):
        v = pref[e]
        tail_err = zero * 0
        mag = pmag[e]
        for d in range(e + 1):
            v = v + c[e][d] * s[d]
            tail_err = tail_err + abs(c[e][d]) * tails[d]
            mag = mag + abs(c[e][d]) * smag[d]
        av = abs(v)
        if av > mag:
            mag = av
        err = tail_err + 4 * ops * eps * mag
        errf = float(err)
        if not errf < float("inf"):
            errf = float("inf")
        out.append(Approx(value=v, err=errf, terms_used=n + j, reductions_used=n))
    return out


def theta(q, x, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate theta(q, x) with a certified absolute error bound."""
    cfg = cfg or DEFAULT_CONFIG
    return _theta_family(q, x, cfg, 0)[0]


def theta_dx(q, x, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate d theta / dx at (q, x)."""
    cfg = cfg or DEFAULT_CONFIG
    return _theta_family(q, x, cfg, 1)[1]


def theta_dx2(q, x, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate d^2 theta / dx^2 at (q, x)."""
    cfg = cfg or DEFAULT_CONFIG
    return _theta_family(q, x, cfg, 2)[2]


def theta_family(q, x, cfg: EvalConfig | None = None, orders: int = 2):
    """Evaluate theta and its x-derivatives up to the given order in one pass."""
    cfg = cfg or DEFAULT_CONFIG
    if orders not in (0, 1, 2):
        raise DomainError("orders must be 0, 1 or 2")
    return tuple(_theta_family(q, x, cfg, orders))


def theta_dq(q, x, cfg: EvalConfig | None = None, route: str = "auto") -> Approx:
    """Evaluate d theta / dq at (q, x).

    Two routes are available and agree within their error bounds:

    * "pde": the heat-type identity 2q dtheta/dq = x^2 theta_xx + 2x theta_x,
      preferred away from q = 0;
    * "series": termwise differentiation, finite at q -> 0, used for |q| < 1e-3.
    """
    cfg = cfg or DEFAULT_CONFIG
    if route == "auto":
        route = "series" if abs(q) < 1e-3 else "pde"
    if route == "pde":
        if q == 0:
            raise DomainError("the PDE route for theta_dq is singular at q = 0")
        fam = theta_family(q, x, cfg, orders=2)
        v1, v2 = fam[1], fam[2]
        val = (x * x * v2.value + 2 * x * v1.value) / (2 * q)
        ax = float(abs(x))
        err = (ax * ax * v2.err + 2 * ax * v1.err) / (2 * float(abs(q)))
        return Approx(value=val, err=1.01 * err, terms_used=v2.terms_used,
                      reductions_used=v2.reductions_used)
    if route != "series":
        raise DomainError(f"unknown theta_dq route {route!r}")
    return _theta_dq_series(q, x, cfg)


def _theta_dq_series(q, x, cfg: EvalConfig) -> Approx:
    """Direct series sum_{j>=1} T_j q^(T_j - 1) x^j, T_j = j(j+1)/2."""
    _require_q(q)
    digits = _auto_digits(q, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _theta_dq_series_core(mp.mpmathify(q), mp.mpmathify(x), cfg, mp.eps)
    xb = complex(x) if (isinstance(x, complex) and x.imag != 0) else float(
        x.real if isinstance(x, complex) else x
    )
    return _theta_dq_series_core(float(q), xb, cfg, 2.0**-53)


def _theta_dq_series_core(q, x, cfg: EvalConfig, eps) -> Approx:
    zero = q * 0
    u = zero + x            # q^(T_j - 1) x^j at j = 1
    qp = zero + q           # q^j
    s = zero
    mag = abs(u)
    absq, absx = float(abs(q)), float(abs(x))
    rpow = absq * absq * absx   # |q^(j+1) x| at j = 1
    j = 1
    while True:
        if j > cfg.max_terms:
            raise TailNotConverged("theta_dq series exceeded the term budget")
        T = j * (j + 1) // 2
        Tn = (j + 1) * (j + 2) // 2
        term = T * u
        ratio = rpow * (Tn / T)
        if ratio < 1:
            bound = float(abs(term)) / (1 - ratio)
            if bound <= cfg.tail_tol:
                err = float(bound + 4 * (j + 10) * eps * mag)
                return Approx(value=s, err=err, terms_used=j, reductions_used=0)
        s = s + term
        a = abs(term)
        if a > mag:
            mag = a
        a = abs(s)
        if a > mag:
            mag = a
        qp = qp * q
        u = u * qp * x
        rpow *= absq
        j += 1


def family_to_accuracy(q, x, target_err: float, cfg: EvalConfig | None = None,
                       orders: int = 1):
    """Evaluate theta (and derivatives) escalating precision until err <= target.

    Raises NoConvergence if the digit cap is reached before the bound holds.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not target_err > 0:
        raise DomainError("target_err must be positive")
    digits = cfg.precision_digits
    work = cfg
    for _ in range(12):
        fam = theta_family(q, x, work, orders=orders)
        worst = max(a.err for a in fam)
        if worst <= target_err:
            return fam
        if digits >= _MAX_DIGITS:
            break
        if worst < float("inf") and worst > 0:
            deficit = math.log10(worst) - math.log10(target_err)
        else:
            deficit = 40
        digits = min(_MAX_DIGITS, int(digits + max(8, math.ceil(deficit) + 6)))
        work = EvalConfig(precision_digits=digits,
                          tail_tol=min(cfg.tail_tol, target_err / 4),
                          max_terms=cfg.max_terms,
                          reduction_threshold=cfg.reduction_threshold)
    raise NoConvergence(
        f"could not reach target error {target_err:g} at q={q}, x={x} "
        f"within {_MAX_DIGITS} digits"
    )


def theta_to_accuracy(q, x, target_err: float, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate theta(q, x) escalating precision until err <= target_err."""
    return family_to_accuracy(q, x, target_err, cfg, orders=0)[0]
