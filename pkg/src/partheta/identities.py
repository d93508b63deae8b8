"""Classical identities attached to the partial theta series.

Everything here is cross-checkable against `evaluate.theta`: the Jacobi triple
product, the full-lattice tail G, the phi family phi_k(q) = theta(q, -q^(k-1)),
its Euler-style partial sums, the square-exponent series phi, and the even/odd
decompositions used on the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import DivergesAtZero, DomainError, TailNotConverged
from .evaluate import (
    DEFAULT_CONFIG,
    Approx,
    EvalConfig,
    _auto_digits,
    theta,
    theta_family,
)

_FLOAT_DIGIT_LIMIT = 16


@dataclass(frozen=True)
class IdentityCheck:
    """Residual of an identity together with its certified error budget."""

    residual: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound


# ----- products -------------------------------------------------------------


def jacobi_theta(q, x, cfg: EvalConfig | None = None) -> Approx:
    """Jacobi theta via the triple product.

    Theta(q, x) = prod_{j>=1} (1 - q^j)(1 + x q^j)(1 + q^(j-1)/x), q in (0,1),
    x != 0.  Equals theta(q, x) + tail_G(q, x).
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("jacobi_theta needs q in (0, 1)")
    if x == 0:
        raise DomainError("jacobi_theta needs x != 0")
    digits = _auto_digits(qf, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _jacobi_core(mp.mpf(qf), mp.mpmathify(x), cfg, float(mp.eps))
    xb = complex(x) if (isinstance(x, (complex, mpmath.mpc)) and complex(x).imag != 0) \
        else float(complex(x).real)
    return _jacobi_core(qf, xb, cfg, 2.0**-53)


def _jacobi_core(q, x, cfg: EvalConfig, eps: float) -> Approx:
    P = q * 0 + 1
    inv_x = 1 / x
    qj = P          # q^j, starts at j=0 and is advanced on entry
    mag = abs(P)
    absx = float(abs(x))
    for j in range(1, cfg.max_terms):
        qjm1 = qj   # q^(j-1)
        qj = qj * q
        P = P * (1 - qj) * (1 + x * qj) * (1 + qjm1 * inv_x)
        a = abs(P)
        if a > mag:
            mag = a
        qf = float(qj)
        if qf <= 0.5 and absx * qf <= 0.5 and qf / (float(q) * absx) <= 0.5:
            # remaining log-product bounded via |log(1+u)| <= 2|u| for |u| <= 1/2
            s = 2 * qf * float(q) / (1 - float(q)) * (1 + absx) \
                + 2 * qf / ((1 - float(q)) * absx)
            tail = float(abs(P)) * math.expm1(s)
            if tail <= cfg.tail_tol:
                err = tail + 12 * j * eps * float(mag)
                return Approx(value=P, err=err, terms_used=j, reductions_used=0)
    raise TailNotConverged("triple product did not converge within max_terms")


def theta_at_one_product(q, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate prod_{k>=1} (1 - q^(2k)) / (1 - q^(2k-1)) for |q| < 1.

    Equals theta(q, 1); positive on (-1, 0) as every paired factor is.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not abs(qf) < 1:
        raise DomainError("need |q| < 1")
    if qf == 0:
        return Approx(1.0, 0.0, 1, 0)
    digits = _auto_digits(qf, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _ratio_product_core(mp.mpf(qf), cfg, float(mp.eps), step2=True)
    return _ratio_product_core(qf, cfg, 2.0**-53, step2=True)


def phi_square_product(q, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate prod_{k>=1} (1 - q^k) / (1 + q^k) for q in (0, 1).

    Equals phi_small(q^2).
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("need q in (0, 1)")
    digits = _auto_digits(qf, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _ratio_product_core(mp.mpf(qf), cfg, float(mp.eps), step2=False)
    return _ratio_product_core(qf, cfg, 2.0**-53, step2=False)


def _ratio_product_core(q, cfg: EvalConfig, eps: float, step2: bool) -> Approx:
    """Shared driver for the two convergent ratio products above.

    step2=True:  factors (1 - q^(2k)) / (1 - q^(2k-1)).
    step2=False: factors (1 - q^k) / (1 + q^k).
    """
    P = q * 0 + 1
    qpow = P
    mag = abs(P)
    aq = abs(float(q))
    for k in range(1, cfg.max_terms):
        if step2:
            q_odd = qpow * q          # q^(2k-1)
            q_even = q_odd * q        # q^(2k)
            qpow = q_even
            P = P * (1 - q_even) / (1 - q_odd)
            lead = abs(float(q_odd))
        else:
            qpow = qpow * q           # q^k
            P = P * (1 - qpow) / (1 + qpow)
            lead = abs(float(qpow))
        a = abs(P)
        if a > mag:
            mag = a
        if lead <= 0.5:
            s = 4 * lead * aq / (1 - aq * aq) if step2 else 4 * lead * aq / (1 - aq)
            tail = float(abs(P)) * math.expm1(s)
            if tail <= cfg.tail_tol:
                err = tail + 8 * k * eps * float(mag)
                return Approx(value=P, err=err, terms_used=k, reductions_used=0)
    raise TailNotConverged("ratio product did not converge within max_terms")


# ----- the G tail -----------------------------------------------------------


def tail_G(q, x, cfg: EvalConfig | None = None) -> Approx:
    """Sum over the negative lattice: G(q, x) = sum_{j<=-1} q^(j(j+1)/2) x^j.

    Computed as (1/x) theta(q, 1/x); defined for |q| < 1, x != 0.
    """
    cfg = cfg or DEFAULT_CONFIG
    if x == 0:
        raise DomainError("tail_G needs x != 0")
    inner = theta(q, 1 / x if isinstance(x, (mpmath.mpf, mpmath.mpc)) else
                  (1 / complex(x) if (isinstance(x, complex) and x.imag != 0) else 1 / float(x)),
                  cfg)
    ax = float(abs(x))
    val = inner.value / x
    err = inner.err / ax + 4 * 2.0**-53 * float(abs(val))
    return Approx(value=val, err=err, terms_used=inner.terms_used,
                  reductions_used=inner.reductions_used)


# ----- the phi family -------------------------------------------------------


def phi_small(q, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate phi(q) = 1 + 2 sum_{j>=1} (-1)^j q^(j^2/2) for q in [0, 1).

    Alternating with decreasing terms, so the first omitted term bounds the
    tail.  Positive on (0, 1).
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 <= qf < 1:
        raise DomainError("phi_small needs q in [0, 1)")
    if qf == 0:
        return Approx(1.0, 0.0, 1, 0)
    digits = _auto_digits(qf, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _phi_small_core(mp.mpf(qf), cfg, float(mp.eps))
    return _phi_small_core(qf, cfg, 2.0**-53)


def _phi_small_core(q, cfg: EvalConfig, eps: float) -> Approx:
    one = q * 0 + 1
    sqq = q**0.5 if isinstance(q, float) else mp.sqrt(q)
    s = one
    t = sqq                 # q^(j^2/2) at j = 1
    qj = one                # q^j
    sign = -1
    j = 1
    while j <= cfg.max_terms:
        if float(2 * t) <= cfg.tail_tol:
            err = float(2 * t) + 8 * j * eps * 3.0
            return Approx(value=s, err=err, terms_used=j, reductions_used=0)
        s = s + sign * 2 * t
        qj = qj * q
        t = t * qj * sqq    # exponent step: (j+1)^2/2 - j^2/2 = j + 1/2
        sign = -sign
        j += 1
    raise TailNotConverged("phi series did not converge within max_terms")


def phi_k(q, k, cfg: EvalConfig | None = None) -> Approx:
    """Evaluate phi_k(q) = theta(q, -q^(k-1)) = sum_j (-1)^j q^(kj + j(j-1)/2).

    Real k, q in [0, 1).  For k < 0 the value is produced through the
    functional relation phi_k = 1 - q^k phi_(k+1) (substitute x = -q^(k-1)
    into theta(q, x) = 1 + q x theta(q, q x)), lifting the index until the
    alternating series has monotone terms.  At q = 0 the series diverges for
    negative non-integer k and that is reported, not patched over.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    kf = float(k)
    if not 0 <= qf < 1:
        raise DomainError("phi_k needs q in [0, 1)")
    if qf == 0:
        if kf > 0:
            return Approx(1.0, 0.0, 1, 0)
        if kf.is_integer():
            return Approx(0.0, 0.0, 1, 0)
        raise DivergesAtZero(f"phi_k diverges as q -> 0+ for k = {k}")
    digits = _auto_digits(qf, cfg)
    if digits > _FLOAT_DIGIT_LIMIT:
        with mp.workdps(digits + 8):
            return _phi_k_core(mp.mpf(qf), kf, cfg, float(mp.eps))
    return _phi_k_core(qf, kf, cfg, 2.0**-53)


def _phi_k_core(q, k, cfg: EvalConfig, eps: float) -> Approx:
    lifts = []
    kk = k
    while kk < 0:
        lifts.append(q**kk)
        kk += 1
    val, err, terms = _phi_series(q, kk, cfg, eps)
    for f in reversed(lifts):
        val = 1 - f * val
        err = float(f) * err + 4 * eps * (1 + float(abs(val)))
    return Approx(value=val, err=err, terms_used=terms, reductions_used=len(lifts))


def _phi_series(q, k, cfg: EvalConfig, eps: float):
    """Alternating series for phi_k with k >= 0; returns (value, err, terms)."""
    one = q * 0 + 1
    qk = q**k
    t = one                 # q^(A_j), A_j = kj + j(j-1)/2
    qj = one                # q^j
    s = q * 0
    sign = 1
    mag = 1.0
    j = 0
    while j <= cfg.max_terms:
        tf = float(t)
        if j >= 1 and tf <= cfg.tail_tol:
            return s, tf + 8 * j * eps * mag, j
        s = s + sign * t
        a = float(abs(s))
        if a > mag:
            mag = a
        if tf > mag:
            mag = tf
        t = t * qk * qj     # A_(j+1) - A_j = k + j
        qj = qj * q
        sign = -sign
        j += 1
    raise TailNotConverged(f"phi_k series did not converge for k={k}")


def phi_k_functional_residual(q, k, cfg: EvalConfig | None = None) -> IdentityCheck:
    """Residual |phi_k(q) - (1 - q^k phi_(k+1)(q))| with its error budget."""
    cfg = cfg or DEFAULT_CONFIG
    a = phi_k(q, k, cfg)
    b = phi_k(q, k + 1, cfg)
    qf = float(q)
    qk = qf**float(k) if qf > 0 else (1.0 if k == 0 else 0.0)
    residual = float(abs(a.value - (1 - qk * b.value)))
    bound = 10 * (a.err + abs(qk) * b.err + 2.0**-50 * (1 + abs(qk)))
    return IdentityCheck(residual=residual, bound=bound)


def phi_partial_sum(q, k, m: int, cfg: EvalConfig | None = None) -> Approx:
    """Euler-style partial sum Phi_m of phi_k with averaged last term.

    Phi_m = sum_{j=0}^{m-1} (-1)^j q^(A_j) + (-1)^m q^(A_m) / (1 + q^(k+m-1/2)),
    A_j = kj + j(j-1)/2.  Defined for q in (0, 1]; finite sum, exact at q = 1
    where it equals 1/2 for every m.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf <= 1:
        raise DomainError("phi_partial_sum needs q in (0, 1]")
    if m < 1:
        raise DomainError("phi_partial_sum needs m >= 1")
    kf = float(k)
    s = 0.0
    for j in range(m):
        s += (-1) ** j * qf ** (kf * j + j * (j - 1) / 2)
    Am = kf * m + m * (m - 1) / 2
    D = qf**Am / (1 + qf ** (kf + m - 0.5))
    val = s + (-1) ** m * D
    err = 2.0**-50 * (m + 2) * max(1.0, abs(val))
    return Approx(value=val, err=err, terms_used=m + 1, reductions_used=0)


def phi_partial_sum_dq(q, k, m: int, cfg: EvalConfig | None = None) -> Approx:
    """Termwise q-derivative of phi_partial_sum; at q = 1 equals -(2k-1)/8."""
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf <= 1:
        raise DomainError("phi_partial_sum_dq needs q in (0, 1]")
    if m < 1:
        raise DomainError("phi_partial_sum_dq needs m >= 1")
    kf = float(k)
    s = 0.0
    for j in range(1, m):
        A = kf * j + j * (j - 1) / 2
        s += (-1) ** j * A * qf ** (A - 1)
    Am = kf * m + m * (m - 1) / 2
    c = kf + m - 0.5
    denom = 1 + qf**c
    dD = (Am * qf ** (Am - 1) * denom - c * qf ** (Am + c - 1)) / (denom * denom)
    val = s + (-1) ** m * dD
    err = 2.0**-48 * (m + 4) * max(1.0, abs(val), abs(Am))
    return Approx(value=val, err=err, terms_used=m + 1, reductions_used=0)


def phi_neg_halfint_identity_residual(q, s: int,
                                      cfg: EvalConfig | None = None) -> IdentityCheck:
    """Residual of the reflection of phi at negative half-integer index.

    phi_(3/2 - 2s)(q) = q^(-(2s-1)^2/2) (-phi(q) + q^(2 s^2) phi_((4s+1)/2)(q))
    for integer s >= 1.  Both sides are evaluated independently; the residual
    is compared against the propagated error budget, which carries the large
    prefactor q^(-(2s-1)^2/2).
    """
    cfg = cfg or DEFAULT_CONFIG
    if s < 1:
        raise DomainError("phi_neg_halfint_identity_residual needs integer s >= 1")
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("need q in (0, 1)")
    k = 1.5 - 2 * s
    lhs = phi_k(qf, k, cfg)
    small = phi_small(qf, cfg)
    high = phi_k(qf, (4 * s + 1) / 2, cfg)
    pre = qf ** (-((2 * s - 1) ** 2) / 2)
    inner = qf ** (2 * s * s)
    rhs = pre * (-small.value + inner * high.value)
    residual = float(abs(lhs.value - rhs))
    bound = 10 * (lhs.err + pre * (small.err + inner * high.err)
                  + 2.0**-48 * pre * (1 + float(abs(rhs)) / pre))
    return IdentityCheck(residual=residual, bound=bound)


# ----- even/odd decompositions ----------------------------------------------


def psi_decomposition(v, x, cfg: EvalConfig | None = None):
    """Split theta(-v, x) into even and odd parts, v in (0, 1).

    psi1(v, x) = theta(v^4, -x^2/v)  collects even powers of x,
    psi2(v, x) = -v x theta(v^4, -v x^2)  collects odd powers, and
    theta(-v, x) = psi1 + psi2.
    Returns (psi1, psi2) as Approx values.
    """
    cfg = cfg or DEFAULT_CONFIG
    vf = float(v)
    if not 0 < vf < 1:
        raise DomainError("psi_decomposition needs v in (0, 1)")
    q4 = vf**4
    psi1 = theta(q4, -(x * x) / vf, cfg)
    inner = theta(q4, -vf * (x * x), cfg)
    val2 = -vf * x * inner.value
    err2 = vf * float(abs(x)) * inner.err + 2.0**-50 * float(abs(val2))
    psi2 = Approx(value=val2, err=err2, terms_used=inner.terms_used,
                  reductions_used=inner.reductions_used)
    return psi1, psi2


def imag_axis_decomposition(q, y, cfg: EvalConfig | None = None):
    """Real/imaginary split of theta(q, i y):  theta(q, iy) = f1 + i q y f2.

    f1 = theta(q^4, -y^2/q) and f2 = theta(q^4, -q y^2); both are real for
    real q != 0, |q| < 1, and real y.  For q < 0 both inner x-arguments are
    positive, which is what rules out zeros on the imaginary axis there.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if qf == 0 or not abs(qf) < 1:
        raise DomainError("imag_axis_decomposition needs 0 < |q| < 1")
    yf = float(y)
    f1 = theta(qf**4, -(yf * yf) / qf, cfg)
    f2 = theta(qf**4, -qf * yf * yf, cfg)
    return f1, f2


def k1_k2(q, y, cfg: EvalConfig | None = None):
    """Real and imaginary parts of theta_dx(q, i y) for q in (0, 1), y real.

    K1 = -2 q^2 y^2 theta_dx(q^4, -q y^2) + q theta(q^4, -q y^2)
    K2 =  2 (y/q)  theta_dx(q^4, -y^2/q)
    Returns (K1, K2) as floats.
    """
    cfg = cfg or DEFAULT_CONFIG
    qf = float(q)
    if not 0 < qf < 1:
        raise DomainError("k1_k2 needs q in (0, 1)")
    yf = float(y)
    q4 = qf**4
    th_o, dth_o = theta_family(q4, -qf * yf * yf, cfg, orders=1)
    dth_e = theta_family(q4, -(yf * yf) / qf, cfg, orders=1)[1]
    K1 = -2 * qf * qf * yf * yf * float(dth_o.value) + qf * float(th_o.value)
    K2 = 2 * (yf / qf) * float(dth_e.value)
    return K1, K2
