"""Independent brute-force references used to pin expected values.

Everything here is deliberately naive: straight mpmath summation at high
working precision, no argument reduction, no tail modelling.  Slow is fine;
these only anchor the frozen literals in the test files and cross-check a
handful of live points per run.
"""

from __future__ import annotations

import mpmath as mp


def theta_ref(q, x, dps: int = 50, max_j: int = 100000):
    """Sum q^(j(j+1)/2) x^j directly until terms stop mattering."""
    with mp.workdps(dps + 10):
        qm, xm = mp.mpmathify(q), mp.mpmathify(x)
        if abs(qm) >= 1:
            raise ValueError("need |q| < 1")
        total = mp.mpf(0)
        peak = mp.mpf(0)
        for j in range(max_j):
            term = qm ** (j * (j + 1) // 2) * xm ** j
            total += term
            peak = max(peak, abs(term))
            if j > 3 and abs(term) < peak * mp.mpf(10) ** (-dps - 8) and abs(term) < mp.mpf(10) ** (-dps - 8):
                break
        else:
            raise RuntimeError("term budget exhausted")
        return +total


def theta_dx_ref(q, x, dps: int = 50):
    with mp.workdps(dps + 10):
        qm, xm = mp.mpmathify(q), mp.mpmathify(x)
        total = mp.mpf(0)
        peak = mp.mpf(0)
        for j in range(1, 100000):
            term = qm ** (j * (j + 1) // 2) * j * xm ** (j - 1)
            total += term
            peak = max(peak, abs(term))
            if j > 4 and abs(term) < (peak + 1) * mp.mpf(10) ** (-dps - 8):
                break
        return +total


def theta_dxx_ref(q, x, dps: int = 50):
    with mp.workdps(dps + 10):
        qm, xm = mp.mpmathify(q), mp.mpmathify(x)
        total = mp.mpf(0)
        peak = mp.mpf(0)
        for j in range(2, 100000):
            term = qm ** (j * (j + 1) // 2) * j * (j - 1) * xm ** (j - 2)
            total += term
            peak = max(peak, abs(term))
            if j > 5 and abs(term) < (peak + 1) * mp.mpf(10) ** (-dps - 8):
                break
        return +total


def theta_dq_ref(q, x, dps: int = 50):
    with mp.workdps(dps + 10):
        qm, xm = mp.mpmathify(q), mp.mpmathify(x)
        total = mp.mpf(0)
        peak = mp.mpf(0)
        for j in range(1, 100000):
            T = j * (j + 1) // 2
            term = T * qm ** (T - 1) * xm ** j
            total += term
            peak = max(peak, abs(term))
            if j > 4 and abs(term) < (peak + 1) * mp.mpf(10) ** (-dps - 8):
                break
        return +total


def phi_k_ref(q, k, dps: int = 50):
    """Alternating sum (-1)^j q^(kj + j(j-1)/2), k real, 0 < q < 1."""
    with mp.workdps(dps + 10):
        qm, km = mp.mpmathify(q), mp.mpmathify(k)
        total = mp.mpf(0)
        for j in range(100000):
            e = km * j + mp.mpf(j * (j - 1)) / 2
            term = (-1) ** j * qm ** e
            total += term
            if j > 2 and abs(term) < mp.mpf(10) ** (-dps - 8):
                break
        else:
            raise RuntimeError("term budget exhausted")
        return +total


def bisect_ref(f, lo, hi, dps: int = 50, iters: int = 400):
    """Plain sign bisection in mpmath; f must change sign on [lo, hi]."""
    with mp.workdps(dps + 10):
        a, b = mp.mpmathify(lo), mp.mpmathify(hi)
        fa = f(a)
        if fa == 0:
            return a
        sa = mp.sign(fa)
        if mp.sign(f(b)) == sa:
            raise ValueError("no sign change on the bracket")
        for _ in range(iters):
            m = (a + b) / 2
            fm = f(m)
            if fm == 0:
                return m
            if mp.sign(fm) == sa:
                a = m
            else:
                b = m
            if abs(b - a) < abs(m) * mp.mpf(10) ** (-dps):
                break
        return (a + b) / 2


def double_zero_ref(q0, x0, dps: int = 50, iters: int = 60):
    """2D Newton on (theta, theta_x) from (q0, x0); returns (q, x) mpf pair."""
    with mp.workdps(dps + 15):
        q, x = mp.mpmathify(q0), mp.mpmathify(x0)
        for _ in range(iters):
            f1 = theta_ref(q, x, dps + 10)
            f2 = theta_dx_ref(q, x, dps + 10)
            a = theta_dq_ref(q, x, dps + 10)
            b = f2
            c = _theta_dqx_ref(q, x, dps + 10)
            d = theta_dxx_ref(q, x, dps + 10)
            det = a * d - b * c
            dq = (f1 * d - f2 * b) / det
            dx = (a * f2 - c * f1) / det
            q, x = q - dq, x - dx
            if abs(dq) < mp.mpf(10) ** (-dps) and abs(dx) < mp.mpf(10) ** (-dps + 2):
                break
        return +q, +x


def _theta_dqx_ref(q, x, dps: int = 50):
    with mp.workdps(dps + 10):
        qm, xm = mp.mpmathify(q), mp.mpmathify(x)
        total = mp.mpf(0)
        peak = mp.mpf(0)
        for j in range(1, 100000):
            T = j * (j + 1) // 2
            term = T * qm ** (T - 1) * j * xm ** (j - 1)
            total += term
            peak = max(peak, abs(term))
            if j > 4 and abs(term) < (peak + 1) * mp.mpf(10) ** (-dps - 8):
                break
        return +total


# --- complex-plane references -------------------------------------------

def _theta_np(q: float, xs, terms: int = 400):
    """Vectorized brute series over a numpy array of complex points."""
    import numpy as np

    xs = np.asarray(xs, dtype=complex)
    total = np.zeros_like(xs)
    term = np.ones_like(xs)
    qp = 1.0
    for j in range(terms):
        total = total + term
        qp *= q
        term = term * (qp * xs)
    return total


def winding_ref(q: float, re_lo, re_hi, im_lo, im_hi, per_edge: int = 256,
                rounds: int = 48):
    """Argument-principle count over a rectangle via adaptive insertion.

    Starts from a uniform boundary sampling and repeatedly inserts
    midpoints into every segment whose phase increment is not clearly
    below pi/2, evaluating each new frontier in one vectorized pass.
    """
    import numpy as np

    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    bot = re_lo + (re_hi - re_lo) * t + 1j * im_lo
    rgt = re_hi + 1j * (im_lo + (im_hi - im_lo) * t)
    top = re_hi - (re_hi - re_lo) * t + 1j * im_hi
    lft = re_lo + 1j * (im_hi - (im_hi - im_lo) * t)
    pts = np.concatenate([bot, rgt, top, lft])
    vals = _theta_np(q, pts, terms=600)
    for _ in range(rounds):
        if np.min(np.abs(vals)) == 0.0:
            raise RuntimeError("boundary hits a zero")
        nxt = np.roll(vals, -1)
        ang = np.angle(nxt / vals)
        bad = np.abs(ang) >= 1.2
        if not bad.any():
            w = ang.sum() / (2 * np.pi)
            k = round(w)
            if abs(w - k) >= 1e-3:
                raise RuntimeError(f"winding {w} not near an integer")
            return k
        mids = 0.5 * (pts[bad] + np.roll(pts, -1)[bad])
        mvals = _theta_np(q, mids, terms=600)
        idx = np.nonzero(bad)[0]
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals)
        if pts.size > 4_000_000:
            raise RuntimeError("boundary refinement exploded")
    raise RuntimeError("winding did not stabilize")


def zero_polish_ref(q, x0, dps: int = 40, iters: int = 80):
    """mp Newton in x on the brute series from a complex seed."""
    with mp.workdps(dps + 10):
        qm = mp.mpmathify(q)
        x = mp.mpmathify(x0)
        for _ in range(iters):
            f = theta_ref(qm, x, dps + 5)
            fp = theta_dx_ref(qm, x, dps + 5)
            step = f / fp
            x = x - step
            if abs(step) < mp.mpf(10) ** (-dps) * (1 + abs(x)):
                break
        return +x
