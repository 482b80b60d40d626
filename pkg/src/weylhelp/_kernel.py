"""Compiled Dormand-Prince 8(5,3) stepper for the quasi-derivative system.

State vector (complex, length 5): c, c1, s, s1, I where I = int |c|^2 dW.
The system is linear, so when the fundamental matrix grows past the overflow
guard it is divided by its max modulus and the log of the factor is carried
separately (``lg``); I is divided by the square of the same factor.

Segments are stretches between coefficient breakpoints.  Inside a segment every
coefficient is a single analytic piece, so the stepper never straddles a jump.
Each segment also carries a change of variable:
  0  x = t
  1  x = t**k            (integrable power singularity at x = 0)
  2  x = B - (B - L) e^-t (singular right end B, t -> inf)
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

_NS = _dop.N_STAGES
A = np.ascontiguousarray(_dop.A[:_NS, :_NS])
BW = np.ascontiguousarray(_dop.A[_NS, :_NS])
C = np.ascontiguousarray(_dop.C[:_NS])
E3 = np.ascontiguousarray(_dop.E3)
E5 = np.ascontiguousarray(_dop.E5)

GUARD = 1e100
I_ATOL = 1e-10
OK, STEP_COLLAPSE, MAX_STEPS, NONFINITE = 0, 1, 2, 3


@njit(cache=True)
def _raw(kind, c, a, p, shift, plo, x, dist_b, b):
    if kind == 1:
        return c + a * (x - plo)
    if a == 0.0 and p == 0.0:
        return c
    if dist_b >= 0.0 and shift == b:
        dd = dist_b
    else:
        dd = abs(x - shift)
    v = c * dd**a
    if p != 0.0:
        v *= math.log(math.e + dd) ** p
    return v


@njit(cache=True)
def _coef(row, sk, k, t, x, dist_b, b):
    """Profile value times dx/dt at parameter t."""
    kind = int(row[0])
    c, a, p, shift, plo = row[1], row[2], row[3], row[4], row[5]
    if c == 0.0 and (kind == 0 or a == 0.0):
        return 0.0
    if sk == 1:
        if kind == 0 and shift == 0.0 and a != 0.0:
            v = c * k * t ** (k * (a + 1.0) - 1.0)
            if p != 0.0:
                v *= math.log(math.e + x) ** p
            return v
        return _raw(kind, c, a, p, shift, plo, x, -1.0, b) * k * t ** (k - 1.0)
    if sk == 2:
        if kind == 0 and shift == b and a != 0.0:
            v = c * dist_b ** (a + 1.0)
            if p != 0.0:
                v *= math.log(math.e + dist_b) ** p
            return v
        return _raw(kind, c, a, p, shift, plo, x, dist_b, b) * dist_b
    return _raw(kind, c, a, p, shift, plo, x, -1.0, b)


@njit(cache=True)
def _x_of_t(sk, k, L, B, t):
    if sk == 1:
        return t**k, -1.0
    if sk == 2:
        d = (B - L) * math.exp(-t)
        return B - d, d
    return t, -1.0


@njit(cache=True)
def _t_of_x(sk, k, L, B, x):
    if sk == 1:
        return x ** (1.0 / k)
    if sk == 2:
        return -math.log((B - x) / (B - L))
    return x


@njit(cache=True)
def _rhs(lam, P, sk, k, L, B, t, y, out):
    x, d = _x_of_t(sk, k, L, B, t)
    wv = _coef(P[0], sk, k, t, x, d, B)
    rv = _coef(P[1], sk, k, t, x, d, B)
    qv = _coef(P[2], sk, k, t, x, d, B)
    Q = qv - lam * wv
    out[0] = rv * y[1]
    out[1] = Q * y[0]
    out[2] = rv * y[3]
    out[3] = Q * y[2]
    out[4] = wv * (y[0].real * y[0].real + y[0].imag * y[0].imag)


@njit(cache=True)
def _maxabs4(y):
    m = 0.0
    for i in range(4):
        v = abs(y[i])
        if v > m:
            m = v
    return m


@njit(cache=True)
def _integrate_segment(lam, y, lg, P, sk, k, L, B, t0, t1, rtol, h, max_steps, counters):
    n = 5
    K = np.zeros((_NS + 1, n), dtype=np.complex128)
    f = np.zeros(n, dtype=np.complex128)
    ytmp = np.zeros(n, dtype=np.complex128)
    ynew = np.zeros(n, dtype=np.complex128)
    _rhs(lam, P, sk, k, L, B, t0, y, f)
    t = t0
    span = t1 - t0
    if h <= 0.0 or h > span:
        nf = _maxabs4(f)
        if nf > 0.0:
            h = min(span, 0.01 * _maxabs4(y) / nf)
        else:
            h = min(span, 1e-2 * max(span, 1e-8))
        h = max(h, 1e-12 * max(1.0, abs(t0)))
    status = 0
    while t < t1:
        if counters[0] >= max_steps:
            status = MAX_STEPS
            break
        last = False
        if t + h >= t1 or (t1 - (t + h)) < 1e-13 * max(1.0, abs(t1)):
            h = t1 - t
            last = True
        K[0, :] = f
        for s in range(1, _NS):
            for j in range(n):
                acc = 0j
                for q in range(s):
                    acc += A[s, q] * K[q, j]
                ytmp[j] = y[j] + h * acc
            _rhs(lam, P, sk, k, L, B, t + C[s] * h, ytmp, K[s])
        for j in range(n):
            acc = 0j
            for q in range(_NS):
                acc += BW[q] * K[q, j]
            ynew[j] = y[j] + h * acc
        tn = t + h if not last else t1
        _rhs(lam, P, sk, k, L, B, tn, ynew, K[_NS])
        # error estimate (scipy's DOP853 norm with a shared scale for U).  I
        # starts at 0, and for w ~ x^a with fractional a the quadrature of the
        # first step has a fixed relative error, so I also gets an absolute
        # floor of I_ATOL * |U|^2.
        um = max(_maxabs4(y), _maxabs4(ynew))
        su = rtol * um + 1e-300
        si = rtol * (max(abs(y[4]), abs(ynew[4])) + I_ATOL * um * um) + 1e-300
        e5 = 0.0
        e3 = 0.0
        for j in range(n):
            a5 = 0j
            a3 = 0j
            for q in range(_NS + 1):
                a5 += E5[q] * K[q, j]
                a3 += E3[q] * K[q, j]
            sc = su if j < 4 else si
            e5 += abs(a5 / sc) ** 2
            e3 += abs(a3 / sc) ** 2
        if e5 == 0.0 and e3 == 0.0:
            err = 0.0
        else:
            err = abs(h) * e5 / math.sqrt((e5 + 0.01 * e3) * n)
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t = tn
            for j in range(n):
                y[j] = ynew[j]
                f[j] = K[_NS, j]
            counters[0] += 1
            mx = _maxabs4(y)
            if not math.isfinite(mx):
                status = NONFINITE
                break
            if mx > GUARD:
                for j in range(4):
                    y[j] = y[j] / mx
                y[4] = y[4] / (mx * mx)
                lg += math.log(mx)
                _rhs(lam, P, sk, k, L, B, t, y, f)
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** (-1.0 / 8.0))
            if not last:
                h = h * fac
        else:
            counters[1] += 1
            h = h * max(0.2, 0.9 * err ** (-1.0 / 8.0))
            if h < 1e-15 * max(1.0, abs(t)):
                status = STEP_COLLAPSE
                break
    return lg, h, status


@njit(cache=True)
def advance(lam, y, lg, x_from, x_to, seg_lo, seg_hi, segP, sub_kind, sub_k, rtol, max_steps, counters):
    """Integrate the state from x_from to x_to (x_to may not reach a singular end)."""
    nseg = seg_lo.shape[0]
    i = 0
    while i < nseg - 1 and seg_hi[i] <= x_from:
        i += 1
    x = x_from
    h = -1.0
    status = 0
    while x < x_to and i < nseg:
        L = seg_lo[i]
        B = seg_hi[i]
        target = min(x_to, B)
        sk = sub_kind[i]
        k = sub_k[i]
        t0 = _t_of_x(sk, k, L, B, x)
        t1 = _t_of_x(sk, k, L, B, target)
        if t1 > t0:
            lg, h, status = _integrate_segment(lam, y, lg, segP[i], sk, k, L, B, t0, t1, rtol, h, max_steps, counters)
            if status != 0:
                return lg, status
        x = target
        if x >= B:
            i += 1
            h = -1.0
    return lg, status


@njit(cache=True)
def advance_t(lam, y, lg, seg, t0, t1, seg_lo, seg_hi, segP, sub_kind, sub_k, rtol, max_steps, counters):
    """Integrate inside one (substituted) segment in its own parameter t."""
    lg, h, status = _integrate_segment(lam, y, lg, segP[seg], sub_kind[seg], sub_k[seg], seg_lo[seg], seg_hi[seg],
                                       t0, t1, rtol, -1.0, max_steps, counters)
    return lg, status
