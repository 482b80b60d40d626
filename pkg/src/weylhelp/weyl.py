"""Fundamental solutions, Weyl disks and m-functions of half-line problems.

The system integrated is u1' = r u2, u2' = (q - lam w) u1 with c(0)=s1(0)=1,
c1(0)=s(0)=0.  The Neumann m-function is the coefficient for which s - m c is
square integrable against w (limit point) or has vanishing quasi-derivative at
b (regular / limit circle).
"""
from __future__ import annotations

import bisect
import cmath
import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernel
from .coefficients import (
    INF,
    CoefficientProfile,
    DivergentIntegralError,
    Piece,
    ProfileError,
    distribution_growth,
    profile_from_json,
    zero,
)


class WeylError(RuntimeError):
    pass


class StepCollapseError(WeylError):
    pass


class SingularCoefficientError(WeylError):
    pass


class TruncationStallError(WeylError):
    pass


class ClassificationError(WeylError):
    pass


class DomainError(WeylError, ValueError):
    pass


# ---------------------------------------------------------------------------
# problem


@dataclass(frozen=True)
class HalfLineProblem:
    w: CoefficientProfile
    r: CoefficientProfile
    q: CoefficientProfile | None = None
    boundary: str = "neumann"
    endpoint: str = "auto"
    name: str = ""

    def __post_init__(self) -> None:
        if self.boundary not in ("neumann", "dirichlet"):
            raise ProfileError(f"unknown boundary {self.boundary!r}")
        if self.endpoint not in ("auto", "regular", "limit-circle", "limit-point"):
            raise ProfileError(f"unknown endpoint class {self.endpoint!r}")
        if self.is_atomic:
            return
        if self.w.b != self.r.b or (self.q is not None and self.q.b != self.w.b):
            raise ProfileError("w, r and q must share the support (0, b)")
        if self.w.signed or self.r.signed:
            raise ProfileError("w and r must be positive")

    @property
    def b(self) -> float:
        if self.is_atomic:
            return 1.0
        return self.w.b

    @property
    def q_zero(self) -> bool:
        return self.q is None or self.q.is_zero

    @property
    def is_atomic(self) -> bool:
        return self.w.name == "atomic-a" or self.r.name == "atomic-a"

    def swapped(self) -> "HalfLineProblem":
        """(w, r) exchanged, Dirichlet condition at b (the dual system)."""
        if not self.q_zero:
            raise ProfileError("the dual system is defined for q = 0 only")
        other = "dirichlet" if self.boundary == "neumann" else "neumann"
        return HalfLineProblem(self.r, self.w, None, other, self.endpoint, f"swap({self.name})")

    def to_json(self) -> dict:
        d = {"w": self.w.to_json(), "r": self.r.to_json(), "b": "inf" if math.isinf(self.b) else self.b}
        if not self.q_zero:
            d["q"] = self.q.to_json()
        if self.boundary != "neumann":
            d["boundary"] = self.boundary
        if self.endpoint != "auto":
            d["endpoint"] = self.endpoint
        if self.name:
            d["name"] = self.name
        return d


def problem_from_json(d: dict) -> HalfLineProblem:
    if not isinstance(d, dict):
        raise ProfileError("problem must be a JSON object")
    for key in ("w", "r"):
        if key not in d:
            raise ProfileError(f"problem needs a {key!r} profile")
    w = profile_from_json(d["w"])
    r = profile_from_json(d["r"])
    q = profile_from_json(d["q"], signed=True) if d.get("q") is not None else None
    if "b" in d and not (w.name == "atomic-a" or r.name == "atomic-a"):
        bval = d["b"]
        b = INF if (isinstance(bval, str) and bval.lower() == "inf") else float(bval)
        if w.b != b or r.b != b or (q is not None and q.b != b):
            w, r = w.with_support(b), r.with_support(b)
            q = q.with_support(b) if q is not None else None
            if w.b != b or r.b != b:
                raise ProfileError("profile support shorter than b")
    return HalfLineProblem(w, r, q, d.get("boundary", "neumann"), d.get("endpoint", "auto"), d.get("name", ""))


# ---------------------------------------------------------------------------
# compiled representation


@dataclass(frozen=True)
class Compiled:
    seg_lo: np.ndarray
    seg_hi: np.ndarray
    segP: np.ndarray
    sub_kind: np.ndarray
    sub_k: np.ndarray
    b: float

    @property
    def singular_b(self) -> bool:
        return bool(self.sub_kind[-1] == 2)


def _piece_row(pc: Piece) -> list[float]:
    return [0.0 if pc.kind == "powlog" else 1.0, pc.c, pc.a, pc.p, pc.shift, pc.lo]


def _piece_at(profile: CoefficientProfile, x0: float, x1: float, los: list[float]) -> Piece:
    mid = 0.5 * (x0 + x1) if math.isfinite(x1) else x0 + 1.0
    i = bisect.bisect_right(los, mid) - 1
    return profile.pieces[min(max(i, 0), len(profile.pieces) - 1)]


@functools.lru_cache(maxsize=256)
def compile_problem(problem: HalfLineProblem) -> Compiled:
    q = problem.q if problem.q is not None else zero(problem.b)
    profs = (problem.w, problem.r, q)
    b = problem.b
    pts = {0.0}
    for pf in profs:
        for pc in pf.pieces:
            pts.add(pc.lo)
            if math.isfinite(pc.hi):
                pts.add(pc.hi)
    pts = sorted(p for p in pts if p < b)
    # singular behaviour at 0
    k0 = 1.0
    for pf in profs:
        pc = pf.pieces[0]
        if pc.kind == "powlog" and pc.shift == 0.0 and pc.a < 0 and pc.c != 0.0:
            if pc.a <= -1.0:
                raise SingularCoefficientError(f"coefficient ~ x^{pc.a} is not integrable at 0")
            k0 = max(k0, 1.0 / (1.0 + pc.a))
    sing_b = False
    if math.isfinite(b):
        for pf in profs:
            pc = pf.pieces[-1]
            if pc.kind == "powlog" and pc.shift == b and pc.a < 0 and pc.c != 0.0:
                sing_b = True
    edges = pts + [b]
    if sing_b and k0 > 1.0 and len(edges) == 2:
        edges = [0.0, 0.5 * b, b]
    nseg = len(edges) - 1
    seg_lo = np.array(edges[:-1], dtype=float)
    seg_hi = np.array(edges[1:], dtype=float)
    segP = np.zeros((nseg, 3, 6))
    los = [[pc.lo for pc in pf.pieces] for pf in profs]
    for i in range(nseg):
        for j, pf in enumerate(profs):
            segP[i, j] = _piece_row(_piece_at(pf, seg_lo[i], seg_hi[i], los[j]))
    sub_kind = np.zeros(nseg, dtype=np.int64)
    sub_k = np.ones(nseg)
    if k0 > 1.0:
        sub_kind[0], sub_k[0] = 1, k0
    if sing_b:
        sub_kind[-1] = 2
    return Compiled(seg_lo, seg_hi, segP, sub_kind, sub_k, b)


# ---------------------------------------------------------------------------
# classification


def limit_point_classify(problem: HalfLineProblem) -> str:
    """'regular', 'limit-circle' or 'limit-point' at b."""
    if problem.endpoint != "auto":
        return problem.endpoint
    if problem.is_atomic:
        return "regular"
    b = problem.b
    gw = distribution_growth(problem.w, "b")
    gr = distribution_growth(problem.r, "b")
    q_int, q_ok = True, True
    if not problem.q_zero:
        q_int = distribution_growth(problem.q, "b").bounded
        q_ok = q_int or problem.q.nonnegative() or _q_tail_mild(problem.q)
    if math.isfinite(b) and gw.bounded and gr.bounded and q_int:
        return "regular"
    if not q_ok:
        raise ClassificationError("signed potential tail: endpoint class not decidable from metadata")
    if not gw.bounded:
        return "limit-point"
    if gr.bounded:
        return "limit-circle"
    return "limit-circle" if _r2w_integrable(problem, gr) else "limit-point"


def _q_tail_mild(q: CoefficientProfile) -> bool:
    pc = q.pieces[-1]
    if pc.kind == "linear":
        return pc.a >= 0 and pc.c >= 0
    if math.isinf(pc.hi):
        return pc.c >= 0 or pc.a <= -2.0 or (pc.a == 0.0 and pc.p == 0.0 and pc.c == 0.0)
    return True


def _r2w_integrable(problem: HalfLineProblem, gr) -> bool:
    b = problem.b
    pc = problem.w.pieces[-1]
    if math.isinf(b):
        if pc.kind == "linear":
            return False
        tot_a = 2.0 * gr.index + pc.a
        tot_p = 2.0 * gr.logpow + pc.p
        return tot_a < -1.0 or (tot_a == -1.0 and tot_p < -1.0)
    a_w = pc.a if (pc.kind == "powlog" and pc.shift == b) else 0.0
    if gr.index == 0.0:
        return True
    return a_w - 2.0 * gr.index > -1.0


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class SolutionPair:
    x: float
    c_hat: complex
    c1_hat: complex
    s_hat: complex
    s1_hat: complex
    log_scale: float
    wronskian_drift: float
    w_integral_hat: float = 0.0

    def _v(self, z: complex) -> complex:
        if self.log_scale == 0.0:
            return z
        try:
            return z * math.exp(self.log_scale)
        except OverflowError:
            return complex(INF, INF)

    @property
    def c(self) -> complex:
        return self._v(self.c_hat)

    @property
    def c1(self) -> complex:
        return self._v(self.c1_hat)

    @property
    def s(self) -> complex:
        return self._v(self.s_hat)

    @property
    def s1(self) -> complex:
        return self._v(self.s1_hat)


@dataclass(frozen=True)
class WeylDisk:
    center: complex
    radius: float
    x: float

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return abs(z - self.center) <= self.radius * (1.0 + slack) + slack * abs(self.center)


@dataclass(frozen=True)
class MFunctionSample:
    lam: complex
    m: complex
    enclosure: float
    method: str
    x: float = math.nan
    steps: int = 0


@dataclass(frozen=True)
class MConfig:
    ode_rtol: float = 1e-10
    disk_rtol: float = 1e-6
    disk_atol: float = 1e-300
    x_start: float = 1.0
    x_cap: float = 1e20
    t_cap: float = 700.0
    max_steps: int = 20_000_000
    eps_shifts: tuple = (1e-4, 1e-5, 1e-6)
    lc_rtol: float = 1e-9


DEFAULT = MConfig()


class _State:
    """Mutable integration state; lives only inside one evaluation."""

    def __init__(self, cp: Compiled, lam: complex, cfg: MConfig):
        self.cp, self.lam, self.cfg = cp, complex(lam), cfg
        self.y = np.array([1, 0, 0, 1, 0], dtype=np.complex128)
        self.lg = 0.0
        self.x = 0.0
        self.t_sing = None  # parameter inside the singular last segment
        self.counters = np.zeros(2, dtype=np.int64)

    def _check(self, status: int) -> None:
        if status == _kernel.STEP_COLLAPSE:
            raise StepCollapseError(f"step size collapsed near x={self.x:g} (lam={self.lam})")
        if status == _kernel.MAX_STEPS:
            raise StepCollapseError(f"step budget exhausted near x={self.x:g} (lam={self.lam})")
        if status == _kernel.NONFINITE:
            raise SingularCoefficientError(f"non-finite solution near x={self.x:g}")

    def to_x(self, x: float) -> None:
        cp = self.cp
        if x < self.x:
            raise ValueError("cannot integrate backwards")
        if cp.singular_b and x >= cp.seg_lo[-1] and x > self.x:
            if self.x < cp.seg_lo[-1]:
                self.to_x(float(cp.seg_lo[-1]))
            L, B = cp.seg_lo[-1], cp.seg_hi[-1]
            self.to_t(-math.log((B - x) / (B - L)))
            self.x = x
            return
        if x > self.x:
            self.lg, st = _kernel.advance(self.lam, self.y, self.lg, self.x, x, cp.seg_lo, cp.seg_hi, cp.segP,
                                          cp.sub_kind, cp.sub_k, self.cfg.ode_rtol, self.cfg.max_steps, self.counters)
            self.x = x
            self._check(st)

    def to_t(self, t: float) -> None:
        """Advance inside the singular last segment to parameter t."""
        cp = self.cp
        n = cp.seg_lo.shape[0] - 1
        if self.t_sing is None:
            if self.x < cp.seg_lo[-1]:
                self.to_x(float(cp.seg_lo[-1]))
            self.t_sing = 0.0
        if t > self.t_sing:
            self.lg, st = _kernel.advance_t(self.lam, self.y, self.lg, n, self.t_sing, t, cp.seg_lo, cp.seg_hi,
                                            cp.segP, cp.sub_kind, cp.sub_k, self.cfg.ode_rtol, self.cfg.max_steps,
                                            self.counters)
            self.t_sing = t
            L, B = cp.seg_lo[-1], cp.seg_hi[-1]
            self.x = B - (B - L) * math.exp(-t)
            self._check(st)

    def disk(self) -> WeylDisk:
        c, c1, s, s1, I = self.y
        den = c * c1.conjugate() - c1 * c.conjugate()
        if den == 0:
            raise WeylError("degenerate truncation (zero denominator)")
        center = (s * c1.conjugate() - s1 * c.conjugate()) / den
        Ir = I.real
        if Ir <= 0:
            return WeylDisk(center, INF, self.x)
        lr = -2.0 * self.lg - math.log(2.0 * abs(self.lam.imag) * Ir)
        radius = math.exp(lr) if lr < 700 else INF
        return WeylDisk(center, radius, self.x)

    def pair(self) -> SolutionPair:
        c, c1, s, s1, I = (complex(v) for v in self.y)
        det_true = math.exp(-2.0 * self.lg) if self.lg < 350 else 0.0
        wr = c * s1 - s * c1
        denom = max(det_true, abs(c * s1) + abs(s * c1))
        drift = abs(wr - det_true) / denom if denom > 0 else 0.0
        return SolutionPair(self.x, c, c1, s, s1, self.lg, drift, I.real)


def integrate_fundamental(problem: HalfLineProblem, lam: complex, x: float, config: MConfig = DEFAULT) -> SolutionPair:
    if not (0.0 <= x < problem.b or (x == problem.b and limit_point_classify(problem) == "regular")):
        raise DomainError(f"x={x} outside [0, b)")
    st = _State(compile_problem(problem), lam, config)
    st.to_x(float(x))
    return st.pair()


def integrate_path(problem: HalfLineProblem, lam: complex, xs, config: MConfig = DEFAULT) -> list[SolutionPair]:
    """Fundamental solutions at an increasing list of points (one pass)."""
    st = _State(compile_problem(problem), lam, config)
    out = []
    for x in xs:
        st.to_x(float(x))
        out.append(st.pair())
    return out


def weyl_disk(problem: HalfLineProblem, lam: complex, x: float, config: MConfig = DEFAULT) -> WeylDisk:
    lam = complex(lam)
    if lam.imag == 0:
        raise DomainError("Weyl disks need Im lam != 0")
    st = _State(compile_problem(problem), lam, config)
    st.to_x(float(x))
    return st.disk()


def weyl_disks(problem: HalfLineProblem, lam: complex, xs, config: MConfig = DEFAULT) -> list[WeylDisk]:
    st = _State(compile_problem(problem), complex(lam), config)
    out = []
    for x in xs:
        st.to_x(float(x))
        out.append(st.disk())
    return out


# ---------------------------------------------------------------------------
# m-function


def closed_form_m(problem: HalfLineProblem, lam: complex) -> complex | None:
    """Catalogue entries whose m-function is known exactly."""
    lam = complex(lam)
    if problem.r.name == "atomic-a":
        a = problem.r.params[0]
        m = a - 1.0 / lam
        return m if problem.boundary == "neumann" else None
    if problem.w.name == "atomic-a":
        # dual of the atomic system: -1/(lam m) with m = a - 1/lam
        a = problem.w.params[0]
        return 1.0 / (1.0 - a * lam)
    return None


def m_eval(problem: HalfLineProblem, lam: complex, config: MConfig = DEFAULT) -> MFunctionSample:
    lam = complex(lam)
    if lam.imag == 0.0:
        if lam.real >= 0.0:
            raise DomainError("m is evaluated off the closed positive half-line")
        return _m_real_negative(problem, lam.real, config)
    cf = closed_form_m(problem, lam)
    if cf is not None:
        return MFunctionSample(lam, cf, 0.0, "closed-form")
    if problem.is_atomic:
        raise DomainError("atomic catalogue entry has no closed form for this boundary condition")
    cls = limit_point_classify(problem)
    cp = compile_problem(problem)
    if cls == "limit-point":
        return _m_limit_point(cp, lam, config)
    return _m_boundary(cp, lam, config, problem.boundary == "dirichlet", cls)


def _m_limit_point(cp: Compiled, lam: complex, cfg: MConfig) -> MFunctionSample:
    st = _State(cp, lam, cfg)
    history: list[WeylDisk] = []

    def done(d: WeylDisk) -> bool:
        return d.radius <= max(cfg.disk_atol, cfg.disk_rtol * abs(d.center))

    def stalled() -> bool:
        if len(history) < 12:
            return False
        return history[-1].radius > 0.99 * history[-12].radius

    if cp.singular_b:
        L = float(cp.seg_lo[-1])
        if L > 0:
            st.to_x(L)
        t = 0.0
        while True:
            t += math.log(2.0)
            if t > cfg.t_cap:
                raise TruncationStallError(f"disk radius {history[-1].radius:.3g} at the truncation cap")
            st.to_t(t)
            d = st.disk()
            history.append(d)
            if done(d):
                break
            if stalled():
                raise TruncationStallError("Weyl disk radius stopped shrinking (limit circle?)")
    else:
        X = cfg.x_start / max(1.0, math.sqrt(abs(lam)))
        while True:
            st.to_x(X)
            d = st.disk()
            history.append(d)
            if done(d):
                break
            # no stall test here: the end is limit point, and for small |lam|
            # the radius can sit on a long plateau before the solutions grow
            X *= 2.0
            if X > cfg.x_cap:
                raise TruncationStallError(f"disk radius {d.radius:.3g} at the truncation cap {cfg.x_cap:g}")
    return MFunctionSample(lam, d.center, d.radius, "disk-contraction", d.x, int(st.counters[0]))


def _quotient(st: _State, dirichlet: bool) -> complex:
    c, c1, s, s1, _ = st.y
    if dirichlet:
        return s / c
    return s1 / c1


def _m_boundary(cp: Compiled, lam: complex, cfg: MConfig, dirichlet: bool, cls: str) -> MFunctionSample:
    if not cp.singular_b and math.isfinite(cp.b):
        vals = []
        for tol in (cfg.ode_rtol, cfg.ode_rtol * 1e-2):
            st = _State(cp, lam, replace(cfg, ode_rtol=tol))
            st.to_x(cp.b)
            vals.append(_quotient(st, dirichlet))
        m = vals[1]
        enc = 10.0 * abs(vals[0] - vals[1]) + 1e-13 * abs(m)
        return MFunctionSample(lam, m, enc, "limit-circle-boundary" if cls != "regular" else "regular-boundary",
                               cp.b, int(st.counters[0]))
    # singular end with a finite limit of the quotient
    st = _State(cp, lam, cfg)
    prev, diffs = None, []
    t = 0.0
    X = cfg.x_start
    for _ in range(2000):
        if cp.singular_b:
            t += math.log(2.0)
            if t > cfg.t_cap:
                break
            st.to_t(t)
        else:
            st.to_x(X)
            X *= 2.0
            if X > cfg.x_cap:
                break
        val = _quotient(st, dirichlet)
        if prev is not None:
            diffs.append(abs(val - prev))
            if len(diffs) >= 3 and all(dd <= cfg.lc_rtol * abs(val) for dd in diffs[-3:]):
                return MFunctionSample(lam, val, 4.0 * max(diffs[-3:]) + 1e-13 * abs(val), "limit-circle-boundary",
                                       st.x, int(st.counters[0]))
        prev = val
    raise TruncationStallError("boundary quotient did not converge at the singular end")


def _m_real_negative(problem: HalfLineProblem, x: float, cfg: MConfig) -> MFunctionSample:
    eps = np.array(cfg.eps_shifts, dtype=float)
    samples = [m_eval(problem, complex(x, e), cfg) for e in eps]
    vals = np.array([s.m for s in samples])
    # quadratic extrapolation to eps = 0 (Lagrange weights at 0)
    wts = np.ones_like(eps)
    for i in range(eps.size):
        for j in range(eps.size):
            if i != j:
                wts[i] *= (0.0 - eps[j]) / (eps[i] - eps[j])
    m0 = complex(np.sum(wts * vals))
    enc = float(np.sum(np.abs(wts) * np.array([s.enclosure for s in samples])))
    enc += abs(m0 - vals[-1]) * 0.1
    return MFunctionSample(complex(x, 0.0), m0, enc, "richardson", samples[-1].x,
                           sum(s.steps for s in samples))


# ---------------------------------------------------------------------------
# identities and class checks


@dataclass(frozen=True)
class DualityResidual:
    lam: complex
    residual: float
    bound: float
    m: complex
    m_dual: complex

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound


def m_dual_identity(problem: HalfLineProblem, lam: complex, config: MConfig = DEFAULT) -> DualityResidual:
    """|m(lam) + 1/(lam * m_dual(lam))| with m_dual from the swapped system."""
    lam = complex(lam)
    a = m_eval(problem, lam, config)
    bt = m_eval(problem.swapped(), lam, config)
    res = abs(a.m + 1.0 / (lam * bt.m))
    mt = abs(bt.m)
    if bt.enclosure >= mt:
        prop = INF
    else:
        prop = bt.enclosure / (abs(lam) * mt * (mt - bt.enclosure))
    slack = 1e-12 * (abs(a.m) + 1.0 / (abs(lam) * mt))
    return DualityResidual(lam, res, a.enclosure + prop + slack, a.m, bt.m)


@dataclass(frozen=True)
class StieltjesReport:
    passed: bool
    samples: tuple
    violation: tuple | None = None
    reason: str = ""


def stieltjes_check(problem: HalfLineProblem, grid, config: MConfig = DEFAULT, imag_tol: float = 1e-6) -> StieltjesReport:
    """Necessary conditions for class (S) on the negative axis."""
    xs = np.sort(np.asarray(grid, dtype=float))
    if np.any(xs >= 0):
        raise DomainError("grid must lie in (-inf, 0)")
    samples = []
    for x in xs:
        s = m_eval(problem, complex(x, 0.0), config)
        samples.append((float(x), s.m, s.enclosure))
    for x, m, enc in samples:
        if abs(m.imag) > imag_tol * max(1.0, abs(m)) + enc:
            return StieltjesReport(False, tuple(samples), ((x, m),), "m not real on the negative axis")
        if m.real < -enc:
            return StieltjesReport(False, tuple(samples), ((x, m),), "m negative on the negative axis")
    for (x0, m0, e0), (x1, m1, e1) in zip(samples[:-1], samples[1:]):
        if m1.real < m0.real - e0 - e1:
            return StieltjesReport(False, tuple(samples), ((x0, m0), (x1, m1)), "m decreasing toward 0-")
    return StieltjesReport(True, tuple(samples))
