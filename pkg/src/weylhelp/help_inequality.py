"""Validity and best constant of the HELP integral inequality.

Routes: the Re/Im ratio of m along the imaginary axis, the sector sign test
of Im(lambda^2 m), the positively-increasing test on R o W^-1, and explicit
test-function lower bounds for K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    RATIO_DEFAULT,
    RatioConfig,
    RatioReport,
    bounded_endpoint_shortcut,
    ratio_criterion,
    r_over_w,
)
from .coefficients import INF, Distribution, distribution_growth, generalized_inverse
from .liouville import LiouvilleError, is_unit, transform
from .regvar import RegvarError, positively_increasing
from .weyl import DEFAULT as M_DEFAULT
from .weyl import HalfLineProblem, MConfig, WeylError, m_eval


class HelpError(ValueError):
    pass


@dataclass(frozen=True)
class HelpVerdict:
    validity: str  # valid | invalid | inconclusive
    sup_ratio: float | None = None
    theta0: float | None = None
    K: float | None = None
    K_lower: float | None = None
    trail: tuple = ()
    ratios: tuple = ()  # RatioReports
    coefficient: str | None = None
    disagreement: bool = False

    @property
    def K_interval(self) -> tuple[float | None, float | None]:
        return self.K_lower, self.K

    def to_dict(self) -> dict:
        return {
            "validity": self.validity,
            "sup_ratio": self.sup_ratio,
            "theta0": self.theta0,
            "K": self.K,
            "K_lower": self.K_lower,
            "coefficient_route": self.coefficient,
            "disagreement": self.disagreement,
            "trail": list(self.trail),
        }


def _combine(verdicts: list[str]) -> str:
    if any(v == "unbounded" for v in verdicts):
        return "invalid"
    if all(v == "bounded" for v in verdicts):
        return "valid"
    return "inconclusive"


# ---------------------------------------------------------------------------
# coefficient route


@dataclass(frozen=True)
class CoefficientVerdict:
    verdict: str  # valid | invalid | inconclusive
    case: str
    trail: tuple


def _pi(g, end: str) -> tuple[str, str]:
    try:
        v = positively_increasing(g, end)
    except RegvarError as exc:
        return "inconclusive", f"PI at {end}: {exc}"
    return v.verdict, f"PI(R o W^-1, {end})={v.verdict} [{v.source}; {v.note}]"


def help_coefficient_check(problem: HalfLineProblem) -> CoefficientVerdict:
    if not problem.q_zero:
        raise HelpError("coefficient route needs q = 0 (use help_with_potential)")
    w_int = distribution_growth(problem.w, "b").bounded
    r_int = distribution_growth(problem.r, "b").bounded
    g = r_over_w(problem)
    if w_int:
        v, note = _pi(g, "zero")
        verdict = {"yes": "valid", "no": "invalid"}.get(v, "inconclusive")
        return CoefficientVerdict(verdict, "w-integrable", ("w in L1(0,b): decided by PI at 0 alone", note))
    if r_int:
        return CoefficientVerdict("invalid", "r-integrable", ("r in L1(0,b), w not: never valid",))
    v0, n0 = _pi(g, "zero")
    vi, ni = _pi(g, "infinity")
    if v0 == "yes" and vi == "yes":
        verdict = "valid"
    elif "no" in (v0, vi):
        verdict = "invalid"
    else:
        verdict = "inconclusive"
    return CoefficientVerdict(verdict, "both-unbounded", ("w, r not in L1(0,b): PI needed at 0 and infinity", n0, ni))


# ---------------------------------------------------------------------------
# imaginary-axis route


def help_check(problem: HalfLineProblem, cfg: RatioConfig = RATIO_DEFAULT, config: MConfig = M_DEFAULT,
               resolve: bool = True) -> HelpVerdict:
    """sup over y > 0 of Re m(iy)/Im m(iy) from both windows, plus the coefficient route."""
    if not problem.q_zero:
        raise HelpError("help_check handles q = 0; use help_with_potential")
    if problem.boundary != "neumann":
        raise HelpError("the inequality uses the Neumann m-function")
    trail = []
    reports: list[RatioReport] = []
    for end in ("infinity", "zero"):
        rep = ratio_criterion(problem, end, "Re/Im", cfg, config)
        reports.append(rep)
        trail.append(f"Re/Im on {end} window {rep.window}: {rep.verdict} (sup {rep.sup:.4g}, slope {rep.slope:.3g})")
    short = bounded_endpoint_shortcut(problem)
    if short.case != "defer":
        trail.append(f"bounded endpoint {short.case}: {short.note}")
    m_route = _combine([r.verdict for r in reports])
    coeff = help_coefficient_check(problem)
    trail.append(f"coefficient route ({coeff.case}): {coeff.verdict}")
    trail.extend(coeff.trail)
    disagree = m_route != "inconclusive" and coeff.verdict != "inconclusive" and m_route != coeff.verdict
    validity = m_route
    if m_route == "inconclusive" and resolve and coeff.verdict != "inconclusive":
        validity = coeff.verdict
        trail.append("m route inconclusive on the finite windows; verdict taken from the coefficient route")
    if disagree:
        trail.append("DISAGREEMENT between m route and coefficient route")
    sup = max(r.sup for r in reports)
    return HelpVerdict(validity, sup, trail=tuple(trail), ratios=tuple(reports), coefficient=coeff.verdict,
                       disagreement=disagree)


# ---------------------------------------------------------------------------
# sector route


@dataclass(frozen=True)
class EverittResult:
    theta0: float
    K: float
    validity: str  # valid | invalid | inconclusive
    grid_limited: bool
    violation: tuple | None  # (theta, rho, arg, value) of the worst sample just below theta0
    samples: tuple  # rows (theta, rho, arg, im_lambda2_m)
    rho_range: tuple
    unresolved: int = 0  # samples where m could not be evaluated


def _sector_samples(problem: HalfLineProblem, theta: float, rhos: np.ndarray, config: MConfig):
    rows = []
    for arg in (theta, math.pi - theta):
        for rho in rhos:
            lam = rho * complex(math.cos(arg), math.sin(arg))
            try:
                s = m_eval(problem, lam, config)
            except WeylError:
                continue  # unresolved sample (disk did not contract); counted by the caller
            val = (lam * lam * s.m).imag
            tol = rho * rho * s.enclosure + 1e-12 * rho * rho * abs(s.m)
            rows.append((theta, float(rho), arg, val, tol, rho * rho * abs(s.m)))
    return rows


def everitt_scan(problem: HalfLineProblem, rho_lo: float = 1e-6, rho_hi: float = 1e6, per_decade: int = 8,
                 theta_tol: float = 0.01, config: MConfig = M_DEFAULT, edge_margin: float = 0.05) -> EverittResult:
    """Smallest theta with Im(lambda^2 m) <= 0 on both boundary rays of the sector."""
    n = int(round(math.log10(rho_hi / rho_lo) * per_decade)) + 1
    rhos = np.geomspace(rho_lo, rho_hi, n)
    all_rows = []

    def violations(theta):
        rows = _sector_samples(problem, theta, rhos, config)
        all_rows.extend(rows)
        return [r for r in rows if r[3] > r[4]], rows

    lo, hi = 0.0, math.pi / 2
    worst_rows = None
    expected = 2 * rhos.size
    unresolved = 0
    while hi - lo > theta_tol:
        mid = 0.5 * (lo + hi)
        bad, rows = violations(mid)
        unresolved += expected - len(rows)
        if bad:
            lo, worst_rows = mid, rows
        else:
            hi = mid
    theta0 = hi
    violation, grid_limited = None, False
    if worst_rows is not None:
        norm = [(r[3] / r[5] if r[5] > 0 else 0.0, r) for r in worst_rows]
        best = max(norm, key=lambda t: t[0])
        violation = best[1][:4]
        edge = [t[0] for t in norm if t[1][1] in (rhos[0], rhos[-1])]
        inner = [t[0] for t in norm if t[1][1] not in (rhos[0], rhos[-1])]
        grid_limited = bool(edge) and max(edge) > 0 and max(edge) > max(inner + [0.0]) * (1 + edge_margin)
    if grid_limited and theta0 >= math.pi / 2 - 0.2:
        validity, K = "invalid", INF
    elif grid_limited:
        validity, K = "inconclusive", 1.0 / math.cos(theta0)
    else:
        validity = "valid" if theta0 < math.pi / 2 - theta_tol else "invalid"
        K = 1.0 / math.cos(theta0) if validity == "valid" else INF
    samples = tuple((r[0], r[1], r[2], r[3]) for r in all_rows)
    return EverittResult(theta0, K, validity, grid_limited, violation, samples, (rho_lo, rho_hi), unresolved)


# ---------------------------------------------------------------------------
# test-function lower bounds


@dataclass(frozen=True)
class LowerBound:
    n: int
    a: float
    b: float
    A: float
    B: float
    K: float


def _K_from(A: float, B: float, a: float, b: float) -> float:
    denom = (B / A - 1.0) ** 2 + a / (b - a) * (A / B) ** 2
    return 1.0 / denom


def factorial_sequences(n_max: int = 8) -> tuple[list[float], list[float]]:
    return ([float(math.factorial(2 * n)) for n in range(1, n_max + 1)],
            [float(math.factorial(2 * n + 1)) for n in range(1, n_max + 1)])


def help_lower_bound(problem: HalfLineProblem, a_seq, b_seq) -> list[LowerBound]:
    """K_n = 1 / [(B_n/A_n - 1)^2 + a_n/(b_n - a_n) (A_n/B_n)^2] with A = R(a), B = R(b).

    For w other than 1 the points a_n, b_n are read in the variable W(x),
    so A_n = (R o W^-1)(a_n).
    """
    Dr = Distribution(problem.r)
    unit_w = is_unit(problem.w)
    Dw = None if unit_w else Distribution(problem.w)
    out = []
    for n, (a, b) in enumerate(zip(a_seq, b_seq), start=1):
        a, b = float(a), float(b)
        if not (0.0 < a < b):
            raise HelpError(f"need 0 < a_n < b_n (n={n})")
        if unit_w:
            if b >= problem.b:
                raise HelpError(f"b_n={b:g} outside (0, b)")
            A, B = Dr(a), Dr(b)
        else:
            if b >= Dw.total:
                raise HelpError(f"b_n={b:g} outside the range of W")
            A, B = Dr(Dw.inverse(a)), Dr(Dw.inverse(b))
        out.append(LowerBound(n, a, b, float(A), float(B), _K_from(float(A), float(B), a, b)))
    return out


# ---------------------------------------------------------------------------
# potentials


def help_with_potential(problem: HalfLineProblem, m_route: bool = False) -> HelpVerdict:
    """q >= 0, r = 1: route through the zero-energy transform."""
    if problem.q_zero:
        return help_check(problem)
    if not problem.q.nonnegative():
        raise HelpError("only q >= 0 is supported for the inequality with a potential")
    try:
        tr = transform(problem)
    except LiouvilleError as exc:
        raise HelpError(str(exc)) from exc
    trail = [f"c(x,0) tail: {tr.evidence.get('c0_tail')} (exponent {tr.evidence.get('c0_exponent'):.4g})",
             f"c0 in L2_w: {tr.c0_in_L2w}; 1/c0 in L2: {tr.inv_c0_in_L2}; B = {tr.B:.6g}"]
    if tr.c0_in_L2w:
        case = "i: c0 in L2_w, decided by PI(W^-1, 0)"
    elif tr.inv_c0_in_L2:
        case = "ii: 1/c0 in L2 and c0 not in L2_w: not valid"
    else:
        case = "iii: decided by PI(W~^-1, infinity) on the transformed string"
    trail.append(f"case {case}")
    coeff = help_coefficient_check(tr.problem)
    trail.extend(coeff.trail)
    verdict = coeff.verdict
    if m_route:
        mv = help_check(tr.problem, resolve=False)
        trail.append(f"m route on the transformed problem: {mv.validity}")
        if mv.validity != "inconclusive" and verdict != "inconclusive" and mv.validity != verdict:
            trail.append("DISAGREEMENT between m route and coefficient route")
            return HelpVerdict(verdict, mv.sup_ratio, trail=tuple(trail), ratios=mv.ratios,
                               coefficient=coeff.verdict, disagreement=True)
        return HelpVerdict(verdict, mv.sup_ratio, trail=tuple(trail), ratios=mv.ratios, coefficient=coeff.verdict)
    return HelpVerdict(verdict, trail=tuple(trail), coefficient=coeff.verdict)
