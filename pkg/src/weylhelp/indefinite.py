"""Similarity of (sgn x)-weighted operators with even coefficients.

An even problem on (-b, b) is described by its restriction to (0, b), a
HalfLineProblem with the Neumann condition at 0.  Criteria: the Im/Re ratio of
m on the imaginary axis (one window per critical point), positively increasing
W o R^-1 on the coefficient side, the zero-energy transform when q != 0, the
zero set of D(z) = c m(z) + m(-z) off the real axis, and Fokker-Planck
well-posedness verdicts built on top of similarity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .asymptotics import RATIO_DEFAULT, RatioConfig, RatioReport, ratio_criterion, w_over_r
from .coefficients import distribution_growth
from .help_inequality import help_check
from .liouville import LiouvilleError, SignChangeError, is_unit, l_from_tail, transform
from .regvar import RegvarError, positively_increasing
from .weyl import DEFAULT as M_DEFAULT
from .weyl import HalfLineProblem, MConfig, WeylError, m_eval, stieltjes_check

STIELTJES_GRID = tuple(-np.logspace(-2.0, 2.0, 9))


class SimilarityError(ValueError):
    pass


class NonEvenError(SimilarityError):
    pass


class HypothesisError(SimilarityError):
    """L is not a nonnegative self-adjoint operator (class (S) test failed)."""


@dataclass(frozen=True)
class IndefiniteProblem:
    half: HalfLineProblem
    even: bool = True
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.half.boundary != "neumann":
            raise SimilarityError("the even restriction carries the Neumann condition at 0")

    def require_even(self) -> None:
        if not self.even:
            raise NonEvenError("similarity criteria here need even coefficients")

    @property
    def name(self) -> str:
        return self.half.name


def _as_indefinite(p) -> IndefiniteProblem:
    return p if isinstance(p, IndefiniteProblem) else IndefiniteProblem(p)


@dataclass(frozen=True)
class SimilarityVerdict:
    similar: str  # yes | no | inconclusive
    regular_at_inf: str  # regular | singular | inconclusive
    C_inf: float | None
    regular_at_0: str
    C_0: float | None
    kernel_note: str
    hypothesis: str  # surrogate-verified | failed | skipped
    trail: tuple = ()
    ratios: tuple = ()
    coefficient: str | None = None
    disagreement: bool = False

    def to_dict(self) -> dict:
        return {
            "similar": self.similar,
            "regular_at_inf": self.regular_at_inf,
            "C_inf": self.C_inf,
            "regular_at_0": self.regular_at_0,
            "C_0": self.C_0,
            "kernel": self.kernel_note,
            "hypothesis": self.hypothesis,
            "coefficient_route": self.coefficient,
            "disagreement": self.disagreement,
            "trail": list(self.trail),
        }


def _regularity(verdict: str) -> str:
    return {"bounded": "regular", "unbounded": "singular"}.get(verdict, "inconclusive")


def _overall(r_inf: str, r_0: str) -> str:
    if "singular" in (r_inf, r_0):
        return "no"
    if r_inf == "regular" and r_0 == "regular":
        return "yes"
    return "inconclusive"


def kernel_evidence(problem: HalfLineProblem) -> tuple[bool, str]:
    """Sufficient evidence that 0 is not an eigenvalue."""
    if problem.q_zero:
        w_int = distribution_growth(problem.w, "b").bounded
        r_int = distribution_growth(problem.r, "b").bounded
        if not w_int and not r_int:
            return True, "w, r not integrable at b: 0 is not an eigenvalue"
        return False, f"w integrable: {w_int}, r integrable: {r_int}; 0 may be an eigenvalue"
    try:
        tr = transform(problem)
    except LiouvilleError as exc:
        return False, f"c(x,0) unavailable: {exc}"
    if tr.c0_in_L2w:
        return False, "c(x,0) in L2_w: 0 is an eigenvalue"
    return True, "c(x,0) not in L2_w: 0 is not an eigenvalue"


def hypothesis_surrogate(problem: HalfLineProblem, grid=STIELTJES_GRID, config: MConfig = M_DEFAULT) -> tuple[str, str]:
    if problem.q_zero:
        return "surrogate-verified", "q = 0: L is nonnegative by construction"
    try:
        rep = stieltjes_check(problem, grid, config)
    except WeylError as exc:
        return "failed", f"m not evaluable on the negative axis: {exc}"
    if rep.passed:
        return "surrogate-verified", f"m real, positive, increasing on {len(rep.samples)} negative points"
    return "failed", f"class (S) test failed: {rep.reason} at {rep.violation}"


# ---------------------------------------------------------------------------
# coefficient route


@dataclass(frozen=True)
class SimilarityCoefficientVerdict:
    similar: str
    case: str
    regular_at_inf: str
    regular_at_0: str
    trail: tuple


def _pi(g, end: str, label: str) -> tuple[str, str]:
    try:
        v = positively_increasing(g, end)
    except RegvarError as exc:
        return "inconclusive", f"PI({label}, {end}): {exc}"
    return v.verdict, f"PI({label}, {end})={v.verdict} [{v.source}; {v.note}]"


def similarity_coefficient_check(problem) -> SimilarityCoefficientVerdict:
    """Similarity from W o R^-1 alone (q = 0)."""
    ip = _as_indefinite(problem)
    ip.require_even()
    p = ip.half
    if not p.q_zero:
        raise SimilarityError("coefficient route needs q = 0 (use similarity_with_potential)")
    w_int = distribution_growth(p.w, "b").bounded
    r_int = distribution_growth(p.r, "b").bounded
    g = w_over_r(p)
    reg = {"yes": "regular", "no": "singular"}
    if r_int:
        v, note = _pi(g, "zero", "W o R^-1")
        sim = {"yes": "yes", "no": "no"}.get(v, "inconclusive")
        return SimilarityCoefficientVerdict(sim, "r-integrable", "regular", reg.get(v, "inconclusive"),
                                            ("r in L1(0,b): decided by PI of W o R^-1 at 0", note))
    if w_int:
        return SimilarityCoefficientVerdict("no", "w-integrable", "inconclusive", "singular",
                                            ("w in L1(0,b), r not: never similar",))
    v0, n0 = _pi(g, "zero", "W o R^-1")
    vi, ni = _pi(g, "infinity", "W o R^-1")
    # critical point 0 is governed by x -> infinity, critical point infinity by x -> 0
    r0, rinf = reg.get(vi, "inconclusive"), reg.get(v0, "inconclusive")
    return SimilarityCoefficientVerdict(_overall(rinf, r0), "both-unbounded", rinf, r0,
                                        ("w, r not in L1(0,b): PI of W o R^-1 needed at 0 and infinity", n0, ni))


# ---------------------------------------------------------------------------
# imaginary-axis route


def similarity_check(problem, cfg: RatioConfig = RATIO_DEFAULT, config: MConfig = M_DEFAULT,
                     resolve: bool = True, surrogate_grid=STIELTJES_GRID) -> SimilarityVerdict:
    """sup of Im m(iy)/Re m(iy) on (1, inf) and (0, 1), one window per critical point."""
    ip = _as_indefinite(problem)
    ip.require_even()
    p = ip.half
    hyp, hyp_note = hypothesis_surrogate(p, surrogate_grid, config)
    if hyp == "failed":
        raise HypothesisError(hyp_note)
    trail = [f"nonnegativity of L: {hyp} ({hyp_note})"]
    reports: dict[str, RatioReport] = {}
    for end in ("infinity", "zero"):
        rep = ratio_criterion(p, end, "Im/Re", cfg, config)
        reports[end] = rep
        trail.append(f"Im/Re on {end} window {rep.window}: {rep.verdict} (sup {rep.sup:.4g}, slope {rep.slope:.3g})")
        if rep.prediction is not None:
            trail.append(f"  coefficient prediction: {rep.prediction} [{rep.prediction_source}]")
    r_inf = _regularity(reports["infinity"].verdict)
    r_0 = _regularity(reports["zero"].verdict)
    kernel_ok, kernel_note = kernel_evidence(p)
    trail.append(f"kernel: {kernel_note}")
    if r_0 == "regular" and not kernel_ok:
        r_0 = "inconclusive"
        trail.append("regularity of 0 presumes a trivial root subspace at 0; no evidence, downgraded")
    m_sim = _overall(r_inf, r_0)

    coeff_sim, disagree = None, False
    coeff_rinf = coeff_r0 = "inconclusive"
    try:
        if p.q_zero:
            cv = similarity_coefficient_check(ip)
            coeff_sim, coeff_rinf, coeff_r0 = cv.similar, cv.regular_at_inf, cv.regular_at_0
            trail.append(f"coefficient route ({cv.case}): {cv.similar}")
            trail.extend(cv.trail)
        elif is_unit(p.r):
            pv = similarity_with_potential(ip)
            coeff_sim = pv.similar
            trail.append(f"potential route: {pv.similar}")
            trail.extend(pv.trail)
    except (SimilarityError, LiouvilleError) as exc:
        trail.append(f"coefficient route unavailable: {exc}")
    if coeff_sim is not None:
        disagree = m_sim != "inconclusive" and coeff_sim != "inconclusive" and m_sim != coeff_sim
    similar = m_sim
    if resolve and coeff_sim not in (None, "inconclusive"):
        if r_inf == "inconclusive" and coeff_rinf != "inconclusive":
            r_inf = coeff_rinf
            trail.append(f"critical point infinity taken from the coefficient route: {r_inf}")
        if r_0 == "inconclusive" and coeff_r0 != "inconclusive":
            r_0 = coeff_r0
            trail.append(f"critical point 0 taken from the coefficient route: {r_0}")
        if m_sim == "inconclusive":
            similar = coeff_sim
            trail.append("m route inconclusive on the finite windows; verdict taken from the coefficient route")
    if disagree:
        trail.append("DISAGREEMENT between m route and coefficient route")
    return SimilarityVerdict(similar, r_inf, reports["infinity"].sup, r_0, reports["zero"].sup, kernel_note, hyp,
                             tuple(trail), (reports["infinity"], reports["zero"]), coeff_sim, disagree)


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class PotentialVerdict:
    similar: str
    case: str
    l: float | None
    l_verdict: str | None
    c0_in_L2w: bool
    inv_c0_in_L2: bool
    trail: tuple
    disagreement: bool = False

    def to_dict(self) -> dict:
        return {"similar": self.similar, "case": self.case, "l": self.l, "l_verdict": self.l_verdict,
                "c0_in_L2w": self.c0_in_L2w, "inv_c0_in_L2": self.inv_c0_in_L2,
                "disagreement": self.disagreement, "trail": list(self.trail)}


def _l_classification(l: float, tr) -> tuple[str, str]:
    coef, expo = tr.c0.tail.leading if tr.c0.tail is not None else (0.0, tr.c0.exponent)
    if -0.5 <= l < 0.5:
        return "yes", f"l = {l:g} in [-1/2, 1/2): similar"
    if l == 0.5:
        unbounded = expo > 0 or (expo == 0 and tr.c0.tail is not None and tr.c0.tail.kind == "fitted")
        return ("yes" if unbounded else "no"), f"l = 1/2: similar iff c(x,0) unbounded (tail exponent {expo:g})"
    in_l2 = tr.c0_in_L2w
    return ("no" if in_l2 else "yes"), f"l = {l:g} > 1/2: similar iff c(x,0) not in L2 (in L2: {in_l2})"


def similarity_with_potential(problem) -> PotentialVerdict:
    """r = 1, q != 0: decide on the zero-energy transformed string."""
    ip = _as_indefinite(problem)
    ip.require_even()
    p = ip.half
    if p.q_zero:
        cv = similarity_coefficient_check(ip)
        return PotentialVerdict(cv.similar, cv.case, None, None, False, False, cv.trail)
    try:
        tr = transform(p)
    except SignChangeError as exc:
        raise HypothesisError(f"c(x,0) vanishes, L is not nonnegative: {exc}") from exc
    trail = [f"c(x,0) tail: {tr.evidence.get('c0_tail')} (exponent {tr.evidence.get('c0_exponent'):.4g})",
             f"c0 in L2_w: {tr.c0_in_L2w}; 1/c0 in L2: {tr.inv_c0_in_L2}; xi(b) = {tr.B:.6g}"]
    if tr.inv_c0_in_L2:
        case = "1/c0 in L2: decided by PI(W, 0)"
    elif tr.c0_in_L2w:
        case = "c0 in L2_w: not similar"
    else:
        case = "neither: PI of the transformed W at 0 and infinity"
    trail.append(f"case: {case}")
    cv = similarity_coefficient_check(IndefiniteProblem(tr.problem))
    trail.extend(cv.trail)
    similar = cv.similar
    l, lv, disagree = None, None, False
    if is_unit(p.w) and math.isinf(p.b):
        l = l_from_tail(p.q)
        if l is not None and l >= -0.5:
            lv, note = _l_classification(l, tr)
            trail.append(f"inverse-square tail: {note}")
            if similar == "inconclusive":
                similar = lv
                trail.append("verdict taken from the inverse-square classification")
            elif lv != similar:
                disagree = True
                trail.append("DISAGREEMENT between the transformed string and the inverse-square classification")
    return PotentialVerdict(similar, cv.case, l, lv, tr.c0_in_L2w, tr.inv_c0_in_L2, tuple(trail), disagree)


# ---------------------------------------------------------------------------
# nonreal spectrum


@dataclass(frozen=True)
class SpectrumProbeReport:
    c: float
    re_grid: np.ndarray
    im_grid: np.ndarray
    values: np.ndarray  # D on the grid, shape (len(im_grid), len(re_grid))
    candidates: tuple  # starting points
    zeros: tuple  # (z, |D(z)|) after refinement
    tol: float
    failures: int = 0

    def rows(self):
        for i, y in enumerate(self.im_grid):
            for j, x in enumerate(self.re_grid):
                d = self.values[i, j]
                yield float(x), float(y), float(d.real), float(d.imag)


def _D(problem: HalfLineProblem, c: float, z: complex, config: MConfig) -> complex:
    a = m_eval(problem, z, config).m
    b = m_eval(problem, -z, config).m
    return c * a + b


def _winding_cells(vals: np.ndarray) -> list[tuple[int, int]]:
    out = []
    ph = np.angle(vals)
    for i in range(vals.shape[0] - 1):
        for j in range(vals.shape[1] - 1):
            loop = [ph[i, j], ph[i, j + 1], ph[i + 1, j + 1], ph[i + 1, j], ph[i, j]]
            d = np.diff(loop)
            d = (d + np.pi) % (2 * np.pi) - np.pi
            if abs(d.sum()) > np.pi:
                out.append((i, j))
    return out


def _local_minima(mag: np.ndarray) -> list[tuple[int, int]]:
    out = []
    n, m = mag.shape
    for i in range(n):
        for j in range(m):
            nb = mag[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
            if mag[i, j] <= nb.min() and mag[i, j] < 0.25 * np.median(mag):
                out.append((i, j))
    return out


def nonreal_spectrum_probe(problem, c: float | None = None, re_range=(-5.0, 5.0), im_range=(0.1, 5.0),
                           n: int = 20, tol: float = 1e-8, config: MConfig = M_DEFAULT) -> SpectrumProbeReport:
    """Zeros of D(z) = c m(z) + m(-z) in the upper half-plane (m_- = m_+ by evenness)."""
    ip = _as_indefinite(problem)
    p = ip.half
    c = ip.c if c is None else float(c)
    xs = np.linspace(re_range[0], re_range[1], n)
    ys = np.linspace(im_range[0], im_range[1], n)
    vals = np.empty((n, n), dtype=complex)
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            vals[i, j] = _D(p, c, complex(x, y), config)
    starts = set()
    for i, j in _local_minima(np.abs(vals)):
        starts.add(complex(xs[j], ys[i]))
    for i, j in _winding_cells(vals):
        starts.add(complex(0.5 * (xs[j] + xs[j + 1]), 0.5 * (ys[i] + ys[i + 1])))
    scale = float(np.median(np.abs(vals)))
    zeros, failures = [], 0

    def fun(v):
        z = complex(v[0], v[1])
        if z.imag <= 0:
            return [1e3, 1e3]
        d = _D(p, c, z, config) / scale
        return [d.real, d.imag]

    for z0 in sorted(starts, key=lambda z: (z.real, z.imag)):
        try:
            sol = optimize.root(fun, [z0.real, z0.imag], method="hybr", options={"xtol": 1e-12})
        except WeylError:
            failures += 1
            continue
        z = complex(sol.x[0], sol.x[1])
        if z.imag <= 0.5 * im_range[0] or not (re_range[0] - 1 <= z.real <= re_range[1] + 1):
            continue
        dz = abs(_D(p, c, z, config))
        if dz <= tol * max(scale, 1.0) and not any(abs(z - q) < 1e-6 for q, _ in zeros):
            zeros.append((z, dz))
    return SpectrumProbeReport(c, xs, ys, vals, tuple(sorted(starts, key=lambda z: (z.real, z.imag))),
                               tuple(zeros), tol, failures)


# ---------------------------------------------------------------------------
# equivalences


@dataclass(frozen=True)
class LRGReport:
    similarity: str
    ratio: str  # bounded | unbounded | inconclusive over (0, inf)
    sup_ratio: float
    help_swapped: str | None
    agree: bool
    trail: tuple

    def to_dict(self) -> dict:
        return {"similarity": self.similarity, "ratio_0_inf": self.ratio, "sup_ratio": self.sup_ratio,
                "help_swapped": self.help_swapped, "agree": self.agree, "trail": list(self.trail)}


_POS = {"yes": "positive", "no": "negative", "bounded": "positive", "unbounded": "negative",
        "valid": "positive", "invalid": "negative"}


def lrg_equivalence_report(problem, cfg: RatioConfig = RATIO_DEFAULT, config: MConfig = M_DEFAULT) -> LRGReport:
    """Similarity, the Im/Re bound over all y > 0, and (q = 0) the inequality with w and r exchanged."""
    ip = _as_indefinite(problem)
    ip.require_even()
    sv = similarity_check(ip, cfg, config)
    trail = list(sv.trail)
    # the ratio over (0, inf) is bounded iff it is bounded on both windows
    ratio = {"yes": "bounded", "no": "unbounded"}.get(sv.similar, "inconclusive")
    sup = max(r.sup for r in sv.ratios)
    trail.append(f"Im/Re over (0, inf): {ratio} (sup {sup:.4g})")
    hs = None
    if ip.half.q_zero:
        p = ip.half
        swapped = HalfLineProblem(p.r, p.w, None, "neumann", p.endpoint, f"exchanged({p.name})")
        hv = help_check(swapped, cfg, config)
        hs = hv.validity
        trail.append(f"inequality with w and r exchanged: {hs} (sup Re/Im {hv.sup_ratio:.4g})")
    chain = [_POS.get(v, "inconclusive") for v in (sv.similar, ratio, hs) if v is not None]
    agree = len(set(chain)) == 1
    if not agree:
        trail.append(f"INCONSISTENT chain {chain}")
    return LRGReport(sv.similar, ratio, sup, hs, agree, tuple(trail))


# ---------------------------------------------------------------------------
# Fokker-Planck


@dataclass(frozen=True)
class FPVerdict:
    well_posed: str  # yes | undetermined
    route: str
    sigma_p_note: str
    trail: tuple = ()

    def to_dict(self) -> dict:
        return {"well_posed": self.well_posed, "route": self.route, "sigma_p": self.sigma_p_note,
                "trail": list(self.trail)}


def _is_identity_weight(w) -> bool:
    return all(pc.kind == "powlog" and pc.c == 1.0 and pc.a == 1.0 and pc.p == 0.0 and pc.shift == 0.0
               for pc in w.pieces)


def fp_wellposedness(problem, cfg: RatioConfig = RATIO_DEFAULT, config: MConfig = M_DEFAULT) -> FPVerdict:
    """Sufficient conditions only: 'undetermined' never means ill-posed."""
    ip = _as_indefinite(problem)
    ip.require_even()
    p = ip.half
    kernel_ok, knote = kernel_evidence(p)
    trail = [f"kernel: {knote}"]
    if not kernel_ok:
        return FPVerdict("undetermined", "no evidence that 0 is not an eigenvalue", knote, tuple(trail))
    if not p.q_zero and _is_identity_weight(p.w) and is_unit(p.r) and math.isinf(p.b):
        l = l_from_tail(p.q)
        if l is not None and l >= -0.5:
            if l < 1.0:
                trail.append(f"w = x, inverse-square tail with l = {l:g} in [-1/2, 1)")
                return FPVerdict("yes", "w = x, l in [-1/2, 1)", knote, tuple(trail))
            tr = transform(p)
            _, expo = tr.c0.tail.leading if tr.c0.tail is not None else (0.0, tr.c0.exponent)
            in_l2 = expo < -0.5
            trail.append(f"w = x, l = {l:g} >= 1; c(x,0) ~ x^{expo:g}, in L2: {in_l2}")
            if not in_l2:
                return FPVerdict("yes", "w = x, l >= 1 with c(x,0) not in L2", knote, tuple(trail))
    if p.q_zero:
        sim = similarity_coefficient_check(ip)
        trail.append(f"coefficient route ({sim.case}): {sim.similar}")
        trail.extend(sim.trail)
        verdict = sim.similar
        route = "q = 0: similarity from PI of W o R^-1"
        if verdict == "inconclusive":
            sv = similarity_check(ip, cfg, config)
            verdict = sv.similar
            trail.append(f"m route: {verdict}")
            route = "q = 0: similarity from the Im/Re ratio"
    else:
        pv = similarity_with_potential(ip)
        trail.extend(pv.trail)
        verdict = pv.similar
        route = f"potential: {pv.case}"
    if verdict == "yes":
        return FPVerdict("yes", route, knote, tuple(trail))
    trail.append(f"similarity {verdict}: the criterion is sufficient only")
    return FPVerdict("undetermined", route, knote, tuple(trail))
