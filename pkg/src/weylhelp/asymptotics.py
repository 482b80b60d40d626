"""Endpoint asymptotics of m along rays and the Re/Im ratio criteria.

Two spectral ends are distinguished: ``infinity`` (|lambda| -> inf, governed by
the coefficients near x = 0) and ``zero`` (|lambda| -> 0, governed by the
coefficients near b).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import (
    INF,
    Distribution,
    MonotoneMap,
    Variation,
    compose_distributions,
    distribution_growth,
    generalized_inverse,
)
from .regvar import RegvarConfig, RegvarError, classify_variation, positively_increasing
from .weyl import DEFAULT as M_DEFAULT
from .weyl import HalfLineProblem, MConfig, m_eval

SPECTRAL_ENDS = ("infinity", "zero")
RAYS = (1j, cmath.exp(0.75j * math.pi))


class AsymptoticsError(ValueError):
    pass


class InconclusiveClassificationError(AsymptoticsError):
    pass


def x_end(spectral_end: str) -> str:
    """Coefficient end that controls the given spectral end."""
    if spectral_end not in SPECTRAL_ENDS:
        raise ValueError(f"end must be one of {SPECTRAL_ENDS}")
    return "zero" if spectral_end == "infinity" else "infinity"


def k_nu(nu: float) -> float:
    """nu^(1-nu) Gamma(nu) / ((1-nu)^nu Gamma(1-nu)); equal to 1 at nu in {0, 1}."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    if nu in (0.0, 1.0):
        return 1.0
    return nu ** (1.0 - nu) * math.gamma(nu) / ((1.0 - nu) ** nu * math.gamma(1.0 - nu))


def nu_from_index(alpha: float) -> float:
    if alpha == INF:
        return 1.0
    if alpha < 0:
        raise ValueError("index must be nonnegative")
    return alpha / (1.0 + alpha)


# ---------------------------------------------------------------------------
# model


def r_over_w(problem: HalfLineProblem) -> MonotoneMap:
    """R o W^{-1}."""
    return compose_distributions(Distribution(problem.r), Distribution(problem.w))


def w_over_r(problem: HalfLineProblem) -> MonotoneMap:
    """W o R^{-1}."""
    return compose_distributions(Distribution(problem.w), Distribution(problem.r))


@dataclass(frozen=True)
class AsymptoteModel:
    end: str
    nu: float | None
    K: float | None
    alpha: float | None
    validity: str  # exact-family | fitted | degenerate | unavailable
    reason: str = ""
    h: MonotoneMap | None = field(default=None, repr=False, compare=False)  # x -> x (W o R^{-1})(x)

    def F(self, x: float) -> float:
        return 1.0 / float(self.h(x))

    def f(self, rho: float) -> float:
        """Generalized inverse of the decreasing F: the x with x (W o R^{-1})(x) = 1/rho."""
        if self.h is None:
            raise AsymptoticsError(f"model unavailable: {self.reason}")
        return generalized_inverse(self.h, 1.0 / rho)

    def predict(self, lam: complex) -> complex:
        lam = complex(lam)
        rho = abs(lam)
        mu = lam / rho
        return self.K * (-mu) ** (-self.nu) * self.f(rho)


def kasahara_model(problem: HalfLineProblem, end: str, config: RegvarConfig | None = None) -> AsymptoteModel:
    xe = x_end(end)
    if not problem.q_zero:
        return AsymptoteModel(end, None, None, None, "unavailable", "potential must vanish (use the Liouville transform)")
    if end == "zero":
        gw, gr = distribution_growth(problem.w, "b"), distribution_growth(problem.r, "b")
        if gw.bounded or gr.bounded:
            return AsymptoteModel(end, None, None, None, "unavailable",
                                  "W or R bounded at b: behaviour fixed by the bounded-endpoint shortcut")
    g = r_over_w(problem)
    verdict = classify_variation(g, xe, config) if config else classify_variation(g, xe)
    wr = w_over_r(problem)
    h = MonotoneMap(lambda x: np.asarray(x, dtype=float) * wr.values(x), 0.0, wr.hi, {}, "x*(W o R^-1)(x)")
    if verdict.kind == "regular" and verdict.index is not None and verdict.index > 0:
        alpha = float(verdict.index)
        nu = nu_from_index(alpha)
        validity = "exact-family" if verdict.source == "symbolic" else "fitted"
        return AsymptoteModel(end, nu, k_nu(nu), alpha, validity, "", h)
    if verdict.kind in ("slow", "rapid"):
        alpha = 0.0 if verdict.kind == "slow" else INF
        nu = nu_from_index(alpha)
        return AsymptoteModel(end, nu, 1.0, alpha, "degenerate", f"R o W^-1 varies {verdict.kind}ly", h)
    return AsymptoteModel(end, None, None, None, "unavailable", f"R o W^-1 classification: {verdict.kind}")


@dataclass(frozen=True)
class AsymptoteReport:
    model: AsymptoteModel
    rows: tuple  # (rho, mu, m, predicted, deviation, rel_enclosure)
    per_decade: tuple  # (decade lower edge log10, max deviation)
    max_deviation: float

    @property
    def within_enclosure(self) -> bool:
        return all(dev <= enc for *_, dev, enc in self.rows)


def verify_asymptote(problem: HalfLineProblem, model: AsymptoteModel, rhos, mus=RAYS,
                     config: MConfig = M_DEFAULT) -> AsymptoteReport:
    if model.validity == "unavailable":
        raise InconclusiveClassificationError(model.reason)
    rows = []
    for rho in np.asarray(rhos, dtype=float):
        fr = model.f(float(rho))
        for mu in mus:
            s = m_eval(problem, complex(mu) * rho, config)
            pred = model.K * (-complex(mu)) ** (-model.nu) * fr
            dev = abs(s.m / pred - 1.0)
            rel_enc = s.enclosure / abs(pred) + 1e-9
            rows.append((float(rho), complex(mu), s.m, pred, dev, rel_enc))
    decades: dict[int, float] = {}
    for rho, _, _, _, dev, _ in rows:
        k = math.floor(math.log10(rho) + 1e-12)
        decades[k] = max(decades.get(k, 0.0), dev)
    per = tuple(sorted(decades.items()))
    return AsymptoteReport(model, tuple(rows), per, max(d for *_, d, _ in rows))


# ---------------------------------------------------------------------------
# ratio criteria


@dataclass(frozen=True)
class RatioConfig:
    per_decade: int = 8
    decades: float = 6.0
    trend_decades: float = 2.0
    unbounded_slope: float = 0.05
    unbounded_factor: float = 10.0
    bounded_slope: float = 0.005
    bounded_factor: float = 3.0
    monotone_rule: bool = True  # steady increase over the trend window also counts as unbounded


RATIO_DEFAULT = RatioConfig()


@dataclass(frozen=True)
class RatioReport:
    end: str
    which: str
    window: tuple
    samples: tuple  # (y, Re m, Im m, ratio, enclosure)
    sup: float
    median: float
    slope: float
    monotone: bool
    verdict: str  # bounded | unbounded | inconclusive
    prediction: str | None = None
    prediction_source: str = ""
    disagreement: bool = False
    note: str = ""

    def ratio_at(self, y: float) -> float:
        ys = np.array([s[0] for s in self.samples])
        i = int(np.argmin(np.abs(np.log(ys / y))))
        return self.samples[i][3]


def ratio_window(end: str, cfg: RatioConfig = RATIO_DEFAULT) -> np.ndarray:
    n = int(round(cfg.decades * cfg.per_decade))
    if end == "infinity":
        return np.logspace(0.0, cfg.decades, n + 1)[1:]
    if end == "zero":
        return np.logspace(-cfg.decades, 0.0, n + 1)[:-1]
    raise ValueError(f"end must be one of {SPECTRAL_ENDS}")


def sample_ratio(problem: HalfLineProblem, ys, which: str, config: MConfig = M_DEFAULT) -> list[tuple]:
    if which not in ("Re/Im", "Im/Re"):
        raise ValueError("which must be 'Re/Im' or 'Im/Re'")
    out = []
    for y in ys:
        s = m_eval(problem, complex(0.0, float(y)), config)
        re, im = s.m.real, s.m.imag
        ratio = re / im if which == "Re/Im" else (im / re if re != 0 else INF)
        out.append((float(y), re, im, ratio, s.enclosure))
    return out


def judge_ratio(ys: np.ndarray, ratios: np.ndarray, end: str, cfg: RatioConfig = RATIO_DEFAULT):
    """(verdict, sup, median, slope, monotone) for ratio samples ordered by y."""
    ys = np.asarray(ys, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    dist = np.log10(ys) if end == "infinity" else -np.log10(ys)  # grows toward the end
    order = np.argsort(dist)
    dist, r = dist[order], ratios[order]
    sup = float(np.max(r))
    med = float(np.median(r))
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        return "inconclusive", sup, med, math.nan, False
    outer = dist >= dist[-1] - cfg.trend_decades
    lr = np.log10(r[outer])
    slope = float(np.polyfit(dist[outer], lr, 1)[0]) if outer.sum() >= 3 else math.nan
    monotone = bool(np.all(np.diff(r[outer]) > 0))
    big = sup > cfg.unbounded_factor * med
    if slope >= cfg.unbounded_slope and (big or (cfg.monotone_rule and monotone)):
        return "unbounded", sup, med, slope, monotone
    # a ratio that decays toward the end has its sup away from the end
    decaying = bool(np.any(~outer)) and r[outer].max() <= r[~outer].max()
    if slope <= cfg.bounded_slope and (sup / med < cfg.bounded_factor or decaying):
        return "bounded", sup, med, slope, monotone
    return "inconclusive", sup, med, slope, monotone


def coefficient_prediction(problem: HalfLineProblem, end: str, which: str,
                           config: RegvarConfig | None = None) -> tuple[str, str]:
    """Ratio verdict implied by the coefficients alone."""
    short = bounded_endpoint_shortcut(problem) if end == "zero" else None
    if short is not None and short.case != "defer":
        limit = short.re_im_limit if which == "Re/Im" else {"0": "inf", "inf": "0"}[short.re_im_limit]
        return ("bounded" if limit == "0" else "unbounded"), f"bounded-endpoint {short.case}"
    g = r_over_w(problem) if which == "Re/Im" else w_over_r(problem)
    label = "R o W^-1" if which == "Re/Im" else "W o R^-1"
    xe = x_end(end)
    try:
        pi = positively_increasing(g, xe, config) if config else positively_increasing(g, xe)
    except RegvarError as exc:
        return "inconclusive", f"{label}: {exc}"
    verdict = {"yes": "bounded", "no": "unbounded"}.get(pi.verdict, "inconclusive")
    return verdict, f"PI({label}, {xe})={pi.verdict} [{pi.source}]"


def ratio_criterion(problem: HalfLineProblem, end: str, which: str = "Re/Im",
                    cfg: RatioConfig = RATIO_DEFAULT, config: MConfig = M_DEFAULT,
                    predict: bool = True) -> RatioReport:
    ys = ratio_window(end, cfg)
    samples = sample_ratio(problem, ys, which, config)
    ratios = np.array([s[3] for s in samples])
    verdict, sup, med, slope, mono = judge_ratio(ys, ratios, end, cfg)
    pred, src, disagree = None, "", False
    if predict and problem.q_zero:
        pred, src = coefficient_prediction(problem, end, which)
        disagree = pred != "inconclusive" and verdict != "inconclusive" and pred != verdict
    return RatioReport(end, which, (float(ys[0]), float(ys[-1])), tuple(samples), sup, med, slope, mono, verdict,
                       pred, src, disagree)


@dataclass(frozen=True)
class ShortcutVerdict:
    case: str  # case-i | case-ii | defer
    re_im_limit: str | None  # '0' or 'inf' as y -> 0
    note: str


def bounded_endpoint_shortcut(problem: HalfLineProblem) -> ShortcutVerdict:
    """Forced small-y behaviour when W or R is bounded at b."""
    w_int = distribution_growth(problem.w, "b").bounded
    r_int = distribution_growth(problem.r, "b").bounded
    if w_int:
        return ShortcutVerdict("case-i", "0", "w integrable at b: m ~ -a/lambda, Re m/Im m -> 0")
    if r_int:
        return ShortcutVerdict("case-ii", "inf", "r integrable, w not: m -> a > 0, Re m/Im m -> inf")
    return ShortcutVerdict("defer", None, "W and R unbounded at b: use the ratio criterion")
