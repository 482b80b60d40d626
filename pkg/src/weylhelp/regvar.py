"""Regular / slow / rapid variation and the positively-increasing property.

Symbolic metadata on a MonotoneMap decides the answer whenever it is present.
Otherwise the ratios g(xt)/g(x) are sampled on a geometric grid toward the
requested end and summarised with the declared finite-window thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import (
    INF,
    CoefficientProfile,
    Distribution,
    MonotoneMap,
    Piece,
    Variation,
)

ENDS = ("zero", "infinity")


class RegvarError(ValueError):
    pass


class NonMonotoneError(RegvarError):
    pass


class InsufficientRangeError(RegvarError):
    pass


@dataclass(frozen=True)
class RegvarConfig:
    per_decade: int = 40
    decades: float = 6.0
    window: float = 2.0
    factors: tuple = (0.5, 0.25, 0.125)
    reach: float = 1e12  # how far toward the end callables are sampled
    yes_threshold: float = 0.95
    no_tolerance: float = 0.02
    index_tolerance: float = 0.05
    trend_tolerance: float = 0.01


DEFAULT = RegvarConfig()


@dataclass(frozen=True)
class VariationVerdict:
    end: str
    kind: str  # regular | slow | rapid | inconclusive
    index: float | None
    source: str  # symbolic | numeric
    table: tuple = ()  # rows (x, t, ratio)

    @property
    def decades_covered(self) -> float:
        if not self.table:
            return INF if self.source == "symbolic" else 0.0
        xs = [row[0] for row in self.table]
        return math.log10(max(xs) / min(xs))


@dataclass(frozen=True)
class PIVerdict:
    end: str
    verdict: str  # yes | no | inconclusive
    S: dict
    C: float | None
    beta: float | None
    source: str
    note: str = ""

    @property
    def yes(self) -> bool:
        return self.verdict == "yes"


# ---------------------------------------------------------------------------
# sampling


def _grid(g: MonotoneMap, end: str, cfg: RegvarConfig) -> np.ndarray:
    tmin = min(cfg.factors)
    if end == "infinity":
        hi = g.hi if math.isfinite(g.hi) else cfg.reach
        lo = hi * 10.0 ** (-cfg.decades)
        if g.lo > 0:
            lo = max(lo, g.lo / tmin * (1 + 1e-12))
    else:
        lo = g.lo / tmin * (1 + 1e-12) if g.lo > 0 else 1.0 / cfg.reach
        hi = lo * 10.0**cfg.decades
        if math.isfinite(g.hi):
            hi = min(hi, g.hi)
    if not (hi > lo > 0):
        raise InsufficientRangeError("map domain does not reach toward the requested end")
    span = math.log10(hi / lo)
    if span < 2.0:
        raise InsufficientRangeError(f"sample range spans {span:.2f} < 2 decades")
    return np.geomspace(lo, hi, max(int(round(span * cfg.per_decade)) + 1, 2))


def _ratios(g: MonotoneMap, end: str, cfg: RegvarConfig):
    xs = _grid(g, end, cfg)
    gx = g.values(xs)
    if np.any(~np.isfinite(gx)) or np.any(gx <= 0):
        raise RegvarError("map must be positive and finite on the sampling window")
    if np.any(np.diff(gx) < -1e-12 * np.abs(gx[1:])):
        raise NonMonotoneError("map is not nondecreasing on the sampling window")
    rows = []
    ratio = {}
    for t in cfg.factors:
        gt = g.values(xs * t)
        ratio[t] = gt / gx
        rows.extend(zip(xs.tolist(), [t] * xs.size, ratio[t].tolist()))
    return xs, ratio, rows


def _window_mask(xs: np.ndarray, end: str, cfg: RegvarConfig) -> np.ndarray:
    if end == "infinity":
        return xs >= xs[-1] * 10.0 ** (-cfg.window)
    return xs <= xs[0] * 10.0**cfg.window


def _decade_max(xs: np.ndarray, vals: np.ndarray, end: str) -> list[float]:
    """Per-decade maxima ordered from the interior toward the end."""
    lx = np.log10(xs)
    if end == "infinity":
        edges = np.arange(lx[-1], lx[0] - 1e-9, -1.0)[::-1]
    else:
        edges = np.arange(lx[0], lx[-1] + 1e-9, 1.0)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (lx >= a - 1e-12) & (lx <= b + 1e-12)
        if sel.any():
            out.append(float(vals[sel].max()))
    return out if end == "infinity" else out[::-1]


# ---------------------------------------------------------------------------
# operations


def classify_variation(g: MonotoneMap, end: str, config: RegvarConfig = DEFAULT) -> VariationVerdict:
    if end not in ENDS:
        raise ValueError(f"end must be one of {ENDS}")
    var = g.variation.get(end) if g.variation else None
    if isinstance(var, Variation):
        idx = 0.0 if var.kind == "slow" else var.index
        return VariationVerdict(end, var.kind, idx, "symbolic")
    xs, ratio, rows = _ratios(g, end, config)
    # local index estimates: log(g(xt)/g(x)) / log t
    est = {t: np.log(np.maximum(ratio[t], 1e-300)) / math.log(t) for t in config.factors}
    mask = _window_mask(xs, end, config)
    window_vals = np.concatenate([est[t][mask] for t in config.factors])
    spread = float(window_vals.max() - window_vals.min())
    table = tuple(rows)
    if np.all(np.isfinite(window_vals)) and spread <= config.index_tolerance:
        alpha = float(np.median(window_vals))
        if abs(alpha) <= config.index_tolerance:
            return VariationVerdict(end, "slow", 0.0, "numeric", table)
        return VariationVerdict(end, "regular", alpha, "numeric", table)
    # rapid: the local index keeps growing toward the end and is already large
    mins = [-v for v in _decade_max(xs, -est[config.factors[0]], end)]
    growing = all(b >= a - 1e-9 for a, b in zip(mins[:-1], mins[1:]))
    if growing and mins[-1] > 10.0 and mins[-1] >= 2.0 * max(mins[0], 1e-9):
        return VariationVerdict(end, "rapid", INF, "numeric", table)
    return VariationVerdict(end, "inconclusive", None, "numeric", table)


def positively_increasing(g: MonotoneMap, end: str, config: RegvarConfig = DEFAULT) -> PIVerdict:
    if end not in ENDS:
        raise ValueError(f"end must be one of {ENDS}")
    var = g.variation.get(end) if g.variation else None
    if isinstance(var, Variation):
        return _symbolic_pi(var, end, config)
    xs, ratio, _ = _ratios(g, end, config)
    mask = _window_mask(xs, end, config)
    S = {t: float(ratio[t][mask].max()) for t in config.factors}
    trend = _decade_max(xs, ratio[config.factors[0]], end)
    tail = trend[-3:] if len(trend) >= 3 else trend
    non_increasing = all(b <= a + config.trend_tolerance for a, b in zip(tail[:-1], tail[1:]))
    C, beta = _fit_c_beta(S)
    if S[config.factors[0]] <= config.yes_threshold and non_increasing:
        verdict, note = "yes", f"S(1/2)={S[config.factors[0]]:.4f} <= {config.yes_threshold}"
    elif max(abs(v - 1.0) for v in S.values()) <= config.no_tolerance:
        verdict, note = "no", f"max |S(t)-1| <= {config.no_tolerance}"
    else:
        verdict, note = "inconclusive", "S estimates between thresholds or trend increasing"
    return PIVerdict(end, verdict, S, C, beta, "numeric", note)


def _fit_c_beta(S: dict) -> tuple[float | None, float | None]:
    ts = np.array(sorted(S))
    vals = np.array([S[t] for t in ts])
    if np.any(vals <= 0):
        return None, None
    A = np.vstack([np.ones_like(ts), np.log(ts)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(vals), rcond=None)
    logC, beta = coef
    # make C an upper envelope: g(xt) <= C t^beta g(x) on the sampled t
    logC = max(logC, float(np.max(np.log(vals) - beta * np.log(ts))))
    return float(math.exp(logC)), float(beta)


def _symbolic_pi(var: Variation, end: str, cfg: RegvarConfig) -> PIVerdict:
    ts = cfg.factors
    if var.kind == "regular":
        a = var.index
        S = {t: t**a for t in ts}
        if a > 0:
            return PIVerdict(end, "yes", S, 1.0, a, "symbolic", f"regular variation with index {a:g} > 0")
        return PIVerdict(end, "no", S, None, None, "symbolic", f"regular variation with index {a:g} <= 0")
    if var.kind == "slow":
        return PIVerdict(end, "no", {t: 1.0 for t in ts}, None, None, "symbolic", "slow variation")
    if var.kind == "rapid":
        return PIVerdict(end, "yes", {t: 0.0 for t in ts}, 1.0, INF, "symbolic", "rapid variation")
    return PIVerdict(end, "inconclusive", {}, None, None, "symbolic", f"unknown kind {var.kind}")


# ---------------------------------------------------------------------------
# Karamata cross-check


@dataclass(frozen=True)
class KaramataReport:
    gamma: float
    alpha: float
    end: str
    xs: tuple
    ratios: tuple
    raw: tuple
    status: str  # converged | not-converged | diverges
    final_decade_max_dev: float


def karamata_integral_check(f: CoefficientProfile, gamma: float, alpha: float, end: str = "infinity",
                            decades: tuple = (0.0, 6.0), per_decade: int = 10, tol: float = 0.02) -> KaramataReport:
    """Ratio of int t^(gamma-1) f dt to x^gamma f(x)/(gamma+alpha) over a scale grid."""
    weighted = _times_power(f, gamma - 1.0)
    dist = Distribution(weighted)
    if end == "infinity":
        xs = np.logspace(decades[0], decades[1], int((decades[1] - decades[0]) * per_decade) + 1)
    else:
        xs = np.logspace(-decades[1], -decades[0], int((decades[1] - decades[0]) * per_decade) + 1)
    ints = np.array([dist.evaluate(x)[0] for x in xs])
    denom = xs**gamma * f(xs)
    raw = ints / denom
    if gamma + alpha > 0:
        ratios = raw * (gamma + alpha)
        final = (xs >= xs[-1] / 10.0) if end == "infinity" else (xs <= xs[0] * 10.0)
        dev = float(np.max(np.abs(ratios[final] - 1.0)))
        status = "converged" if dev <= tol else "not-converged"
    else:
        ratios = np.full_like(raw, INF)
        growth = np.diff(raw[:: per_decade])
        dev = INF
        status = "diverges" if np.all(growth > 0) and raw[-1] > 2 * raw[0] else "not-converged"
    return KaramataReport(gamma, alpha, end, tuple(xs), tuple(ratios), tuple(raw), status, dev)


def _times_power(f: CoefficientProfile, k: float) -> CoefficientProfile:
    if k == 0.0:
        return f
    pieces = []
    for pc in f.pieces:
        if pc.kind != "powlog" or (pc.shift != 0.0 and (pc.a != 0.0 or pc.p != 0.0)):
            raise RegvarError("weighted Karamata integrals need power-log pieces anchored at 0")
        pieces.append(Piece(pc.lo, pc.hi, "powlog", pc.c, pc.a + k, pc.p, 0.0))
    return CoefficientProfile(tuple(pieces), "power-log")
