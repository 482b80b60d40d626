"""Zero-energy solution and the Liouville change of variable.

The transformed string is kept in the original variable x: with c0 = c(x, 0)
the pair (w c0^2, 1/c0^2) with q = 0 has the same m-function as (w, 1, q), and
its distribution functions are W~(xi(x)) and xi(x) themselves.  That avoids
tabulating anything as a function of xi.
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
    ProfileError,
    compose_distributions,
    constant,
    distribution_growth,
    table,
)
from .weyl import DEFAULT as M_DEFAULT
from .weyl import HalfLineProblem, MConfig, integrate_path, m_eval, weyl_disk


class LiouvilleError(ValueError):
    pass


class SignChangeError(LiouvilleError):
    """c(x, 0) vanishes: the operator is not nonnegative."""


@dataclass(frozen=True)
class C0Tail:
    """c0 on [L, inf): A (x-s)^(-l) + B (x-s)^(l+1), or a fitted power when not exact."""

    kind: str  # linear | power-pair | fitted
    L: float
    s: float = 0.0
    l: float = 0.0
    A: float = 0.0
    B: float = 0.0
    exact: bool = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = x - self.s
        if self.kind == "linear":
            return self.A + self.B * u
        return self.A * u ** (-self.l) + self.B * u ** (self.l + 1.0)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        u = x - self.s
        if self.kind == "linear":
            return self.B + 0.0 * u
        return -self.l * self.A * u ** (-self.l - 1.0) + (self.l + 1.0) * self.B * u**self.l

    @property
    def leading(self) -> tuple[float, float]:
        """(coef, exponent) of the dominant term as x -> inf, in the variable x - s."""
        if self.kind == "linear":
            return (self.B, 1.0) if self.B != 0.0 else (self.A, 0.0)
        if self.B != 0.0 and self.l + 1.0 > -self.l:
            return self.B, self.l + 1.0
        return self.A, -self.l


@dataclass(frozen=True)
class C0Result:
    xs: np.ndarray
    c: np.ndarray
    dc: np.ndarray
    tail: C0Tail | None
    exponent: float  # fitted log-log slope over the outer decade
    slow_correction: bool  # local slope still drifting over the outer decade
    b: float = INF

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.c)
        if self.tail is not None:
            beyond = x > self.xs[-1]
            if np.any(beyond):
                out = np.where(beyond, self.tail(np.maximum(x, self.xs[-1])), out)
        return out


def _support_end(q: CoefficientProfile) -> float:
    """Start of the last piece of q (where the symbolic tail begins)."""
    return q.pieces[-1].lo


def _default_grid(q: CoefficientProfile, L: float, per_unit: int, x_table: float) -> np.ndarray:
    bps = sorted({pc.lo for pc in q.pieces} | {L})
    pts = [np.array([0.0])]
    for a, b in zip(bps[:-1], bps[1:]):
        n = max(int(math.ceil((b - a) * per_unit)), 8)
        pts.append(np.linspace(a, b, n + 1)[1:])
    if x_table > L:
        n = max(int(math.ceil((x_table - L) * per_unit)), 8)
        pts.append(np.linspace(L, x_table, n + 1)[1:])
    return np.unique(np.concatenate(pts))


def solve_c0(q: CoefficientProfile, grid=None, per_unit: int = 400, x_table: float = 40.0,
             config: MConfig = M_DEFAULT) -> C0Result:
    """c(x, 0) with c(0)=1, c'(0)=0 for -y'' + q y = 0 (r = 1)."""
    b = q.b
    if math.isfinite(b):
        if not distribution_growth(q, "b").bounded:
            raise LiouvilleError("q must be integrable at a finite b")
        L = b
    else:
        L = _support_end(q)
    last = q.pieces[-1]
    exact_tail = math.isinf(b) and last.kind == "powlog" and (
        last.c == 0.0 or (last.a == -2.0 and last.p == 0.0 and last.shift < last.lo))
    if grid is None:
        upto = L if (exact_tail or math.isfinite(b)) else max(L, x_table)
        xs = _default_grid(q, L, per_unit, upto)
        if math.isfinite(b):
            xs = xs[xs < b]
    else:
        xs = np.unique(np.asarray(grid, dtype=float))
        if xs[0] != 0.0:
            xs = np.concatenate([[0.0], xs])
    prob = HalfLineProblem(constant(1.0, b), constant(1.0, b), q)
    pairs = integrate_path(prob, 0.0, xs, config)
    c = np.array([p.c.real for p in pairs])
    dc = np.array([p.c1.real for p in pairs])
    if np.any(c <= 0):
        i = int(np.argmax(c <= 0))
        raise SignChangeError(f"c(x,0) changes sign near x={xs[i]:.6g}")
    tail = None
    if math.isinf(b):
        iL = int(np.searchsorted(xs, L))
        if exact_tail and iL < xs.size and abs(xs[iL] - L) < 1e-12:
            tail = _exact_tail(last, L, c[iL], dc[iL])
            xs, c, dc = xs[: iL + 1], c[: iL + 1], dc[: iL + 1]
            if not tail.exact:
                # two-term tail: tabulate the closed form far out, then keep the leading term
                u0 = L - tail.s
                ext = tail.s + np.geomspace(u0, u0 * 1e6, 6001)[1:]
                xs = np.concatenate([xs, ext])
                c = np.concatenate([c, tail(ext)])
                dc = np.concatenate([dc, tail.derivative(ext)])
                coef, e = tail.leading
                X = float(xs[-1])
                tail = C0Tail("power-pair", X, tail.s, -e, coef, 0.0, exact=False)
        else:
            X = xs[-1]
            a = X * dc[-1] / c[-1]
            tail = C0Tail("power-pair", X, 0.0, -a, c[-1] * X ** (-a), 0.0, exact=False)
    exponent, drift = _fit_exponent(xs, c, tail)
    if q.nonnegative() and np.any(np.diff(c) < -1e-9 * c[1:]):
        raise LiouvilleError("c(x,0) decreased although q >= 0 (integration failure)")
    return C0Result(xs, c, dc, tail, exponent, drift, b)


def _exact_tail(last: Piece, L: float, cL: float, dL: float) -> C0Tail:
    if last.c == 0.0:
        tail = C0Tail("linear", L, L, 0.0, cL, dL)
        if dL < 0:
            raise SignChangeError(f"c(x,0) changes sign near x={L - cL / dL:.6g}")
        return tail
    k = last.c  # q = k (x - s)^-2 = l(l+1)/(x - s)^2
    if k < -0.25:
        raise SignChangeError("q ~ k/x^2 with k < -1/4: c(x,0) oscillates")
    l = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * k))
    s = last.shift
    u = L - s
    M = np.array([[u ** (-l), u ** (l + 1.0)], [-l * u ** (-l - 1.0), (l + 1.0) * u**l]])
    A, B = np.linalg.solve(M, [cL, dL])
    if abs(B) * u ** (l + 1.0) <= 1e-9 * abs(cL):
        B = 0.0
    if B < 0 or (B == 0.0 and A <= 0):
        raise SignChangeError("c(x,0) changes sign in the inverse-square tail")
    return C0Tail("power-pair", L, s, l, float(A), float(B), exact=(A == 0.0 or B == 0.0 or l == 0.0))


def _fit_exponent(xs: np.ndarray, c: np.ndarray, tail: C0Tail | None) -> tuple[float, bool]:
    if tail is not None and tail.exact:
        return tail.leading[1], False
    sel = xs >= xs[-1] / 10.0
    sel &= xs > 0
    if sel.sum() < 4:
        return math.nan, True
    lx, lc = np.log(xs[sel]), np.log(c[sel])
    slope = float(np.polyfit(lx, lc, 1)[0])
    half = lx.size // 2
    s1 = np.polyfit(lx[:half], lc[:half], 1)[0]
    s2 = np.polyfit(lx[half:], lc[half:], 1)[0]
    return slope, bool(abs(s2 - s1) > 0.05 * max(1.0, abs(slope)))


# ---------------------------------------------------------------------------
# transform


@dataclass(frozen=True)
class TransformResult:
    original: HalfLineProblem
    problem: HalfLineProblem  # (w c0^2, 1/c0^2, 0) in the variable x
    c0: C0Result | None
    B: float
    c0_in_L2w: bool
    inv_c0_in_L2: bool
    exact_tail: bool
    table_end: float  # x beyond which the coefficients may follow a tail model
    evidence: dict = field(default_factory=dict)

    @property
    def identity(self) -> bool:
        return self.c0 is None

    def xi(self, x):
        return Distribution(self.problem.r)(x)

    def x_of_xi(self, xi: float) -> float:
        return Distribution(self.problem.r).inverse(xi)

    def xi_map(self) -> MonotoneMap:
        return Distribution(self.problem.r).as_map()

    def w_tilde(self, x):
        """w~ at xi(x): w(x) c0(x)^4."""
        x = np.asarray(x, dtype=float)
        c = self.c0(x) if self.c0 is not None else 1.0
        return self.original.w(x) * c**4

    def W_tilde(self) -> MonotoneMap:
        """xi -> W~(xi)."""
        return compose_distributions(Distribution(self.problem.w), Distribution(self.problem.r))

    def xi_table(self, n: int = 200) -> list[tuple[float, float, float, float]]:
        """Rows (x, xi, w~, W~) on a grid dense near both ends of the table."""
        xe = self.table_end if math.isfinite(self.table_end) else 10.0
        xs = np.unique(np.concatenate([np.linspace(0, xe, n // 2), np.geomspace(max(xe / 1e3, 1e-6), xe * 1e3, n // 2)]))
        Dw, Dr = Distribution(self.problem.w), Distribution(self.problem.r)
        out = []
        for x in xs:
            if x >= self.problem.b:
                break
            out.append((float(x), float(Dr(x)), float(self.w_tilde(x)), float(Dw(x))))
        return out


def is_unit(profile: CoefficientProfile) -> bool:
    return all(pc.kind == "powlog" and pc.c == 1.0 and pc.a == 0.0 and pc.p == 0.0 for pc in profile.pieces)


def _tail_pieces(tail: C0Tail, wcoef: Piece, power: float) -> list[Piece]:
    """Pieces of w c0^power on [L, inf) when c0's tail is a single power."""
    linear = tail.kind == "linear" or (tail.l == 0.0 and tail.kind == "power-pair")
    if linear and tail.B != 0.0:
        # A + B (x - s) = B (x - (s - A/B))
        shift = tail.s - tail.A / tail.B
        if wcoef.a != 0.0 and shift != 0.0:
            raise LiouvilleError("w x^a tail combined with a shifted linear c0 tail is not a single power")
        return [Piece(tail.L, INF, "powlog", wcoef.c * tail.B**power, power + wcoef.a, 0.0, shift)]
    coef, e = tail.leading
    shift = tail.s if e != 0.0 else 0.0
    if wcoef.a != 0.0 and shift != 0.0:
        raise LiouvilleError("w x^a tail combined with a shifted c0 tail is not a single power")
    return [Piece(tail.L, INF, "powlog", wcoef.c * coef**power, e * power + wcoef.a, 0.0, shift)]


def _tail_shift(tail: C0Tail) -> float:
    linear = tail.kind == "linear" or (tail.l == 0.0 and tail.kind == "power-pair")
    if linear and tail.B != 0.0:
        return tail.s - tail.A / tail.B
    coef, e = tail.leading
    return tail.s if e != 0.0 else 0.0


def _unshift_tail(c0: C0Result) -> C0Result:
    """Tabulate a shifted tail out to 1e6 times its start and keep an unshifted leading power.

    Needed when w has a power tail x^a: w c0^2 is then a single power only
    asymptotically.  The relative error of dropping the shift is shift/x.
    """
    tail = c0.tail
    X0 = float(c0.xs[-1])
    ext = np.geomspace(X0, X0 * 1e6, 6001)[1:]
    xs = np.concatenate([c0.xs, ext])
    c = np.concatenate([c0.c, tail(ext)])
    dc = np.concatenate([c0.dc, tail.derivative(ext)])
    X = float(xs[-1])
    a = X * dc[-1] / c[-1]
    new = C0Tail("power-pair", X, 0.0, -a, c[-1] * X ** (-a), 0.0, exact=False)
    return C0Result(xs, c, dc, new, c0.exponent, c0.slow_correction, c0.b)


def transform(problem: HalfLineProblem, per_unit: int = 400, x_table: float = 40.0,
              config: MConfig = M_DEFAULT) -> TransformResult:
    if problem.q_zero:
        gw = distribution_growth(problem.w, "b").bounded
        gr = distribution_growth(problem.r, "b").bounded
        return TransformResult(problem, problem, None, Distribution(problem.r).total, gw, gr, True, problem.b,
                               {"note": "q = 0: identity transform"})
    if not is_unit(problem.r):
        raise LiouvilleError("the transform is implemented for r = 1")
    if math.isfinite(problem.b):
        raise LiouvilleError("the transform is implemented for b = inf")
    c0 = solve_c0(problem.q, per_unit=per_unit, x_table=x_table, config=config)
    xs = c0.xs
    wl = problem.w.pieces[-1]
    if wl.kind != "powlog" or wl.p != 0.0 or (wl.a != 0.0 and wl.shift != 0.0):
        raise LiouvilleError("w must end in a pure power tail c x^a")
    if wl.lo > xs[-1]:
        raise LiouvilleError("w must reach its tail form inside the tabulated range")
    model_from = float(xs[-1])
    if wl.a != 0.0 and c0.tail is not None and _tail_shift(c0.tail) != 0.0:
        c0 = _unshift_tail(c0)
        xs = c0.xs
    wv = np.asarray(problem.w(xs), dtype=float)
    w_tab = wv * c0.c**2
    r_tab = 1.0 / c0.c**2
    tail = c0.tail
    w_tail = _tail_pieces(tail, wl, 2.0)
    r_tail = _tail_pieces(tail, Piece(0.0, INF, "powlog", 1.0), -2.0)
    w_x = table(xs, w_tab, w_tail)
    r_x = table(xs, r_tab, r_tail)
    new = HalfLineProblem(w_x, r_x, None, problem.boundary, "auto", f"liouville({problem.name})")
    gw = distribution_growth(w_x, "b")
    gr = distribution_growth(r_x, "b")
    Dr = Distribution(r_x)
    ev = {
        "c0_exponent": c0.exponent,
        "c0_tail": tail.kind,
        "tail_exact": tail.exact,
        "w_c0sq_tail_index": w_tail[0].a,
        "inv_c0sq_tail_index": r_tail[0].a,
        "B": Dr.total,
    }
    return TransformResult(problem, new, c0, Dr.total, gw.bounded, gr.bounded, tail.exact, model_from, ev)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class InvarianceRow:
    lam: complex
    m_original: complex
    m_transformed: complex
    residual: float
    bound: float
    discretization: float = 0.0

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound


def verify_m_invariance(problem: HalfLineProblem, lams, result: TransformResult | None = None,
                        per_unit: int = 400, config: MConfig = M_DEFAULT) -> list[InvarianceRow]:
    """|m(original) - m(transformed)| per lambda with the combined error budget.

    The budget adds both enclosures, the Weyl-disk radius at the end of the table
    when the tail is a model, and the change of m_transformed when the table is
    built at half the density (piecewise-linear tables are second order).
    """
    tr = result if result is not None else transform(problem, per_unit=per_unit, config=config)
    coarse = None
    if not tr.identity:
        coarse = transform(problem, per_unit=max(per_unit // 2, 8), config=config)
    rows = []
    for lam in lams:
        lam = complex(lam)
        a = m_eval(problem, lam, config)
        b = m_eval(tr.problem, lam, config)
        bound = a.enclosure + b.enclosure
        if not tr.exact_tail and lam.imag != 0:
            # any continuation past the table keeps m inside the disk there
            bound += weyl_disk(tr.problem, lam, tr.table_end, config).radius
        disc = 0.0
        if coarse is not None:
            bc = m_eval(coarse.problem, lam, config)
            disc = abs(bc.m - b.m) + bc.enclosure
        rows.append(InvarianceRow(lam, a.m, b.m, abs(a.m - b.m), bound + disc, disc))
    return rows


def l_from_tail(q: CoefficientProfile) -> float | None:
    """l with q ~ l(l+1)/x^2 at infinity (0 for compact support), None otherwise."""
    last = q.pieces[-1]
    if last.kind == "powlog" and last.c == 0.0:
        return 0.0
    if last.kind == "powlog" and last.a == -2.0 and last.p == 0.0 and math.isinf(last.hi) and last.c >= -0.25:
        return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * last.c))
    return None
