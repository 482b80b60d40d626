"""Coefficient profiles w, r, q, their distribution functions and monotone maps.

A profile is a contiguous list of pieces covering (0, b).  Two piece kinds exist:

* ``powlog``: ``c * |x - shift|**a * log(e + |x - shift|)**p``
* ``linear``: ``c + a * (x - lo)`` (tabulated data, piecewise-linear)

Keeping the family closed lets endpoint behaviour (integrability, growth index)
be read off the first and last piece instead of being guessed from samples.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, optimize

INF = math.inf
E = math.e


class ProfileError(ValueError):
    """Malformed or inadmissible coefficient data."""


class DivergentIntegralError(ArithmeticError):
    pass


class OutOfDomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# pieces


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    kind: str = "powlog"
    c: float = 1.0
    a: float = 0.0
    p: float = 0.0
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ProfileError(f"empty piece [{self.lo}, {self.hi}]")
        if self.kind not in ("powlog", "linear"):
            raise ProfileError(f"unknown piece kind {self.kind!r}")
        if self.kind == "powlog" and (self.a != 0.0 or self.p != 0.0):
            if self.lo < self.shift < self.hi:
                raise ProfileError("shift point must not lie inside a power-log piece")
            if self.shift == self.hi and not math.isfinite(self.hi):
                raise ProfileError("shift at infinity")

    @property
    def is_pure(self) -> bool:
        return self.kind == "powlog" and self.a == 0.0 and self.p == 0.0

    @property
    def shift_side(self) -> int:
        """+1 if the shift lies at/left of the piece, -1 if at/right."""
        return 1 if self.shift <= self.lo else -1

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.c + self.a * (x - self.lo)
        if self.is_pure:
            return np.full_like(x, self.c)
        d = np.abs(x - self.shift)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.c * d**self.a
            if self.p != 0.0:
                out = out * np.log(E + d) ** self.p
        return out

    def singular_at(self) -> float | None:
        """Endpoint where the density blows up (a < 0 and shift at that end)."""
        if self.kind == "powlog" and self.a < 0 and self.c != 0.0:
            if self.shift == self.lo or self.shift == self.hi:
                return self.shift
        return None

    def integral(self, x: float, tol: float = 1e-10) -> tuple[float, float]:
        """Integral over [lo, x] for lo <= x <= hi, with an absolute error bound."""
        lo = self.lo
        if x <= lo:
            return 0.0, 0.0
        if self.kind == "linear":
            h = x - lo
            v = self.c * h + 0.5 * self.a * h * h
            return v, 4e-16 * abs(v)
        if self.is_pure or self.c == 0.0:
            v = self.c * (x - lo)
            return v, 2e-16 * abs(v)
        s, a = self.shift, self.a
        if self.p == 0.0:
            if self.shift_side > 0:
                d0, d1 = lo - s, x - s
            else:
                d0, d1 = s - x, s - lo
            if a == -1.0:
                if d0 == 0.0:
                    raise DivergentIntegralError("x^-1 singularity is not integrable")
                v = self.c * math.log(d1 / d0)
            else:
                if a < -1.0 and d0 == 0.0:
                    raise DivergentIntegralError(f"x^{a} singularity is not integrable")
                v = self.c * (d1 ** (a + 1.0) - d0 ** (a + 1.0)) / (a + 1.0)
            return v, 1e-15 * abs(v) + 1e-300
        return self._quad(x, tol)

    def _quad(self, x: float, tol: float) -> tuple[float, float]:
        s, a, p, c = self.shift, self.a, self.p, self.c
        lo = self.lo
        if a <= -1.0 and (s == lo or s == x):
            raise DivergentIntegralError(f"x^{a} singularity is not integrable")
        # algebraic endpoint weights go through QAWS, which handles x^a exactly
        if a < 0 and s == lo:
            f = lambda t: c * math.log(E + (t - s)) ** p
            v, err = integrate.quad(f, lo, x, weight="alg", wvar=(a, 0.0), epsabs=tol, epsrel=1e-12, limit=200)
        elif a < 0 and s == x:
            f = lambda t: c * math.log(E + (s - t)) ** p
            v, err = integrate.quad(f, lo, x, weight="alg", wvar=(0.0, a), epsabs=tol, epsrel=1e-12, limit=200)
        else:
            f = lambda t: c * abs(t - s) ** a * math.log(E + abs(t - s)) ** p
            if x - lo > 1e3 * max(1.0, abs(lo)):
                # split geometrically so quad sees every scale
                edges = np.geomspace(max(lo, 1e-300) if lo > 0 else min(1.0, x), x, 40)
                edges = np.unique(np.concatenate([[lo], edges[edges > lo]]))
                v = err = 0.0
                for u0, u1 in zip(edges[:-1], edges[1:]):
                    vi, ei = integrate.quad(f, u0, u1, epsabs=tol, epsrel=1e-12, limit=200)
                    v += vi
                    err += ei
            else:
                v, err = integrate.quad(f, lo, x, epsabs=tol, epsrel=1e-12, limit=200)
        return v, err

    def to_dict(self) -> dict:
        d = {"from": self.lo, "to": "inf" if math.isinf(self.hi) else self.hi, "c": self.c, "a": self.a, "p": self.p}
        if self.shift != 0.0:
            d["shift"] = self.shift
        return d


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class CoefficientProfile:
    pieces: tuple[Piece, ...]
    family: str = "power-log"
    name: str | None = None
    signed: bool = False
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.family == "named" and self.name == "atomic-a":
            return
        if not self.pieces:
            raise ProfileError("profile needs at least one piece")
        if self.pieces[0].lo != 0.0:
            raise ProfileError("profile must start at x=0")
        for p0, p1 in zip(self.pieces[:-1], self.pieces[1:]):
            if p0.hi != p1.lo:
                raise ProfileError(f"pieces not contiguous at {p0.hi} / {p1.lo}")
        if not self.signed:
            for pc in self.pieces:
                if pc.kind == "linear":
                    v0, v1 = pc.c, pc.c + pc.a * (pc.hi - pc.lo)
                    if v0 < 0 or v1 < 0 or (v0 == 0 and v1 == 0):
                        raise ProfileError("tabulated w/r values must be positive")
                elif pc.c <= 0:
                    raise ProfileError("w- and r-role profiles must be positive a.e.")

    # -- basic queries
    @property
    def b(self) -> float:
        if not self.pieces:
            return 1.0
        return self.pieces[-1].hi

    @property
    def tail_symbolic(self) -> bool:
        """False when the stored pieces only approximate the true tail (truncated unions)."""
        return self.name != "factorial-weight"

    @property
    def is_zero(self) -> bool:
        return all(pc.c == 0.0 and (pc.kind == "powlog" or pc.a == 0.0) for pc in self.pieces)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([pc.lo for pc in self.pieces] + [self.b])

    def _index(self, x: np.ndarray) -> np.ndarray:
        los = np.array([pc.lo for pc in self.pieces])
        return np.clip(np.searchsorted(los, x, side="right") - 1, 0, len(self.pieces) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x)
        idx = self._index(xs)
        out = np.empty_like(xs)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = self.pieces[k].value(xs[sel])
        return float(out[0]) if scalar else out

    def nonnegative(self) -> bool:
        """True if the profile is >= 0 everywhere (used for q)."""
        for pc in self.pieces:
            if pc.kind == "linear":
                v1 = pc.c + pc.a * (pc.hi - pc.lo) if math.isfinite(pc.hi) else (pc.c if pc.a >= 0 else -1)
                if pc.c < 0 or v1 < 0:
                    return False
            elif pc.c < 0:
                return False
        return True

    def with_support(self, b: float) -> "CoefficientProfile":
        """Truncate (or keep) the pieces to (0, b)."""
        out = []
        for pc in self.pieces:
            if pc.lo >= b:
                break
            out.append(Piece(pc.lo, min(pc.hi, b), pc.kind, pc.c, pc.a, pc.p, pc.shift))
        return CoefficientProfile(tuple(out), self.family, self.name, self.signed, self.params)

    def scaled(self, k: float) -> "CoefficientProfile":
        out = tuple(Piece(pc.lo, pc.hi, pc.kind, pc.c * k, pc.a * k if pc.kind == "linear" else pc.a, pc.p, pc.shift)
                    for pc in self.pieces)
        return CoefficientProfile(out, self.family, self.name, self.signed or k < 0, self.params)

    # -- serialisation
    def to_json(self) -> dict:
        if self.family == "named":
            d = {"family": "named", "name": self.name}
            if self.params:
                d["params"] = list(self.params)
            if self.name == "factorial-weight":
                d["nmax"] = int(self.params[0]) if self.params else 84
            return d
        if self.family == "table":
            pts, tail = [], []
            for pc in self.pieces:
                if pc.kind == "linear":
                    if not pts:
                        pts.append([pc.lo, pc.c])
                    pts.append([pc.hi, pc.c + pc.a * (pc.hi - pc.lo)])
                else:
                    tail.append(pc.to_dict())
            d = {"family": "table", "points": pts}
            if tail:
                d["tail"] = tail
            if self.signed:
                d["signed"] = True
            return d
        d = {"family": self.family, "segments": [pc.to_dict() for pc in self.pieces]}
        if self.signed:
            d["signed"] = True
        return d


def _num(v, what: str) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise ProfileError(f"{what}: expected a number or 'inf', got {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProfileError(f"{what}: expected a number, got {v!r}")
    return float(v)


def profile_from_json(d: dict, signed: bool = False) -> CoefficientProfile:
    if not isinstance(d, dict):
        raise ProfileError("profile must be a JSON object")
    fam = d.get("family")
    signed = bool(d.get("signed", signed))
    if fam in ("power-log", "piecewise"):
        segs = d.get("segments")
        if not isinstance(segs, list) or not segs:
            raise ProfileError(f"family {fam!r} needs a non-empty 'segments' list")
        pieces = []
        for i, s in enumerate(segs):
            if not isinstance(s, dict) or "c" not in s:
                raise ProfileError(f"segment {i}: needs keys from/to/c")
            lo = _num(s.get("from", pieces[-1].hi if pieces else 0.0), f"segment {i} from")
            hi = _num(s.get("to", INF), f"segment {i} to")
            a = _num(s.get("a", 0.0), f"segment {i} a") if fam == "power-log" else 0.0
            p = _num(s.get("p", 0.0), f"segment {i} p") if fam == "power-log" else 0.0
            pieces.append(Piece(lo, hi, "powlog", _num(s["c"], f"segment {i} c"), a, p,
                                _num(s.get("shift", 0.0), f"segment {i} shift")))
        return CoefficientProfile(tuple(pieces), fam, signed=signed)
    if fam == "table":
        pts = d.get("points")
        if not isinstance(pts, list) or len(pts) < 2:
            raise ProfileError("table needs at least two points")
        try:
            arr = np.array(pts, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ProfileError(f"table points: {exc}") from None
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ProfileError("table points must be [x, v] pairs")
        tail = [profile_from_json({"family": "power-log", "segments": d["tail"]}, signed).pieces] if d.get("tail") else []
        return table(arr[:, 0], arr[:, 1], tail=tail[0] if tail else (), signed=signed)
    if fam == "named":
        name = d.get("name")
        if name == "factorial-weight":
            return factorial_weight(int(d.get("nmax", 84)))
        if name == "atomic-a":
            a = float((d.get("params") or [1.0])[0])
            return CoefficientProfile((), "named", "atomic-a", params=(a,))
        raise ProfileError(f"unknown named profile {name!r}")
    raise ProfileError(f"unknown profile family {fam!r}")


def profile_from_json_text(text: str) -> CoefficientProfile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileError(f"invalid JSON: {exc}") from None
    return profile_from_json(d)


# -- factories


def power(c: float = 1.0, a: float = 0.0, p: float = 0.0, b: float = INF, shift: float = 0.0) -> CoefficientProfile:
    return CoefficientProfile((Piece(0.0, b, "powlog", c, a, p, shift),))


def constant(c: float = 1.0, b: float = INF) -> CoefficientProfile:
    return CoefficientProfile((Piece(0.0, b, "powlog", c),), family="piecewise")


def zero(b: float = INF) -> CoefficientProfile:
    return CoefficientProfile((Piece(0.0, b, "powlog", 0.0),), family="piecewise", signed=True)


def piecewise(breaks: Sequence[float], values: Sequence[float], signed: bool = False) -> CoefficientProfile:
    """Piecewise constant: values[i] on [breaks[i], breaks[i+1]]."""
    if len(breaks) != len(values) + 1:
        raise ProfileError("need len(breaks) == len(values) + 1")
    pieces = tuple(Piece(float(breaks[i]), float(breaks[i + 1]), "powlog", float(values[i])) for i in range(len(values)))
    return CoefficientProfile(pieces, family="piecewise", signed=signed)


def segments(specs: Iterable[tuple], signed: bool = False) -> CoefficientProfile:
    """Power-log pieces from (lo, hi, c, a, p[, shift]) tuples."""
    pieces = []
    for s in specs:
        lo, hi, c, a, p = s[:5]
        shift = s[5] if len(s) > 5 else 0.0
        pieces.append(Piece(float(lo), float(hi), "powlog", float(c), float(a), float(p), float(shift)))
    return CoefficientProfile(tuple(pieces), family="power-log", signed=signed)


def table(xs, vs, tail: Sequence[Piece] = (), signed: bool = False) -> CoefficientProfile:
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(vs, dtype=float)
    if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
        raise ProfileError("table needs matching 1-d x and v arrays of length >= 2")
    if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vs)):
        raise ProfileError("table entries must be finite")
    if xs[0] != 0.0:
        raise ProfileError("table must start at x=0")
    if np.any(np.diff(xs) <= 0):
        raise ProfileError("table grid must be strictly increasing")
    slopes = np.diff(vs) / np.diff(xs)
    pieces = [Piece(float(xs[i]), float(xs[i + 1]), "linear", float(vs[i]), float(slopes[i])) for i in range(xs.size - 1)]
    pieces.extend(tail)
    return CoefficientProfile(tuple(pieces), family="table", signed=signed)


def factorial_weight(nmax: int = 84) -> CoefficientProfile:
    """w = 1/x on the union of [(2n)!, (2n+1)!], 1 elsewhere.

    The union is truncated at n = nmax (171! overflows a double); beyond the
    last factorial interval w = 1, so every question about x < (2 nmax + 1)!
    is answered exactly.
    """
    nmax = int(min(nmax, 84))
    pieces = [Piece(0.0, 2.0, "powlog", 1.0)]
    for n in range(1, nmax + 1):
        a_n, b_n = float(math.factorial(2 * n)), float(math.factorial(2 * n + 1))
        pieces.append(Piece(a_n, b_n, "powlog", 1.0, -1.0, 0.0))
        nxt = float(math.factorial(2 * n + 2)) if n < nmax else INF
        pieces.append(Piece(b_n, nxt, "powlog", 1.0))
    return CoefficientProfile(tuple(pieces), family="named", name="factorial-weight", params=(float(nmax),))


def atomic(a: float = 1.0) -> CoefficientProfile:
    """Placeholder for an R-measure with an atom of mass a at 0 (closed-form only)."""
    return CoefficientProfile((), "named", "atomic-a", params=(float(a),))


# ---------------------------------------------------------------------------
# endpoint asymptotics


@dataclass(frozen=True)
class Growth:
    """Leading behaviour coef * g**index * (log g)**logpow in a growth variable g.

    At x -> 0 the variable is g = x (no log factors survive).  At b = inf it is
    g = x; at a finite b it is g = 1/(b - x).  ``bounded`` means the function has
    a finite limit at that end, in which case index/logpow are not meaningful.
    """

    bounded: bool
    coef: float = 0.0
    index: float = 0.0
    logpow: float = 0.0
    loglog: bool = False

    @property
    def slow(self) -> bool:
        return not self.bounded and self.index == 0.0


def _density_leading_at_b(pc: Piece, b: float) -> tuple[float, float, float] | None:
    """(coef, a, p) of the last piece near b, in the variable x (b=inf) or b-x."""
    if math.isinf(b):
        if pc.kind == "linear":
            return (pc.a, 1.0, 0.0) if pc.a > 0 else (pc.c, 0.0, 0.0)
        return (pc.c, pc.a, pc.p)
    if pc.kind == "powlog" and pc.shift == b and pc.a != 0.0:
        return (pc.c, pc.a, 0.0)
    return None  # bounded density near a finite b


def distribution_growth(profile: CoefficientProfile, end: str) -> Growth:
    """Leading behaviour of x -> int_0^x profile near ``end`` ('zero' or 'b')."""
    if end == "zero":
        pc = profile.pieces[0]
        if pc.kind == "linear":
            if pc.c > 0:
                return Growth(False, pc.c, 1.0)
            return Growth(False, pc.a / 2.0, 2.0)
        if pc.shift == 0.0 and pc.a != 0.0:
            if pc.a <= -1.0:
                raise DivergentIntegralError("profile not integrable at 0")
            return Growth(False, pc.c / (pc.a + 1.0), pc.a + 1.0)
        return Growth(False, float(pc.value(0.0)), 1.0)
    b = profile.b
    lead = _density_leading_at_b(profile.pieces[-1], b)
    if lead is None:
        return Growth(True)
    c, a, p = lead
    if math.isinf(b):
        if a > -1.0:
            return Growth(False, c / (a + 1.0), a + 1.0, p)
        if a == -1.0:
            if p > -1.0:
                return Growth(False, c / (p + 1.0), 0.0, p + 1.0)
            if p == -1.0:
                return Growth(False, c, 0.0, 0.0, loglog=True)
        return Growth(True)
    # finite b, density c (b-x)^a
    if a > -1.0:
        return Growth(True)
    if a == -1.0:
        return Growth(False, c, 0.0, 1.0)
    return Growth(False, c / (-a - 1.0), -a - 1.0)


def integrable_at_b(profile: CoefficientProfile) -> bool:
    return distribution_growth(profile, "b").bounded


@dataclass(frozen=True)
class Variation:
    """Symbolic variation class of a monotone map at an end."""

    kind: str  # regular | slow | rapid
    index: float = 0.0


def composition_variation(num: CoefficientProfile, den: CoefficientProfile, end: str) -> Variation | None:
    """Variation class of N o D^{-1} (N, D distributions of num, den).

    end='zero' is u -> 0 (x -> 0); end='infinity' is u -> D(b-) = inf.
    Returns None when the leading terms do not decide it.
    """
    if end == "zero":
        gn, gd = distribution_growth(num, "zero"), distribution_growth(den, "zero")
        return Variation("regular", gn.index / gd.index)
    if not (num.tail_symbolic and den.tail_symbolic):
        return None
    gd = distribution_growth(den, "b")
    if gd.bounded:
        return None
    gn = distribution_growth(num, "b")
    if gn.bounded:
        return Variation("slow", 0.0)
    if gd.index > 0:
        if gn.index == 0:
            return Variation("slow", 0.0)
        return Variation("regular", gn.index / gd.index)
    if gn.index > 0:
        return Variation("rapid", INF)
    return None


# ---------------------------------------------------------------------------
# distributions


class Distribution:
    """W(x) = int_0^x w dt with eager boundary caches (immutable after init)."""

    def __init__(self, profile: CoefficientProfile, tol: float = 1e-10):
        if profile.family == "named" and profile.name == "atomic-a":
            raise ProfileError("the atomic measure has no density representation")
        self.profile = profile
        self.tol = tol
        vals, errs = [0.0], [0.0]
        for pc in profile.pieces:
            if math.isinf(pc.hi):
                break
            v, e = pc.integral(pc.hi, tol)
            vals.append(vals[-1] + v)
            errs.append(errs[-1] + e)
        self._cum = np.array(vals)
        self._err = np.array(errs)
        self._los = np.array([pc.lo for pc in profile.pieces])
        g = distribution_growth(profile, "b")
        self.tail = g
        self.total = float(self._cum[-1]) if (g.bounded and math.isfinite(profile.b)) else (
            self._tail_total() if g.bounded else INF)

    def _tail_total(self) -> float:
        pc = self.profile.pieces[-1]
        if pc.kind == "powlog" and pc.p == 0.0 and pc.a < -1.0:
            d0 = pc.lo - pc.shift
            return float(self._cum[-1] + pc.c * d0 ** (pc.a + 1.0) / (-pc.a - 1.0))
        v, _ = integrate.quad(lambda t: float(pc.value(t)), pc.lo, INF, epsabs=self.tol, limit=500)
        return float(self._cum[-1] + v)

    @property
    def b(self) -> float:
        return self.profile.b

    @property
    def bounded(self) -> bool:
        return self.tail.bounded

    def evaluate(self, x: float) -> tuple[float, float]:
        """(value, abs error bound) at a single x."""
        x = float(x)
        if x < 0:
            raise OutOfDomainError("x must be >= 0")
        if x >= self.b:
            if x == self.b and self.bounded:
                return self.total, float(self._err[-1])
            raise OutOfDomainError(f"x={x} outside (0, {self.b})")
        k = int(np.clip(np.searchsorted(self._los, x, side="right") - 1, 0, len(self._los) - 1))
        v, e = self.profile.pieces[k].integral(x, self.tol)
        return float(self._cum[k] + v), float(self._err[k] + e)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return self.evaluate(float(x))[0]
        return np.array([self.evaluate(float(t))[0] for t in x.ravel()]).reshape(x.shape)

    def inverse(self, u: float) -> float:
        """Generalized inverse inf{x : W(x) >= u}."""
        u = float(u)
        if u <= 0.0:
            return 0.0
        if self.bounded and u > self.total:
            raise OutOfDomainError(f"u={u} above W(b-)={self.total}")
        k = int(np.searchsorted(self._cum, u, side="left")) - 1
        k = min(max(k, 0), len(self.profile.pieces) - 1)
        pc = self.profile.pieces[k]
        rem = u - self._cum[k]
        if rem <= 0:
            return pc.lo
        x = _invert_piece(pc, rem, self.tol)
        return x

    def inverse_many(self, us) -> np.ndarray:
        us = np.asarray(us, dtype=float)
        return np.array([self.inverse(u) for u in us.ravel()]).reshape(us.shape)

    def as_map(self) -> "MonotoneMap":
        var = {"zero": _dist_variation(self.profile, "zero"), "infinity": _dist_variation(self.profile, "b")}
        upper = self.b if not self.bounded else self.b
        return MonotoneMap(self.__call__, 0.0, upper, variation=var, label="distribution")


def _dist_variation(profile: CoefficientProfile, end: str) -> Variation | None:
    try:
        g = distribution_growth(profile, end)
    except DivergentIntegralError:
        return None
    if g.bounded:
        return None
    if end == "b" and not profile.tail_symbolic:
        return None
    if end == "b" and not math.isinf(profile.b):
        return None  # growth is in 1/(b-x), not a statement about x -> inf
    if g.index == 0.0:
        return Variation("slow", 0.0)
    return Variation("regular", g.index)


def _invert_piece(pc: Piece, rem: float, tol: float) -> float:
    lo = pc.lo
    if pc.kind == "linear":
        c, s = pc.c, pc.a
        if abs(s) < 1e-300:
            return lo + rem / c
        disc = c * c + 2.0 * s * rem
        h = 2.0 * rem / (c + math.sqrt(max(disc, 0.0)))
        return lo + h
    if pc.is_pure:
        return lo + rem / pc.c
    if pc.p == 0.0:
        a, s, c = pc.a, pc.shift, pc.c
        if pc.shift_side > 0:
            d0 = lo - s
            if a == -1.0:
                return s + d0 * math.exp(rem / c)
            return s + (d0 ** (a + 1.0) + rem * (a + 1.0) / c) ** (1.0 / (a + 1.0))
        d1 = s - lo
        if a == -1.0:
            return s - d1 * math.exp(-rem / c)
        val = d1 ** (a + 1.0) - rem * (a + 1.0) / c
        return s - val ** (1.0 / (a + 1.0))
    hi = pc.hi
    if math.isinf(hi):
        hi = max(2.0 * lo, 1.0)
        while pc.integral(hi, tol)[0] < rem:
            hi *= 2.0
    return optimize.brentq(lambda t: pc.integral(t, tol)[0] - rem, lo, hi, xtol=1e-14 * max(1.0, hi), rtol=1e-14)


def cumulative(profile: CoefficientProfile, x: float, tol: float = 1e-10) -> tuple[float, float]:
    """int_0^x profile dt and an absolute error bound."""
    if x >= profile.b:
        raise OutOfDomainError(f"x={x} outside (0, {profile.b})")
    return Distribution(profile, tol).evaluate(x)


# ---------------------------------------------------------------------------
# monotone maps


@dataclass(frozen=True)
class MonotoneMap:
    """A nondecreasing function on (lo, hi) with optional symbolic end behaviour.

    ``variation`` maps 'zero' / 'infinity' to a Variation (or None if unknown).
    """

    func: Callable
    lo: float = 0.0
    hi: float = INF
    variation: dict = field(default_factory=dict)
    label: str = ""
    log_domain: bool = True

    def __call__(self, x):
        return self.func(x)

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        try:
            out = np.asarray(self.func(xs), dtype=float)
            if out.shape == xs.shape:
                return out
        except Exception:
            pass
        return np.array([float(self.func(float(t))) for t in xs.ravel()]).reshape(xs.shape)

    def scaled(self, k: float) -> "MonotoneMap":
        f = self.func
        return MonotoneMap(lambda x: k * f(x), self.lo, self.hi, dict(self.variation), self.label, self.log_domain)

    # -- common closed forms
    @staticmethod
    def power_log(c: float = 1.0, a: float = 1.0, p: float = 0.0) -> "MonotoneMap":
        """c x^a log(e+x)^p (nondecreasing for a > 0, p >= 0)."""
        f = lambda x: c * np.asarray(x, dtype=float) ** a * np.log(E + np.asarray(x, dtype=float)) ** p
        inf_kind = Variation("regular", a) if a != 0 else (Variation("slow") if p > 0 else None)
        return MonotoneMap(f, 0.0, INF, {"zero": Variation("regular", a), "infinity": inf_kind},
                           f"{c}*x^{a}*log(e+x)^{p}")

    @staticmethod
    def log1p() -> "MonotoneMap":
        return MonotoneMap(np.log1p, 0.0, INF, {"zero": Variation("regular", 1.0), "infinity": Variation("slow")},
                           "log(1+x)")

    @staticmethod
    def exp() -> "MonotoneMap":
        return MonotoneMap(lambda x: np.exp(np.asarray(x, dtype=float)), 0.0, INF,
                           {"infinity": Variation("rapid", INF)}, "exp(x)")

    @staticmethod
    def from_callable(f: Callable, lo: float = 0.0, hi: float = INF, label: str = "") -> "MonotoneMap":
        return MonotoneMap(f, lo, hi, {}, label)

    @staticmethod
    def from_samples(xs, ys, label: str = "table") -> "MonotoneMap":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if np.any(np.diff(xs) <= 0):
            raise ProfileError("sample grid must be strictly increasing")
        if np.any(np.diff(ys) < 0):
            raise ProfileError("samples are not nondecreasing")
        f = lambda x: np.interp(x, xs, ys)
        return MonotoneMap(f, float(xs[0]), float(xs[-1]), {}, label, log_domain=False)


class OutOfHullError(ValueError):
    pass


def generalized_inverse(m: MonotoneMap, y: float, xtol: float = 1e-13) -> float:
    """inf{x : m(x) >= y} by bracketing + bisection (exact for step functions)."""
    lo, hi = m.lo, m.hi
    f = lambda x: float(m(x))
    # bracket
    if math.isinf(hi):
        x_hi = max(1.0, 2.0 * abs(lo))
        while f(x_hi) < y:
            x_hi *= 2.0
            if x_hi > 1e300:
                raise OutOfHullError(f"y={y} above the range of the map")
    else:
        x_hi = hi
        if f(hi) < y:
            raise OutOfHullError(f"y={y} above the range of the map")
    x_lo = lo
    try:
        f_lo = f(lo)
    except (ZeroDivisionError, ValueError, OverflowError):
        f_lo = -INF
    if math.isfinite(f_lo) and f_lo >= y:
        if y < f_lo - 1e-12 * max(1.0, abs(f_lo)):
            raise OutOfHullError(f"y={y} below the range of the map")
        return lo
    # invariant: f(x_lo) < y <= f(x_hi)
    for _ in range(400):
        if x_hi - x_lo <= xtol * max(abs(x_hi), 1e-300):
            break
        if m.log_domain and x_lo > 0 and x_hi / x_lo > 4.0:
            mid = math.sqrt(x_lo * x_hi)
        else:
            mid = 0.5 * (x_lo + x_hi)
        if f(mid) >= y:
            x_hi = mid
        else:
            x_lo = mid
    return x_hi


def compose_distributions(numerator: Distribution, denominator: Distribution) -> MonotoneMap:
    """N o D^{-1} as an evaluable monotone map."""
    if numerator.b != denominator.b:
        raise ProfileError("distributions must share the support (0, b)")
    npf, dpf = numerator.profile, denominator.profile
    var = {}
    for end in ("zero", "infinity"):
        try:
            var[end] = composition_variation(npf, dpf, "zero" if end == "zero" else "b")
        except DivergentIntegralError:
            var[end] = None
    fast = _fast_power_composition(npf, dpf)
    if fast is not None:
        func = fast
    else:
        def func(u):
            u = np.asarray(u, dtype=float)
            if u.ndim == 0:
                return numerator(denominator.inverse(float(u)))
            return np.array([numerator(denominator.inverse(float(t))) for t in u.ravel()]).reshape(u.shape)
    upper = denominator.total
    return MonotoneMap(func, 0.0, upper, var, "composition")


def _fast_power_composition(num: CoefficientProfile, den: CoefficientProfile):
    """Closed form when both are single pure-power pieces from 0 (c x^a)."""
    if len(num.pieces) != 1 or len(den.pieces) != 1:
        return None
    pn, pd = num.pieces[0], den.pieces[0]
    for pc in (pn, pd):
        if pc.kind != "powlog" or pc.p != 0.0 or pc.shift != 0.0 or pc.a <= -1.0:
            return None
    an, ad = pn.a + 1.0, pd.a + 1.0
    cn, cd = pn.c / an, pd.c / ad

    def f(u):
        u = np.asarray(u, dtype=float)
        return cn * (u / cd) ** (an / ad)

    return f
