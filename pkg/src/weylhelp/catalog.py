"""Named example problems, serializable to the problem JSON schema."""
from __future__ import annotations

import math
from typing import Callable

from . import coefficients as C
from .weyl import HalfLineProblem

INF = math.inf


def _hl(alpha: float = 0.0) -> HalfLineProblem:
    return HalfLineProblem(C.constant(), C.constant(), name="hardy-littlewood")


def _power_weight(alpha: float = 1.0) -> HalfLineProblem:
    if not alpha > -1.0:
        raise ValueError("w = x^alpha needs alpha > -1")
    return HalfLineProblem(C.power(1.0, alpha), C.constant(), name=f"power-weight-{alpha:g}")


def _q_chi() -> C.CoefficientProfile:
    return C.piecewise([0.0, 1.0, INF], [1.0, 0.0], signed=True)


def _q_l1() -> C.CoefficientProfile:
    # -1 on [0, pi/4], then 2/(1 + x - pi/4)^2: c(x,0) is proportional to 1/(1 + x - pi/4)
    x0 = math.pi / 4
    return C.segments([(0.0, x0, -1.0, 0.0, 0.0), (x0, INF, 2.0, -2.0, 0.0, x0 - 1.0)], signed=True)


_ENTRIES: dict[str, tuple[Callable[..., HalfLineProblem], str]] = {
    "hardy-littlewood": (lambda: _hl(), "w = r = 1 on (0, inf)"),
    "atomic": (lambda a=1.0: HalfLineProblem(C.constant(), C.atomic(a), name="atomic"),
               "R-measure with an atom of mass a at 0: m = a - 1/lambda"),
    "A_l-log": (lambda: HalfLineProblem(C.power(1.0, -1.0, shift=-1.0), C.constant(), name="A_l-log"),
                "w = 1/(1+x), r = 1: W = log(1+x) varies slowly"),
    "factorial-weight": (lambda nmax=84: HalfLineProblem(C.factorial_weight(nmax), C.constant(), name="factorial-weight"),
                         "w = 1/x on [(2n)!, (2n+1)!], 1 elsewhere; r = 1"),
    "factorial-r": (lambda nmax=84: HalfLineProblem(C.constant(), C.factorial_weight(nmax), name="factorial-r"),
                    "w = 1, r = the factorial profile (inequality counterpart: R(a_n)/R(b_n) -> 1)"),
    "inverse-square-l0": (lambda: HalfLineProblem(C.constant(), C.constant(), _q_chi(), name="inverse-square-l0"),
                          "w = r = 1, q = indicator of [0,1] (l = 0)"),
    "inverse-square-l1": (lambda: HalfLineProblem(C.constant(), C.constant(), _q_l1(), name="inverse-square-l1"),
                          "w = r = 1, q = -1 on [0, pi/4], 2/(1+x-pi/4)^2 beyond (l = 1)"),
    "potential-chi": (lambda: HalfLineProblem(C.constant(), C.constant(), _q_chi(), name="potential-chi"),
                      "w = r = 1, q = indicator of [0,1]"),
    "w-integrable": (lambda: HalfLineProblem(C.power(1.0, -2.0, shift=-1.0), C.constant(), name="w-integrable"),
                     "w = (1+x)^-2 integrable, r = 1"),
    "r-inverse-tail": (lambda: HalfLineProblem(C.constant(), C.segments([(0.0, 1.0, 1.0, 0.0, 0.0), (1.0, INF, 1.0, -1.0, 0.0)]),
                                               name="r-inverse-tail"),
                       "w = 1, r = 1 on [0,1] and 1/x beyond"),
    "r-2x": (lambda: HalfLineProblem(C.constant(), C.power(2.0, 1.0), name="r-2x"), "w = 1, r = 2x (R = x^2)"),
    "singular-interval": (lambda: HalfLineProblem(C.constant(b=1.0), C.power(1.0, -2.0, b=1.0, shift=1.0),
                                                  name="singular-interval"),
                          "(0,1) with w = 1, r = (1-x)^-2"),
    "regular-interval": (lambda: HalfLineProblem(C.constant(b=1.0), C.constant(b=1.0), name="regular-interval"),
                         "w = r = 1 on (0,1)"),
    "power-weight": (_power_weight, "w = x^alpha (alpha > -1), r = 1; parameter alpha"),
}


class UnknownEntryError(KeyError):
    pass


def names() -> list[str]:
    return sorted(_ENTRIES)


def describe(name: str) -> str:
    if name not in _ENTRIES:
        raise UnknownEntryError(name)
    return _ENTRIES[name][1]


def catalog(name: str, **params) -> HalfLineProblem:
    if name not in _ENTRIES:
        raise UnknownEntryError(f"unknown catalog entry {name!r}; known: {', '.join(names())}")
    return _ENTRIES[name][0](**params)


def catalog_json(name: str, **params) -> dict:
    return catalog(name, **params).to_json()
