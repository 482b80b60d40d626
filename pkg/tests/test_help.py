import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylhelp import coefficients as C
from weylhelp.catalog import catalog
from weylhelp.help_inequality import (HelpError, _K_from, everitt_scan, factorial_sequences, help_check,
                                      help_coefficient_check, help_lower_bound, help_with_potential)
from weylhelp.weyl import HalfLineProblem


@pytest.mark.parametrize("name, expected", [
    ("hardy-littlewood", "valid"),
    ("r-2x", "valid"),
    ("A_l-log", "valid"),
    ("w-integrable", "valid"),
    ("r-inverse-tail", "invalid"),
])
def test_help_battery_routes_agree(name, expected):
    v = help_check(catalog(name))
    assert v.validity == expected
    assert v.coefficient == expected
    assert not v.disagreement


def test_help_hl_sup_is_one(hl):
    v = help_check(hl)
    assert v.sup_ratio == pytest.approx(1.0, abs=1e-5)
    d = v.to_dict()
    assert d["validity"] == "valid" and d["trail"]


def test_r_integrable_never_valid():
    p = HalfLineProblem(C.constant(), C.power(1.0, -2.0, shift=-1.0))
    cv = help_coefficient_check(p)
    assert (cv.verdict, cv.case) == ("invalid", "r-integrable")
    assert help_check(p).validity == "invalid"


def test_help_check_rejects_potential_and_dirichlet(chi):
    with pytest.raises(HelpError):
        help_check(HalfLineProblem(C.constant(), C.constant(), chi))
    with pytest.raises(HelpError):
        help_check(HalfLineProblem(C.constant(), C.constant(), boundary="dirichlet"))


def test_potential_chi_invalid_both_routes():
    v = help_with_potential(catalog("potential-chi"), m_route=True)
    assert v.validity == "invalid"
    assert not v.disagreement
    assert any("1/c0 in L2" in t for t in v.trail)


def test_negative_potential_rejected():
    q = C.piecewise([0.0, 1.0, math.inf], [-1.0, 0.0], signed=True)
    with pytest.raises(HelpError):
        help_with_potential(HalfLineProblem(C.constant(), C.constant(), q))


def test_everitt_hl(hl):
    res = everitt_scan(hl)
    assert res.validity == "valid"
    assert res.theta0 == pytest.approx(math.pi / 3, abs=0.01)
    assert res.K == pytest.approx(2.0, abs=0.05)
    assert not res.grid_limited


def test_everitt_r2x(r2x):
    res = everitt_scan(r2x)
    assert res.validity == "valid"
    assert res.theta0 == pytest.approx(math.pi / 4, abs=0.01)


def test_everitt_invalid_case():
    res = everitt_scan(catalog("r-inverse-tail"), per_decade=4)
    assert res.validity in ("invalid", "inconclusive")
    assert res.validity == "invalid" or res.grid_limited


def test_lower_bound_power_stays_small(hl):
    ks = [b.K for b in help_lower_bound(hl, *factorial_sequences(8))]
    assert max(ks) < 10


def test_lower_bound_factorial_r_grows_like_2n():
    ks = [b.K for b in help_lower_bound(catalog("factorial-r"), *factorial_sequences(8))]
    assert all(b > a for a, b in zip(ks, ks[1:]))
    assert ks[-1] == pytest.approx(16.0, rel=1e-3)


def test_lower_bound_rejects_bad_sequences(hl):
    with pytest.raises(HelpError):
        help_lower_bound(hl, [2.0], [1.0])
    with pytest.raises(HelpError):
        help_lower_bound(catalog("regular-interval"), [0.5], [2.0])


@given(st.floats(1e-3, 1e3), st.floats(1.01, 1e3), st.floats(1e-3, 1e3), st.floats(1.01, 1e3))
def test_K_from_positive(A, rB, a, rb):
    K = _K_from(A, A * rB, a, a * rb)
    assert K > 0 and math.isfinite(K)
