import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylhelp import coefficients as C
from weylhelp.coefficients import Distribution, MonotoneMap, Piece, ProfileError, generalized_inverse

pos = st.floats(0.1, 10.0)
expo = st.floats(-0.9, 3.0)


def test_power_distribution_closed_form():
    D = Distribution(C.power(3.0, 2.0))
    assert D(2.0) == pytest.approx(8.0, rel=1e-12)
    assert D.inverse(8.0) == pytest.approx(2.0, rel=1e-10)


def test_piecewise_cumulative():
    D = Distribution(C.piecewise([0, 1, 3, math.inf], [2.0, 0.5, 1.0]))
    assert D(1.0) == pytest.approx(2.0)
    assert D(3.0) == pytest.approx(3.0)
    assert D(5.0) == pytest.approx(5.0)


def test_integrable_tail_total():
    D = Distribution(C.power(1.0, -2.0, shift=-1.0))  # (1+x)^-2
    assert D.bounded
    assert D.total == pytest.approx(1.0, rel=1e-10)


def test_factorial_weight_log_increments():
    D = Distribution(C.factorial_weight(6))
    for n in range(1, 6):
        a, b = math.factorial(2 * n), math.factorial(2 * n + 1)
        assert D(b) - D(a) == pytest.approx(math.log(2 * n + 1), rel=1e-9)


def test_table_profile_linear_interpolation():
    p = C.table([0, 1, 2], [1.0, 3.0, 3.0])
    assert p(0.5) == pytest.approx(2.0)
    assert Distribution(p)(2.0) == pytest.approx(2.0 + 3.0)


@pytest.mark.parametrize("bad", [
    {"family": "power-log"},
    {"family": "table", "points": [[0, 1]]},
    {"family": "named", "name": "nope"},
    {"family": "spline"},
    {"family": "power-log", "segments": [{"from": 0, "to": "inf", "c": "x"}]},
])
def test_profile_json_rejects(bad):
    with pytest.raises(ProfileError):
        C.profile_from_json(bad)


def test_negative_w_rejected():
    with pytest.raises(ProfileError):
        C.piecewise([0, 1], [-1.0])


def test_profile_json_round_trip():
    p = C.segments([(0, 1, 2.0, 0.5, 0.0), (1, math.inf, 2.0, 1.0, 1.0)])
    q = C.profile_from_json(json.loads(json.dumps(p.to_json())))
    assert q == p


@given(c=pos, a=expo, x=st.floats(0.01, 100.0))
def test_inverse_is_right_inverse(c, a, x):
    D = Distribution(C.power(c, a))
    assert D(D.inverse(D(x))) == pytest.approx(D(x), rel=1e-8)


@given(c=pos, a=st.floats(0.2, 3.0), y=st.floats(0.01, 1e4))
def test_generalized_inverse_power(c, a, y):
    g = MonotoneMap.power_log(c, a)
    x = generalized_inverse(g, y)
    assert float(g(x)) == pytest.approx(y, rel=1e-9)


def test_generalized_inverse_step():
    g = MonotoneMap.from_samples([0, 1, 1.0000001, 2], [0, 0, 1, 1])
    assert generalized_inverse(g, 0.5) == pytest.approx(1.00000005, abs=1e-8)


@settings(max_examples=40)
@given(vals=st.lists(st.floats(0.1, 10.0), min_size=1, max_size=6))
def test_distribution_monotone(vals):
    breaks = list(range(len(vals))) + [math.inf]
    D = Distribution(C.piecewise(breaks, vals))
    xs = np.linspace(0, len(vals) + 2, 25)
    assert np.all(np.diff(D(xs)) >= -1e-12)


def test_shift_inside_piece_rejected():
    with pytest.raises(ProfileError):
        Piece(0.0, 2.0, "powlog", 1.0, -1.0, 0.0, 1.0)
