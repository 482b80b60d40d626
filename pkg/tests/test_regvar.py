import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylhelp import coefficients as C
from weylhelp.coefficients import Distribution, MonotoneMap
from weylhelp.regvar import classify_variation, karamata_integral_check, positively_increasing


def numeric(f, label=""):
    return MonotoneMap.from_callable(f, label=label)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 3.5])
def test_numeric_power_index(a):
    v = classify_variation(numeric(lambda x: np.asarray(x) ** a), "infinity")
    assert v.kind == "regular" and v.source == "numeric"
    assert v.index == pytest.approx(a, abs=1e-6)


def test_numeric_power_index_at_zero():
    v = classify_variation(numeric(lambda x: np.asarray(x) ** 1.5), "zero")
    assert v.index == pytest.approx(1.5, abs=1e-6)


def test_slow_and_rapid():
    assert classify_variation(numeric(np.log1p), "infinity").kind == "slow"
    assert classify_variation(MonotoneMap.log1p(), "infinity").kind == "slow"
    assert classify_variation(MonotoneMap.exp(), "infinity").kind == "rapid"


def test_symbolic_distribution_index():
    g = Distribution(C.segments([(0, 1, 1.0, 0.0, 0.0), (1, math.inf, 1.0, 2.0, 1.0)])).as_map()
    v = classify_variation(g, "infinity")
    assert v.source == "symbolic" and v.index == pytest.approx(3.0)


def test_pi_ground_truth():
    assert positively_increasing(numeric(lambda x: np.asarray(x, dtype=float)), "infinity").verdict == "yes"
    assert positively_increasing(MonotoneMap.log1p(), "infinity").verdict == "no"
    W = Distribution(C.factorial_weight()).as_map()
    assert positively_increasing(W, "infinity").verdict == "no"


@settings(max_examples=15, deadline=None)
@given(a=st.floats(0.2, 3.0), k=st.floats(0.01, 100.0))
def test_pi_scale_invariant(a, k):
    g = numeric(lambda x: np.asarray(x, dtype=float) ** a)
    v1 = positively_increasing(g, "infinity")
    v2 = positively_increasing(g.scaled(k), "infinity")
    assert v1.verdict == v2.verdict == "yes"
    for t in v1.S:
        assert v2.S[t] == pytest.approx(v1.S[t], rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(a=st.floats(0.1, 4.0), p=st.floats(0.0, 2.0))
def test_regular_positive_index_is_pi(a, p):
    assert positively_increasing(MonotoneMap.power_log(1.0, a, p), "infinity").verdict == "yes"


def test_karamata_converges():
    rep = karamata_integral_check(C.power(1.0, 1.0), gamma=1.0, alpha=1.0)
    assert rep.status == "converged"
    rep = karamata_integral_check(C.power(1.0, 1.0, 1.0), gamma=3.0, alpha=1.0, decades=(0.0, 8.0))
    assert rep.status == "converged" and rep.final_decade_max_dev <= 0.02


def test_karamata_divergent_branch():
    f = C.segments([(0, 1, 1.0, 0.0, 0.0), (1, math.inf, 1.0, -1.0, 0.0)])
    assert karamata_integral_check(f, gamma=1.0, alpha=-1.0).status == "diverges"
