import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylhelp import coefficients as C
from weylhelp.weyl import (DomainError, HalfLineProblem, integrate_path, limit_point_classify, m_dual_identity,
                           m_eval, problem_from_json, stieltjes_check, weyl_disks)

upper = st.tuples(st.floats(-20.0, 20.0), st.floats(0.05, 20.0)).map(lambda t: complex(*t))


def sqrt_oracle(lam):
    return (-lam) ** -0.5


def test_closed_form_half_line(hl):
    for lam in (1j, 2j, -1 + 1j, 10j, 0.01j):
        s = m_eval(hl, lam)
        assert abs(s.m / sqrt_oracle(lam) - 1) <= 1e-6
        assert abs(s.m - sqrt_oracle(lam)) <= s.enclosure + 1e-9 * abs(s.m)


def test_regular_interval_cotangent():
    p = HalfLineProblem(C.constant(b=1.0), C.constant(b=1.0))
    assert limit_point_classify(p) == "regular"
    for lam in (1j, 2 + 1j, -3 + 0.5j):
        k = cmath.sqrt(lam)
        assert m_eval(p, lam).m == pytest.approx(-1 / (k * cmath.tan(k)), rel=1e-8)


def test_negative_axis_real_and_positive(hl):
    s = m_eval(hl, -4.0)
    assert s.m.real == pytest.approx(0.5, rel=1e-6)
    assert abs(s.m.imag) < 1e-6


def test_positive_axis_rejected(hl):
    with pytest.raises(DomainError):
        m_eval(hl, 2.0)


def test_atomic_closed_form():
    p = HalfLineProblem(C.constant(), C.atomic(2.0))
    assert m_eval(p, 1j).m == pytest.approx(2.0 + 1j)


@settings(max_examples=25, deadline=None)
@given(lam=upper)
def test_herglotz_hl(lam):
    s = m_eval(HalfLineProblem(C.constant(), C.constant()), lam)
    assert s.m.imag > 0


@settings(max_examples=20, deadline=None)
@given(lam=upper)
def test_herglotz_power(lam):
    s = m_eval(HalfLineProblem(C.power(1.0, 0.5), C.power(2.0, 1.0)), lam)
    assert s.m.imag > 0


def test_wronskian_drift_small(r2x):
    xs = np.geomspace(0.01, 50.0, 30)
    for lam in (1j, 5 + 2j, -3 + 0.1j):
        pairs = integrate_path(r2x, lam, xs)
        assert max(p.wronskian_drift for p in pairs) <= 1e-8


def test_disks_nested_and_contain_exact(hl):
    lam = 1 + 1j
    disks = weyl_disks(hl, lam, [0.5, 1.0, 2.0, 4.0, 8.0])
    exact = sqrt_oracle(lam)
    for d0, d1 in zip(disks[:-1], disks[1:]):
        assert abs(d1.center - d0.center) + d1.radius <= d0.radius * (1 + 1e-9)
    assert all(d.contains(exact, 1e-9) for d in disks)


def random_table(rng, n=12):
    xs = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 1.0, n))])
    vs = rng.uniform(0.5, 2.0, xs.size)
    tail = [C.Piece(float(xs[-1]), math.inf, "powlog", float(vs[-1]))]
    return C.table(xs, vs, tail)


@pytest.mark.parametrize("seed", [1, 2])
def test_duality_random_tables(seed):
    rng = np.random.default_rng(seed)
    p = HalfLineProblem(random_table(rng), random_table(rng))
    for lam in (1j, 3 + 1j, -2 + 0.5j):
        d = m_dual_identity(p, lam)
        assert d.ok, (d.residual, d.bound)


def test_stieltjes_pass_and_fail(hl):
    assert stieltjes_check(hl, [-10.0, -1.0, -0.1]).passed
    well = HalfLineProblem(C.constant(), C.constant(), C.piecewise([0, 1, math.inf], [-1.0, 0.0], signed=True))
    assert not stieltjes_check(well, [-10.0, -1.0, -0.1]).passed


def test_problem_json_round_trip(r2x):
    assert problem_from_json(r2x.to_json()) == r2x


def test_lp_classification():
    assert limit_point_classify(HalfLineProblem(C.constant(), C.constant())) == "limit-point"
    assert limit_point_classify(HalfLineProblem(C.constant(b=1.0), C.power(1.0, -2.0, b=1.0, shift=1.0))) == "limit-point"


def test_path_through_singular_end_segment():
    p = HalfLineProblem(C.constant(b=1.0), C.power(1.0, -2.0, b=1.0, shift=1.0))
    pairs = integrate_path(p, 1j, [0.5, 0.75, 0.9, 0.99])
    assert [q.x for q in pairs] == pytest.approx([0.5, 0.75, 0.9, 0.99])
    assert max(q.wronskian_drift for q in pairs) <= 1e-8
