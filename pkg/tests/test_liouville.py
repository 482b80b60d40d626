import math

import numpy as np
import pytest

from weylhelp import coefficients as C
from weylhelp.catalog import catalog
from weylhelp.liouville import (LiouvilleError, SignChangeError, l_from_tail, solve_c0, transform,
                                verify_m_invariance)
from weylhelp.weyl import HalfLineProblem


def test_c0_constant_potential_is_cosh():
    c = solve_c0(C.constant())
    xs = np.array([0.0, 0.5, 2.0, 10.0, 30.0])
    assert np.allclose(c(xs), np.cosh(xs), rtol=1e-7)
    assert not c.tail.exact


def test_c0_indicator_linear_tail(chi):
    c = solve_c0(chi)
    assert c.tail.kind == "linear" and c.tail.exact
    # c = cosh on [0,1], continued by its tangent line
    assert c.tail.A == pytest.approx(math.cosh(1.0), rel=1e-8)
    assert c.tail.B == pytest.approx(math.sinh(1.0), rel=1e-8)
    assert c(5.0) == pytest.approx(math.cosh(1) + 4 * math.sinh(1), rel=1e-8)


def test_c0_inverse_square_l1_tail():
    q = catalog("inverse-square-l1").q
    c = solve_c0(q)
    assert c.tail.kind == "power-pair" and c.tail.exact
    assert c.tail.l == pytest.approx(1.0)
    # cos on [0, pi/4] hands over value 1/sqrt(2) with slope -1/sqrt(2)
    assert c.tail.A == pytest.approx(1 / math.sqrt(2), rel=1e-8)
    assert c.tail.B == pytest.approx(0.0, abs=1e-10)
    assert c.exponent == pytest.approx(-1.0)
    assert l_from_tail(q) == pytest.approx(1.0)


def test_l_from_tail(chi):
    assert l_from_tail(chi) == 0.0
    assert l_from_tail(C.constant()) is None


def test_sign_change_detected():
    q = C.piecewise([0.0, 3.0, math.inf], [-1.0, 0.0], signed=True)
    with pytest.raises(SignChangeError):
        solve_c0(q)


def test_transform_requires_unit_r(chi):
    with pytest.raises(LiouvilleError):
        transform(HalfLineProblem(C.constant(), C.power(1.0, 1.0), chi))


def test_identity_transform_for_zero_potential(hl):
    tr = transform(hl)
    assert tr.identity
    assert tr.problem is hl


def test_transform_chi_integrability(chi):
    tr = transform(HalfLineProblem(C.constant(), C.constant(), chi))
    # c0 grows linearly: not in L2, 1/c0 in L2
    assert not tr.c0_in_L2w
    assert tr.inv_c0_in_L2
    assert tr.B == pytest.approx(1.31303, rel=1e-4)


@pytest.mark.parametrize("q", [
    C.piecewise([0.0, 1.0, math.inf], [1.0, 0.0], signed=True),
    C.constant(),
], ids=["chi", "one"])
def test_m_invariance(q):
    rows = verify_m_invariance(HalfLineProblem(C.constant(), C.constant(), q), [1j, 2j])
    for row in rows:
        assert row.residual <= 1e-4
        assert row.ok


def test_m_invariance_power_weight(chi):
    rows = verify_m_invariance(HalfLineProblem(C.power(1.0, 1.0), C.constant(), chi), [1j])
    assert all(r.ok for r in rows)


def test_xi_table_monotone(chi):
    tr = transform(HalfLineProblem(C.constant(), C.constant(), chi))
    rows = tr.xi_table(60)
    xi = [r[1] for r in rows]
    W = [r[3] for r in rows]
    assert all(b >= a for a, b in zip(xi, xi[1:]))
    assert all(b >= a for a, b in zip(W, W[1:]))
    assert xi[-1] <= tr.B * (1 + 1e-9)
