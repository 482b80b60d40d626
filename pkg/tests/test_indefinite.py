import math

import pytest

from weylhelp import coefficients as C
from weylhelp.catalog import catalog
from weylhelp.indefinite import (STIELTJES_GRID, IndefiniteProblem, NonEvenError, SimilarityError, fp_wellposedness,
                                 lrg_equivalence_report, nonreal_spectrum_probe, similarity_check,
                                 similarity_coefficient_check, similarity_with_potential)
from weylhelp.weyl import HalfLineProblem, stieltjes_check


def well(c0: float) -> HalfLineProblem:
    q = C.piecewise([0.0, 1.0, math.inf], [-c0, 0.0], signed=True)
    return HalfLineProblem(C.constant(), C.constant(), q, name=f"well-{c0:g}")


def test_similarity_hl(hl):
    v = similarity_check(hl)
    assert v.similar == "yes"
    assert v.regular_at_inf == v.regular_at_0 == "regular"
    assert not v.disagreement
    assert v.to_dict()["similar"] == "yes"


@pytest.mark.parametrize("name", ["A_l-log", "factorial-weight"])
def test_singular_critical_point_zero(name):
    v = similarity_check(catalog(name))
    assert v.similar == "no"
    assert v.regular_at_0 == "singular"
    assert not v.disagreement


@pytest.mark.parametrize("name", ["hardy-littlewood", "r-2x", "A_l-log", "factorial-weight", "w-integrable",
                                  "r-inverse-tail"])
def test_coefficient_route_agrees_with_m_route(name):
    p = catalog(name)
    sv = similarity_check(p, resolve=False)
    cv = similarity_coefficient_check(p)
    if sv.similar != "inconclusive" and cv.similar != "inconclusive":
        assert sv.similar == cv.similar


def test_inverse_square_classification():
    v0 = similarity_with_potential(catalog("inverse-square-l0"))
    v1 = similarity_with_potential(catalog("inverse-square-l1"))
    assert v0.similar == "yes" and v0.l == 0.0
    assert v1.similar == "no" and v1.l == pytest.approx(1.0)
    # l = 1: c(x,0) ~ 1/x is in L2
    assert v1.c0_in_L2w


def test_potential_route_through_similarity_check():
    v = similarity_check(catalog("potential-chi"))
    assert v.similar == "yes"


def test_probe_hl_has_no_zeros(hl):
    for c in (1.0, -1.0):
        rep = nonreal_spectrum_probe(hl, c=c, n=12)
        assert rep.zeros == ()


def test_engineered_well_has_nonreal_eigenvalue():
    # double the depth until the class (S) test fails and the default box catches a zero
    c0, found = 0.25, None
    while c0 <= 8.0:
        p = well(c0)
        if not stieltjes_check(p, STIELTJES_GRID).passed:
            rep = nonreal_spectrum_probe(p)
            if rep.zeros:
                found = (c0, rep)
                break
        c0 *= 2.0
    assert found is not None
    c0, rep = found
    assert c0 == 1.0
    z, resid = rep.zeros[0]
    assert abs(z.real) < 1e-6
    assert z.imag == pytest.approx(0.6430, abs=1e-3)
    assert resid <= rep.tol


def test_shallow_well_fails_class_s():
    assert not stieltjes_check(well(0.25), STIELTJES_GRID).passed
    assert stieltjes_check(HalfLineProblem(C.constant(), C.constant()), STIELTJES_GRID).passed


@pytest.mark.parametrize("name", ["hardy-littlewood", "A_l-log", "r-2x"])
def test_lrg_chain_consistent(name):
    rep = lrg_equivalence_report(catalog(name))
    assert rep.agree
    assert rep.help_swapped is not None


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_fp_power_weights(alpha):
    p = HalfLineProblem(C.power(1.0, alpha), C.constant())
    assert fp_wellposedness(p).well_posed == "yes"


def test_fp_identity_weight_with_compact_potential(chi):
    p = HalfLineProblem(C.power(1.0, 1.0), C.constant(), chi)
    assert fp_wellposedness(p).well_posed == "yes"


def test_fp_factorial_undetermined():
    assert fp_wellposedness(catalog("factorial-weight")).well_posed == "undetermined"


def test_non_even_rejected(hl):
    ip = IndefiniteProblem(hl, even=False)
    for f in (similarity_check, similarity_coefficient_check, fp_wellposedness, lrg_equivalence_report):
        with pytest.raises(NonEvenError):
            f(ip)


def test_dirichlet_rejected():
    with pytest.raises(SimilarityError):
        IndefiniteProblem(HalfLineProblem(C.constant(), C.constant(), boundary="dirichlet"))
