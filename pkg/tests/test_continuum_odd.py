import pytest

from mapgenus.combinatorics import trinomial
from mapgenus.continuum_odd import (
    TriPoly,
    odd_coeff_polys,
    solve_leading_odd,
    trivalent_checks,
    trivalent_closed_forms,
    trivalent_z0,
    verify_leading_residuals,
    verify_odd_identities,
)
from mapgenus.errors import NoMatchingExists
from mapgenus.exact_kernel import Q
from mapgenus.fatgraph_oracle import kappa_counts


def test_coefficient_polys_trivalent():
    P = odd_coeff_polys(1)
    assert P["Psi1"] == TriPoly.monomial(3, f=2) + TriPoly.monomial(3, h=2, f=1)
    assert P["B11"] == TriPoly.monomial(2, h=1, f=1)
    assert P["B12"] == TriPoly.monomial(2, f=1) + TriPoly.monomial(1, h=2)
    assert P["A12"] == TriPoly.monomial(6, s=1)
    assert P["A11"] == TriPoly.monomial(1) + TriPoly.monomial(6, s=1, h=1)
    assert P["Psi2"] == TriPoly.monomial(3, h=1, f=2)


def test_odd_identities():
    for nu in (1, 2, 3):
        assert verify_odd_identities(nu)["status"] == "pass"


def test_pure_flux_reduction():
    # with the odd field switched off the first flux is a single power term
    for nu in (1, 2, 3):
        P = odd_coeff_polys(nu)
        pure = {
            (s, h, f): v for (s, h, f), v in P["Psi1"].terms.items() if h == 0
        }
        assert pure == {
            (0, 0, nu + 1): Q(trinomial(2 * nu + 1, 0, nu, nu + 1))
        }


def test_solve_leading_trivalent_first_order():
    pair = solve_leading_odd(1, 6)
    # h0 = -6 s w + O(s^3), f0 = w + O(s^2)
    assert pair.h0.coeff(1) == -6 and pair.h0.base2 == 1
    assert pair.f0.coeff(0) == 1 and pair.f0.coeff(1) == 0
    assert pair.h0.coeff(0) == 0 and pair.h0.coeff(2) == 0


def test_leading_residuals_to_order_ten():
    for nu in (1, 2):
        pair = solve_leading_odd(nu, 10)
        assert verify_leading_residuals(pair)["status"] == "pass"


def test_trivalent_z0_series():
    z = trivalent_z0(4)
    assert z.coeff(0) == 1 and z.coeff(1) == 36
    # functional equation residual
    from mapgenus.exact_kernel import Series

    tau = Series.x("tau", 4)
    assert (z * z - 72 * tau * z ** 3 - 1).is_zero()


def test_trivalent_golden_series_leading_terms():
    forms = trivalent_closed_forms(4)
    assert forms[0].coeff(1) == 6
    assert forms[1].coeff(1) == Q(3, 2)
    assert forms[0].coeff(0) == 0 and forms[1].coeff(0) == 0 and forms[2].coeff(0) == 0


def test_trivalent_checks_against_matchings():
    report = trivalent_checks(T=4, m_max=4)
    assert report["status"] == "pass"
    pairs = {(c["g"], c["m"]) for c in report["comparisons"]}
    assert (0, 2) in pairs and (1, 4) in pairs and (2, 4) in pairs


def test_genus_parity_no_matching_on_odd_vertices():
    with pytest.raises(NoMatchingExists):
        kappa_counts(3, 3)


def test_mu_zero_term_is_forced():
    """Dropping the flat-step-free term of the second transport coefficient
    breaks the conservation-form identity."""
    P = odd_coeff_polys(1)
    broken = P["B12"] - TriPoly.monomial(2, f=1)
    assert P["Psi1"].d_f() != 3 * broken
    assert P["Psi1"].d_f() == 3 * P["B12"]
