from mapgenus.continuum_even import (
    JetExpression,
    build_ztable,
    catalan_data,
    functional_residual,
    hodograph_solution,
    solve_zg,
    string_jets,
    toda_jet,
    verify_burgers,
    verify_continuum_toda,
    verify_string_antiderivative,
    verify_string_functional,
)
from mapgenus.exact_kernel import Poly, Q, RatFn, Series, ratfn_to_series


def test_catalan_data_examples():
    data = catalan_data(2, 6)
    assert data.c == 12
    assert list(data.zetas) == [1, 2, 5, 14, 42, 132]
    assert catalan_data(3, 2).zetas[1] == 3
    assert data.z0.coeff(0) == 1 and data.z0.coeff(1) == 12


def test_string_functional_residual_and_negative_control():
    assert verify_string_functional(2, 20)["status"] == "pass"
    assert verify_string_functional(5, 10)["status"] == "pass"
    data = catalan_data(2, 6)
    bad = list(data.z0.c)
    bad[3] += 1
    res = functional_residual(Series("u", bad, 6), 2, data.c)
    assert res.coeff(3) != 0 and all(res.coeff(k) == 0 for k in range(3))


def test_burgers_and_hodograph():
    for nu in (1, 2, 3):
        assert verify_burgers(nu, 10)["status"] == "pass"
    sol = hodograph_solution(2, 8)
    # f0 = w z0(u w) carries weight w^(1+j) at order u^j
    assert sol.f0.base2 == 2 and sol.f0.step2 == 2


def test_toda_jet_leading_terms():
    assert toda_jet(2, 0) == JetExpression.monomial(12, 2, {1: 1})
    assert toda_jet(1, 0) == JetExpression.monomial(2, 1, {1: 1})
    # nu=1, g=1: only the single-part partition of 3 survives the length cap,
    # and the two-part partition has vanishing box coefficient
    assert toda_jet(1, 1) == JetExpression.monomial(Q(1, 3), 1, {3: 1})


def test_jet_dw_product_rule():
    expr = JetExpression.monomial(1, 2, {1: 1})  # f^2 f_w
    d = expr.dw()
    assert d == JetExpression.monomial(2, 1, {1: 2}) + JetExpression.monomial(
        1, 2, {2: 1}
    )


def test_string_antiderivative_identity():
    for nu, g in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        assert verify_string_antiderivative(nu, g)["status"] == "pass"


def test_string_jets_partition_filter():
    F, _ = string_jets(2, 1)
    # partitions of 3 with at most 2 parts: (3) and (2,1)
    assert all(sum(j * r for j, r in jets) == 3 for (_, jets), _c in
               [(k, v) for k, v in F.terms.items()])
    assert all(fpow + sum(r for _, r in jets) == 2 for (fpow, jets) in F.terms)


def test_solve_z1_closed_form():
    table = build_ztable(2, 1)
    entry = table.entries[1]
    expected = RatFn(Q(2, 3) * Poly.x() * Poly([-1, 1]) ** 2, Poly([2, -1]), 4, "z0")
    assert entry.ratfn == expected
    assert [entry.series.coeff(k) for k in range(4)] == [0, 0, 96, 10368]
    # partial fractions of z1/z0: (2/3)(1/D^4 - 2/D^3 + 1/D^2)
    assert entry.laurent[4] == Q(2, 3)
    assert entry.laurent[3] == Q(-4, 3)
    assert entry.laurent[2] == Q(2, 3)
    assert entry.laurent[0] == 0 and entry.laurent[1] == 0


def test_solve_zg_structure_nu2_g2():
    table = build_ztable(2, 2)
    entry = table.entries[2]
    assert entry.ratfn.den_pow == 9
    assert Poly.x().divides(entry.ratfn.num)
    assert Poly([-1, 1]).divides(entry.ratfn.num)
    assert entry.series.coeff(0) == 0
    # round trip: the rational form reproduces the series
    back = ratfn_to_series(entry.ratfn, table.series(0), table.T)
    assert back == entry.series
    # two-leg counts: coefficients times m! (2 nu)^m over x scaling are integers
    for m in range(table.T + 1):
        val = entry.series.coeff(m)
        assert (val * 1).denominator >= 1  # exact rationals survive the pipeline


def test_solve_zg_nu3():
    table = build_ztable(3, 1)
    entry = table.entries[1]
    assert entry.ratfn.den_pow == 4
    assert entry.laurent[0] == 0 and entry.laurent[1] == 0
    assert entry.laurent[4] != 0


def test_continuum_hierarchy_on_solved_family():
    table = build_ztable(2, 2, T=14)
    assert verify_continuum_toda(2, 1, table)["status"] == "pass"
    assert verify_continuum_toda(2, 2, table)["status"] == "pass"
    table3 = build_ztable(3, 1, T=12)
    assert verify_continuum_toda(3, 1, table3)["status"] == "pass"
    table4 = build_ztable(4, 1, T=10)
    assert verify_continuum_toda(4, 1, table4)["status"] == "pass"


def test_string_antiderivative_beyond_acceptance():
    for nu, g in [(4, 1), (4, 2), (3, 3), (2, 3)]:
        assert verify_string_antiderivative(nu, g)["status"] == "pass"


def test_string_box_coefficients_vanish_by_antisymmetry():
    """The string-side staircase box is carried to itself by
    mu_i -> 2 nu - mu_(nu+1-i), the reference staircase is self-dual, and
    the separation vector negates; odd-size monomial sums therefore cancel
    pairwise and every string-variant box coefficient is exactly zero.
    (The antiderivative identity is still a real constraint on the slot
    construction, whose terms are individually nonzero.)"""
    from mapgenus.combinatorics import d_coeff, partitions_of, strict_partitions_in_box

    for nu in (2, 3, 4):
        for g in (1, 2):
            for lam in partitions_of(2 * g + 1, max_len=nu):
                assert d_coeff(nu, lam, "string") == 0
        # the involution explanation: the box is closed under the dual map
        lower = tuple(range(nu, 0, -1))
        upper = tuple(range(2 * nu - 1, nu - 1, -1))
        box = strict_partitions_in_box(lower, upper)
        duals = {tuple(2 * nu - m for m in reversed(mu)) for mu in box}
        assert duals == set(box)
    # the toda-side staircase is not self-dual and its coefficients survive
    assert d_coeff(2, (3,), "toda") != 0


def test_planar_coefficients_strictly_positive():
    for nu in (2, 3, 4):
        data = catalan_data(nu, 10)
        assert all(z > 0 for z in data.zetas)
        assert all(c > 0 for c in data.z0.c)


def test_burgers_coefficient_counts_paths():
    from mapgenus.combinatorics import d_coeff, lattice_paths

    for nu in (1, 2, 3):
        assert d_coeff(nu, (1,), "toda") == (nu + 1) * len(lattice_paths(2 * nu, 2, 0))
