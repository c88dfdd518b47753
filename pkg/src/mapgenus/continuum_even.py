"""Even-valence continuum machinery: the planar generating function and its
higher Catalan coefficients, the hodograph solution of the leading-order
transport equation, the jet-form hierarchy, the integrable continuum string
equations, and the solver producing every higher-genus two-leg generating
function z_g as a rational function of z0.

Orientation convention (pinned once, used everywhere): the canonical map
variable u satisfies

    z0 = 1 + c u z0^nu,        c = 2 nu binom(2 nu - 1, nu - 1),

so z0 has positive higher-Catalan coefficients and u = -t x^(nu-1)/(2 nu)
in terms of the physical coupling t of the lattice oracle.  In this
orientation the hodograph relation reads w = f0 - c u f0^nu and the leading
transport equation is df0/du = c f0^nu dw f0.  The fat-graph and lattice
oracles both pin this calibration; see the acceptance suite.

Self-similarity f_g(u, w) = w^(1-2g) z_g(u w^(nu-1)) makes every series in
this module a GradedSeries: each u-order carries a single slaved power of
w, so the two-variable continuum equations collapse to univariate exact
series identities with integer weight bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .combinatorics import (
    c_valence,
    d_coeff,
    higher_catalan,
    lattice_equation_exprs,
    multiplicities,
    partitions_of,
    strict_partitions_in_box,
)
from .errors import RejectedInput, VerificationFailure
from .exact_kernel import (
    GradedSeries,
    Poly,
    Q,
    RatFn,
    Series,
    series_to_ratfn,
)

# ---------------------------------------------------------------------------
# planar data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalanData:
    nu: int
    c: Fraction
    zetas: tuple[Fraction, ...]  # zetas[j-1] is the j-th higher Catalan number
    z0: Series


def catalan_data(nu: int, T: int) -> CatalanData:
    """Higher Catalan numbers and the planar series z0(u) = sum zeta_j c^j u^j.

    Both closed forms of c and of zeta_j must agree, and the functional
    equation z0 = 1 + c u z0^nu is asserted to hold identically to order T.
    """
    if nu < 1 or T < 1:
        raise RejectedInput("need nu >= 1 and T >= 1")
    c = Q(c_valence(nu))
    zetas = tuple(higher_catalan(nu, j) for j in range(1, T + 1))
    z0 = Series("u", [Q(1)] + [zetas[j - 1] * c ** j for j in range(1, T + 1)], T)
    res = functional_residual(z0, nu, c)
    if not res.is_zero():
        raise VerificationFailure("planar functional equation fails: %r" % res)
    return CatalanData(nu=nu, c=c, zetas=zetas, z0=z0)


def functional_residual(z0: Series, nu: int, c: Fraction) -> Series:
    """Residual of z0 - 1 - c u z0^nu (zero iff z0 is the planar series)."""
    u = Series.x(z0.var, z0.trunc)
    return z0 - 1 - c * u * z0 ** nu


def verify_string_functional(nu: int, T: int) -> dict:
    data = catalan_data(nu, T)
    res = functional_residual(data.z0, nu, data.c)
    if not res.is_zero():
        raise VerificationFailure("planar functional equation fails at nu=%d" % nu)
    return {"identity": "planar_functional_equation", "nu": nu, "order": T, "status": "pass"}


# ---------------------------------------------------------------------------
# hodograph solution and the leading transport equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HodographSolution:
    """f0(u, w) = w z0(u w^(nu-1)), implicitly defined by w = f0 - c u f0^nu."""

    nu: int
    c: Fraction
    z0: Series
    f0: GradedSeries


def hodograph_solution(nu: int, T: int) -> HodographSolution:
    data = catalan_data(nu, T)
    f0 = GradedSeries.from_series(data.z0, base2=2, step2=2 * (nu - 1))
    w = GradedSeries.const("u", 1, base2=2, step2=2 * (nu - 1), trunc=T)
    res = f0 - data.c * (f0 ** nu).xmul(1) - w
    if not res.is_zero():
        raise VerificationFailure("hodograph relation fails at nu=%d" % nu)
    return HodographSolution(nu=nu, c=data.c, z0=data.z0, f0=f0)


def verify_burgers(nu: int, T: int) -> dict:
    """The hodograph solution satisfies df0/du = (c/(nu+1)) dw(f0^(nu+1))."""
    sol = hodograph_solution(nu, T)
    res = sol.f0.dx() - Q(sol.c, nu + 1) * (sol.f0 ** (nu + 1)).dw().truncate(T - 1)
    if not res.is_zero():
        raise VerificationFailure("leading transport equation fails at nu=%d" % nu)
    # initial-data slope: du f0 at u=0 equals c w^nu
    slope = sol.f0.dx()
    if slope.coeff(0) != sol.c or slope.base2 != 2 * nu:
        raise VerificationFailure("characteristic speed on initial data is off")
    return {"identity": "leading_transport", "nu": nu, "order": T, "status": "pass"}


# ---------------------------------------------------------------------------
# jet expressions (differential polynomials in f, f_w, f_ww, ...)
# ---------------------------------------------------------------------------


class JetExpression:
    """Polynomial in the jet symbols f, f_w, f_ww, ... of a single unknown.

    Terms map (f_power, ((order, multiplicity), ...)) -> coefficient; all
    factorial normalizations are absorbed into the coefficients at build
    time.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for key, val in terms.items():
                val = Q(val)
                if val:
                    self.terms[key] = val

    @staticmethod
    def monomial(coeff, fpow: int, jets: dict[int, int]) -> "JetExpression":
        key = (fpow, tuple(sorted((j, r) for j, r in jets.items() if r)))
        return JetExpression({key: Q(coeff)})

    def __add__(self, other):
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, Q(0)) + val
        return JetExpression(out)

    def __mul__(self, scalar):
        return JetExpression({k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * (-1)

    def dw(self) -> "JetExpression":
        """Formal spatial derivative: f -> f_w, f_(j) -> f_(j+1), Leibniz."""
        out = JetExpression()
        for (fpow, jets), coeff in self.terms.items():
            jets_d = dict(jets)
            if fpow:
                bumped = dict(jets_d)
                bumped[1] = bumped.get(1, 0) + 1
                out = out + JetExpression.monomial(coeff * fpow, fpow - 1, bumped)
            for j, r in jets_d.items():
                bumped = dict(jets_d)
                bumped[j] = r - 1
                bumped[j + 1] = bumped.get(j + 1, 0) + 1
                out = out + JetExpression.monomial(coeff * r, fpow, bumped)
        return out

    def __eq__(self, other):
        return isinstance(other, JetExpression) and self.terms == other.terms

    def __repr__(self):
        bits = []
        for (fpow, jets), coeff in sorted(self.terms.items()):
            factors = []
            if fpow:
                factors.append("f^%d" % fpow)
            factors += ["f_w(%d)^%d" % (j, r) for j, r in jets]
            bits.append("%s %s" % (coeff, "*".join(factors) or "1"))
        return "JetExpression(%s)" % " + ".join(bits) if bits else "JetExpression(0)"


def toda_jet(nu: int, g: int) -> JetExpression:
    """Genus-g right-hand side of the continuum coupling-flow hierarchy:
    a sum over partitions of 2g+1 with at most nu+1 parts, with the
    staircase-box coefficients of the combinatorics module.

    The jet monomial for a partition lambda is f^(nu+1-len) prod_j
    (dw^j f / j!)^(r_j) with coefficient d_lambda and no repeated-part
    division: the box sum uses classical monomial symmetric values, and the
    finite-size oracle pins this pairing exactly (a repeated-part division
    would fail it at every nu >= 3)."""
    if g < 0:
        raise RejectedInput("genus must be >= 0")
    out = JetExpression()
    for lam in partitions_of(2 * g + 1, max_len=nu + 1):
        mult = multiplicities(lam)
        denom = 1
        for j, r in mult.items():
            denom *= factorial(j) ** r
        coeff = d_coeff(nu, lam, "toda") / denom
        out = out + JetExpression.monomial(coeff, nu + 1 - len(lam), mult)
    return out


# -- spatially exact antiderivative of the string-side jets ------------------


class SlotJetExpression:
    """Jet polynomial with per-slot scale weights, closed under a slot
    derivation that multiplies by the slot weight while raising the order.

    Terms are (coefficient, weights, orders): `orders[i]` is the derivative
    order carried by slot i and `weights[i]` its numeric scale; the plain
    jet content of a term is prod_i f_(orders[i]) with zero orders meaning
    bare f factors.
    """

    def __init__(self, terms):
        self.terms = [(Q(c), tuple(x), tuple(o)) for (c, x, o) in terms if c]

    def dw(self) -> "SlotJetExpression":
        out = []
        for coeff, xs, orders in self.terms:
            for i, x in enumerate(xs):
                if x == 0:
                    continue
                bumped = list(orders)
                bumped[i] += 1
                out.append((coeff * x, xs, tuple(bumped)))
        return SlotJetExpression(out)

    def as_jet(self) -> JetExpression:
        out = JetExpression()
        for coeff, _xs, orders in self.terms:
            fpow = sum(1 for o in orders if o == 0)
            jets: dict[int, int] = {}
            for o in orders:
                if o:
                    jets[o] = jets.get(o, 0) + 1
            out = out + JetExpression.monomial(coeff, fpow, jets)
        return out


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, slots - 1):
            yield (head,) + rest


def string_jets(nu: int, g: int) -> tuple[JetExpression, SlotJetExpression]:
    """The genus-g string-side jet polynomial and its spatial antiderivative.

    The antiderivative runs over slot compositions of 2g (partitions padded
    with zeros to nu slots), weighted per slot by the staircase separations,
    with 0**0 = 1 and prefactor 2/(2g+1); its slot derivation must reproduce
    the jet polynomial exactly (checked by verify_string_antiderivative).
    """
    if g < 1:
        raise RejectedInput("string jets start at genus 1")
    F = JetExpression()
    for lam in partitions_of(2 * g + 1, max_len=nu):
        mult = multiplicities(lam)
        denom = 1
        for j, r in mult.items():
            denom *= factorial(j) ** r
        coeff = d_coeff(nu, lam, "string") / denom
        F = F + JetExpression.monomial(coeff, nu - len(lam), mult)
    # antiderivative: slots weighted by mu - eta over the staircase box
    eta = tuple(2 * nu - 1 - 2 * i for i in range(nu))
    lower = tuple(range(nu, 0, -1))
    upper = tuple(range(2 * nu - 1, nu - 1, -1))
    pref = Q(2, 2 * g + 1)
    terms = []
    for mu in strict_partitions_in_box(lower, upper):
        xs = tuple(Q(mu[i] - eta[i]) for i in range(nu))
        for comp in _compositions(2 * g, nu):
            coeff = pref
            ok = True
            for x, ci in zip(xs, comp):
                if ci:
                    if x == 0:
                        ok = False
                        break
                    coeff *= x ** ci / factorial(ci)
            if ok:
                terms.append((coeff, xs, comp))
    return F, SlotJetExpression(terms)


def verify_string_antiderivative(nu: int, g: int) -> dict:
    """dw of the antiderivative equals the string-side jet polynomial."""
    F, Fhat = string_jets(nu, g)
    if Fhat.dw().as_jet() != F:
        raise VerificationFailure(
            "string antiderivative fails at nu=%d, g=%d" % (nu, g)
        )
    return {"identity": "string_antiderivative", "nu": nu, "g": g, "status": "pass"}


# ---------------------------------------------------------------------------
# the lattice -> continuum expansion engine
# ---------------------------------------------------------------------------
#
# Substituting the two-scale expansion b2_{n+k} = sum_{h,j} n^(-2h-j)
# (k^j / j!) dw^j f_h(u, w) into a lattice polynomial and collecting powers
# of 1/n turns each lattice equation into a tower of exact GradedSeries
# identities.  An "eps-poly" below is a list indexed by the power of 1/n.


def _eps_mul(a, b, N):
    out = [None] * (N + 1)
    for i, x in enumerate(a):
        if x is None:
            continue
        for j, y in enumerate(b):
            if y is None or i + j > N:
                continue
            cur = out[i + j]
            term = x * y
            out[i + j] = term if cur is None else cur + term
    return out


def _eps_scale(a, s):
    return [None if x is None else x * s for x in a]


def _eps_add(a, b, N):
    out = [None] * (N + 1)
    for i in range(N + 1):
        x = a[i] if i < len(a) else None
        y = b[i] if i < len(b) else None
        if x is None:
            out[i] = y
        elif y is None:
            out[i] = x
        else:
            out[i] = x + y
    return out


class JetFamily:
    """Precomputed spatial derivatives of the genus family f_0 .. f_gmax."""

    def __init__(self, nu: int, z_series: list[Series], j_max: int):
        self.nu = nu
        self.step2 = 2 * (nu - 1)
        self.derivs = []
        for h, zs in enumerate(z_series):
            f_h = GradedSeries.from_series(zs, base2=2 - 4 * h, step2=self.step2)
            row = [f_h]
            for _ in range(j_max):
                row.append(row[-1].dw())
            self.derivs.append(row)
        self.j_max = j_max
        self.trunc = z_series[0].trunc if z_series else 0

    def gmax(self) -> int:
        return len(self.derivs) - 1

    def f(self, h: int) -> GradedSeries:
        return self.derivs[h][0]

    def site_factor(self, kappa: int, N: int):
        """eps-poly of b2 at relative offset kappa: entry d collects every
        (h, j) with 2h + j = d, weighted kappa^j / j!."""
        out = [None] * (N + 1)
        for d in range(N + 1):
            acc = None
            for h in range(min(d // 2, self.gmax()) + 1):
                j = d - 2 * h
                if j > self.j_max:
                    continue
                term = self.derivs[h][j] * Q(kappa ** j, factorial(j))
                acc = term if acc is None else acc + term
            out[d] = acc
        return out

    def jet_symbol(self, j: int, N: int):
        """eps-poly of the jet symbol dw^j f across the genus family."""
        out = [None] * (N + 1)
        for h in range(min(N // 2, self.gmax()) + 1):
            if j <= self.j_max:
                out[2 * h] = self.derivs[h][j]
        return out


def expand_lattice_polynomial(expr, family: JetFamily, nu: int, N: int):
    """eps-poly of a lattice polynomial under the two-scale substitution,
    with the physical coupling replaced by t = -2 nu u."""
    factors_cache: dict[int, list] = {}

    def site(kappa):
        if kappa not in factors_cache:
            factors_cache[kappa] = family.site_factor(kappa, N)
        return factors_cache[kappa]

    total = [None] * (N + 1)
    for (t_deg, b_off, a_off), coeff in expr.terms.items():
        if a_off:
            raise RejectedInput("even-valence expansion does not carry a[] offsets")
        eps = [None] * (N + 1)
        eps[0] = GradedSeries.const("u", coeff, 0, family.step2, family.trunc)
        for kappa in b_off:
            eps = _eps_mul(eps, site(kappa), N)
        if t_deg:
            scale = Q(-2 * nu) ** t_deg
            eps = [None if x is None else (x * scale).xmul(t_deg) for x in eps]
        total = _eps_add(total, eps, N)
    return total


def substitute_jets(jet: JetExpression, family: JetFamily, N: int):
    """eps-poly of a jet expression evaluated on the genus family."""
    total = [None] * (N + 1)
    for (fpow, jets), coeff in jet.terms.items():
        eps = [None] * (N + 1)
        eps[0] = GradedSeries.const("u", coeff, 0, family.step2, family.trunc)
        for _ in range(fpow):
            eps = _eps_mul(eps, family.jet_symbol(0, N), N)
        for j, r in jets:
            sym = family.jet_symbol(j, N)
            for _ in range(r):
                eps = _eps_mul(eps, sym, N)
        total = _eps_add(total, eps, N)
    return total


# ---------------------------------------------------------------------------
# the genus table for the two-leg generating functions z_g
# ---------------------------------------------------------------------------


@dataclass
class ZEntry:
    g: int
    series: Series
    ratfn: RatFn
    laurent: tuple[Fraction, ...]  # z_g/z0 coefficients by pole order of the base


class ZTable:
    """Sequential store of z_g data for one valence; g = 0 is the planar
    series itself (identity rational function)."""

    def __init__(self, nu: int, T: int):
        self.nu = nu
        self.T = T
        data = catalan_data(nu, T)
        self.c = data.c
        self.zetas = data.zetas
        self.base = Poly([nu, -(nu - 1)])
        self.entries: dict[int, ZEntry] = {
            0: ZEntry(0, data.z0, RatFn.from_poly(Poly.x(), var="z0"), (Q(1),))
        }

    def series(self, g: int) -> Series:
        return self.entries[g].series

    def ratfn(self, g: int) -> RatFn:
        return self.entries[g].ratfn

    def laurent(self, g: int) -> tuple[Fraction, ...]:
        return self.entries[g].laurent

    def z_list(self, g_max: int) -> list[Series]:
        return [self.series(g) for g in range(g_max + 1)]

    def family(self, g_max: int, j_max: int) -> JetFamily:
        return JetFamily(self.nu, self.z_list(g_max), j_max)

    def top_coefficient(self, g: int) -> Fraction:
        return self.entries[g].laurent[5 * g - 1]


def _poly_compose(p: Poly, q: Poly) -> Poly:
    acc = Poly.zero()
    for a in reversed(p.c):
        acc = acc * q + Poly.const(a)
    return acc


def laurent_at_base(num: Poly, nu: int, pole: int) -> tuple[Fraction, ...]:
    """Coefficients of num/ (nu-(nu-1)z)^pole by pole order 0..pole, writing
    z = (nu - D)/(nu - 1) and reading off powers of D."""
    sub = Poly([Q(nu, nu - 1), Q(-1, nu - 1)])  # z as a polynomial in D
    in_d = _poly_compose(num, sub)
    if in_d.degree > pole:
        raise RejectedInput("numerator degree exceeds pole order")
    return tuple(in_d.coeff(pole - p) for p in range(pole + 1))


def solve_zg(nu: int, g: int, ztable: ZTable) -> ZEntry:
    """Determine z_g from the continuum difference-string equation.

    The order-(2g+1) collection of the expanded lattice string equation is
    linear in f_g with coefficient dw[(1 - nu c u f0^(nu-1)) f_g]; every
    other term involves only lower-genus data.  The remainder is spatially
    exact (no w^-1 monomial ever appears, asserted by integrate_w), the
    constant of integration vanishes (enforced by the minimal pole order of
    the reconstructed rational form), and evaluation at w = 1 plus rational
    reconstruction in z0 yields the closed form with denominator
    (nu - (nu-1) z0)^(5g-1) and numerator divisible by z0 (z0 - 1).
    """
    if g < 1:
        raise RejectedInput("solve_zg starts at genus 1")
    if nu < 2:
        raise RejectedInput("closed forms need nu >= 2 (nu = 1 has no higher genus)")
    for k in range(1, g):
        if k not in ztable.entries:
            raise RejectedInput("lower-genus entries missing; build sequentially")
    T = ztable.T
    N = 2 * g + 1
    family = ztable.family(g - 1, j_max=N)
    expr = lattice_equation_exprs(nu, "string")
    eps = expand_lattice_polynomial(expr, family, nu, N)
    R = eps[N]
    if R is None:
        raise VerificationFailure("empty order-%d collection" % N)
    f0 = family.f(0)
    denom = (
        GradedSeries.const("u", 1, 0, family.step2, T)
        - Q(nu) * ztable.c * (f0 ** (nu - 1)).xmul(1)
    )
    try:
        f_g = (-R).integrate_w() / denom
    except RejectedInput as exc:
        raise VerificationFailure("spatial exactness fails at genus %d: %s" % (g, exc))
    if f_g.base2 != 2 - 4 * g:
        raise VerificationFailure("self-similar weight of f_%d is off" % g)
    z_series = f_g.at_w1()
    ratfn = series_to_ratfn(
        z_series,
        ztable.series(0),
        ztable.base,
        max_num_deg=3 * g,
        max_pole_ord=5 * g - 1,
        var="z0",
    )
    if ratfn.den_pow != 5 * g - 1:
        raise VerificationFailure(
            "pole order %d at genus %d, expected %d" % (ratfn.den_pow, g, 5 * g - 1)
        )
    z_poly = Poly.x()
    if not (z_poly.divides(ratfn.num) and Poly([-1, 1]).divides(ratfn.num)):
        raise VerificationFailure("numerator of z_%d lacks the z0 (z0-1) factor" % g)
    # Laurent data of z_g / z0 about the base zero; the monic denominator
    # differs from the base power by (-(nu-1))^pole
    reduced = (ratfn.num // z_poly) * Q(-(nu - 1)) ** (5 * g - 1)
    laurent = laurent_at_base(reduced, nu, 5 * g - 1)
    for p in range(2 * g):
        if laurent[p] != 0:
            raise VerificationFailure(
                "minimal pole order of z_%d/%s is %d < %d"
                % (g, "z0", p, 2 * g)
            )
    entry = ZEntry(g, z_series, ratfn, laurent)
    ztable.entries[g] = entry
    return entry


def build_ztable(nu: int, g_max: int, T: int | None = None) -> ZTable:
    if T is None:
        T = max(3 * g_max + 12, 16)
    table = ZTable(nu, T)
    for g in range(1, g_max + 1):
        solve_zg(nu, g, table)
    return table


def verify_continuum_toda(nu: int, g: int, ztable: ZTable) -> dict:
    """The order-n^(-2g) collection of the continuum coupling-flow hierarchy
    holds on the solved genus family: du f_g equals the collected jet terms."""
    N = 2 * g
    family = ztable.family(g, j_max=2 * g + 1)
    rhs = [None] * (N + 1)
    for h in range(g + 1):
        sub = substitute_jets(toda_jet(nu, h), family, N - 2 * h)
        shifted = [None] * (N + 1)
        for d, val in enumerate(sub):
            if val is not None:
                shifted[d + 2 * h] = val
        rhs = _eps_add(rhs, shifted, N)
    lhs = family.f(g).dx()
    residual = lhs - rhs[N].truncate(lhs.trunc)
    if not residual.is_zero():
        raise VerificationFailure("continuum hierarchy fails at nu=%d, g=%d" % (nu, g))
    return {"identity": "continuum_hierarchy", "nu": nu, "g": g, "status": "pass"}
