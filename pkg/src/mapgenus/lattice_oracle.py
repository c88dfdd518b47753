"""Ground-truth finite-n computations for even-valence deformed Gaussian
weights: exact moments, the three-term recurrence coefficients through the
moment-based (Chebyshev) algorithm, normalized Hankel-determinant tau
functions, and machine verification of the lattice equations they satisfy.

Moments are normalized by the undeformed Gaussian mass, so every entry is a
truncated series in the coupling t (bivariate in (t1, t) when the linear
deformation is switched on) with rational coefficients.  The normalization
drops out of every identity checked here, which are all ratio- or
log-difference-based.

A sign/normalization note that the verifications pin down exactly: with the
weight (1/g_s)(lambda^2/2 + t/(2 nu) lambda^(2 nu)), the coupling flow of
the recurrence coefficients is

    2 nu g_s db2_n/dt = (L^(2 nu))_{n,n-2} - (L^(2 nu))_{n+1,n-1},

i.e. the operator-power difference carries a 1/(2 nu) relative to the
difference-string equation; the finite-n tables here leave no freedom in
that factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .combinatorics import operator_power_entry
from .errors import DegenerateTable, RejectedInput, VerificationFailure
from .exact_kernel import Q, Series


# ---------------------------------------------------------------------------
# bivariate truncated series in (t1, t), truncation by total degree
# ---------------------------------------------------------------------------

class BiSeries:
    """Truncated bivariate series sum c[(r,k)] t1^r t^k with r+k <= trunc."""

    __slots__ = ("trunc", "d")

    def __init__(self, trunc: int, d=None):
        self.trunc = trunc
        self.d: dict[tuple[int, int], Fraction] = {}
        if d:
            for key, val in d.items():
                val = Q(val)
                if val and key[0] + key[1] <= trunc:
                    self.d[key] = val

    @staticmethod
    def const(q, trunc: int) -> "BiSeries":
        return BiSeries(trunc, {(0, 0): Q(q)})

    @staticmethod
    def var_t(trunc: int) -> "BiSeries":
        return BiSeries(trunc, {(0, 1): Q(1)})

    def coeff(self, r: int, k: int) -> Fraction:
        return self.d.get((r, k), Q(0))

    def constant(self) -> Fraction:
        return self.coeff(0, 0)

    def is_zero(self) -> bool:
        return not self.d

    def _bin(self, other, sign) -> "BiSeries":
        if isinstance(other, (int, Fraction)):
            other = BiSeries.const(other, self.trunc)
        T = min(self.trunc, other.trunc)
        out: dict = {}
        for key, val in self.d.items():
            if key[0] + key[1] <= T:
                out[key] = out.get(key, Q(0)) + val
        for key, val in other.d.items():
            if key[0] + key[1] <= T:
                out[key] = out.get(key, Q(0)) + sign * val
        return BiSeries(T, out)

    def __add__(self, other):
        return self._bin(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._bin(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return BiSeries(self.trunc, {k: -v for k, v in self.d.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BiSeries(self.trunc, {k: v * other for k, v in self.d.items()})
        T = min(self.trunc, other.trunc)
        out: dict = {}
        for (r1, k1), v1 in self.d.items():
            for (r2, k2), v2 in other.d.items():
                r, k = r1 + r2, k1 + k2
                if r + k <= T:
                    key = (r, k)
                    out[key] = out.get(key, Q(0)) + v1 * v2
        return BiSeries(T, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise RejectedInput("division by zero scalar")
            return self * (Q(1) / Q(other))
        c0 = other.constant()
        if c0 == 0:
            raise RejectedInput("bivariate division by a non-unit")
        T = min(self.trunc, other.trunc)
        rest = BiSeries(T, {k: -v / c0 for k, v in other.d.items() if k != (0, 0)})
        inv = BiSeries.const(Q(1) / c0, T)
        power = BiSeries.const(Q(1), T)
        for _ in range(T):
            power = power * rest
            if power.is_zero():
                break
            inv = inv + power * (Q(1) / c0)
        return self * inv

    def log(self) -> "BiSeries":
        if self.constant() != 1:
            raise RejectedInput("bivariate log requires constant term 1")
        x = self - 1
        out = BiSeries(self.trunc, {})
        power = BiSeries.const(Q(1), self.trunc)
        for k in range(1, self.trunc + 1):
            power = power * x
            if power.is_zero():
                break
            out = out + power * Q((-1) ** (k + 1), k)
        return out

    def diff(self, var: str) -> "BiSeries":
        out: dict = {}
        if var == "t1":
            for (r, k), v in self.d.items():
                if r:
                    out[(r - 1, k)] = r * v
        elif var == "t":
            for (r, k), v in self.d.items():
                if k:
                    out[(r, k - 1)] = k * v
        else:
            raise RejectedInput("unknown variable %r" % var)
        return BiSeries(self.trunc - 1, out)

    def at_t1_zero(self) -> Series:
        coeffs = [self.coeff(0, k) for k in range(self.trunc + 1)]
        return Series("t", coeffs, self.trunc)

    def __eq__(self, other):
        return (
            isinstance(other, BiSeries)
            and self.trunc == other.trunc
            and self.d == other.d
        )

    def __repr__(self):
        return "BiSeries[T=%d](%s)" % (self.trunc, dict(sorted(self.d.items())))


# ---------------------------------------------------------------------------
# weights, moments, recurrence tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """Even-valence weight (1/g_s)(lambda^2/2 + t1 lambda + t/(2 nu) lambda^(2 nu))."""

    nu: int
    g_s: Fraction
    x: Fraction = Q(1)
    include_t1: bool = False

    def __post_init__(self):
        if self.nu < 1:
            raise RejectedInput("valence parameter must be >= 1")
        if self.g_s <= 0 or self.x <= 0:
            raise RejectedInput("string coefficient and 't Hooft parameter must be positive")


def _gaussian_moment(p: int, g_s: Fraction) -> Fraction:
    """p-th Gaussian moment over the mass: (p-1)!! g_s^(p/2) for even p, else 0."""
    if p % 2:
        return Q(0)
    out = Q(1)
    k = p - 1
    while k > 1:
        out *= k
        k -= 2
    return out * g_s ** (p // 2)


def deformed_moments(spec: WeightSpec, k_max: int, T: int) -> list[BiSeries]:
    """Moments of the deformed weight, normalized by the Gaussian mass.

    m_k(t) = sum_i (1/i!) (-t/(2 nu g_s))^i (k + 2 nu i - 1)!! g_s^((k+2nu i)/2)
    for even weight order; the t1 mode adds the analogous sum over the linear
    deformation, truncated by total degree.
    """
    if T < 0:
        raise RejectedInput("truncation order must be >= 0")
    two_nu = 2 * spec.nu
    out = []
    for k in range(k_max + 1):
        d = {}
        for i in range(T + 1):
            ci = Q((-1) ** i, factorial(i)) * Q(1, (two_nu * spec.g_s) ** i)
            r_top = T - i if spec.include_t1 else 0
            for r in range(r_top + 1):
                g = _gaussian_moment(k + two_nu * i + r, spec.g_s)
                if g:
                    cr = Q((-1) ** r, factorial(r)) * Q(1, spec.g_s ** r)
                    d[(r, i)] = ci * cr * g
        out.append(BiSeries(T, d))
    return out


@dataclass
class RecurrenceTable:
    """Exact recurrence data b2[n], a[n] and normalized tau2[n] to order T.

    b2[n] vanishes identically for n <= 0 (semi-infinite boundary), and
    b2[n](t=0) = n g_s, the undeformed Gaussian value, is asserted at build
    time along with positivity of every Hankel determinant at t = 0.
    """

    spec: WeightSpec
    n_max: int
    T: int
    b2: dict[int, BiSeries] = field(default_factory=dict)
    a: dict[int, BiSeries] = field(default_factory=dict)
    tau2: dict[int, BiSeries] = field(default_factory=dict)
    norms: dict[int, BiSeries] = field(default_factory=dict)

    def b2_series_t(self, n: int) -> Series:
        return self.b2[n].at_t1_zero()


def recurrence_table(spec: WeightSpec, n_max: int, T: int) -> RecurrenceTable:
    """Build the recurrence data from moments by the exact moment-recurrence
    (Chebyshev) algorithm.

    sigma[k][l] are the mixed moments of the monic orthogonal polynomials;
    norms h_k = sigma[k][k] are units (positive at t = 0), every division
    below is by a unit series, and det H_n = h_0 ... h_{n-1}.
    """
    if n_max < 2:
        raise RejectedInput("n_max must be >= 2")
    L = 2 * n_max + 1
    moments = deformed_moments(spec, L, T)
    zero = BiSeries(T, {})
    sigma_prev = [zero] * (L + 2)  # row k-1, padded
    sigma = list(moments) + [zero]
    a: dict[int, BiSeries] = {}
    b2: dict[int, BiSeries] = {n: zero for n in range(-2 * n_max, 1)}
    norms: dict[int, BiSeries] = {}
    prev_ratio = BiSeries.const(0, T)
    for k in range(n_max + 1):
        hk = sigma[k]
        if hk.constant() == 0:
            raise DegenerateTable("vanishing Hankel ratio at k=%d, t=0" % k)
        if hk.constant() < 0 and spec.g_s > 0:
            raise DegenerateTable("negative Hankel ratio at k=%d, t=0" % k)
        norms[k] = hk
        ratio = sigma[k + 1] / hk if k + 1 < len(sigma) else zero
        a[k] = ratio - prev_ratio
        prev_ratio = ratio
        if k >= 1:
            b2[k] = hk / sigma_prev[k - 1]
            c0 = b2[k].constant()
            if c0 != k * spec.g_s:
                raise DegenerateTable(
                    "b2[%d](0) = %s, expected %s" % (k, c0, k * spec.g_s)
                )
        if k == n_max:
            break
        # next row of mixed moments
        row_len = L - k
        nxt = []
        for l in range(row_len):
            entry = sigma[l + 1] - a[k] * sigma[l]
            if k >= 1:
                entry = entry - b2[k] * sigma_prev[l]
            nxt.append(entry)
        sigma_prev = sigma
        sigma = nxt + [zero]
    # tau2[n] = det H_n(t) / det H_n(0), via det H_n = prod_{k<n} h_k
    tau2: dict[int, BiSeries] = {0: BiSeries.const(1, T)}
    det = BiSeries.const(1, T)
    for n in range(1, n_max + 1):
        det = det * norms[n - 1]
        tau2[n] = det / det.constant()
    if not spec.include_t1:
        for n, s in a.items():
            if not s.is_zero():
                raise DegenerateTable("nonzero diagonal coefficient for an even weight")
    return RecurrenceTable(spec=spec, n_max=n_max, T=T, b2=b2, a=a, tau2=tau2, norms=norms)


# ---------------------------------------------------------------------------
# verification of the lattice equations
# ---------------------------------------------------------------------------

def _site_range(table: RecurrenceTable, reach: int) -> range:
    return range(1, table.n_max - reach + 1)


def _first_nonzero(res: BiSeries):
    key = min(sorted(res.d))
    return key, res.d[key]


def verify_lattice_equations(table: RecurrenceTable, kind: str) -> dict:
    """Check the difference-string / coupling-flow equations site by site.

    Residuals must vanish identically as truncated series; the first
    offending (site, order) is reported otherwise.  The operator-power
    entries are taken in their general (flat-step weighted) form, which
    reduces to the even-weight form when the linear deformation is off:
    paths below the boundary always carry the vanishing b2 weight, so the
    relative-offset substitution is exact at every site n >= 1.
    """
    spec = table.spec
    nu = spec.nu
    t_series = BiSeries.var_t(table.T)
    zero = BiSeries(table.T, {})
    sites = []

    def maps_at(n):
        return (
            lambda k: table.b2[n + k],
            lambda k: table.a[n + k] if n + k >= 0 else zero,
        )

    if kind == "string":
        top = operator_power_entry(1, 1, 0, False) + operator_power_entry(
            2 * nu - 1, 1, 0, False
        ).times_t()
        expr = top - top.shift(-1)
        reach = max(expr.offsets())
        for n in _site_range(table, reach):
            b2_map, a_map = maps_at(n)
            val = expr.substitute(b2_map, a_map, t_value=t_series)
            res = val - spec.g_s
            _record(sites, n, res, kind)
    elif kind == "toda":
        # 2 nu g_s db2_n/dt = (a_{n-1}-a_n)(L^2nu)_{n,n-1}
        #                     + (L^2nu)_{n,n-2} - (L^2nu)_{n+1,n-1}
        # 2 nu g_s da_n/dt  = (L^2nu)_{n,n-1} - (L^2nu)_{n+1,n}
        e_pp = operator_power_entry(2 * nu, 1, -1, False)
        e_mm = operator_power_entry(2 * nu, 0, -2, False)
        e_mid = operator_power_entry(2 * nu, 0, -1, False)
        e_up = operator_power_entry(2 * nu, 1, 0, False)
        reach = max(e_pp.offsets() | e_up.offsets())
        for n in _site_range(table, reach):
            b2_map, a_map = maps_at(n)
            mid = e_mid.substitute(b2_map, a_map)
            res = (
                2 * nu * spec.g_s * table.b2[n].diff("t")
                + e_pp.substitute(b2_map, a_map)
                - e_mm.substitute(b2_map, a_map)
                - (a_map(-1) - a_map(0)) * mid
            )
            _record(sites, n, res, kind)
            res_a = (
                2 * nu * spec.g_s * table.a[n].diff("t")
                + e_up.substitute(b2_map, a_map)
                - mid
            )
            _record(sites, n, res_a, "toda_diagonal")
    elif kind == "toda_t1":
        if not spec.include_t1:
            raise RejectedInput("toda_t1 verification requires the t1-deformed table")
        for n in _site_range(table, 1):
            res_a = spec.g_s * table.a[n].diff("t1") + (table.b2[n + 1] - table.b2[n])
            _record(sites, n, res_a, "toda_t1_flow_a")
            res_b = spec.g_s * table.b2[n].diff("t1") + table.b2[n] * (
                table.a[n] - table.a[n - 1]
            )
            _record(sites, n, res_b, "toda_t1_flow_b")
    else:
        raise RejectedInput("kind must be 'string', 'toda' or 'toda_t1'")
    return {
        "equation": kind,
        "nu": nu,
        "n_max": table.n_max,
        "trunc": table.T,
        "sites": sites,
        "status": "pass",
    }


def _record(sites: list, n: int, res, tag: str):
    if res.is_zero():
        sites.append({"n": n, "check": tag, "status": "pass"})
    else:
        key, val = _first_nonzero(res)
        raise VerificationFailure(
            "%s residual nonzero at n=%d, order t1^%d t^%d: %s" % (tag, n, key[0], key[1], val)
        )


def verify_hirota(table: RecurrenceTable) -> dict:
    """Check the tau-function product identity and (with t1) its
    log-derivative forms a_n = -g_s d/dt1 log(tau2_{n+1}/tau2_n) and
    b2_n = g_s^2 d^2/dt1^2 log tau2_n, plus the centered-second-difference
    identity for log tau2."""
    spec = table.spec
    sites = []
    for n in range(1, table.n_max):
        lhs = table.b2[n] * table.tau2[n] * table.tau2[n]
        rhs = table.tau2[n + 1] * table.tau2[n - 1] * (n * spec.g_s)
        _record(sites, n, lhs - rhs, "tau_product")
        second_diff = (
            table.tau2[n + 1].log() - 2 * table.tau2[n].log() + table.tau2[n - 1].log()
        )
        _record(
            sites,
            n,
            second_diff - (table.b2[n] / (n * spec.g_s)).log(),
            "tau_second_difference",
        )
        if spec.include_t1:
            res_a = table.a[n] + spec.g_s * (
                table.tau2[n + 1].log().diff("t1") - table.tau2[n].log().diff("t1")
            )
            _record(sites, n, res_a, "tau_log_derivative_a")
            res_b = table.b2[n] - spec.g_s ** 2 * table.tau2[n].log().diff("t1").diff("t1")
            _record(sites, n, res_b, "tau_log_derivative_b")
    return {
        "equation": "hirota",
        "nu": spec.nu,
        "with_t1": spec.include_t1,
        "sites": sites,
        "status": "pass",
    }


# ---------------------------------------------------------------------------
# matching the finite-n tables against the continuum coefficients
# ---------------------------------------------------------------------------

def asymptotic_match(
    nu: int, G: int, n_range, T: int, x: Fraction = Q(1), ztable=None
) -> dict:
    """Compare b2_n/x against the genus expansion through genus G.

    For each coupling order k <= T the residual

        R_G(n) = n^(2G) ( [t^k] b2_n/x  -  sum_{g<G} n^(-2g) zeta_{g,k} )

    must approach the genus-G series coefficient zeta_{G,k}; since every
    fixed coupling order here is a terminating polynomial in 1/n^2, the
    distance |R_G(n) - zeta_{G,k}| is required to be non-increasing along
    n_range (exact zero counts as converged).
    """
    from . import continuum_even

    if ztable is None:
        ztable = continuum_even.build_ztable(nu, G, max(T + 2, 8))
    n_range = list(n_range)
    if len(n_range) < 2 or any(b <= a for a, b in zip(n_range, n_range[1:])):
        raise RejectedInput("n_range must be strictly increasing with >= 2 entries")
    # genus-side targets: z_g(u) with u = -t x^(nu-1) / (2 nu)
    scale = -(x ** (nu - 1)) * Q(1, 2 * nu)
    zeta = {}
    for g in range(G + 1):
        zs = ztable.series(g)
        zeta[g] = [zs.coeff(k) * scale ** k for k in range(T + 1)]
    b2x = {}
    for n in n_range:
        spec = WeightSpec(nu=nu, g_s=Q(x, n), x=x)
        table = recurrence_table(spec, n_max=n, T=T)
        b2x[n] = table.b2_series_t(n) / x
    orders = []
    for k in range(T + 1):
        errors = []
        for n in n_range:
            partial = sum(Q(n) ** (-2 * g) * zeta[g][k] for g in range(G))
            R = Q(n) ** (2 * G) * (b2x[n].coeff(k) - partial)
            errors.append(abs(R - zeta[G][k]))
        for e_prev, e_next in zip(errors, errors[1:]):
            if e_next > e_prev:
                raise VerificationFailure(
                    "diverging genus-%d residual at t-order %d: %s -> %s"
                    % (G, k, e_prev, e_next)
                )
        orders.append(
            {
                "t_order": k,
                "target": str(zeta[G][k]),
                "final_gap": str(errors[-1]),
                "exact": errors[-1] == 0,
            }
        )
    return {
        "equation": "asymptotic_match",
        "nu": nu,
        "genus": G,
        "n_range": n_range,
        "orders": orders,
        "status": "pass",
    }
