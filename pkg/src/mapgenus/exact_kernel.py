"""Exact arithmetic substrate: rationals, polynomials, truncated series,
reduced rational functions, graded (self-similar) series and exact linear
solving.

Everything is built on ``fractions.Fraction``; there is no floating point
anywhere.  Truncated series arithmetic narrows to the minimum truncation of
its operands so no result ever claims more precision than its inputs carry.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

from .errors import (
    InsufficientData,
    PoleAtBasepoint,
    ReconstructionFailed,
    RejectedInput,
)

Q = Fraction

QLike = int | Fraction


def qstr(q: QLike) -> str:
    """Render a rational as the canonical "p/q" string (plain "p" for integers)."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def qparse(s: str) -> Fraction:
    return Q(s)


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial with Fraction coefficients.

    Coefficients are stored by increasing degree with trailing zeros
    stripped; the zero polynomial has an empty coefficient tuple and the
    sentinel degree -1.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Q(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def one() -> "Poly":
        return Poly((1,))

    @staticmethod
    def x() -> "Poly":
        return Poly((0, 1))

    @staticmethod
    def const(q: QLike) -> "Poly":
        return Poly((q,))

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def leading(self) -> Fraction:
        if not self.c:
            raise RejectedInput("zero polynomial has no leading coefficient")
        return self.c[-1]

    def coeff(self, i: int) -> Fraction:
        return self.c[i] if 0 <= i < len(self.c) else Q(0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.c), len(other.c))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([x * other for x in self.c])
        other = _as_poly(other)
        if not self.c or not other.c:
            return Poly(())
        out = [Q(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise RejectedInput("negative polynomial power")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly"):
        other = _as_poly(other)
        if other.is_zero():
            raise RejectedInput("polynomial division by zero")
        rem = list(self.c)
        dq = len(rem) - len(other.c)
        if dq < 0:
            return Poly(()), self
        quot = [Q(0)] * (dq + 1)
        lead = other.c[-1]
        for k in range(dq, -1, -1):
            top = rem[k + len(other.c) - 1]
            if top:
                f = top / lead
                quot[k] = f
                for j, b in enumerate(other.c):
                    rem[k + j] -= f * b
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.c[-1]
        return Poly([x / lead for x in self.c])

    def derivative(self) -> "Poly":
        return Poly([i * self.c[i] for i in range(1, len(self.c))])

    def eval(self, x: QLike) -> Fraction:
        acc = Q(0)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        if not self.c:
            return "Poly(0)"
        parts = []
        for i, a in enumerate(self.c):
            if a:
                parts.append("%s*z^%d" % (qstr(a), i))
        return "Poly(%s)" % " + ".join(parts)


def _as_poly(p) -> Poly:
    if isinstance(p, Poly):
        return p
    if isinstance(p, (int, Fraction)):
        return Poly.const(p)
    raise RejectedInput("cannot coerce %r to Poly" % (p,))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (degrees here are small)."""
    a, b = Poly(a.c), Poly(b.c)
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


# ---------------------------------------------------------------------------
# truncated power series over Q
# ---------------------------------------------------------------------------

class Series:
    """Truncated power series sum_{i<=trunc} c[i] * var^i with exact coefficients.

    Binary operations narrow to the minimum truncation of the operands and
    require matching variable tags.
    """

    __slots__ = ("var", "trunc", "c")

    def __init__(self, var: str, coeffs, trunc: int | None = None):
        c = [Q(x) for x in coeffs]
        if trunc is None:
            trunc = len(c) - 1
        if trunc < 0:
            raise RejectedInput("series truncation must be >= 0")
        if len(c) < trunc + 1:
            c += [Q(0)] * (trunc + 1 - len(c))
        self.var = var
        self.trunc = trunc
        self.c = tuple(c[: trunc + 1])

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(var: str, trunc: int) -> "Series":
        return Series(var, (), trunc)

    @staticmethod
    def one(var: str, trunc: int) -> "Series":
        return Series(var, (1,), trunc)

    @staticmethod
    def x(var: str, trunc: int) -> "Series":
        return Series(var, (0, 1), trunc)

    @staticmethod
    def const(var: str, q: QLike, trunc: int) -> "Series":
        return Series(var, (q,), trunc)

    # -- helpers -------------------------------------------------------------

    def coeff(self, i: int) -> Fraction:
        return self.c[i] if 0 <= i <= self.trunc else Q(0)

    def truncate(self, T: int) -> "Series":
        if T > self.trunc:
            raise RejectedInput("cannot extend truncation from %d to %d" % (self.trunc, T))
        return Series(self.var, self.c[: T + 1], T)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def _common(self, other) -> tuple["Series", "Series"]:
        if isinstance(other, (int, Fraction)):
            other = Series.const(self.var, other, self.trunc)
        if not isinstance(other, Series):
            raise RejectedInput("cannot coerce %r to Series" % (other,))
        if other.var != self.var:
            raise RejectedInput("series variable mismatch: %s vs %s" % (self.var, other.var))
        T = min(self.trunc, other.trunc)
        return self.truncate(T), other.truncate(T)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        a, b = self._common(other)
        return Series(a.var, [x + y for x, y in zip(a.c, b.c)], a.trunc)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.var, [-x for x in self.c], self.trunc)

    def __sub__(self, other):
        a, b = self._common(other)
        return Series(a.var, [x - y for x, y in zip(a.c, b.c)], a.trunc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Series(self.var, [x * other for x in self.c], self.trunc)
        a, b = self._common(other)
        out = [Q(0)] * (a.trunc + 1)
        for i, x in enumerate(a.c):
            if x:
                for j in range(a.trunc + 1 - i):
                    y = b.c[j]
                    if y:
                        out[i + j] += x * y
        return Series(a.var, out, a.trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise RejectedInput("negative series power; divide instead")
        result = Series.one(self.var, self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise RejectedInput("series division by zero scalar")
            inv = Q(1) / Q(other)
            return Series(self.var, [x * inv for x in self.c], self.trunc)
        a, b = self._common(other)
        if b.c[0] == 0:
            raise RejectedInput("series division by a non-unit (zero constant term)")
        out = [Q(0)] * (a.trunc + 1)
        inv0 = Q(1) / b.c[0]
        for i in range(a.trunc + 1):
            acc = a.c[i]
            for j in range(1, i + 1):
                acc -= b.c[j] * out[i - j]
            out[i] = acc * inv0
        return Series(a.var, out, a.trunc)

    def derivative(self) -> "Series":
        if self.trunc == 0:
            return Series(self.var, (), 0)
        return Series(self.var, [i * self.c[i] for i in range(1, self.trunc + 1)], self.trunc - 1)

    def integrate(self) -> "Series":
        out = [Q(0)] + [self.c[i] / (i + 1) for i in range(self.trunc + 1)]
        return Series(self.var, out, self.trunc + 1)

    def eval_poly(self, p: Poly) -> "Series":
        """p(self) for a polynomial p, truncated like self."""
        acc = Series.zero(self.var, self.trunc)
        for a in reversed(p.c):
            acc = acc * self + a
        return acc if p.c else Series.zero(self.var, self.trunc)

    def __eq__(self, other):
        return (
            isinstance(other, Series)
            and self.var == other.var
            and self.trunc == other.trunc
            and self.c == other.c
        )

    def __hash__(self):
        return hash((self.var, self.trunc, self.c))

    def agrees_with(self, other: "Series", through: int | None = None) -> bool:
        T = min(self.trunc, other.trunc)
        if through is not None:
            T = min(T, through)
        return all(self.coeff(i) == other.coeff(i) for i in range(T + 1))

    def __repr__(self):
        terms = ["%s*%s^%d" % (qstr(a), self.var, i) for i, a in enumerate(self.c) if a]
        return "Series[%s;T=%d](%s)" % (self.var, self.trunc, " + ".join(terms) or "0")


def series_log(s: Series) -> Series:
    """Formal log of a unit series with constant term exactly 1.

    Computed as the termwise integral of s'/s, which keeps every coefficient
    rational and costs one series division.
    """
    if s.coeff(0) != 1:
        raise RejectedInput("series_log requires constant term exactly 1")
    if s.trunc == 0:
        return Series.zero(s.var, 0)
    return (s.derivative() / s.truncate(s.trunc - 1)).integrate().truncate(s.trunc)


def series_exp(s: Series) -> Series:
    """Formal exp of a series with zero constant term (inverse of series_log)."""
    if s.coeff(0) != 0:
        raise RejectedInput("series_exp requires zero constant term")
    out = [Q(0)] * (s.trunc + 1)
    out[0] = Q(1)
    # e' = s' e, solved order by order
    for n in range(1, s.trunc + 1):
        acc = Q(0)
        for k in range(1, n + 1):
            acc += k * s.coeff(k) * out[n - k]
        out[n] = acc / n
    return Series(s.var, out, s.trunc)


def series_compose(f: Series, g: Series) -> Series:
    """f(g) for a series g with zero constant term (Horner over series)."""
    if g.coeff(0) != 0:
        raise RejectedInput("series_compose requires inner series with zero constant term")
    T = min(f.trunc, g.trunc)
    acc = Series.zero(g.var, T)
    gq = g.truncate(T)
    for a in reversed(f.c[: T + 1]):
        acc = acc * gq + a
    return acc


# ---------------------------------------------------------------------------
# reduced rational functions
# ---------------------------------------------------------------------------

class RatFn:
    """Reduced rational function num / den_base**den_pow in one variable.

    den_base is monic and shares no factor with num (when den_pow > 0).
    General denominators use den_pow = 1.  The power form is what rational
    reconstruction produces and keeps pole-order queries O(1).
    """

    __slots__ = ("num", "den_base", "den_pow", "var")

    def __init__(self, num: Poly, den_base: Poly, den_pow: int = 1, var: str = "z"):
        if den_base.is_zero():
            raise RejectedInput("zero denominator")
        if den_pow < 0:
            raise RejectedInput("negative denominator power")
        if den_base.degree == 0 or den_pow == 0:
            num = num * (Q(1) / (den_base.leading() ** den_pow))
            den_base, den_pow = Poly.one(), 0
        else:
            lead = den_base.leading()
            if lead != 1:
                den_base = den_base.monic()
                num = num * (Q(1) / (lead ** den_pow))
            # cancel full powers of the base first (cheap, common case)
            while den_pow > 0 and not num.is_zero():
                quo, rem = num.divmod(den_base)
                if rem.is_zero():
                    num, den_pow = quo, den_pow - 1
                else:
                    break
            if den_pow > 0:
                g = poly_gcd(num, den_base ** den_pow)
                if g.degree > 0:
                    num = num // g
                    den = (den_base ** den_pow) // g
                    den_base, den_pow = den.monic(), 1
                    num = num * (Q(1) / den.leading())
            if den_pow == 0:
                den_base = Poly.one()
        self.num = num
        self.den_base = den_base
        self.den_pow = den_pow
        self.var = var

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(q: QLike, var: str = "z") -> "RatFn":
        return RatFn(Poly.const(q), Poly.one(), 0, var)

    @staticmethod
    def from_poly(p: Poly, var: str = "z") -> "RatFn":
        return RatFn(p, Poly.one(), 0, var)

    # -- structure -------------------------------------------------------------

    def den(self) -> Poly:
        return self.den_base ** self.den_pow

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den_pow == 0

    # -- arithmetic --------------------------------------------------------------

    def _same_base(self, other: "RatFn") -> bool:
        return self.den_base == other.den_base

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFn.const(other, self.var)
        if other.den_pow == 0:
            num = self.num + other.num * self.den_base ** self.den_pow
            return RatFn(num, self.den_base, self.den_pow, self.var)
        if self.den_pow == 0:
            return other + self
        if self._same_base(other):
            p = max(self.den_pow, other.den_pow)
            num = (
                self.num * self.den_base ** (p - self.den_pow)
                + other.num * self.den_base ** (p - other.den_pow)
            )
            return RatFn(num, self.den_base, p, self.var)
        num = self.num * other.den() + other.num * self.den()
        return RatFn(num, self.den() * other.den(), 1, self.var)

    __radd__ = __add__

    def __neg__(self):
        out = RatFn.__new__(RatFn)
        out.num, out.den_base, out.den_pow, out.var = -self.num, self.den_base, self.den_pow, self.var
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFn.const(other, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            out = RatFn.__new__(RatFn)
            out.num, out.den_base, out.den_pow, out.var = self.num * other, self.den_base, self.den_pow, self.var
            return out
        if other.den_pow == 0:
            return RatFn(self.num * other.num, self.den_base, self.den_pow, self.var)
        if self.den_pow == 0:
            return RatFn(self.num * other.num, other.den_base, other.den_pow, self.var)
        if self._same_base(other):
            return RatFn(self.num * other.num, self.den_base, self.den_pow + other.den_pow, self.var)
        return RatFn(self.num * other.num, self.den() * other.den(), 1, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise RejectedInput("division by zero")
            return self * (Q(1) / Q(other))
        if other.is_zero():
            raise RejectedInput("division by the zero rational function")
        return self * RatFn(other.den(), other.num, 1, self.var)

    def __rtruediv__(self, other):
        return RatFn.const(other, self.var) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFn.const(1, self.var) / self ** (-n)
        return RatFn(self.num ** n, self.den_base, self.den_pow * n, self.var)

    def derivative(self) -> "RatFn":
        if self.den_pow == 0:
            return RatFn.from_poly(self.num.derivative(), self.var)
        # d/dz num/b^p = (num' b - p num b') / b^(p+1)
        num = self.num.derivative() * self.den_base - self.den_pow * self.num * self.den_base.derivative()
        return RatFn(num, self.den_base, self.den_pow + 1, self.var)

    def eval(self, x: QLike) -> Fraction:
        d = self.den_base.eval(x) ** self.den_pow
        if d == 0:
            raise PoleAtBasepoint("denominator vanishes at %s" % (x,))
        return self.num.eval(x) / d

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFn.const(other, self.var)
        if not isinstance(other, RatFn):
            return NotImplemented
        return (self.num * other.den() == other.num * self.den())

    def __hash__(self):
        return hash((self.num, self.den_base, self.den_pow))

    def __repr__(self):
        if self.den_pow == 0:
            return "RatFn(%r)" % (self.num,)
        return "RatFn((%r) / (%r)^%d)" % (self.num, self.den_base, self.den_pow)


def ratfn_normalize(num: Poly, den: Poly, var: str = "z") -> RatFn:
    """gcd-reduced rational function with monic denominator."""
    if den.is_zero():
        raise RejectedInput("zero denominator")
    return RatFn(num, den, 1, var)


def ratfn_to_series(r: RatFn, z: Series, T: int | None = None) -> Series:
    """Expand r(z(x)) as a series in x, exactly, to order T (default: z.trunc)."""
    if T is None:
        T = z.trunc
    zq = z.truncate(min(T, z.trunc))
    if zq.trunc < T:
        raise RejectedInput("substitution series too short for requested order")
    den_at = r.den_base.eval(zq.coeff(0)) ** r.den_pow
    if den_at == 0:
        raise PoleAtBasepoint("denominator vanishes at the expansion basepoint")
    num_s = zq.eval_poly(r.num)
    den_s = zq.eval_poly(r.den_base) ** r.den_pow
    return num_s / den_s


# ---------------------------------------------------------------------------
# exact linear algebra (fraction-free elimination)
# ---------------------------------------------------------------------------

def solve_linear(rows, rhs):
    """Solve an (over)determined exact linear system.

    rows: list of coefficient lists (each length n), rhs: list of values.
    Returns the unique solution as a list of Fractions.  Raises
    InsufficientData when the system is underdetermined and
    ReconstructionFailed when it is inconsistent.

    Rows are scaled to integers and eliminated fraction-free (Bareiss) to
    keep intermediate entries from exploding; the systems solved here are
    small (tens of unknowns) but their entries are huge rationals.
    """
    m = len(rows)
    if m == 0:
        raise InsufficientData("no equations")
    n = len(rows[0])
    aug = []
    for row, b in zip(rows, rhs):
        ints = [Q(x) for x in row] + [Q(b)]
        scale = 1
        for x in ints:
            scale = scale * x.denominator // _int_gcd(scale, x.denominator)
        aug.append([int(x * scale) for x in ints])

    prev = 1
    piv_cols = []
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, m):
            if aug[i][col]:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n + 1):
                aug[i][j] = (aug[r][col] * aug[i][j] - aug[i][col] * aug[r][j]) // prev
            aug[i][col] = 0
        prev = aug[r][col]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n]:
            raise ReconstructionFailed("inconsistent linear system")
    if len(piv_cols) < n:
        raise InsufficientData(
            "underdetermined system: rank %d < %d unknowns" % (len(piv_cols), n)
        )
    sol = [Q(0)] * n
    for k in range(n - 1, -1, -1):
        col = piv_cols[k]
        acc = Q(aug[k][n])
        for j in range(col + 1, n):
            acc -= aug[k][j] * sol[j]
        sol[col] = acc / aug[k][col]
    return sol


def series_to_ratfn(
    s: Series,
    z: Series,
    base: Poly,
    max_num_deg: int,
    max_pole_ord: int,
    skip=frozenset(),
    var: str = "z",
) -> RatFn:
    """Reconstruct R = num / base**p with p <= max_pole_ord such that
    R(z(x)) agrees with s at every non-skipped order.

    Coefficients of s at skipped orders are treated as unknowns alongside
    the numerator coefficients (their placeholder values never leak into
    other orders), so the system determines both the rational function and
    the skipped coefficients.  Every order up to s.trunc is an equation, so
    surplus orders beyond the unknown count act as exact consistency
    checks; any mismatch raises ReconstructionFailed (a wrong ansatz), and
    a rank-deficient system raises InsufficientData.
    """
    if z.coeff(1) == 0:
        raise RejectedInput("substitution series is not a change of variable at order 1")
    T = min(s.trunc, z.trunc)
    den_s = (z.eval_poly(base) ** max_pole_ord).truncate(T)
    target = s.truncate(T) * den_s
    # columns: series of z^i for i <= max_num_deg, then one column per
    # skipped order for the unknown coefficient sigma_m of x^m in s
    zpow = Series.one(z.var, T)
    cols = [zpow]
    for _ in range(max_num_deg):
        zpow = zpow * z.truncate(T)
        cols.append(zpow)
    skip = sorted(k for k in skip if k <= T)
    for m in skip:
        shifted = [Q(0)] * (T + 1)
        for k in range(m, T + 1):
            shifted[k] = -den_s.coeff(k - m)
        cols.append(Series(z.var, shifted, T))
    rows = [[col.coeff(k) for col in cols] for k in range(T + 1)]
    rhs = [target.coeff(k) for k in range(T + 1)]
    sol = solve_linear(rows, rhs)
    num = Poly(sol[: max_num_deg + 1])
    out = RatFn(num, base, max_pole_ord, var)
    if out.den_pow > max_pole_ord:
        raise ReconstructionFailed("pole order bound violated")
    return out


# ---------------------------------------------------------------------------
# graded series: truncated series whose x^j coefficient is a single monomial
# c_j * w^(e_j) with e_j = (base2 + j*step2)/2
# ---------------------------------------------------------------------------

class GradedSeries:
    """Self-similar series in one time variable with slaved monomial powers
    of a spatial variable w.

    A value represents sum_j c[j] * x^j * w^((base2 + j*step2)/2); exponents
    are stored doubled so half-integer powers (odd-valence scalings) stay in
    integer arithmetic.  Multiplication adds base2, spatial differentiation
    lowers it by 2, and every equation assembled from self-similar data stays
    inside the class.
    """

    __slots__ = ("var", "c", "trunc", "base2", "step2")

    def __init__(self, var: str, coeffs, base2: int, step2: int, trunc: int | None = None):
        c = [Q(x) for x in coeffs]
        if trunc is None:
            trunc = len(c) - 1
        if len(c) < trunc + 1:
            c += [Q(0)] * (trunc + 1 - len(c))
        self.var = var
        self.c = tuple(c[: trunc + 1])
        self.trunc = trunc
        self.base2 = base2
        self.step2 = step2

    @staticmethod
    def from_series(s: Series, base2: int, step2: int) -> "GradedSeries":
        return GradedSeries(s.var, s.c, base2, step2, s.trunc)

    @staticmethod
    def const(var: str, q: QLike, base2: int, step2: int, trunc: int) -> "GradedSeries":
        return GradedSeries(var, (q,), base2, step2, trunc)

    def coeff(self, j: int) -> Fraction:
        return self.c[j] if 0 <= j <= self.trunc else Q(0)

    def exponent2(self, j: int) -> int:
        return self.base2 + j * self.step2

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def truncate(self, T: int) -> "GradedSeries":
        return GradedSeries(self.var, self.c[: T + 1], self.base2, self.step2, min(T, self.trunc))

    def _check(self, other: "GradedSeries", need_base: bool):
        if self.var != other.var or self.step2 != other.step2:
            raise RejectedInput("graded series grading mismatch")
        if need_base and self.base2 != other.base2 and not (self.is_zero() or other.is_zero()):
            raise RejectedInput(
                "graded series weight mismatch: base2 %d vs %d" % (self.base2, other.base2)
            )

    def __add__(self, other: "GradedSeries"):
        self._check(other, need_base=True)
        base2 = other.base2 if self.is_zero() else self.base2
        T = min(self.trunc, other.trunc)
        return GradedSeries(self.var, [self.coeff(j) + other.coeff(j) for j in range(T + 1)], base2, self.step2, T)

    def __neg__(self):
        return GradedSeries(self.var, [-x for x in self.c], self.base2, self.step2, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GradedSeries(self.var, [x * other for x in self.c], self.base2, self.step2, self.trunc)
        self._check(other, need_base=False)
        T = min(self.trunc, other.trunc)
        out = [Q(0)] * (T + 1)
        for i in range(min(self.trunc, T) + 1):
            x = self.c[i]
            if x:
                for j in range(min(other.trunc, T - i) + 1):
                    y = other.c[j]
                    if y:
                        out[i + j] += x * y
        return GradedSeries(self.var, out, self.base2 + other.base2, self.step2, T)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise RejectedInput("negative graded power")
        out = GradedSeries.const(self.var, 1, 0, self.step2, self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other: "GradedSeries"):
        self._check(other, need_base=False)
        if other.coeff(0) == 0:
            raise RejectedInput("graded division by non-unit")
        T = min(self.trunc, other.trunc)
        out = [Q(0)] * (T + 1)
        inv0 = Q(1) / other.c[0]
        for i in range(T + 1):
            acc = self.coeff(i)
            for j in range(1, i + 1):
                acc -= other.coeff(j) * out[i - j]
            out[i] = acc * inv0
        return GradedSeries(self.var, out, self.base2 - other.base2, self.step2, T)

    def xmul(self, k: int = 1):
        """Multiply by x^k (the time variable alone, no w attached)."""
        out = [Q(0)] * (self.trunc + 1)
        for j in range(k, self.trunc + 1):
            out[j] = self.c[j - k]
        return GradedSeries(self.var, out, self.base2 - k * self.step2, self.step2, self.trunc)

    def dw(self):
        """Spatial derivative: multiplies c_j by the exponent (base2+j*step2)/2."""
        out = [self.c[j] * Q(self.base2 + j * self.step2, 2) for j in range(self.trunc + 1)]
        return GradedSeries(self.var, out, self.base2 - 2, self.step2, self.trunc)

    def dw_iter(self, p: int):
        g = self
        for _ in range(p):
            g = g.dw()
        return g

    def dx(self):
        """Time derivative d/dx."""
        out = [(j + 1) * self.coeff(j + 1) for j in range(self.trunc)]
        return GradedSeries(self.var, out, self.base2 + self.step2, self.step2, max(self.trunc - 1, 0))

    def integrate_w(self):
        """Termwise antiderivative in w; rejects any w^(-1) term.

        The absence of w^(-1) terms is exactly the spatial-exactness property
        the integrated equations rely on, so hitting one is an error.
        """
        out = []
        for j in range(self.trunc + 1):
            e2 = self.base2 + j * self.step2
            if e2 == -2:
                if self.c[j] != 0:
                    raise RejectedInput("w^(-1) term obstructs termwise antiderivative")
                out.append(Q(0))
            else:
                out.append(self.c[j] / Q(e2 + 2, 2))
        return GradedSeries(self.var, out, self.base2 + 2, self.step2, self.trunc)

    def at_w1(self) -> Series:
        return Series(self.var, self.c, self.trunc)

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.var == other.var and self.step2 == other.step2
        return (
            self.var == other.var
            and self.step2 == other.step2
            and self.base2 == other.base2
            and self.trunc == other.trunc
            and self.c == other.c
        )

    def __repr__(self):
        return "GradedSeries[%s;base2=%d,step2=%d](%s)" % (
            self.var,
            self.base2,
            self.step2,
            list(self.c),
        )


# ---------------------------------------------------------------------------
# JSON encodings (the CLI interchange formats)
# ---------------------------------------------------------------------------

def series_to_json(s: Series) -> dict:
    return {"var": s.var, "trunc": s.trunc, "coeffs": [qstr(x) for x in s.c]}


def series_from_json(d: dict) -> Series:
    return Series(d["var"], [qparse(x) for x in d["coeffs"]], d["trunc"])


def ratfn_to_json(r: RatFn, var: str = "z0") -> dict:
    return {
        "var": var,
        "num": [qstr(x) for x in r.num.c],
        "den_base": [qstr(x) for x in r.den_base.c],
        "den_pow": r.den_pow,
    }


def ratfn_from_json(d: dict) -> RatFn:
    return RatFn(
        Poly([qparse(x) for x in d["num"]]),
        Poly([qparse(x) for x in d["den_base"]]),
        d["den_pow"],
        d.get("var", "z"),
    )
