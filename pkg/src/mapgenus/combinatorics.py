"""Partitions, restricted partitions in a box, monomial symmetric polynomial
evaluation, the continuum-hierarchy coefficients, lattice-path enumeration
and symbolic entries of powers of the three-term recursion operator.

Conventions fixed here and relied on downstream:

* trinomial/multinomial coefficients with any negative lower index are 0;
* 0**0 = 1 when a monomial weight is evaluated at a zero entry;
* offset variables b2[k] / a[k] are indexed by position relative to a
  generic lattice site n, never by absolute position, so every generated
  equation is manifestly shift-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import RejectedInput
from .exact_kernel import Poly, Q

Partition = tuple[int, ...]


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partitions_of(n: int, max_len: int | None = None) -> list[Partition]:
    """All partitions of n (weakly decreasing tuples), descending-lex sorted.

    n = 0 yields the empty partition; max_len bounds the number of parts.
    """
    if n < 0:
        raise RejectedInput("cannot partition a negative integer")
    out: list[Partition] = []

    def rec(rest, largest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        if max_len is not None and len(acc) == max_len:
            return
        for part in range(min(rest, largest), 0, -1):
            acc.append(part)
            rec(rest - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return out


def multiplicities(lam: Partition) -> dict[int, int]:
    r: dict[int, int] = {}
    for part in lam:
        r[part] = r.get(part, 0) + 1
    return r


def strict_partitions_in_box(lower: Partition, upper: Partition) -> list[Partition]:
    """All strictly decreasing mu with lower <= mu <= upper componentwise."""
    if len(lower) != len(upper):
        raise RejectedInput("box bounds must have equal length")
    if any(a > b for a, b in zip(lower, upper)):
        raise RejectedInput("empty box: lower bound exceeds upper bound")
    if any(lower[i] <= lower[i + 1] for i in range(len(lower) - 1)) or any(
        upper[i] <= upper[i + 1] for i in range(len(upper) - 1)
    ):
        raise RejectedInput("box bounds must themselves be strictly decreasing")
    k = len(lower)
    out: list[Partition] = []

    def rec(i, prev, acc):
        if i == k:
            out.append(tuple(acc))
            return
        hi = min(upper[i], prev - 1)
        for v in range(hi, lower[i] - 1, -1):
            acc.append(v)
            rec(i + 1, v, acc)
            acc.pop()

    rec(0, upper[0] + 1, [])
    return out


def _distinct_permutations(items: tuple[int, ...]):
    """Distinct permutations of a multiset of small length."""
    items = tuple(sorted(items, reverse=True))
    n = len(items)
    out = []

    def rec(remaining, acc):
        if not remaining:
            out.append(tuple(acc))
            return
        seen = set()
        for i, v in enumerate(remaining):
            if v in seen:
                continue
            seen.add(v)
            rec(remaining[:i] + remaining[i + 1 :], acc + [v])

    rec(list(items), [])
    return out


def monomial_sym_eval(lam: Partition, xs) -> Fraction:
    """Value of the monomial symmetric polynomial m_lam at the point xs.

    Zero by convention when lam has more parts than xs has entries; 0**0
    counts as 1 when padded zero exponents meet zero entries.
    """
    xs = [Q(x) for x in xs]
    if len(lam) > len(xs):
        return Q(0)
    exps = tuple(lam) + (0,) * (len(xs) - len(lam))
    total = Q(0)
    for perm in _distinct_permutations(exps):
        term = Q(1)
        for x, e in zip(xs, perm):
            if e:
                term *= x ** e
            # e == 0 contributes a factor 1 even when x == 0
        total += term
    return total


def c_valence(nu: int) -> int:
    """Leading transport coefficient; both closed forms must agree."""
    a = 2 * nu * comb(2 * nu - 1, nu - 1)
    b = (nu + 1) * comb(2 * nu, nu + 1)
    if a != b:
        raise RejectedInput("closed forms for the leading coefficient disagree")
    return a


def higher_catalan(nu: int, j: int) -> Fraction:
    """j-th higher Catalan number; both closed forms must agree."""
    if j < 1:
        raise RejectedInput("higher Catalan index starts at 1")
    a = Q(comb(nu * j, j - 1), j)
    b = Q(comb(nu * j, j), (nu - 1) * j + 1)
    if a != b:
        raise RejectedInput("closed forms for the higher Catalan number disagree")
    return a


def d_coeff(nu: int, lam: Partition, variant: str) -> Fraction:
    """Hierarchy coefficient for one partition: a doubled sum of monomial
    symmetric values over strict partitions in a staircase box.

    variant "toda": nu+1 slots, box (nu+1,...,1) .. (2nu,...,nu), reference
    staircase (2nu, 2nu-2, ..., 0).  variant "string": nu slots, box
    (nu,...,1) .. (2nu-1,...,nu), reference (2nu-1, 2nu-3, ..., 1).
    """
    size = sum(lam)
    if size % 2 == 0:
        raise RejectedInput("partition size must be odd (2g+1)")
    if variant == "toda":
        slots = nu + 1
        eta = tuple(2 * nu - 2 * i for i in range(slots))
        lower = tuple(range(nu + 1, 0, -1))
        upper = tuple(range(2 * nu, nu - 1, -1))
    elif variant == "string":
        slots = nu
        eta = tuple(2 * nu - 1 - 2 * i for i in range(slots))
        lower = tuple(range(nu, 0, -1))
        upper = tuple(range(2 * nu - 1, nu - 1, -1))
    else:
        raise RejectedInput("variant must be 'toda' or 'string'")
    if len(lam) > slots:
        raise RejectedInput("partition longer than the slot count %d" % slots)
    total = Q(0)
    for mu in strict_partitions_in_box(lower, upper):
        total += 2 * monomial_sym_eval(lam, [mu[i] - eta[i] for i in range(slots)])
    return total


# ---------------------------------------------------------------------------
# lattice paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticePath:
    """A walk on the integer lattice; steps are +1/-1 (and 0 for Motzkin)."""

    steps: tuple[int, ...]
    start: int

    @property
    def end(self) -> int:
        return self.start + sum(self.steps)

    def levels(self) -> list[int]:
        out = [self.start]
        for s in self.steps:
            out.append(out[-1] + s)
        return out

    def downstep_levels(self) -> list[int]:
        """Lattice location after each downstep, in path order."""
        out = []
        lvl = self.start
        for s in self.steps:
            lvl += s
            if s == -1:
                out.append(lvl)
        return out


def lattice_paths(j: int, m1: int, m2: int, kind: str = "dyck") -> list[LatticePath]:
    """Exhaustive enumeration of length-j walks from m1 to m2.

    Parity mismatch yields the empty list, not an error.  Enumeration is
    deliberately step-by-step so per-path weights stay available.
    """
    if j < 0:
        raise RejectedInput("path length must be >= 0")
    if kind == "dyck":
        alphabet = (1, -1)
    elif kind == "motzkin":
        alphabet = (1, 0, -1)
    else:
        raise RejectedInput("kind must be 'dyck' or 'motzkin'")
    out: list[LatticePath] = []

    def rec(remaining, level, acc):
        if abs(m2 - level) > remaining:
            return
        if remaining == 0:
            out.append(LatticePath(tuple(acc), m1))
            return
        for s in alphabet:
            acc.append(s)
            rec(remaining - 1, level + s, acc)
            acc.pop()

    rec(j, m1, [])
    return out


def dyck_path_count(j: int, m1: int, m2: int) -> int:
    """Closed-form count of free Dyck paths: choose the downstep positions."""
    d2 = j + m1 - m2
    if d2 % 2 or d2 < 0:
        return 0
    return comb(j, d2 // 2)


# ---------------------------------------------------------------------------
# lattice polynomials: entries of powers of the recursion operator
# ---------------------------------------------------------------------------

class LatticePolynomial:
    """Polynomial in offset variables b2[k], a[k] and the coupling t.

    Terms map (t_degree, sorted b2 offsets, sorted a offsets) -> Fraction.
    Offsets are relative to a generic site, so shifting all offsets by a
    constant is an exact symmetry of every generated equation.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, tuple[int, ...], tuple[int, ...]], Fraction] = {}
        if terms:
            for key, val in terms.items():
                val = Q(val)
                if val:
                    self.terms[key] = val

    @staticmethod
    def monomial(coeff=1, b_offsets=(), a_offsets=(), t_deg=0) -> "LatticePolynomial":
        key = (t_deg, tuple(sorted(b_offsets)), tuple(sorted(a_offsets)))
        return LatticePolynomial({key: Q(coeff)})

    def __add__(self, other: "LatticePolynomial"):
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, Q(0)) + val
        return LatticePolynomial(out)

    def __neg__(self):
        return LatticePolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LatticePolynomial({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (t1, b1, a1), v1 in self.terms.items():
            for (t2, b2, a2), v2 in other.terms.items():
                key = (t1 + t2, tuple(sorted(b1 + b2)), tuple(sorted(a1 + a2)))
                out[key] = out.get(key, Q(0)) + v1 * v2
        return LatticePolynomial(out)

    __rmul__ = __mul__

    def times_t(self) -> "LatticePolynomial":
        return LatticePolynomial({(t + 1, b, a): v for (t, b, a), v in self.terms.items()})

    def shift(self, k: int) -> "LatticePolynomial":
        """b2[i] -> b2[i+k], a[i] -> a[i+k]."""
        return LatticePolynomial(
            {
                (t, tuple(x + k for x in b), tuple(x + k for x in a)): v
                for (t, b, a), v in self.terms.items()
            }
        )

    def offsets(self) -> set[int]:
        out: set[int] = set()
        for (_, b, a) in self.terms:
            out.update(b)
            out.update(a)
        return out

    def substitute(self, b2_map, a_map=None, t_value=None):
        """Evaluate with b2[k] -> b2_map(k), a[k] -> a_map(k), t -> t_value.

        The images only need to support + and *; a zero start value is taken
        from 0 * (first term), so any commutative ring with int scalars works.
        """
        total = None
        for (t_deg, b_off, a_off), coeff in self.terms.items():
            term = coeff
            if t_deg:
                if t_value is None:
                    raise RejectedInput("term carries t but no t value supplied")
                for _ in range(t_deg):
                    term = term * t_value
            for k in b_off:
                term = term * b2_map(k)
            for k in a_off:
                if a_map is None:
                    raise RejectedInput("term carries a[] but no a map supplied")
                term = term * a_map(k)
            total = term if total is None else total + term
        return total

    def specialize_counts(self) -> Fraction:
        """b2[k] -> 1, a[k] -> 0, t -> 1: recovers the bare path count."""
        total = Q(0)
        for (t_deg, b_off, a_off), coeff in self.terms.items():
            if not a_off:
                total += coeff
        return total

    def __eq__(self, other):
        return isinstance(other, LatticePolynomial) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "LatticePolynomial(0)"
        bits = []
        for (t_deg, b_off, a_off), coeff in sorted(self.terms.items()):
            factors = []
            if t_deg:
                factors.append("t" + ("^%d" % t_deg if t_deg > 1 else ""))
            factors += ["b2[%d]" % k for k in b_off]
            factors += ["a[%d]" % k for k in a_off]
            bits.append("%s %s" % (coeff, "*".join(factors) or "1"))
        return "LatticePolynomial(%s)" % " + ".join(bits)


def operator_power_entry(
    j: int, row_offset: int, col_offset: int, even_potential: bool = True
) -> LatticePolynomial:
    """Entry (n+row_offset, n+col_offset) of the j-th power of the recursion
    operator, as a lattice polynomial.

    Each walk contributes the product of its step weights: an upstep weighs
    1, a downstep from relative level k weighs b2[k], and (odd potentials
    only) a flat step at level k weighs a[k].
    """
    if abs(row_offset - col_offset) > j:
        return LatticePolynomial()
    kind = "dyck" if even_potential else "motzkin"
    total = LatticePolynomial()
    for path in lattice_paths(j, row_offset, col_offset, kind):
        b_off = []
        a_off = []
        lvl = row_offset
        for s in path.steps:
            if s == -1:
                b_off.append(lvl)  # weight of the step leaving level lvl downward
            elif s == 0:
                a_off.append(lvl)
            lvl += s
        total = total + LatticePolynomial.monomial(1, b_off, a_off)
    return total


def lattice_equation_exprs(nu: int, kind: str) -> LatticePolynomial:
    """Right-hand side of the difference-string (kind="string") or Toda
    (kind="toda") lattice equation at a generic site, for valence 2*nu.

    string:  (L + t L^(2nu-1))_{n+1,n} - (L + t L^(2nu-1))_{n,n-1}
    toda:    (L^(2nu))_{n+1,n-1} - (L^(2nu))_{n,n-2}
    """
    if nu < 1:
        raise RejectedInput("valence parameter must be >= 1")
    if kind == "string":
        top = operator_power_entry(1, 1, 0) + operator_power_entry(2 * nu - 1, 1, 0).times_t()
        return top - top.shift(-1)
    if kind == "toda":
        top = operator_power_entry(2 * nu, 1, -1)
        return top - top.shift(-1)
    raise RejectedInput("kind must be 'string' or 'toda'")


def trinomial(n: int, a: int, b: int, c: int) -> int:
    """Multinomial n!/(a! b! c!), zero whenever any lower index is negative."""
    if a < 0 or b < 0 or c < 0 or a + b + c != n:
        return 0
    return factorial(n) // (factorial(a) * factorial(b) * factorial(c))
