"""Brute-force, assumption-free map enumeration via rotation systems.

A fat graph is a pair (sigma, alpha) of permutations of the half-edges:
sigma rotates the half-edges around each vertex (fixed canonically here),
alpha is the fixed-point-free involution pairing half-edges into edges.
Faces are the cycles of sigma o alpha and the genus follows from Euler's
relation, so every map count produced here is ground truth obtained without
any generating-function input.

Counts are of labelled regular maps: the canonical vertex labelling is
legitimate because the 1/(m! j^m) weight in the generating series cancels
the relabelling group exactly, so no automorphism groups are ever needed.

The matching enumeration kernel is selected at import time: the compiled
extension ``_mapcore`` when it is available, otherwise the pure-Python twin
``_mapcore_py`` with identical semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .errors import NoMatchingExists, RejectedInput, SizeLimit
from .exact_kernel import Q, Series

try:  # compiled kernel (optional)
    from . import _mapcore as _kernel

    KERNEL_KIND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _mapcore_py as _kernel

    KERNEL_KIND = "pure"

from . import _mapcore_py

HALF_EDGE_CAP = 20


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True)
class FatGraph:
    """m vertices of valence j with matching involution alpha on half-edges.

    Half-edges j*v .. j*v+j-1 belong to vertex v in cyclic order; alpha maps
    each half-edge to its partner.
    """

    m: int
    j: int
    alpha: tuple[int, ...]

    def __post_init__(self):
        n = self.m * self.j
        if n % 2:
            raise NoMatchingExists("odd half-edge count %d" % n)
        if sorted(self.alpha) != list(range(n)):
            raise RejectedInput("alpha is not a permutation of the half-edges")
        for h, hp in enumerate(self.alpha):
            if hp == h or self.alpha[hp] != h:
                raise RejectedInput("alpha is not a fixed-point-free involution")

    def sigma(self) -> tuple[int, ...]:
        n = self.m * self.j
        out = [0] * n
        for v in range(self.m):
            base = self.j * v
            for i in range(self.j):
                out[base + i] = base + (i + 1) % self.j
        return tuple(out)


def genus_of(graph: FatGraph) -> int | None:
    """Genus of the glued surface, or None when the graph is disconnected.

    Faces are cycles of sigma o alpha; vertices minus edges plus faces is
    2 - 2g for connected maps (always an even combination, asserted here).
    """
    n = graph.m * graph.j
    sigma = graph.sigma()
    # connectivity on vertices through the matched edges
    parent = list(range(graph.m))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    comps = graph.m
    for h in range(n):
        a, b = find(h // graph.j), find(graph.alpha[h] // graph.j)
        if a != b:
            parent[a] = b
            comps -= 1
    if comps != 1:
        return None
    seen = [False] * n
    faces = 0
    for h in range(n):
        if not seen[h]:
            faces += 1
            cur = h
            while not seen[cur]:
                seen[cur] = True
                cur = sigma[graph.alpha[cur]]
    euler = graph.m - n // 2 + faces
    if euler % 2:
        raise RejectedInput("odd Euler characteristic on a connected map")
    g = (2 - euler) // 2
    if g < 0:
        raise RejectedInput("negative genus: inconsistent fat graph")
    return g


def kappa_tally(j: int, m: int, cap: int = HALF_EDGE_CAP):
    """(counts per genus, disconnected count) over all perfect matchings."""
    if j < 1 or m < 1:
        raise RejectedInput("valence and vertex count must be positive")
    n = j * m
    if n % 2:
        raise NoMatchingExists("%d half-edges cannot be matched" % n)
    if n > cap:
        raise SizeLimit("half-edge count %d exceeds cap %d" % (n, cap))
    counts, disconnected = _kernel.genus_tally(j, m)
    total = sum(counts) + disconnected
    if total != double_factorial(n - 1):
        raise RejectedInput("matching tally lost mass: %d != (n-1)!!" % total)
    return {g: c for g, c in enumerate(counts) if c}, disconnected


def kappa_counts(j: int, m: int, cap: int = HALF_EDGE_CAP) -> dict[int, int]:
    """Number of labelled j-regular genus-g maps on m vertices, per genus."""
    return kappa_tally(j, m, cap)[0]


def eg_series_from_kappa(j: int, g: int, m_max: int, cap: int = HALF_EDGE_CAP) -> Series:
    """Ordinary generating series of genus-g map counts in the variable
    u = -t_j (one coefficient kappa/(m! j^m) per vertex count m)."""
    coeffs = [Q(0)]
    for m in range(1, m_max + 1):
        kappa = kappa_counts(j, m, cap).get(g, 0) if (j * m) % 2 == 0 else 0
        coeffs.append(Q(kappa, factorial(m) * j ** m))
    return Series("u", coeffs, m_max)


def genus_tally_pure(j: int, m: int):
    """Pure-Python kernel, exposed for cross-checks and benchmarks."""
    return _mapcore_py.genus_tally(j, m)
