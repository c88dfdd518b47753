# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for exhaustive matching enumeration on fat graphs.

Mirror of _mapcore_py.genus_tally; the pure-Python module is the reference
implementation and the two are cross-checked in the test suite.  All
tallies fit in 64 bits below the desk-scale cap (19!! ~ 6.5e8).
"""


cdef long long _completions(int r) noexcept:
    cdef long long out = 1
    while r > 2:
        out *= r - 1
        r -= 2
    return out


cdef class _Enumerator:
    cdef int j, m, n, edges, stamp
    cdef int sigma[64]
    cdef int match[64]
    cdef int parent[32]
    cdef int size[32]
    cdef int open_[32]
    cdef int seen[64]
    cdef long long counts[40]
    cdef long long disconnected

    def __cinit__(self, int j, int m):
        cdef int v, i
        self.j = j
        self.m = m
        self.n = j * m
        self.edges = self.n // 2
        self.stamp = 0
        self.disconnected = 0
        for v in range(m):
            for i in range(j):
                self.sigma[j * v + i] = j * v + (i + 1) % j
        for i in range(self.n):
            self.match[i] = -1
            self.seen[i] = 0
        for v in range(m):
            self.parent[v] = v
            self.size[v] = 1
            self.open_[v] = j
        for i in range(40):
            self.counts[i] = 0

    cdef int _find(self, int x) noexcept:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    cdef int _faces(self) noexcept:
        cdef int f = 0
        cdef int h, cur
        self.stamp += 1
        for h in range(self.n):
            if self.seen[h] != self.stamp:
                f += 1
                cur = h
                while self.seen[cur] != self.stamp:
                    self.seen[cur] = self.stamp
                    cur = self.sigma[self.match[cur]]
        return f

    cdef void _leaf(self, int comps) noexcept:
        cdef int f, g
        if comps == 1:
            f = self._faces()
            g = (2 - self.m + self.edges - f) // 2
            self.counts[g] += 1
        else:
            self.disconnected += 1

    cdef void _rec(self, int scan, int unmatched, int comps) noexcept:
        cdef int a = scan
        cdef int b, ra, rb, rest, old_open, new_open, tmp
        while self.match[a] != -1:
            a += 1
        rest = unmatched - 2
        for b in range(a + 1, self.n):
            if self.match[b] != -1:
                continue
            self.match[a] = b
            self.match[b] = a
            ra = self._find(a // self.j)
            rb = self._find(b // self.j)
            if ra == rb:
                self.open_[ra] -= 2
                if self.open_[ra] == 0 and self.size[ra] < self.m:
                    self.disconnected += _completions(rest)
                elif rest == 0:
                    self._leaf(comps)
                else:
                    self._rec(a + 1, rest, comps)
                self.open_[ra] += 2
            else:
                if self.size[ra] < self.size[rb]:
                    tmp = ra
                    ra = rb
                    rb = tmp
                self.parent[rb] = ra
                self.size[ra] += self.size[rb]
                old_open = self.open_[ra]
                new_open = old_open + self.open_[rb] - 2
                self.open_[ra] = new_open
                if new_open == 0 and self.size[ra] < self.m:
                    self.disconnected += _completions(rest)
                elif rest == 0:
                    self._leaf(comps - 1)
                else:
                    self._rec(a + 1, rest, comps - 1)
                self.open_[ra] = old_open
                self.size[ra] -= self.size[rb]
                self.parent[rb] = rb
            self.match[a] = -1
            self.match[b] = -1


def genus_tally(int j, int m):
    """(counts per genus as list, disconnected count) over all matchings."""
    cdef int n = j * m
    if n % 2:
        raise ValueError("odd number of half-edges admits no matching")
    if n > 64 or m > 32:
        raise ValueError("half-edge count beyond compiled kernel bounds")
    cdef _Enumerator enum = _Enumerator(j, m)
    enum._rec(0, n, m)
    cdef int top = 39
    while top >= 0 and enum.counts[top] == 0:
        top -= 1
    return [enum.counts[g] for g in range(top + 1)], enum.disconnected
