"""Exact integer and mod-2 linear algebra used by the span checks.

``IntegerLattice`` keeps a reduced row-echelon (Hermite) basis of the Z-span
of every vector inserted so far and reports whether an insertion enlarged the
lattice.  ``elementary_divisors`` runs a fraction-free Smith normal form.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ParameterError


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


class IntegerLattice:
    """Sublattice of Z^n held in Hermite normal form.

    Rows are keyed by pivot column; each pivot entry is positive and every
    entry above a pivot is reduced into ``[0, pivot)``.
    """

    def __init__(self, dim: int) -> None:
        if dim <= 0:
            raise ParameterError("lattice dimension must be positive")
        self.dim = dim
        self.rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def copy(self) -> IntegerLattice:
        other = IntegerLattice(self.dim)
        other.rows = {p: list(r) for p, r in self.rows.items()}
        return other

    def _reduce_above(self, pivot: int) -> None:
        row = self.rows[pivot]
        d = row[pivot]
        for p, other in self.rows.items():
            if p < pivot and other[pivot]:
                q = other[pivot] // d
                if q:
                    for j in range(pivot, self.dim):
                        other[j] -= q * row[j]

    def _reduce_row(self, row: list[int]) -> None:
        for p in sorted(self.rows):
            if p <= _leading(row):
                continue
            if row[p]:
                piv = self.rows[p]
                q = row[p] // piv[p]
                if q:
                    for j in range(p, self.dim):
                        row[j] -= q * piv[j]

    def add(self, vector: Sequence[int]) -> bool:
        """Insert ``vector``; return True iff the lattice grew."""
        if len(vector) != self.dim:
            raise ParameterError(f"vector of length {len(vector)} in lattice of dim {self.dim}")
        v = list(vector)
        changed_pivots: list[int] = []
        p = _leading(v)
        while p < self.dim:
            row = self.rows.get(p)
            if row is None:
                if v[p] < 0:
                    v = [-x for x in v]
                self.rows[p] = v
                self._reduce_row(v)
                changed_pivots.append(p)
                break
            if v[p] % row[p] == 0:
                q = v[p] // row[p]
                for j in range(p, self.dim):
                    v[j] -= q * row[j]
            else:
                g, s, t = _xgcd(row[p], v[p])
                r_div, v_div = row[p] // g, v[p] // g
                new_row = [s * row[j] + t * v[j] for j in range(self.dim)]
                rest = [r_div * v[j] - v_div * row[j] for j in range(self.dim)]
                self.rows[p] = new_row
                self._reduce_row(new_row)
                changed_pivots.append(p)
                v = rest
            p = _leading(v)
        for piv in sorted(changed_pivots, reverse=True):
            self._reduce_above(piv)
        return bool(changed_pivots)

    def extend(self, vectors: Iterable[Sequence[int]]) -> bool:
        grew = False
        for v in vectors:
            grew |= self.add(v)
        return grew

    def contains(self, vector: Sequence[int]) -> bool:
        v = list(vector)
        p = _leading(v)
        while p < self.dim:
            row = self.rows.get(p)
            if row is None or v[p] % row[p]:
                return False
            q = v[p] // row[p]
            for j in range(p, self.dim):
                v[j] -= q * row[j]
            p = _leading(v)
        return True

    def basis(self) -> list[list[int]]:
        return [list(self.rows[p]) for p in sorted(self.rows)]

    def index_if_full(self) -> int:
        """Product of pivots (the index in Z^n) when the rank is full, else 0."""
        if self.rank < self.dim:
            return 0
        out = 1
        for p in self.rows:
            out *= self.rows[p][p]
        return out


def _leading(v: Sequence[int]) -> int:
    for i, x in enumerate(v):
        if x:
            return i
    return len(v)


def elementary_divisors(rows: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero Smith normal form diagonal of the integer matrix with these rows.

    Divisors are positive and returned in divisibility order.  The pivot at
    each stage is the entry of smallest absolute value in the remaining block,
    which keeps intermediate coefficients small.
    """
    m = [list(r) for r in rows if any(r)]
    divisors: list[int] = []
    while m:
        ncols = len(m[0])
        best = None
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        m[0], m[pi] = m[pi], m[0]
        for row in m:
            row[0], row[pj] = row[pj], row[0]
        while True:
            d = m[0][0]
            # clear the first column
            dirty = False
            for i in range(1, len(m)):
                if m[i][0]:
                    q, r = divmod(m[i][0], d)
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[0])]
                    if r:
                        dirty = True
            for j in range(1, ncols):
                if m[0][j]:
                    q, r = divmod(m[0][j], d)
                    if q:
                        for row in m:
                            row[j] -= q * row[0]
                    if r:
                        dirty = True
            if dirty:
                # move the smallest nonzero remainder into the pivot position
                cand = [(abs(m[i][0]), i, 0) for i in range(1, len(m)) if m[i][0]]
                cand += [(abs(m[0][j]), 0, j) for j in range(1, ncols) if m[0][j]]
                _, ci, cj = min(cand)
                if cj == 0:
                    m[0], m[ci] = m[ci], m[0]
                else:
                    for row in m:
                        row[0], row[cj] = row[cj], row[0]
                continue
            # first row and column are clear; enforce divisibility on the rest
            bad = None
            for i in range(1, len(m)):
                for j in range(1, ncols):
                    if m[i][j] % d:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            m[0] = [a + b for a, b in zip(m[0], m[bad])]
        divisors.append(abs(m[0][0]))
        m = [row[1:] for row in m[1:]]
        m = [row for row in m if any(row)]
    return divisors


class F2Span:
    """Span of bit vectors over GF(2), stored as an xor basis keyed by top bit."""

    def __init__(self, dim: int) -> None:
        self.dim = dim
        self.basis: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self.basis.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self.basis[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0
