"""The lattice of alternating 3-tensors on H and orbit spans inside it.

Triples (p, q, r) with p < q < r index the basis of the third exterior power.
Flat vectors list coefficients in colexicographic order of triples, i.e.
sorted by r, then q, then p; position = C(p,1) + C(q,2) + C(r,3).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ParameterError
from .lattice import IntegerLattice, elementary_divisors
from .symplectic import HClass, HEndo, a_index, b_index, basis_label

Triple = tuple[int, int, int]


def colex_index(t: Triple) -> int:
    p, q, r = t
    return comb(p, 1) + comb(q, 2) + comb(r, 3)


def triples(genus: int) -> list[Triple]:
    """All basis triples for genus ``genus`` in colex order."""
    return sorted(combinations(range(2 * genus), 3), key=lambda t: (t[2], t[1], t[0]))


def cube_dim(genus: int) -> int:
    return comb(2 * genus, 3)


def _sort3(p: int, q: int, r: int) -> tuple[int, Triple]:
    """Sign and sorted form of (p, q, r); sign 0 on a repeated index."""
    if p == q or q == r or p == r:
        return 0, (p, q, r)
    sign = 1
    if p > q:
        p, q, sign = q, p, -sign
    if q > r:
        q, r, sign = r, q, -sign
    if p > q:
        p, q, sign = q, p, -sign
    return sign, (p, q, r)


@dataclass(frozen=True)
class Wedge3:
    """A sparse element of the third exterior power of H.

    ``terms`` holds (triple, coefficient) pairs with strictly increasing
    triples, nonzero coefficients, sorted in colex order.
    """

    genus: int
    terms: tuple[tuple[Triple, int], ...] = ()

    @classmethod
    def from_dict(cls, genus: int, coeffs: Mapping[Triple, int]) -> Wedge3:
        n = 2 * genus
        clean: dict[Triple, int] = {}
        for t, c in coeffs.items():
            if not c:
                continue
            sign, s = _sort3(*t)
            if not sign:
                continue
            if not 0 <= s[0] or s[2] >= n:
                raise ParameterError(f"triple {t} out of range for genus {genus}")
            clean[s] = clean.get(s, 0) + sign * c
        items = tuple(sorted(((t, c) for t, c in clean.items() if c),
                             key=lambda tc: (tc[0][2], tc[0][1], tc[0][0])))
        return cls(genus, items)

    @classmethod
    def zero(cls, genus: int) -> Wedge3:
        return cls(genus, ())

    @classmethod
    def monomial(cls, genus: int, p: int, q: int, r: int, coeff: int = 1) -> Wedge3:
        return cls.from_dict(genus, {(p, q, r): coeff})

    def as_dict(self) -> dict[Triple, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: Wedge3) -> None:
        if other.genus != self.genus:
            raise ParameterError(f"genus mismatch: {self.genus} versus {other.genus}")

    def __add__(self, other: Wedge3) -> Wedge3:
        self._check(other)
        d = self.as_dict()
        for t, c in other.terms:
            d[t] = d.get(t, 0) + c
        return Wedge3.from_dict(self.genus, d)

    def __neg__(self) -> Wedge3:
        return Wedge3(self.genus, tuple((t, -c) for t, c in self.terms))

    def __sub__(self, other: Wedge3) -> Wedge3:
        return self + (-other)

    def __mul__(self, scalar: int) -> Wedge3:
        if not scalar:
            return Wedge3.zero(self.genus)
        return Wedge3(self.genus, tuple((t, scalar * c) for t, c in self.terms))

    __rmul__ = __mul__

    def to_vector(self) -> list[int]:
        v = [0] * cube_dim(self.genus)
        for t, c in self.terms:
            v[colex_index(t)] = c
        return v

    @classmethod
    def from_vector(cls, genus: int, vector: Sequence[int]) -> Wedge3:
        if len(vector) != cube_dim(genus):
            raise ParameterError("vector length does not match C(2g,3)")
        return cls.from_dict(genus, {t: vector[i] for i, t in enumerate(triples(genus)) if vector[i]})

    def mod2_bits(self) -> int:
        """Bitmask of odd coefficients, bit i = colex position i."""
        out = 0
        for t, c in self.terms:
            if c % 2:
                out |= 1 << colex_index(t)
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (p, q, r), c in self.terms:
            mono = "^".join(basis_label(i) for i in (p, q, r))
            parts.append(f"{c:+d}*{mono}")
        return " ".join(parts)


def wedge(x: HClass, y: HClass, z: HClass) -> Wedge3:
    """Trilinear alternating product x ^ y ^ z."""
    x._check(y)
    x._check(z)
    out: dict[Triple, int] = {}
    xs = [(i, c) for i, c in enumerate(x.coeffs) if c]
    ys = [(i, c) for i, c in enumerate(y.coeffs) if c]
    zs = [(i, c) for i, c in enumerate(z.coeffs) if c]
    for p, cp in xs:
        for q, cq in ys:
            for r, cr in zs:
                sign, t = _sort3(p, q, r)
                if sign:
                    out[t] = out.get(t, 0) + sign * cp * cq * cr
    return Wedge3.from_dict(x.genus, out)


class CubeMap:
    """The map on the third exterior power induced by an endomorphism of H."""

    def __init__(self, f: HEndo) -> None:
        self.f = f
        self.genus = f.genus
        self._cols = f.sparse_columns()
        self._cache: dict[Triple, dict[Triple, int]] = {}

    def _monomial_image(self, t: Triple) -> dict[Triple, int]:
        img = self._cache.get(t)
        if img is None:
            img = {}
            cp, cq, cr = (self._cols[i] for i in t)
            for p, x in cp:
                for q, y in cq:
                    if q == p:
                        continue
                    for r, z in cr:
                        sign, s = _sort3(p, q, r)
                        if sign:
                            img[s] = img.get(s, 0) + sign * x * y * z
            img = {s: c for s, c in img.items() if c}
            self._cache[t] = img
        return img

    def __call__(self, w: Wedge3) -> Wedge3:
        if w.genus != self.genus:
            raise ParameterError(f"genus mismatch: map has genus {self.genus}, vector {w.genus}")
        out: dict[Triple, int] = {}
        for t, c in w.terms:
            for s, d in self._monomial_image(t).items():
                out[s] = out.get(s, 0) + c * d
        return Wedge3.from_dict(self.genus, out)


def induced_cube(f: HEndo) -> CubeMap:
    return CubeMap(f)


def omega_terms(genus: int) -> list[tuple[int, int]]:
    return [(a_index(i), b_index(i)) for i in range(1, genus + 1)]


def wedge_omega(c: HClass) -> Wedge3:
    """c ^ (a_1^b_1 + ... + a_g^b_g)."""
    g = c.genus
    out = Wedge3.zero(g)
    for ai, bi in omega_terms(g):
        out = out + wedge(c, HClass.basis(ai, g), HClass.basis(bi, g))
    return out


def omega_rows(genus: int) -> list[Wedge3]:
    """wedge_omega of every basis vector, in basis order."""
    return [wedge_omega(HClass.basis(i, genus)) for i in range(2 * genus)]


@dataclass(frozen=True)
class LatticeVerdict:
    rank: int
    elementary_divisors: tuple[int, ...]
    saturated: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "elementary_divisors", tuple(self.elementary_divisors))
        if self.rank != len(self.elementary_divisors):
            raise ValueError("rank must equal the number of elementary divisors")
        if self.saturated != all(d == 1 for d in self.elementary_divisors):
            raise ValueError("saturated must mean every elementary divisor is 1")


def verdict_from_rows(rows: Iterable[Sequence[int]]) -> LatticeVerdict:
    divs = elementary_divisors(list(rows))
    return LatticeVerdict(len(divs), tuple(divs), all(d == 1 for d in divs))


def lattice_saturation(vectors: Sequence[Wedge3], ambient_dim: int) -> LatticeVerdict:
    """Rank, elementary divisors and saturation of the Z-span of ``vectors``."""
    if not vectors:
        raise ParameterError("lattice_saturation needs at least one vector")
    if cube_dim(vectors[0].genus) != ambient_dim:
        raise ParameterError(
            f"ambient dimension {ambient_dim} does not match C(2g,3) for g={vectors[0].genus}")
    lat = IntegerLattice(ambient_dim)
    for w in vectors:
        lat.add(w.to_vector())
    return verdict_from_rows(lat.basis())


def quotient_verdict(lat: IntegerLattice, genus: int) -> LatticeVerdict:
    """Verdict for (lat + omega) / omega inside the quotient by the omega image.

    ``lat`` must already contain the omega rows.  The omega image is a saturated
    sublattice of rank 2g (checked in the test suite), so the quotient
    divisors are the divisors of ``lat`` with 2g leading ones removed.
    """
    divs = elementary_divisors(lat.basis())
    n_omega = 2 * genus
    if divs[:n_omega] != [1] * n_omega:
        raise ValueError("omega image is expected to contribute 2g unit divisors")
    rest = divs[n_omega:]
    return LatticeVerdict(len(rest), tuple(rest), all(d == 1 for d in rest))


def quotient_mod_H(vectors: Sequence[Wedge3], genus: int) -> LatticeVerdict:
    """Saturation verdict of ``vectors`` in the quotient by the image of wedge_omega."""
    lat = IntegerLattice(cube_dim(genus))
    for w in omega_rows(genus):
        lat.add(w.to_vector())
    for w in vectors:
        if w.genus != genus:
            raise ParameterError("genus mismatch in quotient_mod_H")
        lat.add(w.to_vector())
    return quotient_verdict(lat, genus)


@dataclass
class OrbitSpan:
    """Result of expanding seed vectors under a generating set."""

    lattice: IntegerLattice
    orbit: list[Wedge3] = field(default_factory=list)
    generations: int = 0
    status: str = "complete"  # complete | budget | timeout

    @property
    def orbit_size(self) -> int:
        return len(self.orbit)


def expand_orbit(
    seeds: Sequence[Wedge3],
    generators: Sequence[Callable[[Wedge3], Wedge3]],
    genus: int,
    base: Sequence[Wedge3] = (),
    budget: int = 50_000,
    deadline: float | None = None,
) -> OrbitSpan:
    """Breadth-first orbit expansion with a running Hermite basis.

    Only vectors that enlarged the lattice when inserted are expanded in the
    next generation; anything else is an integer combination of earlier
    vectors whose images are already queued.  The loop stops after a full
    generation leaves the lattice unchanged, at which point the lattice is
    closed under every generator.  ``base`` rows must span a generator-stable
    sublattice; they are inserted first and never expanded.
    """
    lat = IntegerLattice(cube_dim(genus))
    for w in base:
        lat.add(w.to_vector())
    result = OrbitSpan(lat)
    seen: set = set()
    frontier: list[Wedge3] = []
    for s in seeds:
        if s.terms in seen:
            continue
        seen.add(s.terms)
        result.orbit.append(s)
        if lat.add(s.to_vector()):
            frontier.append(s)
    while frontier:
        nxt: list[Wedge3] = []
        for w in frontier:
            for gen in generators:
                u = gen(w)
                if u.terms in seen:
                    continue
                seen.add(u.terms)
                result.orbit.append(u)
                if len(result.orbit) > budget:
                    result.status = "budget"
                    return result
                if lat.add(u.to_vector()):
                    nxt.append(u)
            if deadline is not None and time.monotonic() > deadline:
                result.status = "timeout"
                return result
        result.generations += 1
        frontier = nxt
    return result
