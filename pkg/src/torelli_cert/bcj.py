"""The Boolean polynomial algebra B^3 over F_2 and the sigma-side checks.

A monomial is a bitmask over the 2g generators abar_1, bbar_1, ..., abar_g,
bbar_g (bit i is basis index i); the empty mask is the constant 1.  Because
every generator is idempotent, multiplying monomials is a bitwise OR.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Optional, Sequence

from .certificate import Certificate, flag
from .errors import ParameterError
from .exterior import colex_index, cube_dim, triples
from .johnson import DEFAULT_BUDGET, DEFAULT_TIME_LIMIT_S, tau_orbit
from .lattice import F2Span
from .symplectic import HEndo, SurfaceParams, basis_label, sp_generators

MAX_DEGREE = 3


def _popcount(m: int) -> int:
    return bin(m).count("1")


@dataclass(frozen=True)
class BPoly:
    """Element of B^3: a set of monomials with implicit coefficient 1."""

    genus: int
    monomials: frozenset = frozenset()

    def __post_init__(self) -> None:
        mons = frozenset(self.monomials)
        limit = 1 << (2 * self.genus)
        for m in mons:
            if not 0 <= m < limit:
                raise ParameterError(f"monomial mask {m} uses variables beyond genus {self.genus}")
            if _popcount(m) > MAX_DEGREE:
                raise ParameterError("BPoly holds only terms of degree at most 3")
        object.__setattr__(self, "monomials", mons)

    @classmethod
    def zero(cls, genus: int) -> BPoly:
        return cls(genus)

    @classmethod
    def one(cls, genus: int) -> BPoly:
        return cls(genus, frozenset({0}))

    @classmethod
    def var(cls, index: int, genus: int) -> BPoly:
        return cls(genus, frozenset({1 << index}))

    @classmethod
    def monomial(cls, genus: int, *indices: int) -> BPoly:
        m = 0
        for i in indices:
            m |= 1 << i
        return cls(genus, frozenset({m}))

    @property
    def degree(self) -> int:
        return max((_popcount(m) for m in self.monomials), default=-1)

    def is_zero(self) -> bool:
        return not self.monomials

    def homogeneous_part(self, d: int) -> BPoly:
        return BPoly(self.genus, frozenset(m for m in self.monomials if _popcount(m) == d))

    def __add__(self, other: BPoly) -> BPoly:
        return bpoly_add(self, other)

    def __mul__(self, other: BPoly) -> BPoly:
        return bpoly_mul(self, other)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        terms = []
        for m in sorted(self.monomials, key=lambda m: (_popcount(m), m)):
            if m == 0:
                terms.append("1")
            else:
                terms.append("*".join(basis_label(i) + "~" for i in range(2 * self.genus)
                                      if m >> i & 1))
        return " + ".join(terms)


def bpoly_add(p: BPoly, q: BPoly) -> BPoly:
    if p.genus != q.genus:
        raise ParameterError("genus mismatch")
    return BPoly(p.genus, p.monomials ^ q.monomials)


def bpoly_mul(p: BPoly, q: BPoly, truncate: bool = True) -> BPoly:
    """Product in B; terms above degree 3 are dropped when ``truncate`` is set."""
    if p.genus != q.genus:
        raise ParameterError("genus mismatch")
    acc: set[int] = set()
    for m in p.monomials:
        for n in q.monomials:
            acc ^= {m | n}
    high = [m for m in acc if _popcount(m) > MAX_DEGREE]
    if high and not truncate:
        raise ParameterError("product has terms of degree above 3")
    return BPoly(p.genus, frozenset(acc.difference(high)))


@dataclass(frozen=True)
class F2Class:
    """Mod-2 homology class in the basis a_1, b_1, ..., a_g, b_g."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) % 2 for b in self.bits)
        if not bits or len(bits) % 2:
            raise ParameterError(f"an F2 class needs 2g bits, got {len(bits)}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def basis(cls, index: int, genus: int) -> F2Class:
        bits = [0] * (2 * genus)
        bits[index] = 1
        return cls(tuple(bits))

    @classmethod
    def from_mask(cls, mask: int, genus: int) -> F2Class:
        return cls(tuple(mask >> i & 1 for i in range(2 * genus)))

    @property
    def genus(self) -> int:
        return len(self.bits) // 2

    @property
    def mask(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __add__(self, other: F2Class) -> F2Class:
        if len(other.bits) != len(self.bits):
            raise ParameterError("genus mismatch")
        return F2Class(tuple(x ^ y for x, y in zip(self.bits, other.bits)))


def pairing_mod2(x: F2Class, y: F2Class) -> int:
    if len(x.bits) != len(y.bits):
        raise ParameterError("genus mismatch")
    xs, ys = x.bits, y.bits
    return sum(xs[j] * ys[j + 1] + xs[j + 1] * ys[j] for j in range(0, len(xs), 2)) % 2


def bar(c: F2Class) -> BPoly:
    """Extend v -> vbar from basis vectors using bar(a+b) = bar(a) + bar(b) + i(a,b)."""
    g = c.genus
    mons = {1 << i for i, b in enumerate(c.bits) if b}
    # i(e_s, e_t) is odd exactly for the pairs {a_j, b_j}
    handles_full = sum(c.bits[j] & c.bits[j + 1] for j in range(0, 2 * g, 2))
    if handles_full % 2:
        mons.add(0)
    return BPoly(g, frozenset(mons))


def _check_symplectic_pairs(pairs: Sequence[tuple[F2Class, F2Class]]) -> None:
    for i, (a, b) in enumerate(pairs):
        if pairing_mod2(a, b) != 1:
            raise ParameterError(f"pair {i} does not intersect once mod 2")
        for j in range(i + 1, len(pairs)):
            c, d = pairs[j]
            if pairing_mod2(a, c) or pairing_mod2(a, d) or pairing_mod2(b, c) or pairing_mod2(b, d):
                raise ParameterError(f"pairs {i} and {j} are not orthogonal mod 2")


def sigma_septwist(subsurface_basis: Sequence[tuple[F2Class, F2Class]]) -> BPoly:
    """sigma of the twist about a curve cutting off a subsurface with this symplectic basis."""
    if not subsurface_basis:
        raise ParameterError("a separating curve bounds a subsurface of positive genus")
    _check_symplectic_pairs(subsurface_basis)
    g = subsurface_basis[0][0].genus
    out = BPoly.zero(g)
    for a, b in subsurface_basis:
        out = out + bar(a) * bar(b)
    return out


def standard_subsurface(genus: int, handles: Iterable[int]) -> list[tuple[F2Class, F2Class]]:
    return [(F2Class.basis(2 * (i - 1), genus), F2Class.basis(2 * (i - 1) + 1, genus))
            for i in handles]


def is_symplectic_mod2(f: HEndo) -> bool:
    n = f.size
    cols = [F2Class(f.column(c)) for c in range(n)]
    for p in range(n):
        for q in range(p + 1, n):
            want = 1 if (p % 2 == 0 and q == p + 1) else 0
            if pairing_mod2(cols[p], cols[q]) != want:
                return False
    return True


class Sp2Action:
    """Algebra automorphism of B induced by a mod-2 symplectic map."""

    def __init__(self, f: HEndo) -> None:
        if not is_symplectic_mod2(f):
            raise ParameterError("sp2_action requires a map preserving the mod-2 pairing")
        self.genus = f.genus
        self.images = [bar(F2Class(f.column(c))) for c in range(f.size)]
        self._cache: dict[int, frozenset] = {}

    def _monomial_image(self, m: int) -> frozenset:
        img = self._cache.get(m)
        if img is None:
            poly = BPoly.one(self.genus)
            for i in range(2 * self.genus):
                if m >> i & 1:
                    poly = bpoly_mul(poly, self.images[i], truncate=False)
            img = poly.monomials
            self._cache[m] = img
        return img

    def __call__(self, p: BPoly) -> BPoly:
        if p.genus != self.genus:
            raise ParameterError("genus mismatch")
        acc: set[int] = set()
        for m in p.monomials:
            acc ^= self._monomial_image(m)
        return BPoly(self.genus, frozenset(acc))


def sp2_action(f: HEndo, p: BPoly) -> BPoly:
    return Sp2Action(f)(p)


def mod2_generators(genus: int) -> list[HEndo]:
    """Distinct mod-2 reductions of sp_generators, in first-occurrence order."""
    out: list[HEndo] = []
    seen = set()
    for f in sp_generators(genus):
        r = f.mod2()
        if r.matrix not in seen:
            seen.add(r.matrix)
            out.append(r)
    return out


def monomial_basis(genus: int, max_degree: int) -> list[int]:
    """Monomial masks of degree <= max_degree, ordered by degree then colex."""
    n = 2 * genus
    out = []
    for d in range(max_degree + 1):
        combos = sorted(combinations(range(n), d), key=lambda t: tuple(reversed(t)))
        out.extend(sum(1 << i for i in t) for t in combos)
    return out


def b_dimension(genus: int, degree: int) -> int:
    return sum(comb(2 * genus, d) for d in range(degree + 1))


def mod2_bridge(p: BPoly) -> int:
    """Degree-3 part of ``p`` as a mod-2 vector over the colex triple basis (bitmask)."""
    out = 0
    for m in p.monomials:
        if _popcount(m) == 3:
            t = tuple(i for i in range(2 * p.genus) if m >> i & 1)
            out |= 1 << colex_index(t)
    return out


def mod2_induced_cube(f: HEndo, bits: int) -> int:
    """Action of f (mod 2) on a mod-2 vector over the triple basis."""
    g = f.genus
    cols = [[r for r in range(f.size) if f.matrix[r][c] % 2] for c in range(f.size)]
    out = 0
    for idx, (p, q, r) in enumerate(triples(g)):
        if not bits >> idx & 1:
            continue
        for x in cols[p]:
            for y in cols[q]:
                if y == x:
                    continue
                for z in cols[r]:
                    if z == x or z == y:
                        continue
                    out ^= 1 << colex_index(tuple(sorted((x, y, z))))
    return out


def verify_B2_generation(
    genus: int,
    seed: Optional[BPoly] = None,
    budget: int = DEFAULT_BUDGET,
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S,
) -> Certificate:
    """F_2-span of the orbit of abar_1 bbar_1 under the mod-2 generators."""
    if genus < 3:
        raise ParameterError(f"verify_B2_generation needs g >= 3, got {genus}")
    start = time.monotonic()
    deadline = None if time_limit_s is None else start + time_limit_s
    if seed is None:
        seed = BPoly.monomial(genus, 0, 1)
    gens = [Sp2Action(f) for f in mod2_generators(genus)]
    index = {m: i for i, m in enumerate(monomial_basis(genus, 2))}
    expected = len(index)

    def to_bits(p: BPoly) -> int:
        out = 0
        for m in p.monomials:
            if m not in index:
                raise AssertionError("orbit left B^2")
            out |= 1 << index[m]
        return out

    span = F2Span(expected)
    seen = {seed.monomials}
    orbit_size = 1
    frontier = [seed] if span.add(to_bits(seed)) else []
    status = "complete"
    generations = 0
    while frontier and status == "complete":
        nxt = []
        for p in frontier:
            for act in gens:
                u = act(p)
                if u.monomials in seen:
                    continue
                seen.add(u.monomials)
                orbit_size += 1
                if orbit_size > budget:
                    status = "budget"
                    break
                if span.add(to_bits(u)):
                    nxt.append(u)
            if status != "complete":
                break
            if deadline is not None and time.monotonic() > deadline:
                status = "timeout"
                break
        generations += 1
        frontier = nxt
    dim_ok = span.rank == expected
    if dim_ok:
        verdict = "pass"
    elif status != "complete":
        verdict = "inconclusive"
    else:
        verdict = "fail"
    metrics = {
        "dimension": span.rank,
        "expected_dimension": expected,
        "orbit_size": orbit_size,
        "generations": generations,
        "generator_count": len(gens),
        "dimension_ok": flag(dim_ok),
    }
    conventions = {
        "basis_order": "a1,b1,...,ag,bg",
        "bar_relation": "bar(a+b) = bar(a) + bar(b) + i(a,b) mod 2",
        "seed": str(seed),
        "orbit_status": status,
    }
    cert = Certificate("bcj-b2", {"genus": genus}, conventions, metrics, verdict)
    return cert.with_elapsed(int((time.monotonic() - start) * 1000))


def verify_sigma_surjectivity(
    params: SurfaceParams,
    budget: int = DEFAULT_BUDGET,
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S,
) -> Certificate:
    """B^2 generation plus the mod-2 reduction of the tau orbit filling wedge^3 F_2^{2g}."""
    if params.kind != "bordered":
        raise ParameterError("sigma surjectivity is stated for bordered surfaces only")
    start = time.monotonic()
    g = params.genus
    b2 = verify_B2_generation(g, budget=budget, time_limit_s=time_limit_s)
    span = tau_orbit(params, budget=budget, time_limit_s=time_limit_s)
    dim3 = cube_dim(g)
    f2 = F2Span(dim3)
    for w in span.orbit:
        f2.add(w.mod2_bits())
    top_ok = f2.rank == dim3
    b2_ok = b2.verdict == "pass"
    if b2_ok and top_ok:
        verdict = "pass"
    elif b2.verdict == "inconclusive" or (not top_ok and span.status != "complete"):
        verdict = "inconclusive"
    else:
        verdict = "fail"
    metrics = {
        "b2_dimension": b2.metrics["dimension"],
        "b2_expected_dimension": b2.metrics["expected_dimension"],
        "degree3_dimension": f2.rank,
        "degree3_expected_dimension": dim3,
        "total_dimension": b2.metrics["dimension"] + f2.rank,
        "orbit_size": span.orbit_size,
        "b2_orbit_size": b2.metrics["orbit_size"],
        "generator_count": b2.metrics["generator_count"],
        "b2_ok": flag(b2_ok),
        "degree3_ok": flag(top_ok),
    }
    conventions = {
        "basis_order": "a1,b1,...,ag,bg",
        "bar_relation": "bar(a+b) = bar(a) + bar(b) + i(a,b) mod 2",
        "bridge": "cubic monomial on basis indices p<q<r <-> e_p^e_q^e_r mod 2, "
                  "H^1 identified with H_1 index by index",
        "orbit_status": span.status,
    }
    cert = Certificate("sigma-surjectivity", params.as_dict(), conventions, metrics, verdict)
    return cert.with_elapsed(int((time.monotonic() - start) * 1000))


def boundary_twist_sigma(genus: int) -> BPoly:
    """sigma of the boundary twist of S_{g,1}: the full basis bounds the non-boundary side."""
    return sigma_septwist(standard_subsurface(genus, range(1, genus + 1)))
