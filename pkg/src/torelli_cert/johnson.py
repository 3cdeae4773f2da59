"""Johnson homomorphism values of bounding pair maps and the orbit-span check."""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .certificate import Certificate, flag
from .errors import ParameterError
from .exterior import (
    CubeMap, OrbitSpan, Wedge3, cube_dim, expand_orbit, induced_cube, omega_rows,
    wedge, wedge_omega,
)
from .lattice import elementary_divisors
from .symplectic import (
    HClass, HEndo, SurfaceParams, factor_mix, is_symplectic,
    pairing, sp_generators,
)

FULL = "full_wedge3"
MOD_H = "wedge3_mod_H"

DEFAULT_BUDGET = 50_000
DEFAULT_TIME_LIMIT_S = 300.0

CONVENTIONS = {
    "basis_order": "a1,b1,...,ag,bg",
    "triple_order": "colex",
    "twist_sign": "transvection x -> x + i(x,v) v",
    "bp_standard_position": "curves in class b_{k+1} cutting off handles 1..k",
}
TARGET_ASSUMPTION = ("image of tau taken to be all of wedge^3 H for punctured "
                     "and bordered surfaces")


def target_for(kind: str) -> str:
    return MOD_H if kind == "closed" else FULL


@dataclass(frozen=True)
class TauValue:
    value: Wedge3
    target: str

    def __post_init__(self) -> None:
        if self.target not in (FULL, MOD_H):
            raise ParameterError(f"unknown tau target {self.target!r}")


def bp_tau_standard(params: SurfaceParams) -> TauValue:
    """tau of the standard genus-k bounding pair map: sum_{i<=k} a_i^b_i^b_{k+1}."""
    g, k = params.genus, params.k
    x = Wedge3.zero(g)
    for i in range(1, k + 1):
        x = x + wedge(HClass.a(i, g), HClass.b(i, g), HClass.b(k + 1, g))
    return TauValue(x, target_for(params.kind))


def septwist_tau(genus: int, kind: str = "bordered") -> TauValue:
    # separating twists lie in the Johnson kernel
    return TauValue(Wedge3.zero(genus), target_for(kind))


def pointpush_tau(c: HClass, params: SurfaceParams) -> TauValue:
    """tau of the point push along a loop whose homology class is ``c``."""
    if params.kind == "closed":
        raise ParameterError("point pushes only exist on punctured or bordered surfaces")
    if c.genus != params.genus:
        raise ParameterError("genus mismatch between class and surface")
    return TauValue(wedge_omega(c), FULL)


def conjugate_bp_tau(f: HEndo, params: SurfaceParams) -> TauValue:
    """tau of the standard bounding pair map conjugated by a mapping class acting as ``f``."""
    if not is_symplectic(f):
        raise ParameterError("conjugate_bp_tau requires a symplectic map")
    base = bp_tau_standard(params)
    return TauValue(induced_cube(f)(base.value), base.target)


def factor_mix_difference(params: SurfaceParams) -> Wedge3:
    """phi(x) - x for phi = factor_mix(1, k+2)."""
    phi = factor_mix(1, params.k + 2, params.genus)
    return conjugate_bp_tau(phi, params).value - bp_tau_standard(params).value


def contraction(w: Wedge3) -> HClass:
    """The Sp-equivariant map x^y^z -> i(x,y) z + i(y,z) x + i(z,x) y."""
    g = w.genus
    out = HClass.zero(g)
    for (p, q, r), c in w.terms:
        ep, eq, er = (HClass.basis(i, g) for i in (p, q, r))
        out = out + c * (pairing(ep, eq) * er + pairing(eq, er) * ep + pairing(er, ep) * eq)
    return out


def contraction_gcd(vectors: Sequence[Sequence[int]], genus: int) -> int:
    """gcd of all coordinates of the contractions of the given flat vectors."""
    out = 0
    for v in vectors:
        for c in contraction(Wedge3.from_vector(genus, v)).coeffs:
            out = gcd(out, c)
    return out


def tau_orbit(
    params: SurfaceParams,
    budget: int = DEFAULT_BUDGET,
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S,
    generators: Optional[Sequence[HEndo]] = None,
    reverse_seeds: bool = False,
) -> OrbitSpan:
    """Expand {x, phi(x) - x} under the generators; closed surfaces include omega rows."""
    g = params.genus
    gens = sp_generators(g) if generators is None else list(generators)
    cube_gens: list[CubeMap] = [induced_cube(f) for f in gens]
    seeds = [bp_tau_standard(params).value, factor_mix_difference(params)]
    if reverse_seeds:
        seeds.reverse()
    base = omega_rows(g) if params.kind == "closed" else []
    deadline = None if time_limit_s is None else time.monotonic() + time_limit_s
    return expand_orbit(seeds, cube_gens, g, base=base, budget=budget, deadline=deadline)


def verify_tau_surjectivity(
    params: SurfaceParams,
    budget: int = DEFAULT_BUDGET,
    time_limit_s: Optional[float] = DEFAULT_TIME_LIMIT_S,
    generators: Optional[Sequence[HEndo]] = None,
    reverse_seeds: bool = False,
) -> Certificate:
    """Check that the orbit of tau(bounding pair) spans the whole target lattice.

    Bordered and punctured targets are all of wedge^3 H (rank C(2g,3), unit
    divisors); the closed target is the quotient by wedge_omega(H) (rank
    C(2g,3) - 2g).
    """
    start = time.monotonic()
    g = params.genus
    gens = sp_generators(g) if generators is None else list(generators)
    span = tau_orbit(params, budget, time_limit_s, gens, reverse_seeds)
    dim = cube_dim(g)
    divs = elementary_divisors(span.lattice.basis())
    if params.kind == "closed":
        n_omega = 2 * g
        if divs[:n_omega] != [1] * n_omega:
            raise AssertionError("omega image must contribute 2g unit divisors")
        divs = divs[n_omega:]
        expected = dim - n_omega
    else:
        expected = dim
    rank = len(divs)
    rank_ok = rank == expected
    saturated_ok = all(d == 1 for d in divs)
    if rank_ok and saturated_ok:
        verdict = "pass"
    elif span.status != "complete":
        verdict = "inconclusive"
    else:
        verdict = "fail"
    conventions = dict(CONVENTIONS)
    conventions["target"] = ("wedge^3 H / wedge_omega(H)" if params.kind == "closed"
                             else "wedge^3 H")
    if params.kind != "closed":
        conventions["target_assumption"] = TARGET_ASSUMPTION
    conventions["orbit_status"] = span.status
    metrics = {
        "ambient_dimension": dim,
        "expected_rank": expected,
        "rank": rank,
        "elementary_divisors": [int(d) for d in divs],
        "orbit_size": span.orbit_size,
        "generations": span.generations,
        "generator_count": len(gens),
        "contraction_gcd": contraction_gcd(span.lattice.basis(), g),
        "rank_ok": flag(rank_ok),
        "saturated_ok": flag(saturated_ok),
    }
    elapsed = int((time.monotonic() - start) * 1000)
    cert = Certificate("tau-surjectivity", params.as_dict(), conventions, metrics, verdict)
    return cert.with_elapsed(elapsed)
