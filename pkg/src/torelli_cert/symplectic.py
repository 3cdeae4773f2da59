"""Integral homology of a genus-g surface with its intersection form.

Vectors live in Z^{2g} with the ordered basis (a_1, b_1, ..., a_g, b_g); the
coordinate of a_i is ``2*(i-1)`` and that of b_i is ``2*(i-1) + 1``.  Python
integers are unbounded, so no arithmetic here can wrap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ParameterError

SURFACE_KINDS = ("closed", "punctured", "bordered")


@dataclass(frozen=True)
class SurfaceParams:
    """Genus, bounding-pair genus and surface kind for one verification run."""

    genus: int
    k: int
    kind: str = "bordered"

    def __post_init__(self) -> None:
        if self.kind not in SURFACE_KINDS:
            raise ParameterError(
                f"surface kind must be one of {SURFACE_KINDS}, got {self.kind!r}")
        if not isinstance(self.genus, int) or self.genus < 3:
            raise ParameterError(f"genus must satisfy g >= 3, got g={self.genus}")
        if not isinstance(self.k, int) or not 1 <= self.k < self.genus - 1:
            raise ParameterError(
                f"bounding pair genus must satisfy 1 <= k < g-1 (g={self.genus}), "
                f"got k={self.k}")

    def as_dict(self) -> dict:
        return {"genus": self.genus, "k": self.k, "kind": self.kind}


def a_index(i: int) -> int:
    return 2 * (i - 1)


def b_index(i: int) -> int:
    return 2 * (i - 1) + 1


def basis_label(index: int) -> str:
    handle = index // 2 + 1
    return f"{'ab'[index % 2]}{handle}"


@dataclass(frozen=True)
class HClass:
    """An element of H_1(S_g; Z) given by its coordinates in the symplectic basis."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        if len(coeffs) == 0 or len(coeffs) % 2:
            raise ParameterError(f"an H class needs 2g coordinates, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, genus: int) -> HClass:
        return cls((0,) * (2 * genus))

    @classmethod
    def basis(cls, index: int, genus: int) -> HClass:
        if not 0 <= index < 2 * genus:
            raise ParameterError(f"basis index {index} out of range for genus {genus}")
        coeffs = [0] * (2 * genus)
        coeffs[index] = 1
        return cls(tuple(coeffs))

    @classmethod
    def a(cls, i: int, genus: int) -> HClass:
        return cls.basis(a_index(i), genus)

    @classmethod
    def b(cls, i: int, genus: int) -> HClass:
        return cls.basis(b_index(i), genus)

    @property
    def genus(self) -> int:
        return len(self.coeffs) // 2

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: HClass) -> None:
        if len(other.coeffs) != len(self.coeffs):
            raise ParameterError(
                f"genus mismatch: {self.genus} versus {other.genus}")

    def __add__(self, other: HClass) -> HClass:
        self._check(other)
        return HClass(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: HClass) -> HClass:
        self._check(other)
        return HClass(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> HClass:
        return HClass(tuple(-x for x in self.coeffs))

    def __mul__(self, scalar: int) -> HClass:
        return HClass(tuple(scalar * x for x in self.coeffs))

    __rmul__ = __mul__

    def __iter__(self) -> Iterator[int]:
        return iter(self.coeffs)

    def __str__(self) -> str:
        terms = []
        for idx, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c:+d}{basis_label(idx)}")
        return " ".join(terms) if terms else "0"


def pairing(x: HClass, y: HClass) -> int:
    """Algebraic intersection number i(x, y); i(a_j, b_j) = 1."""
    x._check(y)
    xs, ys = x.coeffs, y.coeffs
    return sum(xs[j] * ys[j + 1] - xs[j + 1] * ys[j] for j in range(0, len(xs), 2))


@dataclass(frozen=True)
class HEndo:
    """An endomorphism of H stored as a 2g x 2g integer matrix.

    Column ``c`` holds the image of basis vector ``c``, so the map acts on
    column vectors by left multiplication.
    """

    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.matrix)
        n = len(rows)
        if n == 0 or n % 2 or any(len(r) != n for r in rows):
            raise ParameterError("an H endomorphism must be a square matrix of even size")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def identity(cls, genus: int) -> HEndo:
        n = 2 * genus
        return cls(tuple(tuple(int(r == c) for c in range(n)) for r in range(n)))

    @classmethod
    def from_images(cls, images: Sequence[HClass]) -> HEndo:
        """Build the map sending basis vector ``c`` to ``images[c]``."""
        n = len(images)
        return cls(tuple(tuple(images[c].coeffs[r] for c in range(n)) for r in range(n)))

    @property
    def genus(self) -> int:
        return len(self.matrix) // 2

    @property
    def size(self) -> int:
        return len(self.matrix)

    def column(self, c: int) -> tuple[int, ...]:
        return tuple(row[c] for row in self.matrix)

    def sparse_columns(self) -> list[list[tuple[int, int]]]:
        """Nonzero entries of each column as (row, value) pairs."""
        n = self.size
        return [[(r, self.matrix[r][c]) for r in range(n) if self.matrix[r][c]]
                for c in range(n)]

    def __call__(self, x: HClass) -> HClass:
        if len(x.coeffs) != self.size:
            raise ParameterError(f"genus mismatch: map has genus {self.genus}, class {x.genus}")
        return HClass(tuple(sum(m * v for m, v in zip(row, x.coeffs)) for row in self.matrix))

    def __matmul__(self, other: HEndo) -> HEndo:
        """Composition: ``(f @ h)(x) == f(h(x))``."""
        if other.size != self.size:
            raise ParameterError("cannot compose maps of different genus")
        n = self.size
        cols = [other.column(c) for c in range(n)]
        return HEndo(tuple(
            tuple(sum(self.matrix[r][t] * cols[c][t] for t in range(n)) for c in range(n))
            for r in range(n)))

    def is_identity(self) -> bool:
        return self == HEndo.identity(self.genus)

    def symplectic_inverse(self) -> HEndo:
        """Inverse of a symplectic map, read off through the intersection form."""
        if not is_symplectic(self):
            raise ParameterError("symplectic_inverse called on a non-symplectic map")
        n = self.size
        basis = [HClass.basis(i, self.genus) for i in range(n)]
        images = [HClass(self.column(c)) for c in range(n)]
        # y[a_j] = i(y, b_j) and y[b_j] = -i(y, a_j); with y = f^{-1}(e_c) the
        # pairing i(y, e) equals i(e_c, f(e)).
        inv_cols = [
            HClass(tuple((1 if r % 2 == 0 else -1) * pairing(basis[c], images[r ^ 1])
                         for r in range(n)))
            for c in range(n)
        ]
        return HEndo.from_images(inv_cols)

    def mod2(self) -> HEndo:
        return HEndo(tuple(tuple(v % 2 for v in row) for row in self.matrix))

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{v:3d}" for v in row) for row in self.matrix)


def is_symplectic(f: HEndo) -> bool:
    """True iff ``f`` preserves the intersection form on every pair of basis vectors."""
    n = f.size
    images = [HClass(f.column(c)) for c in range(n)]
    for p in range(n):
        for q in range(p + 1, n):
            ep, eq = HClass.basis(p, f.genus), HClass.basis(q, f.genus)
            if pairing(images[p], images[q]) != pairing(ep, eq):
                return False
    return True


def transvection(v: HClass, power: int = 1) -> HEndo:
    """The map x -> x + power * i(x, v) v (homology action of T_v^power)."""
    if v.is_zero():
        raise ParameterError("transvection along the zero vector is undefined")
    images = []
    for c in range(len(v.coeffs)):
        e = HClass.basis(c, v.genus)
        images.append(e + (power * pairing(e, v)) * v)
    return HEndo.from_images(images)


def factor_mix(r: int, s: int, genus: int) -> HEndo:
    """a_r -> a_r - b_s, a_s -> a_s - b_r, every other basis vector fixed."""
    if r == s:
        raise ParameterError("factor_mix needs two distinct handles")
    r, s = min(r, s), max(r, s)
    if not 1 <= r < s <= genus:
        raise ParameterError(f"factor_mix handles must lie in 1..{genus}, got ({r}, {s})")
    images = [HClass.basis(c, genus) for c in range(2 * genus)]
    images[a_index(r)] = HClass.a(r, genus) - HClass.b(s, genus)
    images[a_index(s)] = HClass.a(s, genus) - HClass.b(r, genus)
    return HEndo.from_images(images)


def transvection_vectors(genus: int) -> list[HClass]:
    """Directions of the transvections used as orbit generators.

    All basis vectors, a_i + b_i, and for adjacent handles a_i + a_j,
    b_i + b_j and a_i + b_j in both orders.
    """
    vecs = [HClass.basis(c, genus) for c in range(2 * genus)]
    vecs += [HClass.a(i, genus) + HClass.b(i, genus) for i in range(1, genus + 1)]
    for i in range(1, genus):
        j = i + 1
        vecs += [
            HClass.a(i, genus) + HClass.a(j, genus),
            HClass.b(i, genus) + HClass.b(j, genus),
            HClass.a(i, genus) + HClass.b(j, genus),
            HClass.a(j, genus) + HClass.b(i, genus),
        ]
    return vecs


def sp_generators(genus: int) -> list[HEndo]:
    """Finite list of symplectic maps driving the orbit-span checks.

    Order is fixed: each transvection followed by its inverse, then every
    factor_mix(r, s) with r < s in lexicographic order.
    """
    if genus < 3:
        raise ParameterError(f"sp_generators needs g >= 3, got {genus}")
    gens = []
    for v in transvection_vectors(genus):
        gens.append(transvection(v))
        gens.append(transvection(v, -1))
    for r in range(1, genus + 1):
        for s in range(r + 1, genus + 1):
            gens.append(factor_mix(r, s, genus))
    return gens


def compose_all(maps: Iterable[HEndo], genus: int) -> HEndo:
    """Product f_1 @ f_2 @ ... (the last map acts first)."""
    out = HEndo.identity(genus)
    for f in maps:
        out = out @ f
    return out
