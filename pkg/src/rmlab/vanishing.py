"""Vanishing spaces and degree-r closures of point sets in GF(2)^m.

The degree-r vanishing space of a point set Z is the set of degree <= r
polynomials that are zero on every point of Z; its closure is the set of
points where all of those polynomials vanish, equivalently the points whose
evaluation vectors lie in the span of Z's evaluation vectors.  Both routes
are computed and cross-checked.

Pure functions over immutable inputs; safe to share across threads.
"""

from __future__ import annotations

from .errors import ResourceLimitError
from .gf2 import BitMatrix, BitVector, Echelon, nullspace
from .rm import Polynomial, binom_sum, encode, eval_bits, monomial_basis

__all__ = [
    "PointSet",
    "VanishingSpace",
    "evaluation_rows",
    "vanishing_space",
    "closure",
    "is_minimal_rank",
]

DEFAULT_CLOSURE_BUDGET = 1 << 22  # points enumerated by closure()


class PointSet:
    """Ordered set of distinct points of GF(2)^m, each stored as an int mask.

    Insertion order is preserved (the sequential independence check depends
    on it); distinctness is enforced at construction.
    """

    __slots__ = ("m", "points", "_members")

    def __init__(self, m: int, points):
        points = tuple(points)
        members = set()
        n = 1 << m
        for z in points:
            if not 0 <= z < n:
                raise ValueError(f"point {z} out of range for m={m}")
            if z in members:
                raise ValueError(f"duplicate point {z}")
            members.add(z)
        self.m = m
        self.points = points
        self._members = frozenset(members)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, z: int) -> bool:
        return z in self._members

    def __eq__(self, other) -> bool:
        """Set equality; insertion order does not matter."""
        return (
            isinstance(other, PointSet)
            and self.m == other.m
            and self._members == other._members
        )

    def __hash__(self):
        return hash((self.m, self._members))

    def __repr__(self):
        return f"PointSet(m={self.m}, size={len(self.points)})"

    def sorted(self) -> "PointSet":
        return PointSet(self.m, sorted(self.points))

    def issubset(self, other: "PointSet") -> bool:
        return self.m == other.m and self._members <= other._members

    def mask(self) -> int:
        """Membership bitmap: bit z set iff z is in the set."""
        acc = 0
        for z in self.points:
            acc |= 1 << z
        return acc

    @classmethod
    def from_mask(cls, m: int, bitmap: int) -> "PointSet":
        points = []
        while bitmap:
            lsb = bitmap & -bitmap
            points.append(lsb.bit_length() - 1)
            bitmap ^= lsb
        return cls(m, points)

    def to_text(self) -> str:
        """Fixture format: first line m, then one point per line as an
        m-character bit string with coordinate 1 leftmost."""
        lines = [str(self.m)]
        lines.extend(BitVector(self.m, z).to_string() for z in self.points)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PointSet":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty point set fixture")
        m = int(lines[0])
        points = []
        for ln in lines[1:]:
            if len(ln) != m:
                raise ValueError(f"point {ln!r} is not {m} characters")
            points.append(BitVector.from_string(ln).bits)
        return cls(m, points)


class VanishingSpace:
    """Basis of the degree <= r polynomials vanishing on a defining set."""

    __slots__ = ("m", "r", "basis", "dim", "ambient")

    def __init__(self, m: int, r: int, basis: BitMatrix):
        self.m = m
        self.r = r
        self.basis = basis  # rows are coefficient vectors in reduced echelon form
        self.dim = basis.nrows
        self.ambient = binom_sum(m, r)

    def __repr__(self):
        return f"VanishingSpace(m={self.m}, r={self.r}, dim={self.dim})"

    def polynomials(self) -> list[Polynomial]:
        mb = monomial_basis(self.m, self.r)
        return [Polynomial(mb, self.basis.row(i)) for i in range(self.dim)]

    def span_contains(self, coeffs: BitVector) -> bool:
        ech = Echelon(self.ambient)
        for i in range(self.dim):
            ech.insert_bits(self.basis.row_bits(i))
        return ech.contains(coeffs)

    def spans_equal(self, other: "VanishingSpace") -> bool:
        if (self.m, self.r, self.dim) != (other.m, other.r, other.dim):
            return False
        # reduced echelon bases of equal spans are identical
        return self.basis == other.basis


def evaluation_rows(zs: PointSet, r: int) -> BitMatrix:
    """|Z| x C(m,<=r) matrix whose i-th row is the evaluation vector of z_i."""
    basis = monomial_basis(zs.m, r)
    return BitMatrix(len(basis), [eval_bits(z, basis) for z in zs])


def vanishing_space(zs: PointSet, r: int) -> VanishingSpace:
    """All degree <= r polynomials vanishing on every point of zs.

    A polynomial vanishes at z iff its coefficient vector is orthogonal to
    the evaluation vector of z, so the space is the nullspace of the
    evaluation-row matrix.  dim = C(m,<=r) - rank(rows) >= C(m,<=r) - |Z|.
    """
    if not 0 <= r <= zs.m:
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={zs.m}")
    return VanishingSpace(zs.m, r, nullspace(evaluation_rows(zs, r)))


def closure(
    zs: PointSet, r: int, *, max_points: int = DEFAULT_CLOSURE_BUDGET
) -> PointSet:
    """Points at which every vanishing polynomial of zs is zero.

    Computed two ways and cross-checked on every call: as the common zero set
    of a vanishing-space basis, and as the points whose evaluation vectors
    reduce to zero against the span of zs's evaluation vectors.  When the
    vanishing space is trivial the closure is all of GF(2)^m (universal
    quantification over no polynomials).  Result points are sorted ascending.
    """
    m = zs.m
    n = 1 << m
    if n > max_points:
        raise ResourceLimitError(
            f"closure would enumerate {n} points > budget {max_points}"
        )
    vs = vanishing_space(zs, r)
    full = (1 << n) - 1
    if vs.dim == 0:
        by_zeros = full
    else:
        by_zeros = full
        mb = monomial_basis(m, r)
        for i in range(vs.dim):
            table = encode(Polynomial(mb, vs.basis.row(i))).table.bits
            by_zeros &= full ^ table

    basis = monomial_basis(m, r)
    ech = Echelon(len(basis))
    for z in zs:
        ech.insert_bits(eval_bits(z, basis))
    buf = bytearray(max(1, n >> 3))
    reduce = ech.reduce_bits
    for u in range(n):
        if not reduce(eval_bits(u, basis)):
            buf[u >> 3] |= 1 << (u & 7)
    by_span = int.from_bytes(buf, "little")

    if by_zeros != by_span:
        raise AssertionError(
            "closure routes disagree (common zeros vs span membership)"
        )
    return PointSet.from_mask(m, by_zeros)


def is_minimal_rank(zs: PointSet, r: int) -> bool:
    """True iff dim of the vanishing space equals C(m,<=r) - |Z|, the
    information-theoretic minimum; equivalent to the evaluation vectors of
    zs being linearly independent."""
    basis = monomial_basis(zs.m, r)
    if len(zs) > len(basis):
        return False
    ech = Echelon(len(basis))
    for z in zs:
        if not ech.insert_bits(eval_bits(z, basis)):
            return False
    return True
