"""Multilinear polynomials over GF(2): monomial bases, ANF/truth-table
transforms, evaluation vectors, and the code's evaluation matrix.

Conventions, fixed globally:
  * Point t in [0, 2^m) has i-th coordinate equal to bit (i-1) of t.
  * A monomial is an int mask over variables x1..xm (bit i-1 set means xi
    appears); its degree is the popcount.
  * Basis order is degree-major, then mask-ascending within a degree, which
    keeps the low-weight corner of the evaluation matrix upper triangular.

All objects are immutable after construction; transforms allocate fresh
output, so read-only sharing across threads is safe.
"""

from __future__ import annotations

import functools
import math
import re
from itertools import combinations

from .errors import DegreeTooHighError, ResourceLimitError
from .gf2 import BitMatrix, BitVector

__all__ = [
    "binom_sum",
    "MonomialBasis",
    "monomial_basis",
    "Polynomial",
    "Codeword",
    "monomial_table",
    "subset_transform",
    "superset_parities",
    "eval_vector",
    "evaluation_matrix",
    "encode",
    "anf",
    "weight",
    "random_polynomial",
    "random_codeword",
    "monomial_to_str",
    "monomial_from_str",
]

DEFAULT_MATRIX_BUDGET = 2 << 30  # bytes


def binom_sum(m: int, r: int) -> int:
    """C(m,0) + ... + C(m,r); the number of degree <= r monomials."""
    if r < 0:
        return 0
    return sum(math.comb(m, j) for j in range(min(r, m) + 1))


@functools.lru_cache(maxsize=None)
def _var_tables(m: int) -> tuple[int, ...]:
    """Truth table of each variable xi as a 2^m-bit int (bit t = coord i of t)."""
    n = 1 << m
    out = []
    for i in range(m):
        half = 1 << i
        pat = ((1 << half) - 1) << half  # ones where bit i is set, width 2^(i+1)
        span = half << 1
        while span < n:
            pat |= pat << span
            span <<= 1
        out.append(pat)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _full_mask(m: int) -> int:
    return (1 << (1 << m)) - 1


@functools.lru_cache(maxsize=None)
def _degree_mask(m: int, d: int) -> int:
    """Bit S set iff popcount(S) <= d, over all monomial masks S < 2^m."""
    if d >= m:
        return _full_mask(m)
    acc = 0
    for s in range(1 << m):
        if s.bit_count() <= d:
            acc |= 1 << s
    return acc


def monomial_table(m: int, mask: int) -> int:
    """Truth table of a single monomial: bit t = 1 iff mask is a subset of t."""
    if mask >> m:
        raise ValueError(f"monomial mask {mask} out of range for m={m}")
    tabs = _var_tables(m)
    acc = _full_mask(m)
    while mask:
        lsb = mask & -mask
        acc &= tabs[lsb.bit_length() - 1]
        mask ^= lsb
    return acc


def subset_transform(table: int, m: int) -> int:
    """Butterfly mapping ANF coefficients to truth table and back.

    out[u] = xor of in[s] over s subset of u.  Over GF(2) the transform is an
    involution, so one function serves both directions.  O(m) wide-int xors.
    """
    full = _full_mask(m)
    if table >> (1 << m):
        raise ValueError("table wider than 2^m bits")
    lo_tabs = _var_tables(m)
    for i in range(m):
        table ^= (table & (full ^ lo_tabs[i])) << (1 << i)
    return table


def superset_parities(table: int, m: int) -> int:
    """Bit B of the result = parity of table bits at positions t >= B (superset)."""
    if table >> (1 << m):
        raise ValueError("table wider than 2^m bits")
    tabs = _var_tables(m)
    for i in range(m):
        table ^= (table & tabs[i]) >> (1 << i)
    return table


class MonomialBasis:
    """Ordered monomial index for polynomials of degree <= r in m variables."""

    __slots__ = ("m", "r", "masks", "index")

    def __init__(self, m: int, r: int):
        if m < 0 or not 0 <= r <= m:
            raise ValueError(f"need 0 <= r <= m, got m={m}, r={r}")
        masks = []
        for d in range(r + 1):
            masks.extend(
                sorted(sum(1 << i for i in c) for c in combinations(range(m), d))
            )
        self.m = m
        self.r = r
        self.masks = tuple(masks)
        self.index = {s: j for j, s in enumerate(masks)}

    def __len__(self) -> int:
        return len(self.masks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialBasis)
            and (self.m, self.r) == (other.m, other.r)
        )

    def __hash__(self):
        return hash((self.m, self.r))

    def __repr__(self):
        return f"MonomialBasis(m={self.m}, r={self.r}, size={len(self.masks)})"


@functools.lru_cache(maxsize=None)
def monomial_basis(m: int, r: int) -> MonomialBasis:
    """Shared, cached basis instance."""
    return MonomialBasis(m, r)


def monomial_to_str(mask: int) -> str:
    if mask == 0:
        return "1"
    return "".join(f"x{i + 1}" for i in range(mask.bit_length()) if (mask >> i) & 1)


def monomial_from_str(term: str, m: int) -> int:
    term = term.strip()
    if term == "1":
        return 0
    if not re.fullmatch(r"(?:x\d+)+", term):
        raise ValueError(f"bad monomial literal: {term!r}")
    mask = 0
    for v in re.findall(r"x(\d+)", term):
        i = int(v)
        if not 1 <= i <= m:
            raise ValueError(f"variable x{i} out of range for m={m}")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"repeated variable x{i} in {term!r}")
        mask |= bit
    return mask


class Polynomial:
    """Degree-bounded multilinear polynomial, coefficients in basis order."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: MonomialBasis, coeffs: BitVector):
        if coeffs.n != len(basis):
            raise ValueError(
                f"coefficient length {coeffs.n} != basis size {len(basis)}"
            )
        self.basis = basis
        self.coeffs = coeffs

    @classmethod
    def zero(cls, basis: MonomialBasis) -> "Polynomial":
        return cls(basis, BitVector(len(basis)))

    @classmethod
    def from_masks(cls, basis: MonomialBasis, masks) -> "Polynomial":
        bits = 0
        for s in masks:
            bits ^= 1 << basis.index[s]
        return cls(basis, BitVector(len(basis), bits))

    def support_masks(self) -> list[int]:
        """Monomial masks with nonzero coefficient, in basis order."""
        return [self.basis.masks[j] for j in self.coeffs.support()]

    def degree(self) -> int:
        return max((s.bit_count() for s in self.support_masks()), default=0)

    def is_zero(self) -> bool:
        return self.coeffs.is_zero()

    def __xor__(self, other: "Polynomial") -> "Polynomial":
        if self.basis != other.basis:
            raise ValueError("polynomials from different bases")
        return Polynomial(self.basis, self.coeffs ^ other.coeffs)

    __add__ = __xor__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.basis == other.basis
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.basis, self.coeffs))

    def __repr__(self):
        return f"Polynomial({self.to_literal()!r})"

    def to_literal(self) -> str:
        """Fixture format 'm r; term,term,...'; empty term list is the zero
        polynomial, '1' denotes the empty monomial."""
        terms = ",".join(monomial_to_str(s) for s in self.support_masks())
        return f"{self.basis.m} {self.basis.r};{' ' + terms if terms else ''}"

    @classmethod
    def from_literal(cls, text: str) -> "Polynomial":
        head, _, body = text.partition(";")
        try:
            m, r = (int(x) for x in head.split())
        except ValueError as exc:
            raise ValueError(f"bad polynomial literal header: {head!r}") from exc
        basis = monomial_basis(m, r)
        body = body.strip()
        if not body:
            return cls.zero(basis)
        masks = [monomial_from_str(t, m) for t in body.split(",")]
        for s in masks:
            if s.bit_count() > r:
                raise ValueError(
                    f"term {monomial_to_str(s)} exceeds degree bound {r}"
                )
        if len(set(masks)) != len(masks):
            raise ValueError("repeated term in polynomial literal")
        return cls.from_masks(basis, masks)


class Codeword:
    """Evaluation table of a polynomial over all 2^m points."""

    __slots__ = ("m", "table")

    def __init__(self, m: int, table: BitVector):
        if table.n != 1 << m:
            raise ValueError(f"table length {table.n} != 2^{m}")
        self.m = m
        self.table = table

    def weight(self) -> int:
        return self.table.popcount()

    def __xor__(self, other: "Codeword") -> "Codeword":
        if self.m != other.m:
            raise ValueError("codewords of different lengths")
        return Codeword(self.m, self.table ^ other.table)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Codeword)
            and self.m == other.m
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.m, self.table))

    def __repr__(self):
        return f"Codeword(m={self.m}, weight={self.weight()})"


def eval_vector(z: int, basis: MonomialBasis) -> BitVector:
    """Evaluations of every basis monomial at point z, in basis order.

    Entry for monomial S is 1 iff S is a subset of the support of z.
    """
    if not 0 <= z < (1 << basis.m):
        raise ValueError(f"point {z} out of range for m={basis.m}")
    return BitVector(len(basis), eval_bits(z, basis))


def eval_bits(z: int, basis: MonomialBasis) -> int:
    """Raw-int fast path of :func:`eval_vector`."""
    pos_bits = [1 << i for i in range(basis.m) if (z >> i) & 1]
    index = basis.index
    v = 1  # empty monomial sits at index 0
    for d in range(1, basis.r + 1):
        for c in combinations(pos_bits, d):
            v |= 1 << index[sum(c)]
    return v


def evaluation_matrix(
    m: int, r: int, *, max_bytes: int = DEFAULT_MATRIX_BUDGET
) -> BitMatrix:
    """The C(m,<=r) x 2^m matrix whose column at point z is eval_vector(z).

    Row for monomial S is S's truth table, so this is simultaneously the
    generator matrix of the degree-r code and the parity-check matrix of the
    degree-(m-r-1) code.  Raises ResourceLimitError above the byte budget;
    callers can then stream columns via eval_vector instead.
    """
    basis = monomial_basis(m, r)
    needed = len(basis) * (1 << m) // 8
    if needed > max_bytes:
        raise ResourceLimitError(
            f"evaluation matrix needs ~{needed} bytes > budget {max_bytes}"
        )
    return BitMatrix(1 << m, [monomial_table(m, s) for s in basis.masks])


def encode(p: Polynomial) -> Codeword:
    """Evaluate p at every point via the subset-sum butterfly, O(m 2^m) bit ops."""
    m = p.basis.m
    n = 1 << m
    buf = bytearray(max(1, n >> 3))
    masks = p.basis.masks
    v = p.coeffs.bits
    while v:
        lsb = v & -v
        s = masks[lsb.bit_length() - 1]
        buf[s >> 3] ^= 1 << (s & 7)
        v ^= lsb
    table = subset_transform(int.from_bytes(buf, "little"), m)
    return Codeword(m, BitVector(n, table))


def table_degree_at_most(c: Codeword, d: int) -> bool:
    """True iff the word is the evaluation of some degree <= d polynomial.

    Same criterion as :func:`anf` succeeding, but skips coefficient
    extraction; decoders use this as their validity check.
    """
    coeff_table = subset_transform(c.table.bits, c.m)
    return not coeff_table & ~_degree_mask(c.m, d) & _full_mask(c.m)


def anf(c: Codeword, r_cap: int) -> Polynomial:
    """Recover the coefficient form of a truth table.

    The butterfly is its own inverse, so one application of
    :func:`subset_transform` yields the coefficients.  Raises
    DegreeTooHighError when any coefficient above r_cap is set, i.e. the word
    is not the evaluation of a degree <= r_cap polynomial.
    """
    m = c.m
    coeff_table = subset_transform(c.table.bits, m)
    high = coeff_table & ~_degree_mask(m, r_cap) & _full_mask(m)
    if high:
        degree = 0
        while high:
            lsb = high & -high
            degree = max(degree, (lsb.bit_length() - 1).bit_count())
            high ^= lsb
        raise DegreeTooHighError(degree, r_cap)
    basis = monomial_basis(m, r_cap)
    buf = coeff_table.to_bytes(max(1, (1 << m) >> 3), "little")
    bits = 0
    for j, s in enumerate(basis.masks):
        if (buf[s >> 3] >> (s & 7)) & 1:
            bits |= 1 << j
    return Polynomial(basis, BitVector(len(basis), bits))


def weight(p: Polynomial) -> int:
    """Number of points where p evaluates to 1."""
    return encode(p).weight()


def random_polynomial(basis: MonomialBasis, rng) -> Polynomial:
    """Uniform polynomial: each coefficient independently fair, seeded rng."""
    size = len(basis)
    bits = rng.getrandbits(size) if size else 0
    return Polynomial(basis, BitVector(size, bits))


def random_codeword(m: int, d: int, rng) -> Codeword:
    """Uniform codeword of the degree <= d code without materialising the
    coefficient vector; same distribution as encode(random_polynomial)."""
    coeff_table = rng.getrandbits(1 << m) & _degree_mask(m, d)
    return Codeword(m, BitVector(1 << m, subset_transform(coeff_table, m)))
