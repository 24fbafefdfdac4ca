"""Fixed-count random erasure/error channels and the two decoders.

Erasure decoding solves for the erased values against the degree-(m-d-1)
syndrome constraints.  Error decoding reduces to erasure decoding: it builds
a syndrome pairing matrix whose left kernel contains every low-degree
polynomial vanishing on the error support, intersects the kernel's zero
sets to localize suspect positions, and erases those.  The decoders are
pure functions; syndrome work streams over monomials and never materialises
the full evaluation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gf2 import (
    SOLVE_AMBIGUOUS,
    SOLVE_UNIQUE,
    BitMatrix,
    BitVector,
    nullspace,
    solve,
)
from .rm import (
    Codeword,
    Polynomial,
    encode,
    eval_bits,
    monomial_basis,
    superset_parities,
    table_degree_at_most,
)
from .vanishing import PointSet

__all__ = [
    "ErasurePattern",
    "ErrorPattern",
    "ReceivedWord",
    "DecodeOutcome",
    "DECODED",
    "AMBIGUOUS_ERASURE",
    "KERNEL_CLOSURE_FAILURE",
    "INCONSISTENT_INPUT",
    "sample_point_masks",
    "sample_erasures",
    "sample_errors",
    "apply_erasures",
    "apply_errors",
    "erasure_decode",
    "error_decode",
]

DECODED = "decoded"
AMBIGUOUS_ERASURE = "ambiguous_erasure"
KERNEL_CLOSURE_FAILURE = "kernel_closure_failure"
INCONSISTENT_INPUT = "inconsistent_input"


@dataclass(frozen=True)
class ErasurePattern:
    m: int
    erased: PointSet


@dataclass(frozen=True)
class ErrorPattern:
    m: int
    flipped: PointSet


class ReceivedWord:
    """Word over {0, 1, erased}, stored as a value bitmap plus erased bitmap."""

    __slots__ = ("m", "bits", "erased_mask")

    def __init__(self, m: int, bits: int, erased_mask: int):
        n = 1 << m
        if bits >> n or erased_mask >> n:
            raise ValueError("bitmap wider than 2^m")
        if bits & erased_mask:
            raise ValueError("erased positions must carry no value")
        self.m = m
        self.bits = bits
        self.erased_mask = erased_mask

    def symbol(self, t: int) -> str:
        if (self.erased_mask >> t) & 1:
            return "?"
        return "1" if (self.bits >> t) & 1 else "0"

    def erased_points(self) -> list[int]:
        return list(PointSet.from_mask(self.m, self.erased_mask))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ReceivedWord)
            and (self.m, self.bits, self.erased_mask)
            == (other.m, other.bits, other.erased_mask)
        )

    def __hash__(self):
        return hash((self.m, self.bits, self.erased_mask))

    def __repr__(self):
        return (
            f"ReceivedWord(m={self.m}, erased={self.erased_mask.bit_count()})"
        )

    def to_text(self) -> str:
        """Fixture format: 2^m characters from {0,1,?} in point-index order."""
        return "".join(self.symbol(t) for t in range(1 << self.m))

    @classmethod
    def from_text(cls, text: str) -> "ReceivedWord":
        text = text.strip()
        n = len(text)
        if n == 0 or n & (n - 1):
            raise ValueError("received word length must be a power of two")
        m = n.bit_length() - 1
        bits = 0
        erased = 0
        for t, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << t
            elif ch == "?":
                erased |= 1 << t
            elif ch != "0":
                raise ValueError(f"invalid symbol {ch!r} at position {t}")
        return cls(m, bits, erased)


def sample_point_masks(m: int, k: int, rng, *, distinct: bool = True) -> list[int]:
    """k uniform points of GF(2)^m; duplicates rejected when distinct.

    Deterministic given the rng state.  Rejection keeps the draw order stable
    across consumers, which the cross-mode reproducibility tests rely on.
    """
    n = 1 << m
    if distinct and k > n:
        raise ValueError(f"cannot draw {k} distinct points from 2^{m}")
    if not distinct:
        return [rng.getrandbits(m) for _ in range(k)]
    out = []
    seen = set()
    while len(out) < k:
        z = rng.getrandbits(m)
        if z not in seen:
            seen.add(z)
            out.append(z)
    return out


def sample_erasures(m: int, k: int, rng) -> ErasurePattern:
    """Uniformly random k-subset of coordinates to erase; seeded and exact-k."""
    return ErasurePattern(m, PointSet(m, sample_point_masks(m, k, rng)))


def sample_errors(m: int, k: int, rng) -> ErrorPattern:
    """Uniformly random k-subset of coordinates to flip; seeded and exact-k."""
    return ErrorPattern(m, PointSet(m, sample_point_masks(m, k, rng)))


def apply_erasures(c: Codeword, pattern: ErasurePattern) -> ReceivedWord:
    if c.m != pattern.m:
        raise ValueError("codeword/pattern length mismatch")
    erased = pattern.erased.mask()
    return ReceivedWord(c.m, c.table.bits & ~erased, erased)


def apply_errors(c: Codeword, pattern: ErrorPattern) -> Codeword:
    if c.m != pattern.m:
        raise ValueError("codeword/pattern length mismatch")
    return Codeword(c.m, BitVector(1 << c.m, c.table.bits ^ pattern.flipped.mask()))


@dataclass(frozen=True)
class DecodeOutcome:
    """Decoder verdict plus diagnostics.

    `word` is set exactly for status 'decoded' and then agrees with the
    received word on every non-erased position.  `kernel` and `zero_set` are
    populated by the error decoder (when reached) so harnesses can check the
    reduction's guarantees against ground truth.
    """

    status: str
    word: Codeword | None = None
    diagnostics: dict = field(default_factory=dict)
    kernel: BitMatrix | None = None
    zero_set: PointSet | None = None

    @property
    def decoded(self) -> bool:
        return self.status == DECODED


def _syndrome_bits(word_bits: int, m: int, basis) -> int:
    """Parity of ones at supersets of each basis monomial, packed in basis order."""
    table = superset_parities(word_bits, m)
    buf = table.to_bytes(max(1, (1 << m) >> 3), "little")
    bits = 0
    for j, s in enumerate(basis.masks):
        if (buf[s >> 3] >> (s & 7)) & 1:
            bits |= 1 << j
    return bits


def erasure_decode(y: ReceivedWord, d: int) -> DecodeOutcome:
    """Recover a degree <= d codeword from y by linear solve.

    The unknowns are the erased values; each degree <= m-d-1 monomial
    contributes one parity constraint whose right-hand side is the syndrome
    of the known positions.  Unique solve yields the unique consistent
    codeword; a rank-deficient erased column set is ambiguous; an
    inconsistent system means the known positions match no codeword.
    """
    m = y.m
    if not 0 <= d < m:
        raise ValueError(f"need 0 <= d < m, got d={d}, m={m}")
    r_check = m - d - 1
    basis = monomial_basis(m, r_check)
    erased = y.erased_points()

    rows = [0] * len(basis)
    for e, t in enumerate(erased):
        ev = eval_bits(t, basis)
        ebit = 1 << e
        while ev:
            lsb = ev & -ev
            rows[lsb.bit_length() - 1] |= ebit
            ev ^= lsb
    a = BitMatrix(len(erased), rows)
    b = BitVector(len(basis), _syndrome_bits(y.bits, m, basis))

    result = solve(a, b)
    diagnostics = {
        "erased": len(erased),
        "erased_rank": result.rank,
        "rank_deficit": len(erased) - result.rank,
    }
    if result.status == SOLVE_UNIQUE:
        filled = y.bits
        for e, t in enumerate(erased):
            if result.solution[e]:
                filled |= 1 << t
        word = Codeword(m, BitVector(1 << m, filled))
        if not table_degree_at_most(word, d):
            raise AssertionError("zero-syndrome fill is not a codeword")
        return DecodeOutcome(DECODED, word=word, diagnostics=diagnostics)
    if result.status == SOLVE_AMBIGUOUS:
        return DecodeOutcome(AMBIGUOUS_ERASURE, diagnostics=diagnostics)
    return DecodeOutcome(INCONSISTENT_INPUT, diagnostics=diagnostics)


def error_decode(y: Codeword, r: int) -> DecodeOutcome:
    """Decode the degree <= m-2r-2 code from errors via kernel localization.

    Pipeline: (1) syndromes s_B of y over monomials |B| <= 2r+1 (zero on
    codewords); (2) pairing matrix S[A, C] = s_{A union C} over |A| <= r,
    |C| <= r+1; (3) left kernel of S, which always contains the coefficient
    vector of every degree <= r polynomial vanishing on the error support;
    (4) common zeros W of the kernel basis; (5) erase W and run the erasure
    decoder.  When the degree-(r+1) evaluation vectors of the error support
    are independent, the kernel is exactly the vanishing space of the support
    and W is its degree-r closure, so W covers the support; a unique erasure
    solve then returns the transmitted word.
    """
    m = y.m
    if r < 1:
        raise ValueError("error decoding needs r >= 1")
    d = m - 2 * r - 2
    if d < 0:
        raise ValueError(f"need m - 2r - 2 >= 0, got m={m}, r={r}")
    n = 1 << m

    row_basis = monomial_basis(m, r)
    col_basis = monomial_basis(m, r + 1)
    syn_basis = monomial_basis(m, 2 * r + 1)
    syn_table = superset_parities(y.table.bits, m)
    syn_buf = syn_table.to_bytes(max(1, n >> 3), "little")

    rows = []
    for a_mask in row_basis.masks:
        bits = 0
        for j, c_mask in enumerate(col_basis.masks):
            s = a_mask | c_mask
            if (syn_buf[s >> 3] >> (s & 7)) & 1:
                bits |= 1 << j
        rows.append(bits)
    pairing = BitMatrix(len(col_basis), rows)
    kernel = nullspace(pairing.transpose())
    diagnostics = {"kernel_dim": kernel.nrows, "syndrome_terms": len(syn_basis)}

    if kernel.nrows == 0:
        diagnostics["closure_size"] = n
        return DecodeOutcome(
            KERNEL_CLOSURE_FAILURE, diagnostics=diagnostics, kernel=kernel
        )

    full = (1 << n) - 1
    zeros = full
    for i in range(kernel.nrows):
        table = encode(Polynomial(row_basis, kernel.row(i))).table.bits
        zeros &= full ^ table
        if not zeros:
            break
    suspects = PointSet.from_mask(m, zeros)
    diagnostics["closure_size"] = len(suspects)

    received = ReceivedWord(m, y.table.bits & ~zeros, zeros)
    inner = erasure_decode(received, d)
    diagnostics["erasure_status"] = inner.status
    diagnostics.update(
        {k: v for k, v in inner.diagnostics.items() if k != "erased"}
    )
    if inner.decoded:
        return DecodeOutcome(
            DECODED,
            word=inner.word,
            diagnostics=diagnostics,
            kernel=kernel,
            zero_set=suspects,
        )
    return DecodeOutcome(
        KERNEL_CLOSURE_FAILURE,
        diagnostics=diagnostics,
        kernel=kernel,
        zero_set=suspects,
    )
