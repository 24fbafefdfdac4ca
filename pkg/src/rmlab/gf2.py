"""Dense bit-packed linear algebra over GF(2).

Vectors are Python integers used as bit sets: entry i of a vector is bit i of
the integer, so it lives in machine word i // 64 at position i % 64
(little-endian within the word).  The text dump format follows the same
convention with bit 0 as the leftmost character of a row.

Everything here is immutable after construction except :class:`Echelon`,
which is single-writer.  Read-only sharing across threads is safe; no method
mutates its receiver during queries.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "BitVector",
    "BitMatrix",
    "Echelon",
    "SolveResult",
    "SOLVE_UNIQUE",
    "SOLVE_AMBIGUOUS",
    "SOLVE_INCONSISTENT",
    "rank",
    "nullspace",
    "solve",
]

SOLVE_UNIQUE = "unique"
SOLVE_AMBIGUOUS = "ambiguous"
SOLVE_INCONSISTENT = "inconsistent"


class BitVector:
    """Fixed-length vector over GF(2) backed by a single int."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError("length must be non-negative")
        if bits < 0 or bits >> n:
            raise ValueError("set bits beyond vector length")
        self.n = n
        self.bits = bits

    @classmethod
    def from_bits(cls, values) -> "BitVector":
        bits = 0
        n = 0
        for v in values:
            if v:
                bits |= 1 << n
            n += 1
        return cls(n, bits)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a '0'/'1' string, bit 0 leftmost."""
        if set(text) - {"0", "1"}:
            raise ValueError(f"invalid bit string: {text!r}")
        return cls(len(text), int(text[::-1], 2) if text else 0)

    def to_string(self) -> str:
        return format(self.bits, f"0{self.n}b")[::-1] if self.n else ""

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitVector(self.n, self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.n, self.bits))

    def __repr__(self):
        return f"BitVector({self.n}, 0b{self.to_string()[::-1] or '0'})"

    def popcount(self) -> int:
        return self.bits.bit_count()

    def is_zero(self) -> bool:
        return self.bits == 0

    def dot(self, other: "BitVector") -> int:
        """Inner product over GF(2)."""
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return (self.bits & other.bits).bit_count() & 1

    def support(self):
        """Yield the indices of set bits, ascending."""
        v = self.bits
        while v:
            lsb = v & -v
            yield lsb.bit_length() - 1
            v ^= lsb


class BitMatrix:
    """Row-major matrix over GF(2); rows are ints per the BitVector packing."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, ncols: int, rows):
        rows = list(rows)
        for r in rows:
            if r < 0 or r >> ncols:
                raise ValueError("row has set bits beyond ncols")
        self.nrows = len(rows)
        self.ncols = ncols
        self._rows = rows

    @classmethod
    def from_rows(cls, vectors) -> "BitMatrix":
        vectors = list(vectors)
        if not vectors:
            raise ValueError("cannot infer ncols from an empty vector list")
        ncols = vectors[0].n
        for v in vectors:
            if v.n != ncols:
                raise ValueError("rows must share a length")
        return cls(ncols, [v.bits for v in vectors])

    @classmethod
    def from_lists(cls, lists) -> "BitMatrix":
        lists = [list(row) for row in lists]
        ncols = len(lists[0]) if lists else 0
        rows = []
        for row in lists:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            rows.append(sum(1 << j for j, v in enumerate(row) if v))
        return cls(ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, [1 << i for i in range(n)])

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self._rows[i])

    def row_bits(self, i: int) -> int:
        return self._rows[i]

    def rows(self):
        return [BitVector(self.ncols, r) for r in self._rows]

    def __getitem__(self, ij) -> int:
        i, j = ij
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return (self._rows[i] >> j) & 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.ncols == other.ncols
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.ncols, tuple(self._rows)))

    def __repr__(self):
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, row in enumerate(self._rows):
            bit = 1 << i
            while row:
                lsb = row & -row
                cols[lsb.bit_length() - 1] |= bit
                row ^= lsb
        return BitMatrix(self.nrows, cols)

    def mul_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product M*v."""
        if v.n != self.ncols:
            raise ValueError(f"length mismatch: {v.n} vs {self.ncols} cols")
        out = 0
        for i, row in enumerate(self._rows):
            if (row & v.bits).bit_count() & 1:
                out |= 1 << i
        return BitVector(self.nrows, out)

    def to_text(self) -> str:
        """Dump format: first line 'rows cols', then '0'/'1' rows, bit 0 leftmost."""
        lines = [f"{self.nrows} {self.ncols}"]
        for r in self._rows:
            lines.append(format(r, f"0{self.ncols}b")[::-1] if self.ncols else "")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix dump")
        nrows, ncols = (int(x) for x in lines[0].split())
        if len(lines) - 1 != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(lines) - 1}")
        rows = []
        for ln in lines[1:]:
            if len(ln) != ncols:
                raise ValueError(f"row width {len(ln)} != {ncols}")
            rows.append(BitVector.from_string(ln).bits)
        return cls(ncols, rows)


def _rref(rows, ncols, pivot_limit=None):
    """Reduced row echelon form in place over a copied row list.

    Pivot search scans columns ascending and picks the first row with a 1 in
    the current column; row operations apply to the full row width, so callers
    may append augmented columns beyond `pivot_limit`.

    Returns (work_rows, pivot_cols).
    """
    work = list(rows)
    if pivot_limit is None:
        pivot_limit = ncols
    pivot_cols = []
    prow = 0
    nrows = len(work)
    for col in range(pivot_limit):
        bit = 1 << col
        pivot = -1
        for i in range(prow, nrows):
            if work[i] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        work[prow], work[pivot] = work[pivot], work[prow]
        rowbits = work[prow]
        for i in range(nrows):
            if i != prow and work[i] & bit:
                work[i] ^= rowbits
        pivot_cols.append(col)
        prow += 1
        if prow == nrows:
            break
    return work, pivot_cols


def rank(m: BitMatrix) -> int:
    """Rank over GF(2); equals the number of pivots of the reduced form."""
    _, pivots = _rref(m._rows, m.ncols)
    return len(pivots)


def nullspace(m: BitMatrix) -> BitMatrix:
    """Canonical basis of {v : M*v = 0}.

    The returned rows are in reduced echelon form with ascending pivot
    columns, so equal nullspaces always produce equal matrices.  Row count is
    ncols - rank(M).
    """
    reduced, pivots = _rref(m._rows, m.ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        fbit = 1 << f
        v = fbit
        for j, p in enumerate(pivots):
            if reduced[j] & fbit:
                v |= 1 << p
        basis.append(v)
    canon, cpiv = _rref(basis, m.ncols)
    assert len(cpiv) == len(basis), "nullspace basis must be independent"
    return BitMatrix(m.ncols, canon[: len(cpiv)])


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a linear solve: status plus solution when unique.

    `rank` is the rank of the coefficient matrix, available in every case.
    """

    status: str
    solution: BitVector | None
    rank: int

    @property
    def is_unique(self) -> bool:
        return self.status == SOLVE_UNIQUE


def solve(m: BitMatrix, b: BitVector) -> SolveResult:
    """Classify and solve M*v = b.

    Returns status 'unique' with the solution vector when exactly one v
    satisfies the system, 'ambiguous' when the system is consistent with free
    variables, and 'inconsistent' otherwise.  A length mismatch between b and
    the row count is a contract violation and raises ValueError instead.
    """
    if b.n != m.nrows:
        raise ValueError(f"rhs length {b.n} != {m.nrows} rows")
    ncols = m.ncols
    aug_bit = 1 << ncols
    augmented = [
        row | (aug_bit if (b.bits >> i) & 1 else 0)
        for i, row in enumerate(m._rows)
    ]
    reduced, pivots = _rref(augmented, ncols + 1, pivot_limit=ncols)
    rk = len(pivots)
    for row in reduced[rk:]:
        if row:  # zero coefficients, nonzero rhs
            return SolveResult(SOLVE_INCONSISTENT, None, rk)
    if rk < ncols:
        return SolveResult(SOLVE_AMBIGUOUS, None, rk)
    v = 0
    for j, p in enumerate(pivots):
        if reduced[j] & aug_bit:
            v |= 1 << p
    return SolveResult(SOLVE_UNIQUE, BitVector(ncols, v), rk)


class Echelon:
    """Incremental row space with an online independence test.

    Rows are keyed by their pivot column (lowest set bit).  Inserts keep that
    weaker invariant only; full back-substitution is deferred until the rows
    are observed through :meth:`pivot_rows` or :meth:`basis_matrix`, which
    always present the unique reduced echelon form.  Single-writer: do not
    insert from multiple threads.
    """

    __slots__ = ("ncols", "_pivots", "_normalized")

    def __init__(self, ncols: int):
        if ncols < 0:
            raise ValueError("ncols must be non-negative")
        self.ncols = ncols
        self._pivots: dict[int, int] = {}
        self._normalized = True

    @property
    def inserted(self) -> int:
        return len(self._pivots)

    def reduce_bits(self, bits: int) -> int:
        """Reduce against the stored rows; zero iff bits is in the span."""
        pivots = self._pivots
        while bits:
            low = (bits & -bits).bit_length() - 1
            row = pivots.get(low)
            if row is None:
                return bits
            bits ^= row
        return 0

    def insert_bits(self, bits: int) -> bool:
        """Absorb a raw int row; True iff it was independent of the span."""
        residue = self.reduce_bits(bits)
        if not residue:
            return False
        self._pivots[(residue & -residue).bit_length() - 1] = residue
        self._normalized = False
        return True

    def insert(self, v: BitVector) -> bool:
        if v.n != self.ncols:
            raise ValueError(f"length mismatch: {v.n} vs {self.ncols}")
        return self.insert_bits(v.bits)

    def contains(self, v: BitVector) -> bool:
        if v.n != self.ncols:
            raise ValueError(f"length mismatch: {v.n} vs {self.ncols}")
        return self.reduce_bits(v.bits) == 0

    def _normalize(self):
        if self._normalized:
            return
        reduced, pivots = _rref(list(self._pivots.values()), self.ncols)
        assert len(pivots) == len(self._pivots)
        self._pivots = dict(zip(pivots, reduced))
        self._normalized = True

    def pivot_rows(self) -> dict[int, BitVector]:
        """Pivot column -> fully reduced row, ascending by column."""
        self._normalize()
        return {
            p: BitVector(self.ncols, self._pivots[p])
            for p in sorted(self._pivots)
        }

    def basis_matrix(self) -> BitMatrix:
        """Stored rows as a reduced-echelon BitMatrix, pivots ascending."""
        self._normalize()
        return BitMatrix(
            self.ncols, [self._pivots[p] for p in sorted(self._pivots)]
        )
