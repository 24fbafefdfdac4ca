"""Exact weight spectra of degree-bounded codes and the calculators built on
them: threshold counts, bias-interval tallies, parameterized upper-bound
exponents for low/medium weight codewords, and exact expected-size /
union-bound quantities for random point sets.

Counts are exact big integers.  Hypergeometric terms use exact binomials up
to 2^m <= 2^24 and switch to log-space floats beyond; both paths agree on the
overlap and are tested for it.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimitError
from .rm import binom_sum, monomial_basis, monomial_table

__all__ = [
    "WeightEnumerator",
    "SpectrumReport",
    "BoundParams",
    "weight_enumerator",
    "cached_enumerator",
    "wtdist",
    "interval_counts",
    "low_weight_bound_exponent",
    "low_weight_bound_exponent_simplified",
    "medium_weight_bound_exponent",
    "min_sufficient_c4_low",
    "min_sufficient_c4_medium",
    "expected_survival_fraction",
    "union_bound_failure",
    "size_inflation_sum",
    "save_enumerator",
    "load_enumerator",
]

DEFAULT_ENUM_CAP = 26  # max code dimension enumerated exactly
EXACT_BINOMIAL_LIMIT = 1 << 24  # largest 2^m handled with exact binomials


@dataclass(frozen=True)
class WeightEnumerator:
    """Exact map weight -> number of degree <= r polynomials of that weight."""

    m: int
    r: int
    counts: dict  # int weight -> int count, zero counts omitted

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def dimension(self) -> int:
        return binom_sum(self.m, self.r)

    def total(self) -> int:
        return sum(self.counts.values())

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())

    def min_nonzero_weight(self) -> int:
        return min(w for w in self.counts if w > 0)


def weight_enumerator(
    m: int, r: int, *, cap: int = DEFAULT_ENUM_CAP, shards: int = 1
) -> WeightEnumerator:
    """Exact weight spectrum by enumerating all 2^C(m,<=r) coefficient vectors.

    Walks coefficient space in Gray-code order so each step xors a single
    precomputed monomial truth table into the running codeword.  The walk is
    partitioned by fixing the top log2(shards) coefficient bits, giving
    independent shards whose counts add; the result is shard-count
    independent.  Raises ResourceLimitError when C(m,<=r) exceeds `cap`.
    """
    basis = monomial_basis(m, r)
    dim = len(basis)
    if dim > cap:
        raise ResourceLimitError(
            f"dimension {dim} exceeds enumeration cap {cap}"
        )
    if shards < 1 or shards & (shards - 1):
        raise ValueError("shards must be a power of two")
    g = shards.bit_length() - 1
    if g > dim:
        raise ValueError(f"cannot split {dim} coefficient bits into 2^{g} shards")
    tabs = [monomial_table(m, s) for s in basis.masks]
    low = dim - g
    counts = [0] * ((1 << m) + 1)
    for shard in range(shards):
        acc = 0
        hi = shard
        while hi:
            lsb = hi & -hi
            acc ^= tabs[low + lsb.bit_length() - 1]
            hi ^= lsb
        counts[acc.bit_count()] += 1
        for k in range(1, 1 << low):
            acc ^= tabs[(k & -k).bit_length() - 1]
            counts[acc.bit_count()] += 1
    return WeightEnumerator(m, r, {w: c for w, c in enumerate(counts) if c})


@functools.lru_cache(maxsize=32)
def cached_enumerator(m: int, r: int, cap: int = DEFAULT_ENUM_CAP) -> WeightEnumerator:
    """Process-wide cache for enumerators reused across experiments."""
    return weight_enumerator(m, r, cap=cap)


def wtdist(we: WeightEnumerator, alpha) -> int:
    """Number of polynomials of fractional weight <= alpha, zero included."""
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    threshold = alpha * we.n
    return sum(c for w, c in we.counts.items() if w <= threshold)


@dataclass(frozen=True)
class SpectrumReport:
    """Bias-threshold census of a spectrum.

    `low` tallies weights in [2^-(i+1), 2^-i) for i = 2..r-1 and `medium`
    weights in [1/2 - 2^-i, 1/2 - 2^-(i+1)) for i = 2..t; intervals are
    half-open on the upper end except the last of the chain, which is closed
    (the closed-interval reading would double-count shared endpoints).
    `biased_count` is the number of polynomials whose fractional weight
    differs from 1/2 by at least delta/2, with delta = C(m,<=r)^-2 and
    t = ceil(log2(1/delta)).
    """

    delta: Fraction
    t: int
    low: dict  # i -> count
    medium: dict  # i -> count
    biased_count: int


def interval_counts(we: WeightEnumerator) -> SpectrumReport:
    dim = we.dimension
    n = we.n
    delta = Fraction(1, dim * dim)
    t = (dim * dim - 1).bit_length()  # ceil(log2(1/delta))

    bounds = []  # (kind, i, lo, hi)
    for i in range(we.r - 1, 1, -1):  # ascending weight order
        bounds.append(("low", i, Fraction(1, 1 << (i + 1)), Fraction(1, 1 << i)))
    for i in range(2, t + 1):
        bounds.append(
            (
                "medium",
                i,
                Fraction(1, 2) - Fraction(1, 1 << i),
                Fraction(1, 2) - Fraction(1, 1 << (i + 1)),
            )
        )

    low = {i: 0 for i in range(2, we.r)}
    medium = {i: 0 for i in range(2, t + 1)}
    biased = 0
    half_bias = delta / 2
    for w, c in we.counts.items():
        frac = Fraction(w, n)
        if abs(frac - Fraction(1, 2)) >= half_bias:
            biased += c
        for pos, (kind, i, lo, hi) in enumerate(bounds):
            last = pos == len(bounds) - 1
            if lo <= frac < hi or (last and frac == hi):
                (low if kind == "low" else medium)[i] += c
                break
    return SpectrumReport(delta, t, low, medium, biased)


@dataclass(frozen=True)
class BoundParams:
    """Explicit stand-ins for the hidden constants of the spectrum bounds.

    gamma is the degree ratio r/m.  c4 scales the m^4 additive term; a_low
    replaces the simplified low-weight coefficient; a_med and b_med sit
    inside c(gamma, ell) = max(a_med * gamma^2 * ell, b_med * gamma).
    Defaults of 1 are reporting conventions, not asserted values.
    """

    gamma: float
    c4: float = 1.0
    a_low: float = 1.0
    a_med: float = 1.0
    b_med: float = 1.0

    def __post_init__(self):
        if not 0 < self.gamma <= 0.5:
            raise ValueError(f"gamma must be in (0, 1/2], got {self.gamma}")
        for name in ("c4", "a_low", "a_med", "b_med"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def for_code(cls, m: int, r: int, **overrides) -> "BoundParams":
        return cls(gamma=r / m, **overrides)


def _check_gamma(params: BoundParams, m: int, r: int):
    if abs(params.gamma - r / m) > 1e-12:
        raise ValueError(
            f"params.gamma={params.gamma} does not match r/m={r / m}"
        )


def low_weight_bound_exponent(
    params: BoundParams, m: int, r: int, ell: int
) -> float:
    """log2 upper bound for the count of weight <= 2^-ell codewords:
    c4*m^4 + 17*(c_g*ell + d_g)*gamma^(ell-1)*C(m,<=r) with c_g = 1/(1-gamma)
    and d_g = (2-gamma)/(1-gamma)^2.  Monotone decreasing in ell for small
    gamma."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    _check_gamma(params, m, r)
    g = params.gamma
    c_g = 1.0 / (1.0 - g)
    d_g = (2.0 - g) / (1.0 - g) ** 2
    return params.c4 * m**4 + 17.0 * (c_g * ell + d_g) * g ** (ell - 1) * binom_sum(m, r)


def low_weight_bound_exponent_simplified(
    params: BoundParams, m: int, r: int, ell: int
) -> float:
    """Simplified variant c4*m^4 + a_low*ell*gamma^(ell-1)*C(m,<=r)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    _check_gamma(params, m, r)
    g = params.gamma
    return params.c4 * m**4 + params.a_low * ell * g ** (ell - 1) * binom_sum(m, r)


def medium_weight_bound_exponent(
    params: BoundParams,
    m: int,
    r: int,
    ell: int,
    *,
    max_ell_ratio: float = 0.5,
) -> float:
    """log2 upper bound for the count of weight <= 1/2 - 2^-ell codewords:
    c4*m^4 + (1 - 2^-c)*C(m,<=r) with c = max(a_med*gamma^2*ell, b_med*gamma).
    Requires gamma bounded away from 1/2 and ell/m below `max_ell_ratio`."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    _check_gamma(params, m, r)
    if params.gamma >= 0.5:
        raise ValueError("medium-weight bound needs gamma < 1/2")
    if ell > max_ell_ratio * m:
        raise ValueError(
            f"ell={ell} exceeds {max_ell_ratio} * m = {max_ell_ratio * m}"
        )
    g = params.gamma
    c = max(params.a_med * g * g * ell, params.b_med * g)
    return params.c4 * m**4 + (1.0 - 2.0 ** (-c)) * binom_sum(m, r)


def min_sufficient_c4_low(we: WeightEnumerator, ell: int, params: BoundParams) -> float:
    """Smallest c4 making the low-weight bound cover the exact count at ell."""
    exact = wtdist(we, Fraction(1, 1 << ell))
    slack = low_weight_bound_exponent(
        BoundParams(params.gamma, c4=params.c4), we.m, we.r, ell
    ) - params.c4 * we.m**4
    return max(0.0, (math.log2(exact) - slack) / we.m**4)


def min_sufficient_c4_medium(
    we: WeightEnumerator, ell: int, params: BoundParams
) -> float:
    """Smallest c4 making the medium-weight bound cover the exact count at ell."""
    exact = wtdist(we, Fraction(1, 2) - Fraction(1, 1 << ell))
    slack = medium_weight_bound_exponent(
        params, we.m, we.r, ell
    ) - params.c4 * we.m**4
    return max(0.0, (math.log2(exact) - slack) / we.m**4)


def _log2_comb(n: int, k: int) -> float:
    return (
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    ) / math.log(2)


def _survival_weighted_sum(we: WeightEnumerator, k: int, log2_scale, exact: bool):
    """Sum over weights of counts[w] * 2^log2_scale * C(n-w, k)/C(n, k).

    `log2_scale` is an exact Fraction exponent applied to every term.  The
    exact path returns a Fraction; the log-space path returns a float and is
    used when n is too large for exact binomials.
    """
    n = we.n
    if exact:
        denom = math.comb(n, k)
        acc = Fraction(0)
        for w, c in we.counts.items():
            if n - w >= k:
                acc += Fraction(c * math.comb(n - w, k), denom)
        num, den = log2_scale.as_integer_ratio()
        assert den == 1, "log2 scale must be an integer exponent"
        if num >= 0:
            return acc * (1 << num)
        return acc / (1 << -num)
    log_denom = _log2_comb(n, k)
    terms = []
    for w, c in we.counts.items():
        if n - w >= k:
            terms.append(
                math.log2(c) + float(log2_scale) + _log2_comb(n - w, k) - log_denom
            )
    if not terms:
        return 0.0
    top = max(terms)
    return 2.0**top * math.fsum(2.0 ** (t - top) for t in terms)


def _use_exact(we: WeightEnumerator, method: str) -> bool:
    if method == "exact":
        return True
    if method == "log":
        return False
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    return we.n <= EXACT_BINOMIAL_LIMIT


def expected_survival_fraction(we: WeightEnumerator, k: int, *, method: str = "auto"):
    """Expected fraction of the code vanishing on a uniform k-subset of points.

    Exactly sum_w counts[w] * 2^-C * C(n-w, k)/C(n, k): the probability that
    a uniform polynomial vanishes on a uniform set of k distinct points,
    equivalently the expected vanishing-space size scaled by 2^-C(m,<=r).
    Returns an exact Fraction on the exact path, a float on the log path.
    """
    if not 0 <= k <= we.n:
        raise ValueError(f"k must be in [0, 2^m], got {k}")
    return _survival_weighted_sum(
        we, k, Fraction(-we.dimension), _use_exact(we, method)
    )


def union_bound_failure(we: WeightEnumerator, k: int, *, method: str = "auto") -> float:
    """Expected number of nonzero polynomials vanishing on a uniform k-subset.

    sum_{w>0} counts[w] * C(n-w, k)/C(n, k); an upper bound on the
    probability that the vanishing space exceeds its minimal dimension.
    Monotone non-increasing in k.  Exact rational internally, rendered float.
    """
    if not 0 <= k <= we.n:
        raise ValueError(f"k must be in [0, 2^m], got {k}")
    nonzero = WeightEnumerator(
        we.m, we.r, {w: c for w, c in we.counts.items() if w > 0}
    )
    value = _survival_weighted_sum(nonzero, k, Fraction(0), _use_exact(we, method))
    return float(value)


def resolve_k(dimension: int, epsilon: float) -> int:
    """k = round((1 - epsilon) * dimension), half away from zero."""
    return int(math.floor((1.0 - epsilon) * dimension + 0.5))


def size_inflation_sum(
    we: WeightEnumerator, k: int, epsilon: float, *, method: str = "auto"
) -> float:
    """Survival sum scaled by 2^(k - C): the expected vanishing-space size
    divided by its minimum 2^(C-k).  Approaches 1 from above when random
    k-subsets almost always have independent evaluation vectors; always at
    least the zero polynomial's own term 2^(k-C).

    Requires k = round((1 - epsilon) * C(m,<=r)); the scale uses the exact
    integer k - C so that the identity with expected_survival_fraction * 2^k
    holds at finite scale.
    """
    dim = we.dimension
    if resolve_k(dim, epsilon) != k:
        raise ValueError(
            f"k={k} does not match round((1-epsilon)*C) = {resolve_k(dim, epsilon)}"
        )
    value = _survival_weighted_sum(
        we, k, Fraction(k - dim), _use_exact(we, method)
    )
    return float(value)


def save_enumerator(we: WeightEnumerator, path):
    """Cache format: header 'm r', then 'w count' lines sorted by w."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{we.m} {we.r}\n")
        for w, c in we.sorted_items():
            fh.write(f"{w} {c}\n")


def load_enumerator(path) -> WeightEnumerator:
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    m, r = (int(x) for x in lines[0].split())
    counts = {}
    for ln in lines[1:]:
        w, c = (int(x) for x in ln.split())
        counts[w] = c
    return WeightEnumerator(m, r, counts)
