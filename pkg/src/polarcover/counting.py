"""Closed-form counts and bounds for finite classical polar spaces.

Six kinds of polar space, parametrized by rank r and field size q, with the
parameter e attached to each kind (carried as e2 = 2e so everything stays
integral):

    kind            ambient dim   e2
    hyperbolic      2r            0
    hermitian-odd   2r            1
    symplectic      2r            2
    parabolic       2r+1          2
    hermitian-even  2r+1          3
    elliptic        2r+2          4

Every value returned here is exact: int, Fraction, or a rational surd used
internally for the rank threshold.  No floats anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from polarcover.gf import is_prime_power


class CountingError(ValueError):
    pass


HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"
HERMITIAN_ODD = "hermitian-odd"
HERMITIAN_EVEN = "hermitian-even"
SYMPLECTIC = "symplectic"

KINDS = (HYPERBOLIC, PARABOLIC, ELLIPTIC, HERMITIAN_ODD, HERMITIAN_EVEN, SYMPLECTIC)

KIND_E2 = {
    HYPERBOLIC: 0,
    HERMITIAN_ODD: 1,
    SYMPLECTIC: 2,
    PARABOLIC: 2,
    HERMITIAN_EVEN: 3,
    ELLIPTIC: 4,
}

HERMITIAN_KINDS = (HERMITIAN_ODD, HERMITIAN_EVEN)


def check_kind(kind: str) -> str:
    if kind not in KIND_E2:
        raise CountingError(f"unknown polar space kind {kind!r}")
    return kind


def ambient_dim(kind: str, r: int) -> int:
    check_kind(kind)
    if r < 1:
        raise CountingError(f"rank must be >= 1, got {r}")
    if kind in (HYPERBOLIC, HERMITIAN_ODD, SYMPLECTIC):
        return 2 * r
    if kind in (PARABOLIC, HERMITIAN_EVEN):
        return 2 * r + 1
    return 2 * r + 2


def _check_q(q: int) -> tuple[int, int]:
    ph = is_prime_power(q)
    if ph is None:
        raise CountingError(f"q = {q} is not a prime power")
    return ph


class HalfExpInt:
    """Exact evaluation of q^(x+e) where e = e2/2 may be a half-integer.

    When e2 is odd the base is t = sqrt(q), which must be an integer; the
    Hermitian kinds only exist over square q, so this is not a restriction.
    """

    __slots__ = ("q", "e2", "t")

    def __init__(self, q: int, e2: int):
        if e2 < 0:
            raise CountingError(f"e2 must be >= 0, got {e2}")
        self.q = q
        self.e2 = e2
        if e2 % 2:
            t = math.isqrt(q)
            if t * t != q:
                raise CountingError(
                    f"half-integer e needs square q; q = {q} is not a square")
            self.t = t
        else:
            self.t = None

    def pow(self, x: int) -> int:
        """q^(x + e2/2) as an exact integer; the total exponent must be >= 0."""
        m = 2 * x + self.e2
        if m < 0:
            raise CountingError(f"negative exponent q^({x} + {self.e2}/2)")
        if m % 2 == 0:
            return self.q ** (m // 2)
        return self.t ** m


def gaussian_binomial(a: int, b: int, q: int) -> int:
    """Number of b-dimensional subspaces of a vector space of dimension a."""
    if a < 0 or b < 0:
        raise CountingError(f"gaussian_binomial needs a, b >= 0, got ({a}, {b})")
    if q < 2:
        raise CountingError(f"gaussian_binomial needs q >= 2, got {q}")
    if b > a:
        return 0
    num = den = 1
    for i in range(1, b + 1):
        num *= q ** (a - b + i) - 1
        den *= q ** i - 1
    assert num % den == 0
    return num // den


def ovoid_size(r: int, k: int, e2: int, q: int) -> int:
    """Size of any exact (r,k)-cover: product of (q^(r+e-i)+1) for i = 1..k."""
    if not 1 <= k <= r:
        raise CountingError(f"need 1 <= k <= r, got k={k}, r={r}")
    ctx = HalfExpInt(q, e2)
    size = 1
    for i in range(1, k + 1):
        size *= ctx.pow(r - i) + 1
    return size


def generators_through_count(r: int, k: int, e2: int, q: int) -> int:
    """Number of generators containing a fixed totally isotropic k-space."""
    if not 0 <= k <= r:
        raise CountingError(f"need 0 <= k <= r, got k={k}, r={r}")
    ctx = HalfExpInt(q, e2)
    total = 1
    for i in range(k + 1, r + 1):
        total *= ctx.pow(r - i) + 1
    return total


def count_ti(kind: str, r: int, k: int, q: int) -> int:
    """Number of totally isotropic k-spaces of the given polar space."""
    check_kind(kind)
    if not 1 <= k <= r:
        raise CountingError(f"need 1 <= k <= r, got k={k}, r={r}")
    p, h = _check_q(q)
    if kind in HERMITIAN_KINDS and h % 2:
        raise CountingError(f"Hermitian spaces need square q; q = {q} is not")
    return gaussian_binomial(r, k, q) * ovoid_size(r, k, KIND_E2[kind], q)


def num_points(kind: str, r: int, q: int) -> int:
    return count_ti(kind, r, 1, q)


def num_generators(kind: str, r: int, q: int) -> int:
    return count_ti(kind, r, r, q)


def degenerate_hyperplane_fraction(r: int, k: int, e2: int, q: int) -> Fraction:
    """Fraction of totally isotropic k-spaces inside a tangent hyperplane.

    The tangent hyperplane at a point P meets the space in a cone over a
    rank r-1 space; this is the exact ratio of k-spaces in that cone to all
    k-spaces, reduced to lowest terms.
    """
    if r < k + 1:
        raise CountingError(f"need r >= k+1, got r={r}, k={k}")
    ctx = HalfExpInt(q, e2)
    num = ctx.pow(2 * r - k - 1) + q**r - ctx.pow(r - 1) - 1
    den = (q**r - 1) * (ctx.pow(r - 1) + 1)
    return Fraction(num, den)


# ── bounds ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BoundReport:
    """An exact bound value plus how it was obtained."""

    value: object                 # int or Fraction
    formula: str
    params: dict
    cap: object | None = None     # simplified weaker form, when one exists
    cap_holds: bool | None = None
    weak: int | None = None       # weaker printed variant (bm bound)
    floor: int | None = None      # integer part, for rational bounds


def _check_prime(p: int) -> None:
    if is_prime_power(p) != (p, 1):
        raise CountingError(f"p = {p} is not prime")


def bm_bound(p: int, h: int, n: int) -> BoundReport:
    """Upper bound C(p+n-2, p-1)^h + 1 on partial point ovoids in PG(n-1, p^h).

    The report also carries the weaker closed form (p+n-1)^(h(p-1)) + 1.
    """
    _check_prime(p)
    if h < 1 or n < 2:
        raise CountingError(f"need h >= 1 and n >= 2, got h={h}, n={n}")
    strong = math.comb(p + n - 2, p - 1) ** h + 1
    weak = (p + n - 1) ** (h * (p - 1)) + 1
    return BoundReport(
        value=strong,
        formula="binomial-power-plus-one",
        params={"p": p, "h": h, "n": n, "q": p**h},
        weak=weak,
    )


def partial_rk_ovoid_bound(p: int, h: int, r: int, k: int, e2: int) -> BoundReport:
    """Upper bound on the size of a partial (r,k)-cover over GF(p^h).

    value = prod_{i=1}^{k-1} [(q^(r-i+1)-1)(q^(r+e-i)+1)] /
                             [(q^(i+1)-1) q^(2r+e-k-i)]
            * (p+2r-2k+3)^(k h (p-1))

    cap is the simplified form 2^(k-1) (p+2r-2k+3)^(k h (p-1)); cap_holds
    records that value <= cap (it always should).
    """
    _check_prime(p)
    if h < 1:
        raise CountingError(f"need h >= 1, got {h}")
    if k < 1 or r < k + 1:
        raise CountingError(f"need k >= 1 and r >= k+1, got r={r}, k={k}")
    q = p**h
    ctx = HalfExpInt(q, e2)
    product = Fraction(1)
    for i in range(1, k):
        product *= Fraction(
            (q ** (r - i + 1) - 1) * (ctx.pow(r - i) + 1),
            (q ** (i + 1) - 1) * ctx.pow(2 * r - k - i),
        )
    power = (p + 2 * r - 2 * k + 3) ** (k * h * (p - 1))
    value = product * power
    if value.denominator == 1:
        value = value.numerator
    cap = 2 ** (k - 1) * power
    return BoundReport(
        value=value,
        formula="partial-cover-product",
        params={"p": p, "h": h, "q": q, "r": r, "k": k, "e2": e2},
        cap=cap,
        cap_holds=Fraction(value) <= cap,
    )


def schrijver_bound(v: int, deg: int) -> BoundReport:
    """Lower bound ((deg-1)^(deg-1) / deg^(deg-2))^v on perfect matchings
    of a deg-regular bipartite graph with v vertices per side."""
    if deg < 2 or v < 1:
        raise CountingError(f"need deg >= 2 and v >= 1, got deg={deg}, v={v}")
    value = Fraction((deg - 1) ** (deg - 1), deg ** (deg - 2)) ** v
    return BoundReport(
        value=value,
        formula="schrijver-matchings",
        params={"v": v, "deg": deg},
        floor=value.numerator // value.denominator,
    )


# ── non-existence rank threshold ─────────────────────────────────────────

class _Surd:
    """a + b*sqrt(d) with Fraction coefficients, d a fixed positive non-square."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other):
        if isinstance(other, _Surd):
            if other.d != self.d:
                raise CountingError("mixed surd bases")
            return other
        return _Surd(other, 0, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return _Surd(self.a + o.a, self.b + o.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        return _Surd(self.a - o.a, self.b - o.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        return _Surd(self.a * o.a + self.b * o.b * self.d,
                     self.a * o.b + self.b * o.a, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        norm = o.a * o.a - o.b * o.b * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        inv = _Surd(o.a / norm, -o.b / norm, self.d)
        return self * inv

    def sign(self) -> int:
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 against b^2 d
        lhs, rhs = a * a, b * b * self.d
        if a > 0:
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0


def _pow_qe_surd(p: int, e2: int, x: int) -> _Surd:
    """p^(x + e2/2) as a surd over sqrt(p); e2 odd, p non-square."""
    m = 2 * x + e2
    if m < 0:
        raise CountingError("negative exponent in surd power")
    if m % 2 == 0:
        return _Surd(p ** (m // 2), 0, p)
    return _Surd(0, p ** ((m - 1) // 2), p)


def _threshold_exceeds(p: int, k: int, e2: int, r: int) -> bool:
    """Does the forced cover size exceed the partial-cover bound at h=1?"""
    if e2 % 2 == 0:
        size = ovoid_size(r, k, e2, p)
        return Fraction(size) > Fraction(partial_rk_ovoid_bound(p, 1, r, k, e2).value)
    # odd e2 with prime p: exact arithmetic in Q(sqrt(p))
    size = _Surd(1, 0, p)
    for i in range(1, k + 1):
        size = size * (_pow_qe_surd(p, e2, r - i) + 1)
    product = _Surd(1, 0, p)
    for i in range(1, k):
        num = _Surd(p ** (r - i + 1) - 1, 0, p) * (_pow_qe_surd(p, e2, r - i) + 1)
        den = _Surd(p ** (i + 1) - 1, 0, p) * _pow_qe_surd(p, e2, 2 * r - k - i)
        product = product * (num / den)
    bound = product * ((p + 2 * r - 2 * k + 3) ** (k * (p - 1)))
    return size > bound


THRESHOLD_HARD_CAP = 2000


def nonexistence_rank_threshold(p: int, k: int, e2: int, window: int = 50):
    """Smallest r* >= k+1 with forced size > bound throughout [r*, r*+window].

    Computed at h = 1; the comparison is h-homogeneous, so the threshold is
    independent of h.  Returns None when no stable r* exists below the hard
    cap (callers report that as UNKNOWN).
    """
    _check_prime(p)
    if k < 1:
        raise CountingError(f"need k >= 1, got {k}")
    if window < 0:
        raise CountingError(f"window must be >= 0, got {window}")
    if e2 not in (0, 1, 2, 3, 4):
        raise CountingError(f"e2 must be in 0..4, got {e2}")
    candidate = None
    for r in range(k + 1, THRESHOLD_HARD_CAP + window + 1):
        if _threshold_exceeds(p, k, e2, r):
            if candidate is None:
                candidate = r
            if r - candidate >= window:
                return candidate
        else:
            candidate = None
            if r > THRESHOLD_HARD_CAP:
                return None
    return None
