"""Exact arithmetic in small finite fields GF(p^h).

Field elements are integers 0..q-1.  The element code is the base-p digit
string of a polynomial over GF(p): the element sum(c_i x^i) is stored as
sum(c_i p^i), so GF(4) = {0, 1, x, x+1} is coded {0, 1, 2, 3} and 2x+1 in
GF(9) is coded 7.  Code 1 is always the multiplicative identity and the
prime subfield is exactly the codes 0..p-1.

The modulus is the lexicographically smallest monic irreducible polynomial
of degree h over GF(p), where polynomials are ordered by reading their
non-leading coefficient vector as a base-p integer.  For GF(4) this gives
x^2 + x + 1, for GF(9) it gives x^2 + 1.

Dense q-by-q add and mul tables are materialized for q <= 256, which
covers every field this package meets in practice; larger fields compute
on the fly behind the same interface.  The hard size cap is p^h <= 2^16.
"""

from __future__ import annotations

from array import array

__all__ = [
    "FieldTable",
    "build_field",
    "conj_sqrt_q",
    "element_to_coeffs",
    "coeffs_to_element",
    "field_descriptor",
    "parse_field_descriptor",
    "is_prime_power",
]

_TABLE_LIMIT = 256
_SIZE_CAP = 1 << 16


class FieldError(ValueError):
    """Invalid field parameters or element codes."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def is_prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, h) with q = p^h, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if p * p > q:
            break
        if q % p:
            continue
        h, m = 0, q
        while m % p == 0:
            m //= p
            h += 1
        return (p, h) if m == 1 and _is_prime(p) else None
    return (q, 1)


# ── polynomial helpers on base-p integer codes ──────────────────────────

def _poly_digits(code: int, p: int) -> list[int]:
    digits = []
    while code:
        digits.append(code % p)
        code //= p
    return digits


def _poly_from_digits(digits: list[int], p: int) -> int:
    code = 0
    for c in reversed(digits):
        code = code * p + c
    return code


def _poly_add(a: int, b: int, p: int) -> int:
    da, db = _poly_digits(a, p), _poly_digits(b, p)
    if len(da) < len(db):
        da, db = db, da
    for i, c in enumerate(db):
        da[i] = (da[i] + c) % p
    return _poly_from_digits(da, p)


def _poly_mul_mod(a: int, b: int, modulus: list[int], p: int) -> int:
    # modulus is the full monic coefficient list c_0..c_h with c_h = 1
    h = len(modulus) - 1
    da, db = _poly_digits(a, p), _poly_digits(b, p)
    prod = [0] * (len(da) + len(db))
    for i, ca in enumerate(da):
        if ca:
            for j, cb in enumerate(db):
                prod[i + j] = (prod[i + j] + ca * cb) % p
    # reduce: x^h = -(c_0 + c_1 x + ... + c_{h-1} x^{h-1})
    for k in range(len(prod) - 1, h - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(h):
                prod[k - h + j] = (prod[k - h + j] - c * modulus[j]) % p
    return _poly_from_digits(prod[:h] if len(prod) > h else prod, p)


def _poly_is_irreducible(coeffs: list[int], p: int) -> bool:
    # trial division by every monic polynomial of degree 1..deg//2
    deg = len(coeffs) - 1
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            divisor = _poly_digits(low, p) + [0] * (d - len(_poly_digits(low, p))) + [1]
            if _poly_remainder_is_zero(coeffs, divisor, p):
                return False
    return True


def _poly_remainder_is_zero(num: list[int], div: list[int], p: int) -> bool:
    rem = list(num)
    dd = len(div) - 1
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k]
        if c:
            for j in range(dd + 1):
                rem[k - dd + j] = (rem[k - dd + j] - c * div[j]) % p
    return not any(rem)


def _smallest_irreducible(p: int, h: int) -> tuple[int, ...]:
    if h == 1:
        return (0, 1)
    for low in range(p**h):
        digits = _poly_digits(low, p)
        coeffs = digits + [0] * (h - len(digits)) + [1]
        if _poly_is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no irreducible polynomial of degree {h} over GF({p})")


# ── the field itself ────────────────────────────────────────────────────

class FieldTable:
    """Arithmetic tables for GF(p^h) with integer-coded elements.

    Construct via build_field(p, h).  add/sub/mul/inv/neg/div/pow are
    total on valid codes (inv and div reject 0).  conj is the involutory
    automorphism a -> a^sqrt(q), defined only when h is even.
    """

    __slots__ = (
        "p", "h", "q", "modulus",
        "_add", "_mul", "_neg", "_inv", "_conj", "_frob",
    )

    def __init__(self, p: int, h: int, modulus: tuple[int, ...]):
        self.p = p
        self.h = h
        self.q = p**h
        self.modulus = modulus
        q = self.q
        if q <= _TABLE_LIMIT:
            mod = list(modulus)
            add = array("B", bytes(q * q))
            mul = array("B", bytes(q * q))
            for a in range(q):
                for b in range(a, q):
                    s = _poly_add(a, b, p)
                    m = _poly_mul_mod(a, b, mod, p)
                    add[a * q + b] = add[b * q + a] = s
                    mul[a * q + b] = mul[b * q + a] = m
            self._add, self._mul = add, mul
            neg = array("B", bytes(q))
            inv = array("B", bytes(q))
            for a in range(q):
                for b in range(q):
                    if add[a * q + b] == 0:
                        neg[a] = b
                    if a and mul[a * q + b] == 1:
                        inv[a] = b
            self._neg, self._inv = neg, inv
            frob = array("B", [mul[a * q + a] for a in range(q)])
            for _ in range(2, p):
                frob = array("B", [mul[frob[a] * q + a] for a in range(q)])
            self._frob = frob
            if h % 2 == 0:
                conj = array("B", range(q))
                for _ in range(h // 2):
                    conj = array("B", [frob[c] for c in conj])
                self._conj = conj
            else:
                self._conj = None
        else:
            self._add = self._mul = self._neg = self._inv = None
            self._frob = self._conj = None

    # -- basic operations --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a * self.q + b]
        return _poly_add(a, b, self.p)

    def neg(self, a: int) -> int:
        if self._neg is not None:
            return self._neg[a]
        return _poly_from_digits([(-c) % self.p for c in _poly_digits(a, self.p)], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a * self.q + b]
        return _poly_mul_mod(a, b, list(self.modulus), self.p)

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("0 has no multiplicative inverse")
        if self._inv is not None:
            return self._inv[a]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius(self, a: int) -> int:
        if self._frob is not None:
            return self._frob[a]
        return self.pow(a, self.p)

    def conj(self, a: int) -> int:
        """The automorphism a -> a^sqrt(q); requires even h."""
        if self.h % 2:
            raise FieldError(f"GF({self.q}) has no square root of q: h = {self.h} is odd")
        if self._conj is not None:
            return self._conj[a]
        t = a
        for _ in range(self.h // 2):
            t = self.frobenius(t)
        return t

    def absolute_trace(self, a: int) -> int:
        """Trace to the prime field, returned as a code in 0..p-1."""
        t, term = a, a
        for _ in range(self.h - 1):
            term = self.frobenius(term)
            t = self.add(t, term)
        return t

    def elements(self) -> range:
        return range(self.q)

    def check_element(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise FieldError(f"invalid element code {a!r} for GF({self.q})")
        return a

    # -- raw tables for the compiled kernels --------------------------------

    def flat_tables(self) -> tuple[array, array, array, array, array | None]:
        """(add, mul, neg, inv, conj) as flat array('B'); only for q <= 256."""
        if self._add is None:
            raise FieldError(f"dense tables are only materialized for q <= {_TABLE_LIMIT}")
        return self._add, self._mul, self._neg, self._inv, self._conj

    def __repr__(self) -> str:
        return f"FieldTable(GF({self.p}^{self.h}))" if self.h > 1 else f"FieldTable(GF({self.p}))"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTable) and (self.p, self.h) == (other.p, other.h)

    def __hash__(self) -> int:
        return hash((self.p, self.h))


_FIELD_CACHE: dict[tuple[int, int], FieldTable] = {}


def build_field(p: int, h: int) -> FieldTable:
    """Construct GF(p^h).  Errors: p not prime, h < 1, or p^h > 2^16."""
    if not isinstance(p, int) or not _is_prime(p):
        raise FieldError(f"p = {p!r} is not prime")
    if not isinstance(h, int) or h < 1:
        raise FieldError(f"h = {h!r} must be a positive integer")
    if p**h > _SIZE_CAP:
        raise FieldError(f"field size {p}^{h} exceeds the cap 2^16")
    key = (p, h)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldTable(p, h, _smallest_irreducible(p, h))
    return _FIELD_CACHE[key]


def conj_sqrt_q(field: FieldTable, a: int) -> int:
    return field.conj(field.check_element(a))


def element_to_coeffs(field: FieldTable, a: int) -> tuple[int, ...]:
    """Base-p digit vector (c_0, ..., c_{h-1}) of an element code."""
    field.check_element(a)
    digits = _poly_digits(a, field.p)
    return tuple(digits + [0] * (field.h - len(digits)))

def coeffs_to_element(field: FieldTable, coeffs) -> int:
    coeffs = list(coeffs)
    if len(coeffs) != field.h or any(not 0 <= c < field.p for c in coeffs):
        raise FieldError(f"expected {field.h} coefficients in 0..{field.p - 1}, got {coeffs!r}")
    return _poly_from_digits(coeffs, field.p)


def field_descriptor(field: FieldTable) -> str:
    return f"{field.p}^{field.h}"


def parse_field_descriptor(text: str) -> tuple[int, int]:
    """Parse "p^h" (or a bare prime "p") into (p, h)."""
    parts = text.strip().split("^")
    try:
        if len(parts) == 1:
            return int(parts[0]), 1
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise FieldError(f"malformed field descriptor {text!r}")
