"""Exact arithmetic in GF(p^s) backed by discrete-log tables.

Elements are stored as discrete logarithms relative to a fixed primitive
element gamma (``ZERO`` is the sentinel -1). Polynomial coordinates are
encoded as integers ``sum(c_i * p**i)``, constant term first. Addition goes
through the coordinates; multiplication is index addition mod q-1.

The modulus and generator are chosen deterministically, so two runs with the
same (p, s) always produce the same field, the same gamma and the same
tables.
"""

from __future__ import annotations

import itertools
import logging
import math
from functools import cached_property, lru_cache

import numpy as np

from .errors import (
    BadParameters,
    BudgetExceeded,
    DivisionByZero,
    FieldMismatch,
    LogOfZero,
    MovoidError,
    NotADivisor,
    NotPrime,
)

log = logging.getLogger(__name__)

ZERO = -1

#: hard cap on the field order
MAX_ORDER = 2**31
#: above this order exhaustive property suites are disabled
EXHAUSTIVE_LIMIT = 2**26

_CHUNK = 1 << 20


# ---------------------------------------------------------------------------
# integer helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (n stays below 2^31 here)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# polynomials over GF(p), coefficient lists constant term first

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, f, p):
    a = [c % p for c in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _trim(a[:df]) if len(a) > df else _trim(a)


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _poly_mulmod(a, b, f, p):
    return _poly_mod(_poly_mul(a, b, p), f, p)


def _poly_powmod(a, n, f, p):
    result = [1]
    base = _poly_mod(a, f, p)
    while n:
        if n & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        n >>= 1
    return result


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(f, p: int) -> bool:
    """Rabin's test for a monic polynomial of degree s over GF(p)."""
    f = _trim(f)
    s = len(f) - 1
    if s < 1:
        return False
    if s == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**s, f, p), x, p):
        return False
    for d in prime_factors(s):
        h = _poly_sub(_poly_powmod(x, p ** (s // d), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def _lex_sequences(p, s):
    """All length-s coefficient sequences in lexicographic order, comparing
    the constant term first."""
    return itertools.product(range(p), repeat=s)


def find_modulus(p: int, s: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible polynomial of degree s.

    Returned as ``(c_0, ..., c_{s-1}, 1)``.
    """
    for low in _lex_sequences(p, s):
        f = list(low) + [1]
        if s > 1 and low[0] == 0:
            continue
        if is_irreducible(f, p):
            return tuple(f)
    raise MovoidError(f"no irreducible polynomial of degree {s} over GF({p})")


def _has_full_order(g, f, p, q, factors):
    if _poly_powmod(g, q - 1, f, p) != [1]:
        return False
    return all(_poly_powmod(g, (q - 1) // ell, f, p) != [1] for ell in factors)


def find_generator(p: int, s: int, modulus) -> tuple[int, ...]:
    q = p**s
    factors = prime_factors(q - 1)
    f = list(modulus)
    for seq in _lex_sequences(p, s):
        g = _trim(seq)
        if not g:
            continue
        if _has_full_order(g, f, p, q, factors):
            return tuple(seq)
    raise MovoidError(f"no primitive element found in GF({p}^{s})")


# ---------------------------------------------------------------------------
# coordinate helpers (vectorised)

def digits(enc, p: int, s: int) -> np.ndarray:
    """Base-p digits of encodings, shape ``enc.shape + (s,)``."""
    enc = np.asarray(enc, dtype=np.int64)
    out = np.empty(enc.shape + (s,), dtype=np.int64)
    rest = enc.copy()
    for i in range(s):
        out[..., i] = rest % p
        rest //= p
    return out


def encode(coords, p: int) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    s = coords.shape[-1]
    weights = p ** np.arange(s, dtype=np.int64)
    return (coords * weights).sum(axis=-1)


def _mul_matrix(g, f, p, s):
    """Matrix (s x s) of multiplication by polynomial g acting on column
    coordinate vectors."""
    cols = []
    cur = _poly_mod(g, f, p)
    for _ in range(s):
        cols.append(cur + [0] * (s - len(cur)))
        cur = _poly_mod([0] + cur, f, p)
    return np.array(cols, dtype=np.int64).T


# ---------------------------------------------------------------------------

class Field:
    """GF(p^s) with exp/log tables.

    ``exp[k]`` is the encoding of gamma^k for 0 <= k < q-1, ``log[v]`` the
    discrete log of the element with encoding v (``ZERO`` for v = 0).
    """

    def __init__(self, p: int, s: int, max_order: int = MAX_ORDER):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p == 2:
            raise BadParameters("characteristic 2 is not supported")
        if s < 1:
            raise NotADivisor(f"exponent must be positive, got {s}")
        q = p**s
        if q > max_order:
            raise BudgetExceeded(f"GF({p}^{s}) has {q} elements, cap is {max_order}")
        if q > EXHAUSTIVE_LIMIT:
            log.warning("GF(%d^%d) is large (%d elements); exhaustive checks disabled",
                        p, s, q)
        self.p = p
        self.s = s
        self.q = q
        self.order = q - 1
        self.modulus = find_modulus(p, s)
        self.generator = find_generator(p, s, self.modulus)
        self.exp, self.log = self._build_tables()

    def _build_tables(self):
        p, s, q = self.p, self.s, self.q
        f = list(self.modulus)
        dtype = np.int32 if q < 2**31 else np.int64
        # powers gamma^0 .. gamma^(q-2) by block doubling: the block
        # [n, 2n) is the block [0, n) times gamma^n, a linear map over GF(p)
        exp = np.empty(q - 1, dtype=dtype)
        exp[0] = 1
        filled = 1
        step = _trim(self.generator)
        while filled < q - 1:
            mat = _mul_matrix(step, f, p, s).T
            n = min(filled, q - 1 - filled)
            for lo in range(0, n, _CHUNK):
                hi = min(n, lo + _CHUNK)
                coords = (digits(exp[lo:hi], p, s) @ mat) % p
                exp[filled + lo:filled + hi] = encode(coords, p)
            filled += n
            step = _poly_mulmod(step, step, f, p)
        logt = np.full(q, ZERO, dtype=dtype)
        logt[exp] = np.arange(q - 1, dtype=dtype)
        if logt[0] != ZERO or np.count_nonzero(logt == ZERO) != 1:
            raise MovoidError("generator does not have full order")
        return exp, logt

    # -- element construction ---------------------------------------------
    def __repr__(self):
        return f"Field(GF({self.p}^{self.s}))"

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, ZERO)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def gen(self) -> FieldElement:
        return FieldElement(self, 1 % self.order if self.order > 1 else 0)

    def __call__(self, index: int) -> FieldElement:
        """Element gamma^index (index reduced mod q-1)."""
        return FieldElement(self, int(index) % self.order)

    def from_log(self, index: int) -> FieldElement:
        return self(index)

    def from_encoding(self, enc: int) -> FieldElement:
        return FieldElement(self, int(self.log[int(enc)]))

    def from_coeffs(self, coeffs) -> FieldElement:
        coeffs = list(coeffs) + [0] * (self.s - len(coeffs))
        return self.from_encoding(int(encode([c % self.p for c in coeffs], self.p)))

    def encoding(self, index: int) -> int:
        return 0 if index == ZERO else int(self.exp[index])

    def coeffs(self, index: int) -> tuple[int, ...]:
        return tuple(int(d) for d in digits(self.encoding(index), self.p, self.s))

    def elements(self):
        yield self.zero
        for k in range(self.order):
            yield FieldElement(self, k)

    # -- raw arithmetic on log indices --------------------------------------
    def add_idx(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        da = digits(int(self.exp[a]), self.p, self.s)
        db = digits(int(self.exp[b]), self.p, self.s)
        return int(self.log[int(encode((da + db) % self.p, self.p))])

    def neg_idx(self, a: int) -> int:
        if a == ZERO:
            return ZERO
        # -1 = gamma^((q-1)/2) for odd q
        return (a + self.order // 2) % self.order

    def mul_idx(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.order

    def add_encodings(self, a, b):
        """Vectorised addition of encodings."""
        da = digits(a, self.p, self.s)
        db = digits(b, self.p, self.s)
        return encode((da + db) % self.p, self.p)

    def frobenius_idx(self, a: int, k: int) -> int:
        if a == ZERO:
            return ZERO
        return a * pow(self.p, k % self.s, self.order) % self.order

    # -- subfields and traces -------------------------------------------------
    def check_divisor(self, e: int):
        if e < 1 or self.s % e:
            raise NotADivisor(f"{e} does not divide {self.s}")

    def subfield_step(self, e: int) -> int:
        """Log step generating GF(p^e)^*: gamma^((q-1)/(p^e-1))."""
        self.check_divisor(e)
        return self.order // (self.p**e - 1)

    def in_subfield_idx(self, a: int, e: int) -> bool:
        return a == ZERO or a % self.subfield_step(e) == 0

    def trace_idx(self, a: int, e: int, top: int | None = None) -> int:
        """Tr_{p^top/p^e}(a); ``top`` defaults to s, and for smaller ``top``
        the argument must lie in GF(p^top)."""
        self.check_divisor(e)
        top = self.s if top is None else top
        if top % e:
            raise NotADivisor(f"{e} does not divide {top}")
        acc = ZERO
        for i in range(top // e):
            acc = self.add_idx(acc, self.frobenius_idx(a, i * e))
        return acc

    def trace_table(self, e: int) -> TraceTable:
        cache = self.__dict__.setdefault("_traces", {})
        if e not in cache:
            cache[e] = TraceTable(self, e)
        return cache[e]

    def _trace_basis(self, e):
        """Encodings of Tr_{q/p^e}(X^j) for j < s."""
        x = self.from_coeffs([0, 1]) if self.s > 1 else None
        out = []
        for j in range(self.s):
            if self.s == 1:
                mono = self.one
            else:
                mono = x**j
            out.append(self.encoding(self.trace_idx(mono.index, e)))
        return np.array(out, dtype=np.int64)

    @cached_property
    def abs_trace_by_log(self) -> np.ndarray:
        """Tr_{q/p}(gamma^k) as an integer in [0, p) for every k."""
        return self.trace_table(1).by_log

    def __eq__(self, other):
        return (isinstance(other, Field) and self.p == other.p
                and self.s == other.s and self.modulus == other.modulus
                and self.generator == other.generator)

    def __hash__(self):
        return hash((self.p, self.s, self.modulus, self.generator))


class TraceTable:
    """Tr_{q/p^e} for every element, by encoding and by discrete log."""

    def __init__(self, field: Field, e: int):
        field.check_divisor(e)
        self.field = field
        self.e = e
        p, s, q = field.p, field.s, field.q
        basis = digits(field._trace_basis(e), p, s)
        dtype = field.exp.dtype
        values = np.empty(q, dtype=dtype)
        for lo in range(0, q, _CHUNK):
            enc = np.arange(lo, min(q, lo + _CHUNK), dtype=np.int64)
            coords = (digits(enc, p, s) @ basis) % p
            values[lo:lo + len(enc)] = encode(coords, p)
        self.values = values

    @cached_property
    def by_log(self) -> np.ndarray:
        return self.values[self.field.exp]

    @cached_property
    def zero_mask_by_log(self) -> np.ndarray:
        return (self.by_log == 0).astype(np.int8)

    def __getitem__(self, x: FieldElement) -> FieldElement:
        return self.field.from_encoding(int(self.values[self.field.encoding(x.index)]))


@lru_cache(maxsize=8)
def build_field(p: int, s: int, max_order: int = MAX_ORDER) -> Field:
    """Deterministic GF(p^s); cached so repeated builds share tables."""
    return Field(p, s, max_order)


class FieldElement:
    __slots__ = ("field", "index")

    def __init__(self, field: Field, index: int):
        self.field = field
        self.index = int(index)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def is_zero(self):
        return self.index == ZERO

    def __bool__(self):
        return self.index != ZERO

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.add_idx(self.index, other.index))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_idx(self.index))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul_idx(self.index, other.index))

    def inverse(self):
        if self.index == ZERO:
            raise DivisionByZero("inverse of zero")
        return FieldElement(self.field, (-self.index) % self.field.order)

    def __truediv__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int):
        if self.index == ZERO:
            if n == 0:
                return self.field.one
            if n < 0:
                raise DivisionByZero("negative power of zero")
            return self
        return FieldElement(self.field, self.index * n % self.field.order)

    def __eq__(self, other):
        return (isinstance(other, FieldElement) and self.index == other.index
                and self.field == other.field)

    def __hash__(self):
        return hash((self.index, self.field.q))

    def __repr__(self):
        if self.index == ZERO:
            return "0"
        return f"g^{self.index}"

    def log(self) -> int:
        if self.index == ZERO:
            raise LogOfZero("discrete log of zero")
        return self.index

    def frobenius(self, k: int) -> FieldElement:
        return FieldElement(self.field, self.field.frobenius_idx(self.index, k))

    def trace(self, e: int = 1, top: int | None = None) -> FieldElement:
        return FieldElement(self.field, self.field.trace_idx(self.index, e, top))

    def in_subfield(self, e: int) -> bool:
        return self.field.in_subfield_idx(self.index, e)

    @property
    def encoding(self) -> int:
        return self.field.encoding(self.index)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.index)

    def multiplicative_order(self) -> int:
        if self.index == ZERO:
            raise LogOfZero("zero has no multiplicative order")
        return self.field.order // math.gcd(self.index, self.field.order)


def discrete_log(x: FieldElement) -> int:
    return x.log()


def trace(x: FieldElement, e: int) -> FieldElement:
    return x.trace(e)


def frobenius(x: FieldElement, k: int) -> FieldElement:
    return x.frobenius(k)
