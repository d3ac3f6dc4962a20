"""Finite fields F_q = F_p[x]/(m(x)) for odd prime powers q = p^k.

Elements are plain ints ("codes") in 0..q-1: the base-p digits of a code are
the polynomial coefficients, constant term first.  Code 0 is the additive
identity and code 1 the multiplicative identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import DivisionByZero, EvenCharacteristic, NotPrime, SizeCapExceeded

FIELD_CAP = 1 << 20
TABLE_THRESHOLD = 1 << 12


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
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, constant term first
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a, b, p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def poly_divmod(a, b, p: int) -> tuple[list[int], list[int]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead % p
        quot[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bi) % p
        _trim(a)
    return _trim(quot), a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    if deg <= 1:
        return deg == 1
    if poly[0] == 0:
        return False
    for r in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=r):
            _, rem = poly_divmod(poly, list(low) + [1], p)
            if not rem:
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k.

    Coefficient tuples are compared constant term first, so the constant
    coefficient is the most significant position of the ordering.
    """
    for low in itertools.product(range(p), repeat=k):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")


# ---------------------------------------------------------------------------
# the field
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldSpec:
    p: int
    k: int
    modulus: tuple[int, ...]
    _mul: np.ndarray | None = dc_field(default=None, repr=False)
    _inv: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    @property
    def has_tables(self) -> bool:
        return self._mul is not None

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def describe(self) -> dict:
        return {"p": self.p, "k": self.k, "q": self.q, "modulus": list(self.modulus)}

    # -- encoding ---------------------------------------------------------

    def decode(self, a: int) -> tuple[int, ...]:
        """Coefficient tuple (constant term first) of element code ``a``."""
        self._check(a)
        digits = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            digits.append(r)
        return tuple(digits)

    def encode(self, coeffs) -> int:
        if len(coeffs) > self.k or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"invalid coefficients {coeffs!r} for F_{self.q}")
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + c
        return code

    def elements(self) -> range:
        return range(self.q)

    def _check(self, a: int) -> None:
        if not 0 <= a < self.q:
            raise ValueError(f"element code {a} out of range for F_{self.q}")

    # -- scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self.k == 1:
            return (a + b) % self.p
        return self.encode([(x + y) % self.p for x, y in zip(self.decode(a), self.decode(b))])

    def neg(self, a: int) -> int:
        self._check(a)
        if self.k == 1:
            return -a % self.p
        return self.encode([-x % self.p for x in self.decode(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self._mul is not None:
            return int(self._mul[a, b])
        if self.k == 1:
            return a * b % self.p
        return self.mul_schoolbook(a, b)

    def mul_schoolbook(self, a: int, b: int) -> int:
        """Polynomial product reduced mod the modulus, never via tables."""
        prod = poly_mul(list(self.decode(a)), list(self.decode(b)), self.p)
        _, rem = poly_divmod(prod, self.modulus, self.p)
        return self.encode(rem)

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.q}")
        if self._inv is not None:
            return int(self._inv[a])
        return self.inv_euclid(a)

    def inv_euclid(self, a: int) -> int:
        """Inverse by the extended Euclidean algorithm on polynomials."""
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.q}")
        p = self.p
        r0, r1 = list(self.modulus), _trim(list(self.decode(a)))
        s0, s1 = [], [1]
        while r1:
            quot, rem = poly_divmod(r0, r1, p)
            r0, r1 = r1, rem
            qs = poly_mul(quot, s1, p)
            n = max(len(s0), len(qs))
            s0, s1 = s1, _trim([((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p
                                for i in range(n)])
        # r0 is a nonzero constant since the modulus is irreducible
        c = pow(r0[0], p - 2, p)
        return self.encode([x * c % p for x in s0])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def trace(self, a: int) -> int:
        """Absolute trace a + a^p + ... + a^(p^(k-1)); lands in the prime subfield."""
        total, term = 0, a
        for _ in range(self.k):
            total = self.add(total, term)
            term = self.pow(term, self.p)
        if total >= self.p:
            raise AssertionError(f"trace of {a} left the prime subfield")
        return total

    # -- vectorised arithmetic on code arrays --------------------------------

    def add_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        pi = 1
        for _ in range(self.k):
            out += ((a // pi + b // pi) % self.p) * pi
            pi *= self.p
        return out

    def neg_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return -a % self.p
        out = np.zeros_like(a)
        pi = 1
        for _ in range(self.k):
            out += (-(a // pi) % self.p) * pi
            pi *= self.p
        return out

    def sub_arr(self, a, b) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._mul is not None:
            return self._mul[a, b].astype(np.int64)
        if self.k == 1:
            return a * b % self.p
        return np.vectorize(self.mul_schoolbook, otypes=[np.int64])(a, b)

    @cached_property
    def squares(self) -> np.ndarray:
        """Table of a*a indexed by code."""
        codes = np.arange(self.q, dtype=np.int64)
        return self.mul_arr(codes, codes)

    @cached_property
    def trace_table(self) -> np.ndarray:
        if self.k == 1:
            return np.arange(self.q, dtype=np.int64)
        return np.array([self.trace(a) for a in range(self.q)], dtype=np.int64)


def _primitive_element(F: FieldSpec) -> int:
    n = F.q - 1
    factors = prime_factors(n)
    for g in range(2 if F.q > 2 else 1, F.q):
        if all(_pow_schoolbook(F, g, n // r) != 1 for r in factors):
            return g
    return 1


def _pow_schoolbook(F: FieldSpec, a: int, e: int) -> int:
    result, base = 1, a
    while e:
        if e & 1:
            result = F.mul_schoolbook(result, base)
        base = F.mul_schoolbook(base, base)
        e >>= 1
    return result


def _build_tables(F: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    q = F.q
    dtype = np.uint16 if q <= 1 << 16 else np.uint32
    if F.k == 1:
        codes = np.arange(q, dtype=np.int64)
        mul = (np.multiply.outer(codes, codes) % q).astype(dtype)
        inv = np.zeros(q, dtype=dtype)
        inv[1:] = [pow(a, q - 2, q) for a in range(1, q)]
        return mul, inv
    g = _primitive_element(F)
    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x = F.mul_schoolbook(x, g)
    exp[q - 1:] = exp[: q - 1]
    mul = np.zeros((q, q), dtype=dtype)
    mul[1:, 1:] = exp[np.add.outer(log[1:], log[1:])]
    inv = np.zeros(q, dtype=dtype)
    inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
    return mul, inv


def make_field(p: int, k: int = 1, *, cap: int = FIELD_CAP, tables: bool | None = None) -> FieldSpec:
    """Construct F_{p^k} with the lexicographically smallest irreducible modulus.

    ``tables`` forces table construction on or off; by default the
    multiplication and inverse tables are built when q <= TABLE_THRESHOLD.
    """
    if not isinstance(p, int) or not isinstance(k, int):
        raise TypeError("p and k must be integers")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported; q must be odd")
    if k < 1:
        raise ValueError("extension degree k must be >= 1")
    if p**k > cap:
        raise SizeCapExceeded(f"q = {p}^{k} exceeds field cap {cap}")
    modulus = (0, 1) if k == 1 else smallest_irreducible(p, k)
    F = FieldSpec(p, k, modulus)
    if tables is None:
        tables = F.q <= TABLE_THRESHOLD
    if tables:
        mul, inv = _build_tables(F)
        object.__setattr__(F, "_mul", mul)
        object.__setattr__(F, "_inv", inv)
    return F


def odd_prime_powers(limit: int) -> list[tuple[int, int]]:
    """All (p, k) with p odd prime and p^k <= limit, ordered by q."""
    out = []
    for p in range(3, limit + 1, 2):
        if is_prime(p):
            k, q = 1, p
            while q <= limit:
                out.append((p, k))
                k += 1
                q *= p
    return sorted(out, key=lambda pk: pk[0] ** pk[1])
