"""Prime-power finite fields GF(p^k) with full log/antilog tables.

Elements are stored as integers: the coefficient vector ``(c_0, ..., c_{k-1})``
of ``c_0 + c_1 X + ... + c_{k-1} X^{k-1}`` maps to ``sum(c_i * p**i)``.
The modulus is the primitive monic polynomial of degree ``k`` with the
smallest such encoding, so ``alpha = X`` always generates the multiplicative
group and discrete logs are table lookups.

Subfields are never represented on their own.  GF(p^j) for ``j | k`` is the
fixed set of ``x -> x**(p**j)`` inside the ambient field.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegreeMismatch,
    DomainError,
    FieldMismatch,
    NotPrime,
    SizeLimit,
    ZeroElement,
)

MAX_FIELD_SIZE = 2**20


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
    """Distinct prime factors of ``n`` in increasing order."""
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


@dataclass(frozen=True)
class PrimePower:
    p: int
    k: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.k < 1:
            raise DomainError(f"exponent must be positive, got {self.k}")

    @property
    def q(self) -> int:
        return self.p**self.k


def is_prime_power(n: int) -> PrimePower | None:
    """Return ``(p, k)`` with ``p**k == n``, or ``None``."""
    if n < 2:
        return None
    factors = prime_factors(n)
    if len(factors) != 1:
        return None
    p = factors[0]
    k = 0
    while n > 1:
        n //= p
        k += 1
    return PrimePower(p, k)


# -- polynomial helpers over Z_p, coefficient lists low degree first ----------

def _poly_mulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], p: int) -> list[int]:
    k = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # f is monic: X^k = -sum f_i X^i
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            for i in range(k):
                prod[deg - k + i] = (prod[deg - k + i] - c * f[i]) % p
            prod[deg] = 0
    out = prod[:k] + [0] * max(0, k - len(prod))
    return out


def _poly_powmod(base: Sequence[int], e: int, f: Sequence[int], p: int) -> list[int]:
    k = len(f) - 1
    result = [1] + [0] * (k - 1)
    b = list(base) + [0] * (k - len(base))
    while e:
        if e & 1:
            result = _poly_mulmod(result, b, f, p)
        b = _poly_mulmod(b, b, f, p)
        e >>= 1
    return result


def _x_is_primitive(f: Sequence[int], p: int) -> bool:
    """True iff X has multiplicative order p^k - 1 modulo the monic ``f``.

    An element of order p^k - 1 forces every nonzero residue to be a unit, so
    this also certifies irreducibility.
    """
    k = len(f) - 1
    order = p**k - 1
    x = [0, 1] if k > 1 else [(-f[0]) % p]
    one = [1] + [0] * (k - 1)
    if _poly_powmod(x, order, f, p) != one:
        return False
    return all(_poly_powmod(x, order // r, f, p) != one for r in prime_factors(order))


def _digits(n: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        n, c = divmod(n, p)
        out.append(c)
    return out


def _smallest_primitive_modulus(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        # Z_p itself: modulus X - g with g the least primitive root
        for g in range(1, p):
            f = [(-g) % p, 1]
            if _x_is_primitive(f, p):
                return tuple(f)
    for enc in range(p**k):
        lower = _digits(enc, p, k)
        if lower[0] == 0:
            continue
        f = lower + [1]
        if _x_is_primitive(f, p):
            return tuple(f)
    raise AssertionError(f"no primitive polynomial of degree {k} over GF({p})")


class FiniteField:
    """GF(p^k) with ``alpha`` the class of X.

    Build instances with :func:`finite_field`, which caches them; two elements
    are compatible only if they share the same field object.
    """

    def __init__(self, p: int, k: int):
        self.prime_power = PrimePower(p, k)
        q = self.prime_power.q
        if q > MAX_FIELD_SIZE:
            raise SizeLimit(f"GF({p}^{k}) has {q} elements, limit is {MAX_FIELD_SIZE}")
        self.p = p
        self.k = k
        self.q = q
        self.modulus = _smallest_primitive_modulus(p, k)
        self._build_tables()

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        n = q - 1
        exp = np.empty(n, dtype=np.int64)
        if k == 1:
            g = (-self.modulus[0]) % p
            e = 1
            for t in range(n):
                exp[t] = e
                e = e * g % p
        elif p == 2:
            red = sum(c << i for i, c in enumerate(self.modulus[:k]))
            top = 1 << k
            e = 1
            for t in range(n):
                exp[t] = e
                e <<= 1
                if e & top:
                    e ^= top | red
        else:
            neg_f = [(-c) % p for c in self.modulus[:k]]
            cur = [1] + [0] * (k - 1)
            weights = [p**i for i in range(k)]
            for t in range(n):
                exp[t] = sum(c * w for c, w in zip(cur, weights))
                lead = cur[-1]
                cur = [0] + cur[:-1]
                if lead:
                    cur = [(c + lead * f) % p for c, f in zip(cur, neg_f)]
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        assert (log[1:] >= 0).all(), "alpha does not enumerate the nonzero elements"
        self._exp = exp
        self._log = log
        self._exp.setflags(write=False)
        self._log.setflags(write=False)
        self._weights = np.array([p**i for i in range(k)], dtype=np.int64)

    def __repr__(self):
        return f"FiniteField(GF({self.p}^{self.k}), modulus={self.modulus_str()})"

    def __reduce__(self):
        return (finite_field, (self.p, self.k))

    # -- element construction ------------------------------------------------

    def __call__(self, value) -> FieldElement:
        """Coerce an int (taken mod p), a coefficient sequence, or an element."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise FieldMismatch("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, int(value) % self.p)
        coeffs = list(value)
        if len(coeffs) > self.k:
            raise DomainError(f"too many coefficients for degree {self.k}")
        return self.from_coeffs(coeffs)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElement:
        return FieldElement(self, sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def from_int(self, encoding: int) -> FieldElement:
        if not 0 <= encoding < self.q:
            raise DomainError(f"encoding {encoding} out of range for GF({self.q})")
        return FieldElement(self, encoding)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    @property
    def alpha(self) -> FieldElement:
        return FieldElement(self, int(self._exp[1 % (self.q - 1)]))

    def elements(self) -> Iterator[FieldElement]:
        """All elements in increasing encoding order."""
        for v in range(self.q):
            yield FieldElement(self, v)

    def alpha_pow(self, t: int) -> FieldElement:
        return FieldElement(self, int(self._exp[t % (self.q - 1)]))

    # -- raw integer arithmetic ----------------------------------------------

    def _add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        out, w = 0, 1
        while a or b:
            a, ca = divmod(a, p)
            b, cb = divmod(b, p)
            out += ((ca + cb) % p) * w
            w *= p
        return out

    def _neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p = self.p
        out, w = 0, 1
        while a:
            a, c = divmod(a, p)
            out += ((-c) % p) * w
            w *= p
        return out

    def _mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def _pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroElement("zero has no inverse")
            return 0
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    # -- field-level operations ----------------------------------------------

    def dlog(self, x: FieldElement) -> int:
        """Exponent ``t`` in ``[0, q-1)`` with ``alpha**t == x``."""
        x = self(x)
        if x.value == 0:
            raise ZeroElement("discrete log of zero")
        return int(self._log[x.value])

    def frobenius(self, x: FieldElement, j: int = 1) -> FieldElement:
        """``x ** (p ** j)``."""
        x = self(x)
        return FieldElement(self, self._pow(x.value, self.p**j))

    def in_subfield(self, x: FieldElement, degree: int) -> bool:
        if self.k % degree:
            raise DegreeMismatch(f"{degree} does not divide {self.k}")
        return self.frobenius(x, degree) == x

    def _check_degrees(self, subfield_degree: int, from_degree: int | None) -> int:
        top = self.k if from_degree is None else from_degree
        if subfield_degree < 1 or top % subfield_degree or self.k % top:
            raise DegreeMismatch(
                f"need {subfield_degree} | {top} | {self.k} for a relative trace"
            )
        return top

    def trace(self, x: FieldElement, subfield_degree: int = 1,
              from_degree: int | None = None) -> FieldElement:
        """Relative trace from GF(p^from_degree) down to GF(p^subfield_degree).

        ``from_degree`` defaults to the full field; when given, ``x`` must lie in
        that intermediate subfield.
        """
        x = self(x)
        top = self._check_degrees(subfield_degree, from_degree)
        if from_degree is not None and not self.in_subfield(x, top):
            raise DegreeMismatch(f"element is not in the degree-{top} subfield")
        acc = 0
        step = self.p**subfield_degree
        power = 1
        for _ in range(top // subfield_degree):
            acc = self._add(acc, self._pow(x.value, power))
            power *= step
        result = FieldElement(self, acc)
        assert self.in_subfield(result, subfield_degree)
        return result

    def _digit_matrix(self, values: np.ndarray) -> np.ndarray:
        return (values[:, None] // self._weights[None, :]) % self.p

    def trace_of_powers(self, subfield_degree: int = 1, exponents=None,
                        from_degree: int | None = None) -> np.ndarray:
        """Encodings of ``tr(alpha**d)`` for each ``d`` (default: all of Z_{q-1}).

        Vectorized equivalent of calling :meth:`trace` on every power.
        """
        top = self._check_degrees(subfield_degree, from_degree)
        n = self.q - 1
        d = np.arange(n, dtype=np.int64) if exponents is None else np.asarray(exponents, dtype=np.int64) % n
        acc = np.zeros((d.size, self.k), dtype=np.int64)
        step = self.p**subfield_degree
        power = 1
        for _ in range(top // subfield_degree):
            acc += self._digit_matrix(self._exp[(d * (power % n)) % n])
            power *= step
        return (acc % self.p) @ self._weights

    def modulus_str(self) -> str:
        return poly_str(self.modulus, "X")

    def companion_matrix(self) -> np.ndarray:
        """Matrix of multiplication by alpha in the basis 1, X, ..., X^{k-1}."""
        k, p = self.k, self.p
        c = np.zeros((k, k), dtype=np.int64)
        for i in range(1, k):
            c[i, i - 1] = 1
        c[:, k - 1] = [(-a) % p for a in self.modulus[:k]]
        return c


def poly_str(coeffs: Sequence[int], var: str = "X") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        if i == 0:
            mono = ""
        elif i == 1:
            mono = var
        else:
            mono = f"{var}^{i}"
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{c}{mono}")
    return "+".join(terms) if terms else "0"


@functools.lru_cache(maxsize=None)
def finite_field(p: int, k: int = 1) -> FiniteField:
    """Cached constructor; repeated calls return the same field object."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p**k > MAX_FIELD_SIZE:
        raise SizeLimit(f"GF({p}^{k}) exceeds {MAX_FIELD_SIZE} elements")
    return FiniteField(p, k)


@dataclass(frozen=True, eq=False, slots=True)
class FieldElement:
    field: FiniteField
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(_digits(self.value, self.field.p, self.field.k))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldMismatch("operands belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.value))

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field._add(self.value, b))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.value))

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field._add(self.value, self.field._neg(b)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field._mul(self.value, b))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field._pow(self.value, int(e)))

    def inv(self) -> FieldElement:
        if self.value == 0:
            raise ZeroElement("zero has no inverse")
        return self**-1

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self * FieldElement(self.field, b).inv()

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"GF({self.field.q})[{poly_str(self.coeffs, 'a')}]"
