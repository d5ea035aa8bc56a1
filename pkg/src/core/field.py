"""
Prime field arithmetic

Exact arithmetic in GF(q) for prime q, multiplicative generators, roots of
unity and base-P digit reversal. Field elements are plain Python ints in
[0, q-1]; vectorised work goes through the ``galois`` array class exposed
by ``FieldCtx.GF``.

Features:
- Immutable field context with a cached galois field class
- Smallest-generator search verified through the factorisation of q-1
- Primitive K-th roots of unity
- Digit reversal and integer logarithm helpers

Usage:
    from src.core.field import get_field, fe_arith, FieldOp

    ctx = get_field(13)
    fe_arith(ctx, 3, 0, FieldOp.INV)  # -> 9
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Tuple, Type

import galois
import numpy as np

logger = logging.getLogger(__name__)


class FieldError(ValueError):
    """Base error for field construction and arithmetic"""


class NotPrimeError(FieldError):
    """Modulus is not a prime usable as a field with a generator"""


class OrderNotDividingError(FieldError):
    """Requested root order does not divide q-1"""


class DivisionByZeroError(FieldError, ZeroDivisionError):
    """Inversion or division by the zero element"""


class OutOfRangeError(FieldError):
    """Value outside its admissible range"""


class FieldOp(str, Enum):
    """Binary field operations"""
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    POW = "pow"
    INV = "inv"


def _prime_factors(n: int) -> Tuple[int, ...]:
    primes, _ = galois.factors(n)
    return tuple(int(r) for r in primes)


def _has_full_order(g: int, q: int, factors: Tuple[int, ...]) -> bool:
    if pow(g, q - 1, q) != 1:
        return False
    return all(pow(g, (q - 1) // r, q) != 1 for r in factors)


@dataclass(frozen=True)
class FieldCtx:
    """
    Prime field GF(q) with a fixed multiplicative generator.

    Attributes:
        q: Prime modulus
        g: Generator of GF(q)*
        factors: Distinct prime factors of q-1
    """
    q: int
    g: int
    factors: Tuple[int, ...]

    def __post_init__(self):
        if self.q < 3 or not galois.is_prime(self.q):
            raise NotPrimeError(f"q={self.q} is not a prime >= 3")
        if tuple(self.factors) != _prime_factors(self.q - 1):
            raise FieldError(f"factors {self.factors} do not factor q-1={self.q - 1}")
        if not 0 < self.g < self.q or not _has_full_order(self.g, self.q, self.factors):
            raise FieldError(f"g={self.g} is not a generator of GF({self.q})*")

    @cached_property
    def GF(self) -> Type[galois.FieldArray]:
        """galois array class whose primitive element is ``g``"""
        return galois.GF(self.q, primitive_element=self.g)

    @property
    def order(self) -> int:
        """Order of the multiplicative group"""
        return self.q - 1

    def element(self, value: int) -> int:
        """Validate a raw integer as a field element"""
        value = int(value)
        if not 0 <= value < self.q:
            raise OutOfRangeError(f"{value} is not an element of GF({self.q})")
        return value

    def array(self, values) -> galois.FieldArray:
        """Convert integers (or a field array) to this field's array class"""
        if isinstance(values, self.GF):
            return values
        return self.GF(np.asarray(values, dtype=np.int64))


def find_generator(q: int) -> int:
    """
    Smallest multiplicative generator of GF(q).

    Raises:
        NotPrimeError: q < 3 or q composite
    """
    if q < 3:
        raise NotPrimeError(f"q={q} is degenerate; a generator needs q >= 3")
    if not galois.is_prime(q):
        raise NotPrimeError(f"q={q} is not prime")

    factors = _prime_factors(q - 1)
    g = int(galois.primitive_root(q))
    if not _has_full_order(g, q, factors):
        raise FieldError(f"primitive root search returned {g}, which is not a generator mod {q}")
    return g


@lru_cache(maxsize=None)
def get_field(q: int) -> FieldCtx:
    """Memoised field context for prime q with its smallest generator."""
    ctx = FieldCtx(q=q, g=find_generator(q), factors=_prime_factors(q - 1))
    logger.debug(
        "Field context created",
        extra={"event": "field_created", "q": q, "g": ctx.g}
    )
    return ctx


def fe_arith(ctx: FieldCtx, a: int, b: int, op: FieldOp) -> int:
    """
    Single field operation on integer elements.

    For POW, ``b`` is a non-negative exponent rather than a field element.
    INV ignores ``b``.

    Raises:
        DivisionByZeroError: DIV by 0 or INV of 0
        OutOfRangeError: operand outside [0, q-1] or negative exponent
    """
    op = FieldOp(op)
    a = ctx.element(a)
    q = ctx.q

    if op is FieldOp.INV:
        if a == 0:
            raise DivisionByZeroError("0 has no inverse")
        return pow(a, -1, q)

    if op is FieldOp.POW:
        if b < 0:
            raise OutOfRangeError(f"exponent must be non-negative, got {b}")
        return pow(a, int(b), q)

    b = ctx.element(b)
    if op is FieldOp.ADD:
        return (a + b) % q
    if op is FieldOp.SUB:
        return (a - b) % q
    if op is FieldOp.MUL:
        return (a * b) % q
    if b == 0:
        raise DivisionByZeroError(f"{a}/0 in GF({q})")
    return (a * pow(b, -1, q)) % q


def root_of_unity(ctx: FieldCtx, K: int) -> int:
    """
    Primitive K-th root of unity g^((q-1)/K).

    Raises:
        OrderNotDividingError: K does not divide q-1
    """
    if K < 1 or ctx.order % K != 0:
        raise OrderNotDividingError(f"K={K} does not divide q-1={ctx.order}")
    return pow(ctx.g, ctx.order // K, ctx.q)


def digits(k: int, P: int, H: int) -> Tuple[int, ...]:
    """Base-P digits of k, least significant first, padded to H."""
    out = []
    for _ in range(H):
        k, d = divmod(k, P)
        out.append(d)
    return tuple(out)


def digit_reverse(k: int, P: int, H: int) -> int:
    """
    Reverse the H base-P digits of k.

    Raises:
        OutOfRangeError: k outside [0, P^H - 1]
    """
    if not 0 <= k < P ** H:
        raise OutOfRangeError(f"k={k} outside [0, {P}^{H} - 1]")
    rev = 0
    for d in digits(k, P, H):
        rev = rev * P + d
    return rev


def ceil_log(n: int, base: int) -> int:
    """Smallest t >= 0 with base^t >= n."""
    if n < 1 or base < 2:
        raise OutOfRangeError(f"ceil_log needs n >= 1 and base >= 2, got n={n}, base={base}")
    t, power = 0, 1
    while power < n:
        power *= base
        t += 1
    return t


def bits_per_element(q: int) -> int:
    """ceil(log2 q), the bit cost of one field element."""
    if q < 2:
        raise OutOfRangeError(f"q must be >= 2, got {q}")
    return (q - 1).bit_length()
