"""
galois_field.py
---------------
Arithmetic over GF(2^s) for the Reed-Solomon codec.

Elements are plain ints in [0, 2^s); addition is XOR. Multiplication goes
through log/antilog tables built once per (s, primitive polynomial) pair.
Fields are immutable and cached, so every codec using the same field shares
one set of tables.

Polynomials are `Poly` values holding field coefficients lowest degree
first; the zero polynomial is the empty tuple.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from utils.config import DEFAULT_PRIMITIVE_POLYS

MIN_SYMBOL_BITS = 2
MAX_SYMBOL_BITS = 16


# ---------------------------------------------------------------------------
# Field
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Field:
    s: int
    primitive_poly: int
    exp_table: tuple[int, ...]     # exp_table[i] = alpha^i, i < 2^s - 1
    log_table: tuple[int, ...]     # log_table[a] = i with alpha^i = a; entry 0 is -1

    @property
    def size(self) -> int:
        """Number of field elements, 2^s."""
        return 1 << self.s

    @property
    def order(self) -> int:
        """Multiplicative group order, 2^s - 1."""
        return (1 << self.s) - 1

    @property
    def alpha(self) -> int:
        return self.exp_table[1]

    def is_element(self, a: int) -> bool:
        return 0 <= a < self.size

    @cached_property
    def exp_array(self) -> np.ndarray:
        return np.asarray(self.exp_table, dtype=np.int64)

    @cached_property
    def log_array(self) -> np.ndarray:
        return np.asarray(self.log_table, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF(2^{self.s}, poly={self.primitive_poly:#x})"


def _build_tables(s: int, primitive_poly: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Walks the powers of x modulo the polynomial and fails unless the cycle covers every nonzero element."""
    size  = 1 << s
    order = size - 1
    exp   = [0] * order
    log   = [-1] * size

    x = 1
    for i in range(order):
        if x == 0 or log[x] != -1:
            raise ValueError(
                f"Polynomial {primitive_poly:#x} is not primitive over GF(2): "
                f"multiplicative cycle has length {i}, expected {order}"
            )
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= primitive_poly

    if x != 1:
        raise ValueError(
            f"Polynomial {primitive_poly:#x} is not primitive over GF(2): "
            f"alpha^{order} != 1"
        )
    return tuple(exp), tuple(log)


@lru_cache(maxsize=None)
def field_new(s: int, primitive_poly: int | None = None) -> Field:
    """
    Builds GF(2^s) from a primitive polynomial given as a bitmask that
    includes the x^s term (e.g. 0x11D for x^8+x^4+x^3+x^2+1).

    Raises:
        ValueError: s out of range, wrong polynomial degree, or a polynomial
                    that does not generate the full multiplicative group.
    """
    if not MIN_SYMBOL_BITS <= s <= MAX_SYMBOL_BITS:
        raise ValueError(f"Symbol size s={s} outside [{MIN_SYMBOL_BITS}, {MAX_SYMBOL_BITS}]")

    if primitive_poly is None:
        primitive_poly = DEFAULT_PRIMITIVE_POLYS[s]

    if primitive_poly.bit_length() - 1 != s:
        raise ValueError(
            f"Polynomial {primitive_poly:#x} has degree {primitive_poly.bit_length() - 1}, expected {s}"
        )

    exp, log = _build_tables(s, primitive_poly)
    return Field(s=s, primitive_poly=primitive_poly, exp_table=exp, log_table=log)


# ---------------------------------------------------------------------------
# Element arithmetic
# ---------------------------------------------------------------------------

def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(f: Field, a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return f.exp_table[(f.log_table[a] + f.log_table[b]) % f.order]


def gf_inv(f: Field, a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("Zero has no multiplicative inverse in GF(2^s)")
    return f.exp_table[(f.order - f.log_table[a]) % f.order]


def gf_div(f: Field, a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("Division by zero in GF(2^s)")
    if a == 0:
        return 0
    return f.exp_table[(f.log_table[a] - f.log_table[b]) % f.order]


def gf_pow(f: Field, a: int, k: int) -> int:
    """a^k for any integer k (negative k needs a != 0)."""
    if a == 0:
        if k < 0:
            raise ZeroDivisionError("Zero has no negative powers")
        return 1 if k == 0 else 0
    return f.exp_table[(f.log_table[a] * k) % f.order]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Poly:
    coeffs: tuple[int, ...] = ()

    @classmethod
    def of(cls, coeffs) -> "Poly":
        """Normalizing constructor: drops zero high-order coefficients."""
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs


def poly_add(f: Field, p: Poly, q: Poly) -> Poly:
    n = max(len(p.coeffs), len(q.coeffs))
    a = p.coeffs + (0,) * (n - len(p.coeffs))
    b = q.coeffs + (0,) * (n - len(q.coeffs))
    return Poly.of(x ^ y for x, y in zip(a, b))


def poly_scale(f: Field, p: Poly, c: int) -> Poly:
    return Poly.of(gf_mul(f, x, c) for x in p.coeffs)


def poly_mul(f: Field, p: Poly, q: Poly) -> Poly:
    if p.is_zero or q.is_zero:
        return Poly()
    out = [0] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            if b:
                out[i + j] ^= gf_mul(f, a, b)
    return Poly.of(out)


def poly_divmod(f: Field, p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Long division; returns (quotient, remainder) with deg(remainder) < deg(q)."""
    if q.is_zero:
        raise ZeroDivisionError("Polynomial division by the zero polynomial")

    rem  = list(p.coeffs)
    dq   = q.degree
    lead_inv = gf_inv(f, q.coeffs[-1])
    quot = [0] * max(len(rem) - dq, 0)

    for i in range(len(rem) - 1, dq - 1, -1):
        coef = rem[i]
        if coef == 0:
            continue
        factor = gf_mul(f, coef, lead_inv)
        quot[i - dq] = factor
        for j, qc in enumerate(q.coeffs):
            if qc:
                rem[i - dq + j] ^= gf_mul(f, factor, qc)

    return Poly.of(quot), Poly.of(rem[:dq])


def poly_mod(f: Field, p: Poly, q: Poly) -> Poly:
    return poly_divmod(f, p, q)[1]


def poly_eval(f: Field, p: Poly, x: int) -> int:
    """Horner evaluation."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = gf_mul(f, acc, x) ^ c
    return acc


def poly_derivative(p: Poly) -> Poly:
    """Formal derivative; in characteristic 2 only odd-degree terms survive."""
    return Poly.of(c if i % 2 else 0 for i, c in enumerate(p.coeffs) if i > 0)


def gf_mul_arrays(f: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two broadcastable element arrays."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    prod = f.exp_array[(f.log_array[a] + f.log_array[b]) % f.order]
    return np.where((a == 0) | (b == 0), 0, prod)
