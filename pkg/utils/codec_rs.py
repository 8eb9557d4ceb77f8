"""
codec_rs.py
-----------
Systematic shortened Reed-Solomon codec over GF(2^s).

Symbol sequences are ordered highest degree first, as transmitted: a
codeword is the k_sym message symbols followed by the r_sym parity symbols,
C(X) = X^r * M(X) + (X^r * M(X) mod g(X)).

Shortening: the code is defined on 2^s - 1 symbols; the z_pad symbols in
front of the message are always zero and never transmitted. Leading zeros
leave both the encoder register and every syndrome unchanged, so the
padding is applied implicitly on both ends.

Decoding runs the five classic stages: syndromes, Berlekamp-Massey error
locator, Chien search over the transmitted positions, Forney error values,
correction. Errors only, no erasures.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from utils.config import RS_FIRST_ROOT
from utils.galois_field import (
    Field, Poly,
    gf_div, gf_mul, gf_mul_arrays, gf_pow,
    poly_derivative, poly_eval, poly_mul,
)


class DecodeFailure(RuntimeError):
    """More errors than the code can correct were detected."""


# ---------------------------------------------------------------------------
# Code definition
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RsCode:
    field: Field
    k_sym: int
    r_sym: int
    first_root: int
    generator: Poly       # lowest degree first, monic, degree r_sym

    @property
    def s(self) -> int:
        return self.field.s

    @property
    def n_sym(self) -> int:
        return self.k_sym + self.r_sym

    @property
    def z_pad(self) -> int:
        return self.field.order - self.n_sym

    @property
    def t(self) -> int:
        """Correctable symbols, R / (2s)."""
        return self.r_sym // 2

    @property
    def d_min(self) -> int:
        return self.r_sym + 1

    @property
    def K(self) -> int:
        """Message bits."""
        return self.k_sym * self.s

    @property
    def R(self) -> int:
        """Parity bits."""
        return self.r_sym * self.s

    @property
    def label(self) -> str:
        return f"RS({self.n_sym},{self.k_sym}) s={self.s}"

    @cached_property
    def unit_parity(self) -> np.ndarray:
        """(k_sym, r_sym) parity of every unit message, row i for a 1 at message position i."""
        rows = []
        for i in range(self.k_sym):
            unit = [0] * self.k_sym
            unit[i] = 1
            rows.append(rs_encode(self, unit))
        return np.asarray(rows, dtype=np.int64).reshape(self.k_sym, self.r_sym)

    def __repr__(self) -> str:
        return f"{self.label} t={self.t} z_pad={self.z_pad}"


def rs_new(field: Field, k_sym: int, r_sym: int,
           first_root: int = RS_FIRST_ROOT) -> RsCode:
    """
    Builds the generator g(X) = prod_{i<r} (X - alpha^(first_root+i)).

    Raises:
        ValueError: odd or too small r_sym, empty message, or a codeword
                    longer than 2^s - 1 symbols.
    """
    if r_sym < 2 or r_sym % 2:
        raise ValueError(f"r_sym={r_sym} must be even and >= 2 so that t = r_sym/2 is integral")
    if k_sym < 1:
        raise ValueError(f"k_sym={k_sym} must be >= 1")
    if k_sym + r_sym > field.order:
        raise ValueError(
            f"Codeword of {k_sym}+{r_sym} symbols exceeds the maximum length "
            f"{field.order} of {field!r}"
        )

    g = Poly((1,))
    for i in range(r_sym):
        root = gf_pow(field, field.alpha, first_root + i)
        g = poly_mul(field, g, Poly((root, 1)))

    return RsCode(field=field, k_sym=k_sym, r_sym=r_sym,
                  first_root=first_root, generator=g)


def _check_symbols(code: RsCode, symbols, expected_len: int, what: str) -> list[int]:
    symbols = [int(x) for x in symbols]
    if len(symbols) != expected_len:
        raise ValueError(f"{what} has {len(symbols)} symbols, expected {expected_len}")
    bad = [x for x in symbols if not code.field.is_element(x)]
    if bad:
        raise ValueError(f"{what} holds values outside GF(2^{code.s}): {bad[:5]}")
    return symbols


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def rs_encode(code: RsCode, msg) -> list[int]:
    """Returns the r_sym parity symbols CK(X) = X^r * M(X) mod g(X), highest degree first."""
    msg = _check_symbols(code, msg, code.k_sym, "Message")
    f = code.field
    g_high = code.generator.coeffs[::-1]     # g_high[0] == 1
    r = code.r_sym

    reg = [0] * r
    for m in msg:
        feedback = m ^ reg[0]
        reg = reg[1:] + [0]
        if feedback:
            for j in range(r):
                reg[j] ^= gf_mul(f, feedback, g_high[j + 1])
    return reg


def rs_codeword(code: RsCode, msg) -> list[int]:
    msg = [int(x) for x in msg]
    return msg + rs_encode(code, msg)


def rs_encode_blocks(code: RsCode, msgs: np.ndarray) -> np.ndarray:
    """
    Batch encoder: (B, k_sym) messages -> (B, n_sym) codewords.

    Uses linearity, the parity of a message being the sum of its symbols
    times the parity of the matching unit message.
    """
    msgs = np.asarray(msgs, dtype=np.int64)
    if msgs.ndim != 2 or msgs.shape[1] != code.k_sym:
        raise ValueError(f"Messages must be shaped (blocks, {code.k_sym}), got {msgs.shape}")
    if msgs.size and (msgs.min() < 0 or msgs.max() >= code.field.size):
        raise ValueError(f"Messages hold values outside GF(2^{code.s})")

    parity = np.zeros((msgs.shape[0], code.r_sym), dtype=np.int64)
    unit = code.unit_parity
    for i in range(code.k_sym):
        parity ^= gf_mul_arrays(code.field, msgs[:, i:i + 1], unit[i][None, :])
    return np.concatenate([msgs, parity], axis=1)


# ---------------------------------------------------------------------------
# Decoding stages
# ---------------------------------------------------------------------------

def rs_syndromes(code: RsCode, word) -> list[int]:
    """S_i = C(alpha^(first_root+i)) for i < r_sym."""
    f = code.field
    exp, log, order = f.exp_table, f.log_table, f.order
    out = []
    for i in range(code.r_sym):
        step = (code.first_root + i) % order
        acc = 0
        for c in word:
            acc = (exp[(log[acc] + step) % order] if acc else 0) ^ c
        out.append(acc)
    return out


def _berlekamp_massey(f: Field, synd: list[int]) -> tuple[Poly, int]:
    C = [1]
    B = [1]
    L, m, b = 0, 1, 1

    for n, s_n in enumerate(synd):
        d = s_n
        for i in range(1, min(L, len(C) - 1) + 1):
            d ^= gf_mul(f, C[i], synd[n - i])

        if d == 0:
            m += 1
            continue

        coef = gf_div(f, d, b)
        prev = list(C)
        if len(C) < len(B) + m:
            C += [0] * (len(B) + m - len(C))
        for i, bc in enumerate(B):
            if bc:
                C[i + m] ^= gf_mul(f, coef, bc)

        if 2 * L <= n:
            L = n + 1 - L
            B, b, m = prev, d, 1
        else:
            m += 1

    return Poly.of(C), L


def _chien_search(code: RsCode, locator: Poly) -> list[int]:
    """Indices j (into the transmitted word) whose locator X = alpha^(n-1-j) is a root of locator(X^-1)."""
    f = code.field
    n = code.n_sym
    positions = []
    for j in range(n):
        degree = n - 1 - j
        x_inv = f.exp_table[(f.order - degree) % f.order]
        if poly_eval(f, locator, x_inv) == 0:
            positions.append(j)
    return positions


def _forney(code: RsCode, synd: list[int], locator: Poly,
            positions: list[int]) -> list[int]:
    f = code.field
    r = code.r_sym
    omega = Poly.of(poly_mul(f, Poly.of(synd), locator).coeffs[:r])
    d_locator = poly_derivative(locator)

    values = []
    for j in positions:
        degree = code.n_sym - 1 - j
        x = gf_pow(f, f.alpha, degree)
        x_inv = gf_pow(f, f.alpha, -degree)
        denom = poly_eval(f, d_locator, x_inv)
        if denom == 0:
            raise DecodeFailure(f"Locator derivative vanishes at position {j}")
        value = gf_div(f, poly_eval(f, omega, x_inv), denom)
        values.append(gf_mul(f, value, gf_pow(f, x, 1 - code.first_root)))
    return values


class RsDecodeResult(NamedTuple):
    codeword: list[int]
    num_errors: int


def rs_decode(code: RsCode, received) -> RsDecodeResult:
    """
    Corrects up to t symbol errors in a received n_sym-symbol word.

    Returns:
        (corrected codeword, number of corrected symbols). A clean word comes
        back unchanged with 0 errors.

    Raises:
        DecodeFailure: the locator is inconsistent (more than t errors, or a
                       root count that does not match its degree). Beyond t
                       errors a wrong but valid codeword may also come back.
    """
    received = _check_symbols(code, received, code.n_sym, "Received word")
    synd = rs_syndromes(code, received)
    if not any(synd):
        return RsDecodeResult(received, 0)

    f = code.field
    locator, n_errors = _berlekamp_massey(f, synd)
    if locator.degree != n_errors:
        raise DecodeFailure(f"Error locator degree {locator.degree} != register length {n_errors}")
    if n_errors > code.t:
        raise DecodeFailure(f"{n_errors} errors located, code corrects at most {code.t}")

    positions = _chien_search(code, locator)
    if len(positions) != n_errors:
        raise DecodeFailure(
            f"Chien search found {len(positions)} roots for a degree-{n_errors} locator"
        )

    values = _forney(code, synd, locator, positions)
    corrected = list(received)
    for j, v in zip(positions, values):
        corrected[j] ^= v

    if any(rs_syndromes(code, corrected)):
        raise DecodeFailure("Corrected word still violates the parity checks")

    return RsDecodeResult(corrected, n_errors)


# ---------------------------------------------------------------------------
# Bit <-> symbol packing (MSB first within a symbol)
# ---------------------------------------------------------------------------

def bits_to_symbols(bits: np.ndarray, s: int) -> np.ndarray:
    """(..., L*s) bit array -> (..., L) symbol array."""
    bits = np.asarray(bits, dtype=np.int64)
    shaped = bits.reshape(bits.shape[:-1] + (bits.shape[-1] // s, s))
    weights = 1 << np.arange(s - 1, -1, -1, dtype=np.int64)
    return shaped @ weights


def symbols_to_bits(symbols: np.ndarray, s: int) -> np.ndarray:
    """(..., L) symbol array -> (..., L*s) bit array of uint8."""
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(s - 1, -1, -1, dtype=np.int64)
    bits = (symbols[..., None] >> shifts) & 1
    return bits.reshape(symbols.shape[:-1] + (symbols.shape[-1] * s,)).astype(np.uint8)
