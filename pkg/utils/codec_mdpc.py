"""
codec_mdpc.py
-------------
Multidimensional parity-check code MDPC(nD/mL).

K = m^n data bits fill an n-cube of side m; extending every axis by one
parity position gives the (m+1)^n cube in which every axis-aligned line has
even parity.

Canonical bit order (both ends must agree on it):
  - data bits:   row-major over the m^n data cube
  - parity bits: row-major over the remaining (m+1)^n - m^n positions of the
                 extended cube (every position with at least one index == m)
A transmitted block is the K data bits followed by the R parity bits.

Decoding is iterative hard-decision bit flipping on line-parity violations.
All block-level functions work on batches shaped (blocks, bits).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from utils.config import MDPC_MAX_ITER


# ---------------------------------------------------------------------------
# Code definition
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MdpcCode:
    n: int
    m: int

    @property
    def K(self) -> int:
        return self.m ** self.n

    @property
    def R(self) -> int:
        return (self.m + 1) ** self.n - self.m ** self.n

    @property
    def N(self) -> int:
        return (self.m + 1) ** self.n

    @property
    def d_min(self) -> int:
        return 2 ** self.n

    @property
    def t(self) -> int:
        """Correctable bits, 2^(n-1) - 1."""
        return 2 ** (self.n - 1) - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.m + 1,) * self.n

    @property
    def label(self) -> str:
        return f"MDPC({self.n}D/{self.m}L)"

    @cached_property
    def _parity_mask(self) -> np.ndarray:
        coords = np.indices(self.shape).reshape(self.n, -1)
        return (coords == self.m).any(axis=0)

    @cached_property
    def data_index(self) -> np.ndarray:
        """Flat positions in the extended cube holding data bits, canonical order."""
        return np.flatnonzero(~self._parity_mask)

    @cached_property
    def parity_index(self) -> np.ndarray:
        """Flat positions in the extended cube holding parity bits, canonical order."""
        return np.flatnonzero(self._parity_mask)

    def __repr__(self) -> str:
        return f"{self.label} K={self.K} R={self.R} t={self.t}"


def mdpc_new(n: int, m: int) -> MdpcCode:
    if n < 2:
        raise ValueError(f"MDPC needs at least 2 dimensions, got n={n}")
    if m < 1:
        raise ValueError(f"MDPC side length m={m} must be >= 1")
    return MdpcCode(n=n, m=m)


# ---------------------------------------------------------------------------
# Cube helpers
# ---------------------------------------------------------------------------

def _axis_slice(ndim: int, axis: int, index) -> tuple:
    sl = [slice(None)] * ndim
    sl[axis] = index
    return tuple(sl)


def _to_cubes(code: MdpcCode, blocks: np.ndarray) -> np.ndarray:
    """(B, N) canonical blocks -> (B, m+1, ..., m+1) cubes."""
    cubes = np.zeros((blocks.shape[0], code.N), dtype=np.uint8)
    cubes[:, code.data_index] = blocks[:, : code.K]
    cubes[:, code.parity_index] = blocks[:, code.K:]
    return cubes.reshape((blocks.shape[0],) + code.shape)


def _from_cubes(code: MdpcCode, cubes: np.ndarray) -> np.ndarray:
    flat = cubes.reshape(cubes.shape[0], -1)
    return np.concatenate([flat[:, code.data_index], flat[:, code.parity_index]], axis=1)


def _line_syndromes(cubes: np.ndarray) -> list[np.ndarray]:
    """Per axis: parity of every line along that axis, kept broadcastable against the cubes."""
    return [np.bitwise_xor.reduce(cubes, axis=a, keepdims=True)
            for a in range(1, cubes.ndim)]


def _violations(cubes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns (per-bit count of violated incident lines, per-block number of violated lines)."""
    synd = _line_syndromes(cubes)
    counts = np.zeros(cubes.shape, dtype=np.int16)
    total = np.zeros(cubes.shape[0], dtype=np.int64)
    for sy in synd:
        counts += sy
        total += sy.reshape(sy.shape[0], -1).sum(axis=1, dtype=np.int64)
    return counts, total


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def mdpc_encode_blocks(code: MdpcCode, data: np.ndarray) -> np.ndarray:
    """(B, K) data bits -> (B, K+R) transmitted blocks in canonical order."""
    data = np.asarray(data, dtype=np.uint8)
    if data.ndim != 2 or data.shape[1] != code.K:
        raise ValueError(f"Data must be shaped (blocks, {code.K}), got {data.shape}")

    cubes = np.zeros((data.shape[0], code.N), dtype=np.uint8)
    cubes[:, code.data_index] = data & 1
    cubes = cubes.reshape((data.shape[0],) + code.shape)

    ndim = cubes.ndim
    for axis in range(1, ndim):
        body = cubes[_axis_slice(ndim, axis, slice(0, code.m))]
        cubes[_axis_slice(ndim, axis, code.m)] = np.bitwise_xor.reduce(body, axis=axis)

    return _from_cubes(code, cubes)


def mdpc_encode(code: MdpcCode, data) -> np.ndarray:
    """Returns the R parity bits for K data bits."""
    data = np.asarray(data, dtype=np.uint8).reshape(-1)
    if data.size != code.K:
        raise ValueError(f"Data has {data.size} bits, expected K={code.K}")
    return mdpc_encode_blocks(code, data[None, :])[0, code.K:]


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------

def mdpc_decode_blocks(code: MdpcCode, received: np.ndarray,
                       max_iter: int = MDPC_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """
    Bit-flipping decoder over a batch.

    Each iteration, bits with more than n/2 violated incident lines are
    candidates; of those, the ones at the block's highest count are flipped.
    A flip set is kept only if it lowers the number of violated lines. If it
    does not, the first candidate alone is tried under the same rule, and a
    block that cannot improve either way stops. Ties at exactly n/2 are
    never flipped.

    This is narrower than flipping every bit above n/2 in one go. For n=2
    the two rules pick the same bits (a bit sits on two lines, so only
    count 2 qualifies). For n>=3 the sets differ, and t = 2^(n-1) - 1 is not
    reached for every pattern.

    Returns:
        (decoded (B, K+R) blocks, flips applied per block)
    """
    received = np.asarray(received, dtype=np.uint8)
    if received.ndim != 2 or received.shape[1] != code.N:
        raise ValueError(f"Received blocks must be shaped (blocks, {code.N}), got {received.shape}")

    cubes = _to_cubes(code, received & 1)
    n_blocks = cubes.shape[0]
    active = np.ones(n_blocks, dtype=bool)
    flips = np.zeros(n_blocks, dtype=np.int64)
    bcast = (n_blocks,) + (1,) * code.n

    for _ in range(max_iter):
        counts, total = _violations(cubes)
        active &= total > 0
        if not active.any():
            break

        best = counts.reshape(n_blocks, -1).max(axis=1)
        flip_mask = (2 * counts > code.n) & (counts == best.reshape(bcast))
        flip_mask &= active.reshape(bcast)
        n_flips = flip_mask.reshape(n_blocks, -1).sum(axis=1)

        trial = cubes ^ flip_mask.astype(np.uint8)
        _, trial_total = _violations(trial)
        accept = (n_flips > 0) & (trial_total < total)

        # single-bit retry for blocks whose group flip did not help
        retry = active & ~accept & (n_flips > 1)
        single = np.zeros_like(flip_mask).reshape(n_blocks, -1)
        first = flip_mask.reshape(n_blocks, -1).argmax(axis=1)
        single[np.flatnonzero(retry), first[retry]] = True
        single = single.reshape(flip_mask.shape)
        trial_single = cubes ^ single.astype(np.uint8)
        _, single_total = _violations(trial_single)
        accept_single = retry & (single_total < total)

        cubes[accept] = trial[accept]
        flips[accept] += n_flips[accept]
        cubes[accept_single] = trial_single[accept_single]
        flips[accept_single] += 1
        active &= accept | accept_single

    return _from_cubes(code, cubes), flips


def mdpc_decode(code: MdpcCode, received, max_iter: int = MDPC_MAX_ITER) -> tuple[np.ndarray, int]:
    """
    Decodes one K+R bit block.

    Returns:
        (K corrected data bits, number of bit flips applied). Best effort:
        beyond t errors the data may still be wrong.
    """
    received = np.asarray(received, dtype=np.uint8).reshape(-1)
    if received.size != code.N:
        raise ValueError(f"Received block has {received.size} bits, expected K+R={code.N}")
    decoded, flips = mdpc_decode_blocks(code, received[None, :], max_iter=max_iter)
    return decoded[0, : code.K], int(flips[0])


def parity_ok(code: MdpcCode, blocks: np.ndarray) -> np.ndarray:
    """True per block when every line of the extended cube has even parity."""
    cubes = _to_cubes(code, np.asarray(blocks, dtype=np.uint8).reshape(-1, code.N))
    _, total = _violations(cubes)
    return total == 0
