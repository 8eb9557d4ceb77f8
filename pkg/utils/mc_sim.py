"""
mc_sim.py
---------
Monte-Carlo harness for the two-channel transmission: random data is encoded,
the K data bits cross the main channel and the R parity bits the auxiliary
channel (independent binary symmetric channels), the receiver decodes, and
the decoded data bits are compared with the originals.

Reproducibility: a campaign is cut into chunks of MC_CHUNK_BLOCKS blocks,
fewer for long codes so that a chunk holds at most MC_CHUNK_BITS block bits.
Chunk i draws from numpy's PCG64 seeded with SeedSequence(seed).spawn(n)[i],
so results do not depend on the number of worker threads or on the order in
which chunks finish. Changing either chunk limit changes the streams.

Also holds the exact block error oracles used to check both the campaigns
and the closed-form approximations.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.stats import binom

from utils.codec_mdpc import MdpcCode, mdpc_decode_blocks, mdpc_encode_blocks
from utils.codec_rs import (
    DecodeFailure, RsCode,
    bits_to_symbols, rs_decode, rs_encode_blocks, symbols_to_bits,
)
from utils.config import (
    MC_CHUNK_BITS, MC_CHUNK_BLOCKS, MC_DEFAULT_SEED, MC_WORKERS,
    MDPC_MAX_ITER, MDPC_ORACLE_MAX_BITS,
)

RNG_ALGORITHM = "PCG64"
STREAM_RULE = "SeedSequence(seed).spawn(n_chunks)"
CHUNK_RULE = "min(chunk_blocks, max(1, chunk_bits // (K + R)))"


def effective_chunk_blocks(codec, chunk_blocks: int = MC_CHUNK_BLOCKS,
                           chunk_bits: int = MC_CHUNK_BITS) -> int:
    """Blocks per chunk for this code: chunk_blocks, capped at chunk_bits block bits."""
    if chunk_blocks < 1:
        raise ValueError(f"chunk_blocks={chunk_blocks} must be >= 1")
    if chunk_bits < 1:
        raise ValueError(f"chunk_bits={chunk_bits} must be >= 1")
    return min(chunk_blocks, max(1, chunk_bits // (codec.K + codec.R)))


def rng_metadata(seed: int, chunk_blocks: int = MC_CHUNK_BLOCKS,
                 chunk_bits: int = MC_CHUNK_BITS, codec=None) -> dict:
    """Everything needed to regenerate the random streams of a campaign."""
    meta = {
        "rng": f"numpy.random.{RNG_ALGORITHM}",
        "numpy_version": np.__version__,
        "seed": int(seed),
        "chunk_blocks": int(chunk_blocks),
        "chunk_bits": int(chunk_bits),
        "chunk_rule": CHUNK_RULE,
        "stream_rule": STREAM_RULE,
    }
    if codec is not None:
        meta["effective_chunk_blocks"] = effective_chunk_blocks(codec, chunk_blocks, chunk_bits)
    return meta


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialConfig:
    codec: MdpcCode | RsCode
    p_main: float
    p_aux: float
    blocks: int
    seed: int = MC_DEFAULT_SEED
    max_iter: int = MDPC_MAX_ITER

    def __post_init__(self):
        for name in ("p_main", "p_aux"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.blocks < 1:
            raise ValueError(f"blocks={self.blocks} must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed={self.seed} must be an unsigned 64-bit integer")
        if self.max_iter < 1:
            raise ValueError(f"max_iter={self.max_iter} must be >= 1")

    @property
    def data_bits(self) -> int:
        return self.codec.K


@dataclass
class _Tally:
    blocks: int = 0
    bit_errors: int = 0
    bit_errors_sq: int = 0          # sum over blocks of (errors in block)^2
    block_errors: int = 0
    clean_blocks: int = 0
    decode_failures: int = 0

    def __add__(self, other: "_Tally") -> "_Tally":
        return _Tally(*(a + b for a, b in zip(astuple(self), astuple(other))))


@dataclass(frozen=True)
class CampaignStats:
    blocks: int
    data_bits: int                  # per block
    bit_errors: int                 # residual data-bit errors over the campaign
    block_errors: int
    clean_blocks: int               # no bit was flipped by either channel
    corrected_blocks: int           # hit by the channel, decoded back to the data
    failed_blocks: int              # at least one data bit still wrong
    decode_failures: int            # RS words the decoder rejected; their data is kept as received
    residual_ber: float
    residual_ber_se: float
    block_error_rate: float
    block_error_se: float
    metadata: dict = field(default_factory=dict)


def _stats(tally: _Tally, data_bits: int, metadata: dict) -> CampaignStats:
    n = tally.blocks
    mean_frac = tally.bit_errors / (n * data_bits)
    mean_sq = tally.bit_errors_sq / (n * data_bits ** 2)
    ber_se = np.sqrt(max(mean_sq - mean_frac ** 2, 0.0) / n)

    bler = tally.block_errors / n
    bler_se = np.sqrt(bler * (1.0 - bler) / n)

    return CampaignStats(
        blocks=n,
        data_bits=data_bits,
        bit_errors=tally.bit_errors,
        block_errors=tally.block_errors,
        clean_blocks=tally.clean_blocks,
        corrected_blocks=n - tally.clean_blocks - tally.block_errors,
        failed_blocks=tally.block_errors,
        decode_failures=tally.decode_failures,
        residual_ber=float(mean_frac),
        residual_ber_se=float(ber_se),
        block_error_rate=float(bler),
        block_error_se=float(bler_se),
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Channel
# ---------------------------------------------------------------------------

def bsc_apply(bits: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flips every bit independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    bits = np.asarray(bits, dtype=np.uint8)
    flips = rng.random(bits.shape) < p
    return bits ^ flips.astype(np.uint8)


# ---------------------------------------------------------------------------
# Per-chunk transmission
# ---------------------------------------------------------------------------

def _tally_errors(data: np.ndarray, decoded: np.ndarray, hit: np.ndarray,
                  decode_failures: int = 0) -> _Tally:
    errors = (data != decoded).sum(axis=1).astype(np.int64)
    return _Tally(
        blocks=data.shape[0],
        bit_errors=int(errors.sum()),
        bit_errors_sq=int((errors ** 2).sum()),
        block_errors=int((errors > 0).sum()),
        clean_blocks=int((~hit).sum()),
        decode_failures=decode_failures,
    )


def _chunk_mdpc(cfg: TrialConfig, n_blocks: int, rng: np.random.Generator) -> _Tally:
    code = cfg.codec
    data = rng.integers(0, 2, size=(n_blocks, code.K), dtype=np.uint8)
    sent = mdpc_encode_blocks(code, data)

    received = np.concatenate([
        bsc_apply(sent[:, : code.K], cfg.p_main, rng),
        bsc_apply(sent[:, code.K:], cfg.p_aux, rng),
    ], axis=1)
    hit = (received != sent).any(axis=1)

    decoded = received[:, : code.K].copy()
    if hit.any():
        fixed, _ = mdpc_decode_blocks(code, received[hit], max_iter=cfg.max_iter)
        decoded[hit] = fixed[:, : code.K]
    return _tally_errors(data, decoded, hit)


def _chunk_rs(cfg: TrialConfig, n_blocks: int, rng: np.random.Generator) -> _Tally:
    code = cfg.codec
    msgs = rng.integers(0, code.field.size, size=(n_blocks, code.k_sym), dtype=np.int64)
    sent = rs_encode_blocks(code, msgs)
    data = symbols_to_bits(msgs, code.s)

    received_bits = np.concatenate([
        bsc_apply(data, cfg.p_main, rng),
        bsc_apply(symbols_to_bits(sent[:, code.k_sym:], code.s), cfg.p_aux, rng),
    ], axis=1)
    received = bits_to_symbols(received_bits, code.s)
    hit = (received != sent).any(axis=1)

    decoded = received[:, : code.k_sym].copy()
    failures = 0
    for b in np.flatnonzero(hit):
        try:
            word, _ = rs_decode(code, received[b])
        except DecodeFailure:
            failures += 1
            continue
        decoded[b] = word[: code.k_sym]

    return _tally_errors(data, symbols_to_bits(decoded, code.s), hit, failures)


def _run_chunk(cfg: TrialConfig, n_blocks: int, seed_seq: np.random.SeedSequence) -> _Tally:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    if isinstance(cfg.codec, MdpcCode):
        return _chunk_mdpc(cfg, n_blocks, rng)
    return _chunk_rs(cfg, n_blocks, rng)


def run_campaign(cfg: TrialConfig, workers: int = MC_WORKERS,
                 chunk_blocks: int = MC_CHUNK_BLOCKS, chunk_bits: int = MC_CHUNK_BITS,
                 logger=None) -> CampaignStats:
    """
    Transmits cfg.blocks random blocks and measures the residual data-bit
    error rate and the block error rate, each with a normal-approximation
    standard error. Identical config and chunk limits give identical stats.
    """
    per_chunk = effective_chunk_blocks(cfg.codec, chunk_blocks, chunk_bits)

    sizes = [per_chunk] * (cfg.blocks // per_chunk)
    if cfg.blocks % per_chunk:
        sizes.append(cfg.blocks % per_chunk)
    streams = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    if logger:
        logger.info(
            f"MC campaign {cfg.codec.label}: {cfg.blocks} blocks in {len(sizes)} chunks, "
            f"p_main={cfg.p_main:.3e}, p_aux={cfg.p_aux:.3e}, seed={cfg.seed}"
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        tallies = list(pool.map(lambda job: _run_chunk(cfg, *job), zip(sizes, streams)))

    total = _Tally()
    for t in tallies:
        total = total + t

    meta = rng_metadata(cfg.seed, chunk_blocks, chunk_bits, codec=cfg.codec)
    stats = _stats(total, cfg.data_bits, meta)
    if logger:
        logger.info(
            f"MC campaign {cfg.codec.label} done: block error rate "
            f"{stats.block_error_rate:.4e} ± {stats.block_error_se:.1e}"
        )
    return stats


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def _tail_beyond(t: int, n_main: int, p_main: float, n_aux: int, p_aux: float) -> float:
    """P(more than t errors over both channels) for independent binomial error counts."""
    i = np.arange(t + 1)
    tail = binom.sf(t, n_main, p_main) + np.sum(
        binom.pmf(i, n_main, p_main) * binom.sf(t - i, n_aux, p_aux)
    )
    return float(np.clip(tail, 0.0, 1.0))


def block_error_oracle_rs(code: RsCode, P_s_M: float, P_s_A: float) -> float:
    """Exact block error probability when decoding fails iff more than t symbols are hit."""
    for name, p in (("P_s_M", P_s_M), ("P_s_A", P_s_A)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name}={p} is not a probability")
    return _tail_beyond(code.t, code.k_sym, P_s_M, code.r_sym, P_s_A)


class MdpcOracle(NamedTuple):
    block_error: float
    residual_ber: float     # nan when not enumerated
    exact: bool             # False: P(more than t bit errors) instead of the decoder's rate


@lru_cache(maxsize=8)
def _enumerate_mdpc(n: int, m: int, max_iter: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Runs every error pattern through the decoder; returns (main weight, aux weight, data errors)."""
    code = MdpcCode(n=n, m=m)
    N = code.N
    patterns = ((np.arange(1 << N, dtype=np.int64)[:, None] >> np.arange(N)) & 1).astype(np.uint8)
    decoded, _ = mdpc_decode_blocks(code, patterns, max_iter=max_iter)
    w_main = patterns[:, : code.K].sum(axis=1, dtype=np.int64)
    w_aux = patterns[:, code.K:].sum(axis=1, dtype=np.int64)
    data_errors = decoded[:, : code.K].sum(axis=1, dtype=np.int64)
    return w_main, w_aux, data_errors


def block_error_oracle_mdpc(code: MdpcCode, p_main: float, p_aux: float,
                            max_iter: int = MDPC_MAX_ITER) -> MdpcOracle:
    """
    Exact decoder block error and residual BER for codes of at most
    MDPC_ORACLE_MAX_BITS bits, found by pushing every error pattern through
    the decoder. The code is linear and the decoder only sees syndromes, so
    the all-zero codeword stands for every codeword.

    Larger codes get P(more than t bit errors), which ignores patterns the
    decoder happens to fix and any <= t pattern it misses.
    """
    for name, p in (("p_main", p_main), ("p_aux", p_aux)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name}={p} is not a probability")

    if code.N > MDPC_ORACLE_MAX_BITS:
        tail = _tail_beyond(code.t, code.K, p_main, code.R, p_aux)
        return MdpcOracle(tail, float("nan"), False)

    w_main, w_aux, data_errors = _enumerate_mdpc(code.n, code.m, max_iter)
    prob = (np.power(p_main, w_main) * np.power(1.0 - p_main, code.K - w_main)
            * np.power(p_aux, w_aux) * np.power(1.0 - p_aux, code.R - w_aux))
    block_error = float(prob[data_errors > 0].sum())
    residual_ber = float((prob * data_errors).sum() / code.K)
    return MdpcOracle(min(block_error, 1.0), min(residual_ber, 1.0), True)
