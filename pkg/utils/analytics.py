"""
analytics.py
------------
Closed-form performance model of the two-channel FEC scheme.

The main channel carries the K data bits, the auxiliary channel the R parity
bits. Everything here is an expectation-level approximation:

  - correction capability of MDPC and RS
  - fault-tolerance parameter selection (largest m, largest k_sym)
  - code rate and transmission overhead
  - residual bit/symbol error and block error probabilities
  - goodput of a multi-channel system

Exact block error probabilities come from the oracles in mc_sim.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from utils.codec_mdpc import MdpcCode
from utils.codec_rs import RsCode
from utils.config import MDPC_M_CAP
from utils.link_model import ChannelConfig, LinkBudget, ber_at, data_rate


def _check_probability(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}={p} is not a probability")
    return p


def _clamp(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def _one_minus_power(q: float, exponent: float) -> float:
    """1 - (1 - q)^exponent without cancellation for small q."""
    if q >= 1.0:
        return 1.0 if exponent > 0 else 0.0
    return _clamp(-math.expm1(exponent * math.log1p(-q)))


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoChannelPoint:
    d_main: float
    d_aux: float
    p_e_M: float
    p_e_A: float
    P_s_M: float
    P_s_A: float

    def __post_init__(self):
        for name in ("p_e_M", "p_e_A", "P_s_M", "P_s_A"):
            _check_probability(name, getattr(self, name))

    @classmethod
    def from_bers(cls, d_main: float, d_aux: float,
                  p_e_M: float, p_e_A: float, s: int = 8) -> "TwoChannelPoint":
        return cls(d_main=d_main, d_aux=d_aux, p_e_M=p_e_M, p_e_A=p_e_A,
                   P_s_M=ser_from_ber(p_e_M, s), P_s_A=ser_from_ber(p_e_A, s))


@dataclass(frozen=True)
class SystemSpec:
    """Channels placed at their distances, plus the code rate applied to the whole system."""
    channels: tuple[tuple[ChannelConfig, float], ...]
    code_rate: float = 1.0
    label: str = ""
    information: tuple[bool, ...] = ()   # per channel; empty means all carry information

    def __post_init__(self):
        if not self.channels:
            raise ValueError("A system needs at least one channel")
        if not 0.0 < self.code_rate <= 1.0:
            raise ValueError(f"Code rate {self.code_rate} outside (0, 1]")
        if self.information and len(self.information) != len(self.channels):
            raise ValueError("One information flag per channel is required")

    @property
    def information_mask(self) -> tuple[bool, ...]:
        return self.information or (True,) * len(self.channels)

    def with_code_rate(self, code_rate: float) -> "SystemSpec":
        return SystemSpec(self.channels, code_rate, self.label, self.information)


class ParamSelection(NamedTuple):
    value: int
    feasible: bool
    length_capped: bool     # the cap or maximum length bound binds, not the error budget


class RsResidual(NamedTuple):
    P_rs: float     # residual symbol error rate
    P_re: float     # residual bit error rate
    P_b: float      # block error probability


# ---------------------------------------------------------------------------
# MDPC
# ---------------------------------------------------------------------------

def t_mdpc(n: int) -> int:
    if n < 2:
        raise ValueError(f"MDPC needs n >= 2, got {n}")
    return 2 ** (n - 1) - 1


def mdpc_max_m(n: int, p_e_M: float, m_cap: int = MDPC_M_CAP) -> ParamSelection:
    """
    Largest m in [1, m_cap] with m^n * p_e_M <= t_MDPC, assuming an error-free
    auxiliary channel. Infeasible points report m=1.
    """
    t = t_mdpc(n)
    p = float(p_e_M)
    if p < 0 or not np.isfinite(p):
        raise ValueError(f"p_e_M={p_e_M} must be a finite non-negative number")
    if m_cap < 1:
        raise ValueError(f"m_cap={m_cap} must be >= 1")

    if p == 0.0:
        return ParamSelection(m_cap, True, True)

    root = (t / p) ** (1.0 / n)
    m = m_cap if root >= m_cap else int(root)
    while m < m_cap and (m + 1) ** n * p <= t:
        m += 1
    while m >= 1 and m ** n * p > t:
        m -= 1

    if m < 1:
        return ParamSelection(1, False, False)
    return ParamSelection(m, True, m == m_cap)


def mdpc_residual_ber(code: MdpcCode, p_e_M: float, p_e_A: float) -> float:
    p_M = _check_probability("p_e_M", p_e_M)
    p_A = _check_probability("p_e_A", p_e_A)
    return _clamp((code.K * p_M + code.R * p_A - code.t) / (code.K + code.R))


def mdpc_block_error(code: MdpcCode, P_re: float) -> float:
    return _one_minus_power(_check_probability("P_re", P_re), code.K)


# ---------------------------------------------------------------------------
# Reed-Solomon
# ---------------------------------------------------------------------------

def ser_from_ber(p_e: float, s: int) -> float:
    """Symbol error rate of s-bit symbols with independent bit errors."""
    if s < 1:
        raise ValueError(f"Symbol size s={s} must be >= 1")
    return _one_minus_power(_check_probability("p_e", p_e), s)


def ber_from_ser(P_s: float, s: int) -> float:
    """Inverse of ser_from_ber: 1 - (1 - P_s)^(1/s)."""
    if s < 1:
        raise ValueError(f"Symbol size s={s} must be >= 1")
    return _one_minus_power(_check_probability("P_s", P_s), 1.0 / s)


def rs_select_k(P_s_M: float, s: int, r_sym: int) -> ParamSelection:
    """
    Largest k_sym with k_sym * P_s_M <= t and k_sym + r_sym <= 2^s - 1.
    Feasible only if the codeword still reaches 2^(s-1) symbols; infeasible
    points keep the budget-limited k_sym so the caller can report it.
    """
    P_s = _check_probability("P_s_M", P_s_M)
    if r_sym < 2 or r_sym % 2:
        raise ValueError(f"r_sym={r_sym} must be even and >= 2")
    max_len = (1 << s) - 1
    if r_sym >= max_len:
        raise ValueError(f"r_sym={r_sym} leaves no room for data in GF(2^{s})")

    t = r_sym // 2
    k_len = max_len - r_sym
    if P_s == 0.0:
        k, capped = k_len, True
    else:
        k_budget = math.floor(t / P_s * (1 + 1e-12))
        k, capped = (k_len, True) if k_budget >= k_len else (k_budget, False)

    feasible = k >= 1 and k + r_sym >= 1 << (s - 1)
    return ParamSelection(max(k, 0), feasible, capped)


def rs_select_params(p_e_M: float, s: int, r_sym: int) -> ParamSelection:
    """Same as rs_select_k, starting from the main-channel bit error rate."""
    return rs_select_k(ser_from_ber(p_e_M, s), s, r_sym)


def rs_residual(code: RsCode, P_s_M: float, P_s_A: float) -> RsResidual:
    P_s_M = _check_probability("P_s_M", P_s_M)
    P_s_A = _check_probability("P_s_A", P_s_A)
    P_rs = _clamp((code.k_sym * P_s_M + code.r_sym * P_s_A - code.t) / code.n_sym)
    P_re = _one_minus_power(P_rs, 1.0 / code.s)
    P_b = _one_minus_power(P_re, code.K)
    return RsResidual(P_rs, P_re, P_b)


# ---------------------------------------------------------------------------
# Rate and goodput
# ---------------------------------------------------------------------------

def code_rate(K: int, R: int) -> float:
    if K < 0 or R <= 0:
        raise ValueError(f"Need K >= 0 and R > 0, got K={K}, R={R}")
    return K / (K + R)


def overhead(R_F: float) -> float:
    if not 0.0 <= R_F <= 1.0:
        raise ValueError(f"Code rate {R_F} outside [0, 1]")
    return 1.0 - R_F


def system_bers(sys: SystemSpec, budget: LinkBudget) -> list[float]:
    return [ber_at(cfg, budget, d) for cfg, d in sys.channels]


def goodput(sys: SystemSpec, per_channel_ber: Sequence[float],
            information_only: bool = False) -> float:
    """
    G = R_F * sum_i D_i * (1 - BER_i), in bit/s.

    With information_only the sum runs over the information-bearing channels
    only, which leaves out an auxiliary parity channel.
    """
    bers = list(per_channel_ber)
    if len(bers) != len(sys.channels):
        raise ValueError(f"Got {len(bers)} BER values for {len(sys.channels)} channels")

    total = 0.0
    for (cfg, _), info, b in zip(sys.channels, sys.information_mask, bers):
        b = _check_probability("BER", b)
        if information_only and not info:
            continue
        total += data_rate(cfg) * (1.0 - b)
    return sys.code_rate * total
