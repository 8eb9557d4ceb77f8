"""
sweep_runner.py
---------------
Builds the result tables behind the three commands:

  link_sweep_table   per distance and channel: path loss, SNR, BER, data rate
  analyze_table      per distance: code rate, overhead, residual BER, block
                     error (closed form and oracle), goodput; fixed code or
                     fault-tolerance optimizer; optional Monte-Carlo columns
  simulate_table     Monte-Carlo campaigns at given error rates or distances
  goodput_table      uncoded/coded goodput of several systems side by side

Every builder returns (DataFrame, metadata dict). The metadata ends up as
`#` header lines in the CSV; none of it depends on wall-clock time, so
identical inputs give identical files.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import pandas as pd

from utils.analytics import (
    TwoChannelPoint,
    code_rate, goodput, overhead, system_bers,
    mdpc_block_error, mdpc_max_m, mdpc_residual_ber,
    rs_residual, rs_select_k, ser_from_ber,
)
from utils.codec_mdpc import MdpcCode, mdpc_new
from utils.codec_rs import RsCode, rs_new
from utils.config import (
    AUX_BER_WARNING, MC_DEFAULT_SEED, MDPC_M_CAP, MDPC_MAX_ITER,
)
from utils.galois_field import field_new
from utils.link_model import data_rate, fspl_db, snr_db, ber
from utils.mc_sim import (
    TrialConfig, block_error_oracle_mdpc, block_error_oracle_rs,
    rng_metadata, run_campaign,
)
from utils.systems import SystemLayout

SEED_MODULUS = 2 ** 64


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------

def distance_grid(d_min: float, d_max: float, d_step: float) -> list[float]:
    """d_min, d_min + d_step, ... up to d_max inclusive; a step wider than the range gives [d_min]."""
    if d_min <= 0:
        raise ValueError(f"d_min={d_min} must be > 0")
    if d_step <= 0:
        raise ValueError(f"d_step={d_step} must be > 0")
    if d_max < d_min:
        raise ValueError(f"d_max={d_max} is below d_min={d_min}")
    count = math.floor((d_max - d_min) / d_step + 1e-9) + 1
    return [round(d_min + i * d_step, 10) for i in range(count)]


@dataclass(frozen=True)
class CodeRequest:
    """A code named on the command line: `mdpc N [M]` or `rs S [K] R`."""
    family: str
    n: int | None = None
    m: int | None = None
    s: int | None = None
    k_sym: int | None = None
    r_sym: int | None = None

    @classmethod
    def parse(cls, tokens: Sequence[str]) -> "CodeRequest":
        if not tokens:
            raise ValueError("Empty code description; expected `mdpc N [M]` or `rs S [K] R`")
        family = tokens[0].lower()
        try:
            nums = [int(x) for x in tokens[1:]]
        except ValueError as exc:
            raise ValueError(f"Code parameters must be integers: {list(tokens[1:])}") from exc

        if family == "mdpc" and len(nums) in (1, 2):
            return cls("mdpc", n=nums[0], m=nums[1] if len(nums) == 2 else None)
        if family == "rs" and len(nums) == 3:
            return cls("rs", s=nums[0], k_sym=nums[1], r_sym=nums[2])
        if family == "rs" and len(nums) == 2:
            return cls("rs", s=nums[0], r_sym=nums[1])
        raise ValueError(f"Cannot read code {' '.join(tokens)!r}; expected `mdpc N [M]` or `rs S [K] R`")

    @property
    def is_complete(self) -> bool:
        return (self.m if self.family == "mdpc" else self.k_sym) is not None

    def build(self) -> MdpcCode | RsCode:
        if not self.is_complete:
            missing = "M" if self.family == "mdpc" else "K"
            raise ValueError(f"Code {self.family} needs {missing} unless the optimizer picks it")
        if self.family == "mdpc":
            return mdpc_new(self.n, self.m)
        return rs_new(field_new(self.s), self.k_sym, self.r_sym)


DEFAULT_CODE = CodeRequest("mdpc", n=2, m=28)


def _require_two_channel(layout: SystemLayout):
    if not layout.is_two_channel:
        raise ValueError(
            f"System {layout.name!r} has no main/aux channel pair; "
            f"use a two-channel system such as main-aux"
        )


def _seed_for(seed: int, index: int) -> int:
    return (seed + index) % SEED_MODULUS


# ---------------------------------------------------------------------------
# Link sweep
# ---------------------------------------------------------------------------

def link_sweep_table(layout: SystemLayout, grid: Sequence[float],
                     d_aux: float | None = None, logger=None) -> tuple[pd.DataFrame, dict]:
    rows = []
    for d in grid:
        for slot in layout.slots:
            cfg = slot.channel
            dist = d_aux if (slot.role == "aux" and d_aux is not None) else d
            snr = snr_db(cfg, layout.budget, dist)
            rows.append({
                "d_main_m":       d,
                "slot":           slot.slot,
                "role":           slot.role,
                "channel":        cfg.name,
                "modulation":     cfg.modulation.value,
                "center_freq_hz": cfg.center_freq,
                "nyquist_bw_hz":  cfg.nyquist_bw,
                "tx_power_dbm":   cfg.tx_power,
                "distance_m":     dist,
                "fspl_db":        fspl_db(dist, cfg.center_freq),
                "snr_db":         snr,
                "ber":            ber(cfg, snr),
                "data_rate_bps":  data_rate(cfg),
            })

    if logger:
        logger.info(f"Link sweep {layout.name}: {len(grid)} distances x {len(layout.slots)} channels")

    meta = {"command": "link-sweep", "system": layout.name, "label": layout.label,
            "d_aux_m": "d_main" if d_aux is None else d_aux}
    return pd.DataFrame(rows), meta


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------

def _goodput_pair(layout: SystemLayout, d: float, d_aux: float, R_F: float,
                  residual_main: float) -> tuple[float, float]:
    """(all channels at raw BER, information channels at the residual BER)."""
    if R_F <= 0:
        return 0.0, 0.0
    sys = layout.at(d, d_aux, code_rate=R_F)
    raw = system_bers(sys, layout.budget)
    info = [residual_main if s.role == "main" else b for s, b in zip(layout.slots, raw)]
    return goodput(sys, raw), goodput(sys, info, information_only=True)


def _mdpc_columns(request: CodeRequest, point: TwoChannelPoint, optimize: bool,
                  m_cap: int, max_iter: int) -> tuple[MdpcCode, dict]:
    if optimize:
        sel = mdpc_max_m(request.n, point.p_e_M, m_cap)
        code = mdpc_new(request.n, sel.value)
        infeasible, capped = not sel.feasible, sel.length_capped
    else:
        code = request.build()
        infeasible, capped = code.K * point.p_e_M > code.t, False

    P_re = mdpc_residual_ber(code, point.p_e_M, point.p_e_A)
    oracle = block_error_oracle_mdpc(code, point.p_e_M, point.p_e_A, max_iter=max_iter)
    return code, {
        "code": code.label, "n_dim": code.n, "m": code.m,
        "K": code.K, "R": code.R, "t": code.t,
        "code_rate": code_rate(code.K, code.R),
        "residual_ber": P_re,
        "block_error": mdpc_block_error(code, P_re),
        "oracle_block_error": oracle.block_error,
        "oracle_exact": oracle.exact,
        "length_capped": capped,
        "infeasible": infeasible,
    }


def _rs_columns(request: CodeRequest, point: TwoChannelPoint,
                optimize: bool) -> tuple[RsCode | None, dict]:
    s, r = request.s, request.r_sym
    if optimize:
        sel = rs_select_k(point.P_s_M, s, r)
        code = rs_new(field_new(s), sel.value, r) if sel.value >= 1 else None
        infeasible, capped = not sel.feasible, sel.length_capped
    else:
        code = request.build()
        infeasible, capped = code.k_sym * point.P_s_M > code.t, False

    base = {"s": s, "r_sym": r, "ser_main": point.P_s_M, "ser_aux": point.P_s_A,
            "length_capped": capped, "infeasible": infeasible}
    if code is None:
        nan = float("nan")
        return None, {
            **base, "code": f"RS({r},0) s={s}", "k_sym": 0,
            "K": 0, "R": r * s, "t": r // 2, "code_rate": 0.0,
            "residual_ser": nan, "residual_ber": nan, "block_error": nan,
            "oracle_block_error": nan, "oracle_exact": True,
        }

    res = rs_residual(code, point.P_s_M, point.P_s_A)
    return code, {
        **base, "code": code.label, "k_sym": code.k_sym,
        "K": code.K, "R": code.R, "t": code.t,
        "code_rate": code_rate(code.K, code.R),
        "residual_ser": res.P_rs,
        "residual_ber": res.P_re,
        "block_error": res.P_b,
        "oracle_block_error": block_error_oracle_rs(code, point.P_s_M, point.P_s_A),
        "oracle_exact": True,
    }


def analyze_table(layout: SystemLayout, request: CodeRequest, grid: Sequence[float],
                  d_aux: float | None = None, optimize: bool = False,
                  m_cap: int = MDPC_M_CAP, mc_blocks: int = 0,
                  seed: int = MC_DEFAULT_SEED, max_iter: int = MDPC_MAX_ITER,
                  logger=None) -> tuple[pd.DataFrame, dict]:
    """
    One row per distance with the closed-form and oracle values for the
    requested code. With optimize, m (MDPC) or k_sym (RS) is re-selected at
    every distance and infeasible points stay in the table, flagged.
    """
    _require_two_channel(layout)
    if not optimize:
        request.build()
    if mc_blocks < 0:
        raise ValueError(f"mc_blocks={mc_blocks} must be >= 0")

    main, aux = layout.main.channel, layout.aux.channel
    rate_ratio = data_rate(main) / data_rate(aux)
    s = request.s or 8

    rows = []
    noisy_aux = []
    for idx, d in enumerate(grid):
        da = d if d_aux is None else d_aux
        snr_main = snr_db(main, layout.budget, d)
        snr_aux = snr_db(aux, layout.budget, da)
        point = TwoChannelPoint.from_bers(d, da, ber(main, snr_main), ber(aux, snr_aux), s)
        if point.p_e_A > AUX_BER_WARNING:
            noisy_aux.append(d)

        if request.family == "mdpc":
            code, cols = _mdpc_columns(request, point, optimize, m_cap, max_iter)
        else:
            code, cols = _rs_columns(request, point, optimize)

        residual = cols["residual_ber"]
        g_all, g_info = _goodput_pair(
            layout, d, da, cols["code_rate"],
            point.p_e_M if math.isnan(residual) else residual,
        )

        row = {
            "d_main_m": d, "d_aux_m": da, "system": layout.name,
            "snr_main_db": snr_main, "snr_aux_db": snr_aux,
            "ber_main": point.p_e_M, "ber_aux": point.p_e_A,
            **cols,
            "overhead": overhead(cols["code_rate"]),
            "rate_ratio": rate_ratio,
            "code_ratio": cols["K"] / cols["R"],
            "goodput_all_bps": g_all,
            "goodput_information_bps": g_info,
        }

        if mc_blocks:
            nan = float("nan")
            stats = None
            if code is not None:
                cfg = TrialConfig(code, point.p_e_M, point.p_e_A, mc_blocks,
                                  seed=_seed_for(seed, idx), max_iter=max_iter)
                stats = run_campaign(cfg, logger=logger)
            row.update({
                "mc_residual_ber":     stats.residual_ber if stats else nan,
                "mc_residual_ber_se":  stats.residual_ber_se if stats else nan,
                "mc_block_error_rate": stats.block_error_rate if stats else nan,
                "mc_block_error_se":   stats.block_error_se if stats else nan,
            })
        rows.append(row)

    df = pd.DataFrame(rows)

    if logger:
        logger.info(f"Analysis {layout.name} / {request.family}: {len(df)} distances"
                    f"{' (optimized)' if optimize else ''}")
        if noisy_aux:
            logger.warning(
                f"Auxiliary BER above {AUX_BER_WARNING:g} at {len(noisy_aux)} of {len(grid)} "
                f"points (from d={noisy_aux[0]} m); the parity channel is not error-free there"
            )
        if optimize and df["infeasible"].any():
            logger.warning(f"{int(df['infeasible'].sum())} distance(s) have no feasible code parameters")
        if request.family == "mdpc" and not df["oracle_exact"].all():
            logger.warning("MDPC oracle uses the P(> t errors) bound for codes above the enumeration limit")

    meta = {
        "command": "analyze", "system": layout.name, "label": layout.label,
        "code_family": request.family, "optimize": optimize,
        "d_aux_m": "d_main" if d_aux is None else d_aux,
    }
    if request.family == "mdpc":
        meta.update({"n_dim": request.n, "m": request.m if not optimize else "optimized",
                     "m_cap": m_cap, "max_iter": max_iter})
    else:
        meta.update({"s": request.s, "k_sym": request.k_sym if not optimize else "optimized",
                     "r_sym": request.r_sym})
    if mc_blocks:
        meta.update({"mc_blocks": mc_blocks, "seed_rule": "row i uses seed + i",
                     **rng_metadata(seed)})
    return df, meta


# ---------------------------------------------------------------------------
# Monte-Carlo campaigns
# ---------------------------------------------------------------------------

class SimPoint(NamedTuple):
    p_main: float
    p_aux: float
    d_main: float = float("nan")
    d_aux: float = float("nan")


def points_from_grid(layout: SystemLayout, grid: Sequence[float],
                     d_aux: float | None = None) -> list[SimPoint]:
    _require_two_channel(layout)
    main, aux = layout.main.channel, layout.aux.channel
    points = []
    for d in grid:
        da = d if d_aux is None else d_aux
        points.append(SimPoint(
            ber(main, snr_db(main, layout.budget, d)),
            ber(aux, snr_db(aux, layout.budget, da)),
            d, da,
        ))
    return points


def simulate_table(code: MdpcCode | RsCode, points: Sequence[SimPoint], blocks: int,
                   seed: int = MC_DEFAULT_SEED, max_iter: int = MDPC_MAX_ITER,
                   logger=None) -> tuple[pd.DataFrame, dict]:
    """Runs one campaign per point next to the oracle and the closed-form values."""
    if not points:
        raise ValueError("No operating points to simulate")

    rows = []
    for idx, pt in enumerate(points):
        cfg = TrialConfig(code, pt.p_main, pt.p_aux, blocks,
                          seed=_seed_for(seed, idx), max_iter=max_iter)
        stats = run_campaign(cfg, logger=logger)

        row = {
            "d_main_m": pt.d_main, "d_aux_m": pt.d_aux,
            "code": code.label, "K": code.K, "R": code.R, "t": code.t,
            "p_main": pt.p_main, "p_aux": pt.p_aux,
        }
        if isinstance(code, RsCode):
            P_s_M, P_s_A = ser_from_ber(pt.p_main, code.s), ser_from_ber(pt.p_aux, code.s)
            res = rs_residual(code, P_s_M, P_s_A)
            row.update({
                "ser_main": P_s_M, "ser_aux": P_s_A,
                "oracle_block_error": block_error_oracle_rs(code, P_s_M, P_s_A),
                "oracle_residual_ber": float("nan"),
                "oracle_exact": True,
                "analytic_residual_ber": res.P_re,
                "analytic_block_error": res.P_b,
            })
        else:
            oracle = block_error_oracle_mdpc(code, pt.p_main, pt.p_aux, max_iter=max_iter)
            P_re = mdpc_residual_ber(code, pt.p_main, pt.p_aux)
            row.update({
                "oracle_block_error": oracle.block_error,
                "oracle_residual_ber": oracle.residual_ber,
                "oracle_exact": oracle.exact,
                "analytic_residual_ber": P_re,
                "analytic_block_error": mdpc_block_error(code, P_re),
            })

        row.update({
            "blocks": stats.blocks,
            "seed": cfg.seed,
            "bit_errors": stats.bit_errors,
            "block_errors": stats.block_errors,
            "clean_blocks": stats.clean_blocks,
            "corrected_blocks": stats.corrected_blocks,
            "failed_blocks": stats.failed_blocks,
            "decode_failures": stats.decode_failures,
            "residual_ber": stats.residual_ber,
            "residual_ber_se": stats.residual_ber_se,
            "block_error_rate": stats.block_error_rate,
            "block_error_se": stats.block_error_se,
        })
        rows.append(row)

    if logger:
        logger.info(f"Simulated {code.label}: {len(rows)} point(s) x {blocks} blocks")

    meta = {"command": "simulate", "code": code.label, "blocks": blocks,
            "max_iter": max_iter, "seed_rule": "row i uses seed + i",
            **rng_metadata(seed, codec=code)}
    return pd.DataFrame(rows), meta


# ---------------------------------------------------------------------------
# Goodput comparison
# ---------------------------------------------------------------------------

def goodput_table(layouts: Sequence[SystemLayout], grid: Sequence[float],
                  code_rates: dict[str, float] | None = None,
                  d_aux: float | None = None, logger=None) -> tuple[pd.DataFrame, dict]:
    """Goodput of each system over the grid at raw channel BER; systems without an entry in code_rates are uncoded."""
    code_rates = code_rates or {}
    rows = []
    for layout in layouts:
        R_F = code_rates.get(layout.name, 1.0)
        for d in grid:
            sys = layout.at(d, d_aux, code_rate=R_F)
            bers = system_bers(sys, layout.budget)
            rows.append({
                "d_main_m": d,
                "system": layout.name,
                "label": layout.label,
                "code_rate": R_F,
                "data_rate_all_bps": sum(data_rate(c) for c, _ in sys.channels),
                "data_rate_information_bps": sum(
                    data_rate(c) for (c, _), info in zip(sys.channels, sys.information_mask) if info
                ),
                "goodput_all_bps": goodput(sys, bers),
                "goodput_information_bps": goodput(sys, bers, information_only=True),
            })

    if logger:
        logger.info(f"Goodput table: {len(layouts)} systems x {len(grid)} distances")

    meta = {"command": "goodput", "systems": ",".join(l.name for l in layouts)}
    return pd.DataFrame(rows), meta
