"""
link_model.py
-------------
Analytic AWGN link model for the 802.15.3d THz channels: free-space path
loss, link budget, thermal noise, per-modulation BER and data rate.

Noise is integrated over the Nyquist bandwidth B_N (matched-filter receiver),
so the symbol-rate-matched Eb/N0 is SNR / log2(M). The roll-off only enters
the occupied-bandwidth check.

All numeric functions accept scalars or numpy arrays.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import erfc

from utils.config import (
    SPEED_OF_LIGHT, BOLTZMANN,
    TOTAL_TX_POWER_DBM, ANTENNA_GAIN_DBI,
    NOISE_TEMPERATURE_K, NOISE_FIGURE_DB,
    ATMOSPHERIC_LOSS_DB_PER_M, ROLL_OFF, NYQUIST_BW_HZ,
)


class Modulation(str, Enum):
    BPSK = "BPSK"
    QAM16 = "QAM16"

    @property
    def order(self) -> int:
        return {"BPSK": 2, "QAM16": 16}[self.value]

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @classmethod
    def parse(cls, text: str) -> "Modulation":
        key = text.strip().upper().replace("-", "")
        aliases = {"BPSK": cls.BPSK, "QAM16": cls.QAM16, "16QAM": cls.QAM16}
        if key not in aliases:
            raise ValueError(f"Unknown modulation {text!r} (expected BPSK or QAM16)")
        return aliases[key]


# ---------------------------------------------------------------------------
# Configuration types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelConfig:
    name: str
    center_freq: float      # Hz
    bandwidth: float        # Hz, 802.15.3d channel width
    nyquist_bw: float       # Hz, B_N
    modulation: Modulation
    tx_power: float         # dBm
    roll_off: float = ROLL_OFF

    def __post_init__(self):
        if self.center_freq <= 0 or self.bandwidth <= 0 or self.nyquist_bw <= 0:
            raise ValueError(f"Channel {self.name}: frequencies and bandwidths must be positive")
        if not 0 <= self.roll_off <= 1:
            raise ValueError(f"Channel {self.name}: roll-off {self.roll_off} outside [0, 1]")
        if self.nyquist_bw * (1 + self.roll_off) > self.bandwidth * (1 + 1e-12):
            raise ValueError(
                f"Channel {self.name}: B_N*(1+alpha) = {self.nyquist_bw * (1 + self.roll_off):.4g} Hz "
                f"exceeds the channel width {self.bandwidth:.4g} Hz"
            )
        if not np.isfinite(self.tx_power):
            raise ValueError(f"Channel {self.name}: transmit power must be finite")

    @property
    def symbol_duration(self) -> float:
        """t_s = 1 / (2 B_N)."""
        return 1.0 / (2.0 * self.nyquist_bw)

    def with_overrides(self, **changes) -> "ChannelConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class LinkBudget:
    tx_gain: float = ANTENNA_GAIN_DBI          # dBi
    rx_gain: float = ANTENNA_GAIN_DBI          # dBi
    noise_temp: float = NOISE_TEMPERATURE_K    # K
    noise_figure: float = NOISE_FIGURE_DB      # dB
    atmospheric_loss: float = ATMOSPHERIC_LOSS_DB_PER_M   # dB/m

    def __post_init__(self):
        values = (self.tx_gain, self.rx_gain, self.noise_temp,
                  self.noise_figure, self.atmospheric_loss)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"Link budget values must be finite: {self}")
        if self.noise_temp <= 0:
            raise ValueError(f"Noise temperature must be > 0 K, got {self.noise_temp}")


# ---------------------------------------------------------------------------
# Propagation and noise
# ---------------------------------------------------------------------------

def fspl_db(d, f):
    """Free-space path loss 20*log10(4*pi*d*f/c) in dB."""
    d = np.asarray(d, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(d <= 0) or np.any(f <= 0):
        raise ValueError("Distance and frequency must be positive for the path loss")
    out = 20.0 * np.log10(4.0 * np.pi * d * f / SPEED_OF_LIGHT)
    return float(out) if out.ndim == 0 else out


def noise_power_dbm(cfg: ChannelConfig, budget: LinkBudget) -> float:
    """Thermal noise over B_N plus the receiver noise figure."""
    return 10.0 * np.log10(BOLTZMANN * budget.noise_temp * cfg.nyquist_bw * 1000.0) \
        + budget.noise_figure


def received_power_dbm(cfg: ChannelConfig, budget: LinkBudget, d):
    return (cfg.tx_power + budget.tx_gain + budget.rx_gain
            - fspl_db(d, cfg.center_freq)
            - budget.atmospheric_loss * np.asarray(d, dtype=float))


def snr_db(cfg: ChannelConfig, budget: LinkBudget, d):
    out = received_power_dbm(cfg, budget, d) - noise_power_dbm(cfg, budget)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Error rate and data rate
# ---------------------------------------------------------------------------

def ber(cfg: ChannelConfig, snr_db_value):
    """
    AWGN bit error probability at the given SNR (dB).

    BPSK:  Q(sqrt(2 Eb/N0))
    16QAM: (3/8) erfc(sqrt(0.4 Eb/N0)), Gray-mapped nearest-neighbour form
    Clamped to [0, 0.5].
    """
    snr_lin = 10.0 ** (np.asarray(snr_db_value, dtype=float) / 10.0)
    ebn0 = snr_lin / cfg.modulation.bits_per_symbol

    if cfg.modulation is Modulation.BPSK:
        p = 0.5 * erfc(np.sqrt(ebn0))
    else:
        p = 0.375 * erfc(np.sqrt(0.4 * ebn0))

    p = np.clip(p, 0.0, 0.5)
    return float(p) if p.ndim == 0 else p


def ber_at(cfg: ChannelConfig, budget: LinkBudget, d):
    return ber(cfg, snr_db(cfg, budget, d))


def data_rate(cfg: ChannelConfig) -> float:
    """D = log2(M) * 2 * B_N in bit/s."""
    return cfg.modulation.bits_per_symbol * 2.0 * cfg.nyquist_bw


# ---------------------------------------------------------------------------
# Preset catalog
# ---------------------------------------------------------------------------

def split_power_dbm(total_dbm: float, share: float) -> float:
    """Power of a channel receiving `share` of the total transmit power."""
    return total_dbm + 10.0 * np.log10(share)


REF_2G16_CENTERS_GHZ = (294.84, 297.00, 299.16, 301.32, 303.48)


def presets() -> dict[str, ChannelConfig]:
    """
    Named channels of the evaluation. The −8 dBm total is spread by occupied
    bandwidth: one fifth per 2.16 GHz channel, four fifths for 8.64 GHz.
    """
    fifth = split_power_dbm(TOTAL_TX_POWER_DBM, 1 / 5)
    four_fifths = split_power_dbm(TOTAL_TX_POWER_DBM, 4 / 5)

    catalog = {
        "aux-2.16": ChannelConfig(
            name="aux-2.16", center_freq=294.84e9, bandwidth=2.16e9,
            nyquist_bw=NYQUIST_BW_HZ[2.16e9], modulation=Modulation.BPSK,
            tx_power=fifth,
        ),
        "main-8.64": ChannelConfig(
            name="main-8.64", center_freq=300.24e9, bandwidth=8.64e9,
            nyquist_bw=NYQUIST_BW_HZ[8.64e9], modulation=Modulation.QAM16,
            tx_power=four_fifths,
        ),
        "ref-10.80": ChannelConfig(
            name="ref-10.80", center_freq=299.16e9, bandwidth=10.80e9,
            nyquist_bw=NYQUIST_BW_HZ[10.80e9], modulation=Modulation.QAM16,
            tx_power=TOTAL_TX_POWER_DBM,
        ),
    }
    for ghz in REF_2G16_CENTERS_GHZ:
        name = f"ref-2.16-{ghz:.2f}"
        catalog[name] = ChannelConfig(
            name=name, center_freq=ghz * 1e9, bandwidth=2.16e9,
            nyquist_bw=NYQUIST_BW_HZ[2.16e9], modulation=Modulation.BPSK,
            tx_power=fifth,
        )
    return catalog


def get_preset(name: str) -> ChannelConfig:
    catalog = presets()
    if name not in catalog:
        raise KeyError(f"Unknown channel preset {name!r}; available: {sorted(catalog)}")
    return catalog[name]
