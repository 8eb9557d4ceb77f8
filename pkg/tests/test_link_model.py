import numpy as np
import pytest

from utils.config import SPEED_OF_LIGHT
from utils.link_model import (
    ChannelConfig, LinkBudget, Modulation,
    ber, ber_at, data_rate, fspl_db, get_preset, noise_power_dbm,
    presets, received_power_dbm, snr_db,
)


def _bpsk_full_power() -> ChannelConfig:
    return ChannelConfig(name="bpsk-299", center_freq=299.16e9, bandwidth=2.16e9,
                         nyquist_bw=880e6, modulation=Modulation.BPSK, tx_power=-8.0)


def test_fspl():
    assert fspl_db(1.0, 299.16e9) == pytest.approx(81.97, abs=0.01)
    f = 300e9
    assert fspl_db(SPEED_OF_LIGHT / (4 * np.pi * f), f) == pytest.approx(0.0, abs=1e-9)
    # +6.02 dB per doubling of distance
    assert fspl_db(2.0, f) - fspl_db(1.0, f) == pytest.approx(20 * np.log10(2))


def test_fspl_rejects_non_positive():
    with pytest.raises(ValueError):
        fspl_db(0.0, 300e9)
    with pytest.raises(ValueError):
        fspl_db(np.array([1.0, -1.0]), 300e9)


def test_link_budget_chain():
    cfg, budget = _bpsk_full_power(), LinkBudget()
    assert noise_power_dbm(cfg, budget) == pytest.approx(-74.55, abs=0.05)
    assert received_power_dbm(cfg, budget, 1.0) == pytest.approx(-37.17, abs=0.01)
    assert snr_db(cfg, budget, 1.0) == pytest.approx(37.4, abs=0.05)


def test_snr_accepts_arrays():
    cfg, budget = _bpsk_full_power(), LinkBudget()
    d = np.array([1.0, 2.0, 4.0])
    out = snr_db(cfg, budget, d)
    assert out.shape == (3,)
    np.testing.assert_allclose(np.diff(out), -20 * np.log10(2), rtol=1e-12)


def test_ber_bpsk_at_zero_db():
    assert ber(_bpsk_full_power(), 0.0) == pytest.approx(0.0786, abs=1e-4)


def test_ber_limits():
    cfg = _bpsk_full_power()
    assert ber(cfg, 60.0) == 0.0
    assert ber(cfg, -200.0) == pytest.approx(0.5)
    qam = cfg.with_overrides(modulation=Modulation.QAM16)
    assert 0.0 <= ber(qam, -200.0) <= 0.5


def test_bpsk_not_worse_than_qam16():
    bpsk = _bpsk_full_power()
    qam = bpsk.with_overrides(modulation=Modulation.QAM16)
    snr = np.linspace(0.0, 30.0, 61)
    assert (ber(bpsk, snr) <= ber(qam, snr)).all()


def test_ber_grows_with_distance():
    cfg, budget = get_preset("main-8.64"), LinkBudget()
    values = ber_at(cfg, budget, np.linspace(0.5, 20.0, 40))
    assert (np.diff(values) >= 0).all()


def test_data_rates():
    assert data_rate(get_preset("aux-2.16")) == pytest.approx(1.76e9)
    assert data_rate(get_preset("main-8.64")) == pytest.approx(28.16e9)
    assert data_rate(get_preset("ref-10.80")) == pytest.approx(35.2e9)
    assert data_rate(get_preset("main-8.64")) / data_rate(get_preset("ref-10.80")) == pytest.approx(0.8)


def test_preset_catalog():
    catalog = presets()
    twos = [c for name, c in catalog.items() if name.startswith("ref-2.16-")]
    assert len(twos) == 5
    assert all(c.tx_power == pytest.approx(-14.99, abs=0.01) for c in twos)
    assert sum(data_rate(c) for c in twos) == pytest.approx(8.8e9)
    assert catalog["ref-10.80"].center_freq == pytest.approx(299.16e9)
    assert catalog["main-8.64"].roll_off == 0.4
    with pytest.raises(KeyError):
        get_preset("no-such-channel")


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelConfig(name="x", center_freq=300e9, bandwidth=2.16e9, nyquist_bw=2e9,
                      modulation=Modulation.BPSK, tx_power=0.0)
    with pytest.raises(ValueError):
        ChannelConfig(name="x", center_freq=-1.0, bandwidth=2.16e9, nyquist_bw=880e6,
                      modulation=Modulation.BPSK, tx_power=0.0)
    with pytest.raises(ValueError):
        LinkBudget(noise_temp=0.0)


def test_modulation_parse():
    assert Modulation.parse("16qam") is Modulation.QAM16
    assert Modulation.parse(" bpsk ") is Modulation.BPSK
    assert Modulation.QAM16.bits_per_symbol == 4
    with pytest.raises(ValueError):
        Modulation.parse("QPSK")
