import math

import numpy as np
import pytest

from utils.codec_mdpc import MdpcCode
from utils.codec_rs import RsCode
from utils.sweep_runner import (
    CodeRequest, SimPoint,
    analyze_table, distance_grid, goodput_table, link_sweep_table,
    points_from_grid, simulate_table,
)
from utils.systems import get_system


@pytest.fixture(scope="module")
def grid():
    return distance_grid(0.5, 20.0, 0.5)


def test_distance_grid():
    g = distance_grid(0.5, 20.0, 0.5)
    assert len(g) == 40
    assert g[0] == 0.5 and g[-1] == 20.0
    assert distance_grid(0.1, 0.3, 0.1) == [0.1, 0.2, 0.3]
    assert distance_grid(1.0, 2.0, 5.0) == [1.0]
    assert distance_grid(3.0, 3.0, 1.0) == [3.0]


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.5), (1.0, 2.0, 0.0), (2.0, 1.0, 0.5)])
def test_distance_grid_rejects(args):
    with pytest.raises(ValueError):
        distance_grid(*args)


def test_code_request_parse():
    assert CodeRequest.parse(["mdpc", "2", "28"]) == CodeRequest("mdpc", n=2, m=28)
    assert CodeRequest.parse(["RS", "8", "224", "16"]) == CodeRequest("rs", s=8, k_sym=224, r_sym=16)
    partial = CodeRequest.parse(["rs", "8", "2"])
    assert partial.r_sym == 2 and not partial.is_complete
    assert isinstance(CodeRequest.parse(["mdpc", "2", "28"]).build(), MdpcCode)
    assert isinstance(CodeRequest.parse(["rs", "8", "28", "2"]).build(), RsCode)
    for bad in (["ldpc", "2"], ["mdpc"], ["rs", "8"], ["mdpc", "two"], []):
        with pytest.raises(ValueError):
            CodeRequest.parse(bad)
    with pytest.raises(ValueError):
        CodeRequest.parse(["mdpc", "2"]).build()


def test_link_sweep_long_format(grid):
    df, meta = link_sweep_table(get_system("ref-5x2.16"), grid)
    assert len(df) == 40 * 5
    assert set(df["slot"]) == {"ref0", "ref1", "ref2", "ref3", "ref4"}
    assert meta["system"] == "ref-5x2.16"
    for _, grp in df.groupby("slot"):
        assert (np.diff(grp.sort_values("distance_m")["ber"]) >= 0).all()


def test_link_sweep_fixed_aux_distance(grid):
    df, meta = link_sweep_table(get_system("main-aux"), grid, d_aux=4.0)
    aux = df[df["role"] == "aux"]
    assert (aux["distance_m"] == 4.0).all()
    assert aux["ber"].nunique() == 1
    assert meta["d_aux_m"] == 4.0


def test_analyze_fixed_mdpc_single_distance():
    df, meta = analyze_table(get_system("main-aux"), CodeRequest("mdpc", n=2, m=28), [10.0])
    row = df.iloc[0]
    assert len(df) == 1
    assert row["code_rate"] == pytest.approx(784 / 841, abs=1e-12)
    assert (row["K"], row["R"], row["t"]) == (784, 57, 1)
    assert row["overhead"] == pytest.approx(57 / 841, abs=1e-12)
    assert row["rate_ratio"] == pytest.approx(16.0)
    assert not row["oracle_exact"]
    assert meta["command"] == "analyze"


def test_analyze_rs_reports_t():
    df, _ = analyze_table(get_system("main-aux"), CodeRequest("rs", s=8, k_sym=224, r_sym=16), [1.0, 5.0])
    assert (df["t"] == 8).all()
    assert df["code_rate"].tolist() == pytest.approx([1792 / 1920] * 2)


def test_analyze_optimized_rs_rate_non_increasing(grid):
    df, meta = analyze_table(get_system("main-aux"), CodeRequest("rs", s=8, r_sym=2), grid, optimize=True)
    assert len(df) == 40
    assert (np.diff(df["code_rate"]) <= 0).all()
    assert (np.diff(df["overhead"]) >= 0).all()
    assert meta["k_sym"] == "optimized"
    assert df.iloc[0]["k_sym"] == 253


def test_analyze_optimized_mdpc_rate_non_increasing(grid):
    df, _ = analyze_table(get_system("main-aux"), CodeRequest("mdpc", n=2), grid, optimize=True)
    assert (np.diff(df["code_rate"]) <= 0).all()
    assert df.iloc[0]["length_capped"]


def test_rs_rate_not_below_mdpc_where_comparable(grid):
    layout = get_system("main-aux")
    rs, _ = analyze_table(layout, CodeRequest("rs", s=8, r_sym=2), grid, optimize=True)
    mdpc, _ = analyze_table(layout, CodeRequest("mdpc", n=2), grid, optimize=True)
    both = (~rs["infeasible"] & ~mdpc["infeasible"]
            & ~rs["length_capped"] & ~mdpc["length_capped"])
    assert (rs.loc[both, "code_rate"] >= mdpc.loc[both, "code_rate"]).all()


def test_analyze_requires_two_channels():
    with pytest.raises(ValueError):
        analyze_table(get_system("ref-1x10.80"), CodeRequest("mdpc", n=2, m=28), [1.0])


def test_analyze_with_monte_carlo_columns():
    df, meta = analyze_table(get_system("main-aux"), CodeRequest("mdpc", n=2, m=2), [1.0, 2.0],
                             mc_blocks=200, seed=4)
    assert {"mc_residual_ber", "mc_block_error_rate", "mc_block_error_se"} <= set(df.columns)
    assert (df["mc_block_error_rate"] == 0.0).all()
    assert meta["mc_blocks"] == 200


def test_points_from_grid():
    points = points_from_grid(get_system("main-aux"), [1.0, 18.0], d_aux=2.0)
    assert [p.d_main for p in points] == [1.0, 18.0]
    assert points[0].p_aux == points[1].p_aux
    assert points[1].p_main > points[0].p_main


def test_simulate_table_rs_columns():
    code = CodeRequest("rs", s=8, k_sym=28, r_sym=2).build()
    df, meta = simulate_table(code, [SimPoint(0.0, 0.0), SimPoint(1e-3, 0.0)], blocks=500, seed=7)
    assert len(df) == 2
    assert df["seed"].tolist() == [7, 8]
    assert df.iloc[0]["block_error_rate"] == 0.0
    assert "ser_main" in df.columns
    assert meta["seed"] == 7


def test_simulate_table_needs_points():
    with pytest.raises(ValueError):
        simulate_table(CodeRequest("mdpc", n=2, m=2).build(), [], blocks=10)


def test_goodput_table_error_free_ratio():
    layouts = [get_system("main-aux"), get_system("ref-1x10.80")]
    df, _ = goodput_table(layouts, [0.5], code_rates={"main-aux": 784 / 841})
    by_system = df.set_index("system")
    coded = by_system.loc["main-aux", "goodput_information_bps"]
    ref = by_system.loc["ref-1x10.80", "goodput_information_bps"]
    assert ref == pytest.approx(35.2e9)
    assert coded == pytest.approx(784 / 841 * 28.16e9)
    assert by_system.loc["main-aux", "data_rate_information_bps"] / ref == pytest.approx(0.8)
    assert not math.isnan(by_system.loc["main-aux", "goodput_all_bps"])
