import pytest

from cli import build_parser, main
from utils.results_archive import read_csv


def test_link_sweep_to_stdout(capsys):
    assert main(["link-sweep", "--system", "ref-1x10.80", "--d-min", "1", "--d-max", "3", "--d-step", "1"]) == 0
    out = capsys.readouterr().out
    assert "# command: link-sweep" in out
    assert "d_main_m,slot,role,channel,modulation" in out


def test_link_sweep_to_file(tmp_path):
    path = tmp_path / "ber_ref5.csv"
    assert main(["link-sweep", "--system", "ref-5x2.16", "--out", str(path)]) == 0
    df, meta = read_csv(path)
    assert len(df) == 40 * 5
    assert meta["system"] == "ref-5x2.16"


def test_analyze_fixed_code(tmp_path):
    path = tmp_path / "mdpc.csv"
    rc = main(["analyze", "--code", "mdpc", "2", "28", "--d-min", "10", "--d-max", "10", "--out", str(path)])
    assert rc == 0
    df, meta = read_csv(path)
    assert len(df) == 1
    assert df.loc[0, "code_rate"] == pytest.approx(0.932224, abs=1e-6)
    assert meta["code_family"] == "mdpc"


def test_analyze_optimize_rs(tmp_path):
    path = tmp_path / "rs.csv"
    assert main(["analyze", "--code", "rs", "8", "2", "--optimize", "--out", str(path)]) == 0
    df, _ = read_csv(path)
    assert df["code_rate"].is_monotonic_decreasing


def test_simulate_symbol_error_rate(tmp_path):
    path = tmp_path / "sim.csv"
    rc = main(["simulate", "--code", "rs", "8", "28", "2", "--p-main-ser", "0.01",
               "--blocks", "2000", "--seed", "7", "--out", str(path)])
    assert rc == 0
    df, meta = read_csv(path)
    assert df.loc[0, "ser_main"] == pytest.approx(0.01, rel=1e-9)
    assert df.loc[0, "oracle_block_error"] == pytest.approx(1 - 0.99 ** 28 - 0.28 * 0.99 ** 27, rel=1e-9)
    assert meta["seed"] == "7"


def test_simulate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--code", "mdpc", "2", "4", "--p-main", "0.02", "--blocks", "3000", "--seed", "3"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_zero_error_rates(tmp_path):
    path = tmp_path / "zeros.csv"
    rc = main(["simulate", "--code", "mdpc", "2", "2", "--p-main", "0", "--p-aux", "0",
               "--blocks", "100", "--seed", "1", "--out", str(path)])
    assert rc == 0
    df, _ = read_csv(path)
    assert df.loc[0, "residual_ber"] == 0.0
    assert df.loc[0, "block_error_rate"] == 0.0


@pytest.mark.parametrize("argv", [
    ["analyze", "--code", "ldpc", "2"],
    ["analyze", "--code", "mdpc", "2"],
    ["analyze", "--system", "no-such-system"],
    ["link-sweep", "--d-min", "-1"],
    ["simulate", "--code", "mdpc", "2", "2", "--p-main-ser", "0.01"],
    ["simulate", "--code", "rs", "8", "28", "2", "--p-main", "0.01", "--p-main-ser", "0.01"],
    ["simulate", "--code", "mdpc", "2", "2", "--p-main", "1.5"],
    ["analyze", "--system", "ref-1x10.80"],
])
def test_bad_parameters_exit_1(argv, capsys):
    assert main(argv) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--no-such-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main([])


def test_parser_defaults():
    args = build_parser().parse_args(["analyze"])
    assert args.code == ["mdpc", "2", "28"]
    assert (args.d_min, args.d_max, args.d_step) == (0.5, 20.0, 0.5)
    assert args.out is None
