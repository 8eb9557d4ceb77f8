"""
cli.py
------
Command-line front end for the THz two-channel FEC evaluation.

    python -m cli link-sweep --system ref-5x2.16 --out ber_ref5.csv
    python -m cli analyze --code mdpc 2 28 --d-min 0.5 --d-max 20 --d-step 0.5
    python -m cli analyze --code rs 8 2 --optimize
    python -m cli simulate --code rs 8 28 2 --p-main-ser 0.01 --blocks 100000 --seed 7
    python -m cli simulate --code mdpc 2 28 --system main-aux --blocks 20000

Every command writes one CSV (standard output unless --out is given) with
`#` metadata lines in front of the header. Exit code 0 on success, 1 on a
bad parameter or I/O failure, 2 on a usage error.
"""

import argparse
import sys

from prefect.logging import get_logger

from utils.analytics import ber_from_ser
from utils.config import (
    MC_DEFAULT_SEED, MDPC_M_CAP, MDPC_MAX_ITER,
    SWEEP_D_MAX, SWEEP_D_MIN, SWEEP_D_STEP,
)
from utils.results_archive import write_csv
from utils.sweep_runner import (
    CodeRequest, DEFAULT_CODE, SimPoint,
    analyze_table, distance_grid, link_sweep_table,
    points_from_grid, simulate_table,
)
from utils.systems import DEFAULT_SYSTEM, load_system

DEFAULT_SIM_BLOCKS = 10_000


def _default_code_tokens() -> list[str]:
    return [DEFAULT_CODE.family, str(DEFAULT_CODE.n), str(DEFAULT_CODE.m)]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cli", description="THz two-channel FEC evaluation")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--system", default=DEFAULT_SYSTEM,
                       help=f"system preset name or key=value system file (default: {DEFAULT_SYSTEM})")
        p.add_argument("--d-min", type=float, default=SWEEP_D_MIN, help="first distance in metres")
        p.add_argument("--d-max", type=float, default=SWEEP_D_MAX, help="last distance in metres")
        p.add_argument("--d-step", type=float, default=SWEEP_D_STEP, help="distance step in metres")
        p.add_argument("--d-aux", type=float, default=None,
                       help="fixed auxiliary-channel distance (default: same as the main channel)")
        p.add_argument("--out", default=None, help="output CSV path (default: standard output)")

    def code_arg(p: argparse.ArgumentParser):
        p.add_argument("--code", nargs="+", default=_default_code_tokens(), metavar="ARG",
                       help="`mdpc N M` or `rs S K R` (default: mdpc 2 28)")
        p.add_argument("--seed", type=int, default=MC_DEFAULT_SEED, help="64-bit RNG seed")
        p.add_argument("--max-iter", type=int, default=MDPC_MAX_ITER,
                       help="MDPC decoder iteration limit")

    p = sub.add_parser("link-sweep", help="per-channel SNR, BER and data rate over distance")
    common(p)

    p = sub.add_parser("analyze", help="code rate, overhead, residual BER, block error, goodput")
    common(p)
    code_arg(p)
    p.add_argument("--optimize", action="store_true",
                   help="re-select m (MDPC) or K (RS) at every distance; M/K may then be omitted")
    p.add_argument("--m-cap", type=int, default=MDPC_M_CAP, help="largest MDPC side length considered")
    p.add_argument("--mc-blocks", type=int, default=0,
                   help="also run a Monte-Carlo campaign of this many blocks per distance")

    p = sub.add_parser("simulate", help="Monte-Carlo campaigns against the exact oracles")
    common(p)
    code_arg(p)
    p.add_argument("--p-main", type=float, default=None, help="main-channel bit error rate")
    p.add_argument("--p-aux", type=float, default=None, help="auxiliary-channel bit error rate")
    p.add_argument("--p-main-ser", type=float, default=None,
                   help="main-channel symbol error rate (RS codes), converted to a bit error rate")
    p.add_argument("--p-aux-ser", type=float, default=None,
                   help="auxiliary-channel symbol error rate (RS codes)")
    p.add_argument("--blocks", type=int, default=DEFAULT_SIM_BLOCKS, help="blocks per campaign")

    return ap


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_link_sweep(args, logger) -> str:
    layout = load_system(args.system)
    grid = distance_grid(args.d_min, args.d_max, args.d_step)
    df, meta = link_sweep_table(layout, grid, d_aux=args.d_aux, logger=logger)
    return write_csv(df, args.out, meta)


def cmd_analyze(args, logger) -> str:
    layout = load_system(args.system)
    grid = distance_grid(args.d_min, args.d_max, args.d_step)
    request = CodeRequest.parse(args.code)
    df, meta = analyze_table(
        layout, request, grid,
        d_aux=args.d_aux, optimize=args.optimize, m_cap=args.m_cap,
        mc_blocks=args.mc_blocks, seed=args.seed, max_iter=args.max_iter,
        logger=logger,
    )
    return write_csv(df, args.out, meta)


def _single_point(args, code) -> SimPoint:
    if (args.p_main is not None and args.p_main_ser is not None) or \
       (args.p_aux is not None and args.p_aux_ser is not None):
        raise ValueError("Give each channel either a bit or a symbol error rate, not both")

    s = getattr(code, "s", None)
    if (args.p_main_ser is not None or args.p_aux_ser is not None) and s is None:
        raise ValueError("Symbol error rates need an RS code")

    p_main = ber_from_ser(args.p_main_ser, s) if args.p_main_ser is not None else (args.p_main or 0.0)
    p_aux = ber_from_ser(args.p_aux_ser, s) if args.p_aux_ser is not None else (args.p_aux or 0.0)
    return SimPoint(p_main, p_aux)


def cmd_simulate(args, logger) -> str:
    code = CodeRequest.parse(args.code).build()
    given = (args.p_main, args.p_aux, args.p_main_ser, args.p_aux_ser)
    if any(p is not None for p in given):
        points = [_single_point(args, code)]
    else:
        layout = load_system(args.system)
        grid = distance_grid(args.d_min, args.d_max, args.d_step)
        points = points_from_grid(layout, grid, d_aux=args.d_aux)

    df, meta = simulate_table(code, points, args.blocks, seed=args.seed,
                              max_iter=args.max_iter, logger=logger)
    return write_csv(df, args.out, meta)


COMMANDS = {
    "link-sweep": cmd_link_sweep,
    "analyze":    cmd_analyze,
    "simulate":   cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logger = get_logger("thzfec.cli")

    try:
        dest = COMMANDS[args.command](args, logger)
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    logger.info(f"{args.command}: wrote {dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
