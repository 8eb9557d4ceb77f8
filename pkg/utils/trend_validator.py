"""
trend_validator.py
------------------
Checks sweep tables for the trends the link and code models must show:

  - BER never decreases with distance, per channel
  - BPSK BER <= 16QAM BER at equal power, bandwidth and distance
  - optimized code rate never increases (and overhead never decreases)
    with distance, for MDPC and RS
  - optimized RS code rate >= optimized MDPC code rate wherever both are
    feasible and limited by the error budget rather than a length cap

All comparisons are exact. A check only runs when its tables are given.

Usage as Prefect task (in a flow):
    from utils.trend_validator import validate_sweep_trends
    report = validate_sweep_trends(link_df=df, fail_on_issues=True)

From CLI, on CSVs written by the sweep commands:
    python -m utils.trend_validator --link results/csv/<run>/link_main_aux.csv
    python -m utils.trend_validator --mdpc-opt mdpc.csv --rs-opt rs.csv --fail-on-issues
"""

import argparse
import json
from datetime import datetime

import pandas as pd

from utils.config import REPORT_DIR
from utils.results_archive import read_csv


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def _first_violations(mask: pd.Series, df: pd.DataFrame, cols: list[str], limit: int = 5) -> list[dict]:
    return df.loc[mask, cols].head(limit).to_dict(orient="records")


def _check_ber_monotone(link_df: pd.DataFrame) -> dict:
    bad_slots = {}
    for slot, grp in link_df.groupby("slot", sort=True):
        grp = grp.sort_values("distance_m")
        drops = grp["ber"].diff() < 0
        if drops.any():
            bad_slots[slot] = _first_violations(drops, grp, ["distance_m", "ber"])
    return {
        "channels": int(link_df["slot"].nunique()),
        "violations_count": sum(len(v) for v in bad_slots.values()),
        "violations": bad_slots,
    }


def _check_modulation_order(bpsk_df: pd.DataFrame, qam_df: pd.DataFrame) -> dict:
    merged = bpsk_df.merge(qam_df, on=["d_main_m", "slot"], suffixes=("_bpsk", "_qam"))
    worse = merged["ber_bpsk"] > merged["ber_qam"]
    return {
        "points": len(merged),
        "violations_count": int(worse.sum()),
        "violations": _first_violations(worse, merged, ["d_main_m", "slot", "ber_bpsk", "ber_qam"]),
    }


def _check_rate_trend(df: pd.DataFrame) -> dict:
    df = df.sort_values("d_main_m")
    rises = df["code_rate"].diff() > 0
    falls = df["overhead"].diff() < 0
    return {
        "points": len(df),
        "code_rate_increases": int(rises.sum()),
        "overhead_decreases": int(falls.sum()),
        "violations": _first_violations(rises | falls, df, ["d_main_m", "code", "code_rate"]),
    }


def _check_rs_over_mdpc(rs_df: pd.DataFrame, mdpc_df: pd.DataFrame) -> dict:
    merged = rs_df.merge(mdpc_df, on="d_main_m", suffixes=("_rs", "_mdpc"))
    comparable = (~merged["infeasible_rs"] & ~merged["infeasible_mdpc"]
                  & ~merged["length_capped_rs"] & ~merged["length_capped_mdpc"])
    lower = comparable & (merged["code_rate_rs"] < merged["code_rate_mdpc"])
    return {
        "points": len(merged),
        "compared": int(comparable.sum()),
        "violations_count": int(lower.sum()),
        "violations": _first_violations(lower, merged, ["d_main_m", "code_rate_rs", "code_rate_mdpc"]),
    }


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def build_report(link_df: pd.DataFrame | None = None,
                 bpsk_df: pd.DataFrame | None = None,
                 qam_df: pd.DataFrame | None = None,
                 mdpc_opt_df: pd.DataFrame | None = None,
                 rs_opt_df: pd.DataFrame | None = None) -> dict:
    checks = {}
    issues = []

    for name, df in (("link", link_df), ("bpsk", bpsk_df), ("qam", qam_df)):
        if df is not None:
            c = _check_ber_monotone(df)
            checks[f"ber_monotone_{name}"] = c
            if c["violations_count"]:
                issues.append(f"{name}: BER drops with distance at {c['violations_count']} point(s)")

    if bpsk_df is not None and qam_df is not None:
        c = _check_modulation_order(bpsk_df, qam_df)
        checks["bpsk_not_worse_than_qam16"] = c
        if c["violations_count"]:
            issues.append(f"BPSK BER above 16QAM BER at {c['violations_count']} point(s)")

    for name, df in (("mdpc", mdpc_opt_df), ("rs", rs_opt_df)):
        if df is not None:
            c = _check_rate_trend(df)
            checks[f"rate_trend_{name}"] = c
            if c["code_rate_increases"]:
                issues.append(f"{name}: code rate increases with distance at {c['code_rate_increases']} point(s)")
            if c["overhead_decreases"]:
                issues.append(f"{name}: overhead decreases with distance at {c['overhead_decreases']} point(s)")

    if mdpc_opt_df is not None and rs_opt_df is not None:
        c = _check_rs_over_mdpc(rs_opt_df, mdpc_opt_df)
        checks["rs_rate_not_below_mdpc"] = c
        if c["violations_count"]:
            issues.append(f"RS code rate below MDPC at {c['violations_count']} comparable point(s)")

    return {
        "validated_at":   datetime.now().isoformat(),
        "checks_run":     len(checks),
        "overall_status": "PASS" if not issues else "FAIL",
        "issues":         issues,
        "checks":         checks,
    }


def save_report(report: dict, prefix: str = "trends") -> str:
    REPORT_DIR.mkdir(parents=True, exist_ok=True)
    ts = datetime.now().strftime("%Y%m%d_%H%M%S")
    path = REPORT_DIR / f"{prefix}_{ts}.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, ensure_ascii=False, default=str)
    return str(path)


def print_summary(report: dict):
    print(f"\n{'='*60}")
    print(f"  Trend validation  {report['overall_status']}  |  {report['checks_run']} check(s)")
    print(f"{'='*60}")
    for name, c in report["checks"].items():
        count = c.get("violations_count", c.get("code_rate_increases", 0) + c.get("overhead_decreases", 0))
        print(f"  {name:<28} violations: {count}")
    if report["issues"]:
        print(f"\n  Issues:")
        for i in report["issues"]:
            print(f"    - {i}")
    print(f"{'='*60}\n")


# ---------------------------------------------------------------------------
# Prefect task wrapper
# ---------------------------------------------------------------------------

try:
    from prefect import task, get_run_logger

    @task(name="validate_sweep_trends", retries=0)
    def validate_sweep_trends(link_df: pd.DataFrame | None = None,
                              bpsk_df: pd.DataFrame | None = None,
                              qam_df: pd.DataFrame | None = None,
                              mdpc_opt_df: pd.DataFrame | None = None,
                              rs_opt_df: pd.DataFrame | None = None,
                              fail_on_issues: bool = True) -> dict:
        """
        Prefect task - checks the sweep tables for the expected trends.
        Set fail_on_issues=True to fail the run on any violation.
        """
        logger = get_run_logger()
        report = build_report(link_df, bpsk_df, qam_df, mdpc_opt_df, rs_opt_df)
        report_path = save_report(report)
        logger.info(f"Trend report saved: {report_path}")

        for issue in report["issues"]:
            logger.error(f"Trend issue: {issue}")

        if report["overall_status"] == "PASS":
            logger.info(f"Trend validation PASSED - {report['checks_run']} check(s)")
        else:
            msg = f"Trend validation FAILED - {len(report['issues'])} issue(s)"
            logger.error(msg)
            if fail_on_issues:
                raise ValueError(msg)
        return report

except ImportError:
    # Allow running without Prefect installed (CLI mode)
    def validate_sweep_trends(link_df=None, bpsk_df=None, qam_df=None,
                              mdpc_opt_df=None, rs_opt_df=None,
                              fail_on_issues: bool = True) -> dict:
        report = build_report(link_df, bpsk_df, qam_df, mdpc_opt_df, rs_opt_df)
        if fail_on_issues and report["overall_status"] == "FAIL":
            raise ValueError(f"Trend validation FAILED - {len(report['issues'])} issue(s)")
        return report


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="Sweep trend validator")
    ap.add_argument("--link", help="link-sweep CSV, checked for BER monotonicity")
    ap.add_argument("--bpsk", help="link-sweep CSV of a BPSK system")
    ap.add_argument("--qam", help="link-sweep CSV of the same system with 16QAM")
    ap.add_argument("--mdpc-opt", help="analyze --optimize CSV for an MDPC code")
    ap.add_argument("--rs-opt", help="analyze --optimize CSV for an RS code")
    ap.add_argument("--fail-on-issues", action="store_true", default=False)
    args = ap.parse_args()

    def _load(path):
        return read_csv(path)[0] if path else None

    tables = [_load(p) for p in (args.link, args.bpsk, args.qam, args.mdpc_opt, args.rs_opt)]
    if all(t is None for t in tables):
        ap.print_help()
        raise SystemExit(2)

    report = build_report(*tables)
    report_path = save_report(report)
    print_summary(report)
    print(f"Full report: {report_path}")

    if args.fail_on_issues and report["overall_status"] == "FAIL":
        raise SystemExit(1)
