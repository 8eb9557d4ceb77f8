"""
complete_evaluation_flow.py
---------------------------
Every table of the evaluation in one run:

  - per-channel BER over distance for the two-channel system and for both
    reference systems in their BPSK and 16QAM variants
  - fixed-code analysis of MDPC(2D/28L) and RS(240,224)
  - optimized MDPC (n=2) and RS (s=8, t=1) parameters over distance
  - goodput of the coded two-channel system against the uncoded references

The trend validator runs over the result before the summary artifact is
published.

    python -m flows.complete_evaluation_flow
"""

from prefect import flow, get_run_logger
from prefect.artifacts import create_markdown_artifact

from utils.analytics import code_rate
from utils.config import SWEEP_D_MAX, SWEEP_D_MIN, SWEEP_D_STEP, ensure_dirs
from utils.results_archive import new_run_id, run_and_archive
from utils.sweep_runner import (
    CodeRequest, analyze_table, distance_grid, goodput_table, link_sweep_table,
)
from utils.systems import get_system
from utils.trend_validator import validate_sweep_trends

LINK_SYSTEMS = {
    "link_main_aux":          "main-aux",
    "link_ref_5x2g16_bpsk":   "ref-5x2.16",
    "link_ref_5x2g16_qam16":  "ref-5x2.16-qam16",
    "link_ref_1x10g80_qam16": "ref-1x10.80",
    "link_ref_1x10g80_bpsk":  "ref-1x10.80-bpsk",
}

ANALYSES = {
    "analyze_mdpc_2d_28l":  ("mdpc 2 28", False),
    "analyze_rs_240_224":   ("rs 8 224 16", False),
    "optimize_mdpc_2d":     ("mdpc 2", True),
    "optimize_rs_s8_t1":    ("rs 8 2", True),
}


@flow(name="complete_evaluation_flow")
def complete_evaluation_flow(d_min: float = SWEEP_D_MIN,
                             d_max: float = SWEEP_D_MAX,
                             d_step: float = SWEEP_D_STEP,
                             d_aux: float | None = None,
                             fail_on_issues: bool = True) -> dict:
    logger = get_run_logger()
    ensure_dirs()

    grid = distance_grid(d_min, d_max, d_step)
    main_aux = get_system("main-aux")
    run_id = new_run_id("evaluation")
    logger.info(f"Full evaluation over {len(grid)} distances, run {run_id}")

    builders = {}
    for name, system in LINK_SYSTEMS.items():
        layout = get_system(system)
        builders[name] = lambda layout=layout: link_sweep_table(layout, grid, d_aux=d_aux, logger=logger)

    for name, (code, optimize) in ANALYSES.items():
        request = CodeRequest.parse(code.split())
        builders[name] = lambda request=request, optimize=optimize: analyze_table(
            main_aux, request, grid, d_aux=d_aux, optimize=optimize, logger=logger,
        )

    mdpc_rate = code_rate(28 ** 2, 29 ** 2 - 28 ** 2)
    builders["goodput"] = lambda: goodput_table(
        [main_aux] + [get_system(s) for s in ("ref-5x2.16", "ref-1x10.80")],
        grid, code_rates={"main-aux": mdpc_rate}, d_aux=d_aux, logger=logger,
    )

    outputs = run_and_archive(
        run_id, builders,
        parameters={"d_min": d_min, "d_max": d_max, "d_step": d_step, "d_aux": d_aux},
        logger=logger,
    )

    # ------------------------------------------------------------------
    # Trend checks
    # ------------------------------------------------------------------
    report = validate_sweep_trends(
        link_df=outputs["link_main_aux"].frame,
        bpsk_df=outputs["link_ref_5x2g16_bpsk"].frame,
        qam_df=outputs["link_ref_5x2g16_qam16"].frame,
        mdpc_opt_df=outputs["optimize_mdpc_2d"].frame,
        rs_opt_df=outputs["optimize_rs_s8_t1"].frame,
        fail_on_issues=fail_on_issues,
    )

    # ------------------------------------------------------------------
    # Summary artifact
    # ------------------------------------------------------------------
    good = outputs["goodput"].frame
    near = good[good["d_main_m"] == good["d_main_m"].min()]
    goodput_lines = "\n".join(
        f"| {r.label} | {r.code_rate:.4f} | {r.goodput_all_bps / 1e9:.2f} | {r.goodput_information_bps / 1e9:.2f} |"
        for r in near.itertuples()
    )
    table_lines = "\n".join(f"| {name} | {t.rows} |" for name, t in outputs.items())

    create_markdown_artifact(
        key="thz-fec-evaluation",
        markdown=f"""# THz two-channel FEC evaluation
Run `{run_id}`, distances {grid[0]} m to {grid[-1]} m ({len(grid)} points).
Trend validation: **{report['overall_status']}** ({report['checks_run']} checks).

## Goodput at {near['d_main_m'].iloc[0]} m

| System | Code rate | Goodput, all channels (Gbps) | Goodput, information channels (Gbps) |
|---|---|---|---|
{goodput_lines}

## Tables

| Table | Rows |
|---|---|
{table_lines}
""",
        description="Full evaluation summary",
    )

    return {
        "run_id": run_id,
        "tables": {name: t.path for name, t in outputs.items()},
        "trend_status": report["overall_status"],
    }


if __name__ == "__main__":
    complete_evaluation_flow()
