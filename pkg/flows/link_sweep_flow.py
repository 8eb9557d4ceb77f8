"""
link_sweep_flow.py
------------------
Per-channel SNR, BER and data rate of one system over the distance grid,
archived as CSV with a run manifest.

Execution:  Local Python via Prefect worker, or directly:
    python -m flows.link_sweep_flow --system ref-5x2.16
Monitoring: Prefect UI (logs, markdown artifact, run history)
"""

import argparse

from prefect import flow, get_run_logger
from prefect.artifacts import create_markdown_artifact

from utils.config import SWEEP_D_MAX, SWEEP_D_MIN, SWEEP_D_STEP, ensure_dirs
from utils.results_archive import new_run_id, run_and_archive
from utils.sweep_runner import distance_grid, link_sweep_table
from utils.systems import DEFAULT_SYSTEM, load_system
from utils.trend_validator import validate_sweep_trends


@flow(name="link_sweep_flow")
def link_sweep_flow(system: str = DEFAULT_SYSTEM,
                    d_min: float = SWEEP_D_MIN,
                    d_max: float = SWEEP_D_MAX,
                    d_step: float = SWEEP_D_STEP,
                    d_aux: float | None = None) -> dict:
    """
    Sweeps one system and checks that BER never falls with distance.

    Returns:
        {"run_id", "csv", "rows"}
    """
    logger = get_run_logger()
    ensure_dirs()

    layout = load_system(system)
    grid = distance_grid(d_min, d_max, d_step)
    run_id = new_run_id("link_sweep")
    logger.info(f"Link sweep {layout.name}: {len(grid)} distances, run {run_id}")

    outputs = run_and_archive(
        run_id,
        {"link_sweep": lambda: link_sweep_table(layout, grid, d_aux=d_aux, logger=logger)},
        parameters={"system": system, "d_min": d_min, "d_max": d_max,
                    "d_step": d_step, "d_aux": d_aux},
        logger=logger,
    )
    table = outputs["link_sweep"]
    validate_sweep_trends(link_df=table.frame, fail_on_issues=True)

    df = table.frame
    far = df[df["d_main_m"] == df["d_main_m"].max()]
    lines = "\n".join(
        f"| {r.slot} | {r.channel} | {r.modulation} | {r.snr_db:.2f} | {r.ber:.3e} | {r.data_rate_bps / 1e9:.2f} |"
        for r in far.itertuples()
    )
    create_markdown_artifact(
        key="link-sweep-summary",
        markdown=f"""# Link sweep: {layout.label}
Distances {grid[0]} m to {grid[-1]} m ({len(grid)} points), run `{run_id}`.

At the farthest distance:

| Slot | Channel | Modulation | SNR (dB) | BER | Data rate (Gbps) |
|---|---|---|---|---|---|
{lines}
""",
        description="Per-channel BER over distance",
    )

    return {"run_id": run_id, "csv": table.path, "rows": table.rows}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="Link sweep flow")
    ap.add_argument("--system", default=DEFAULT_SYSTEM)
    ap.add_argument("--d-min", type=float, default=SWEEP_D_MIN)
    ap.add_argument("--d-max", type=float, default=SWEEP_D_MAX)
    ap.add_argument("--d-step", type=float, default=SWEEP_D_STEP)
    ap.add_argument("--d-aux", type=float, default=None)
    args = ap.parse_args()
    link_sweep_flow(system=args.system, d_min=args.d_min, d_max=args.d_max,
                    d_step=args.d_step, d_aux=args.d_aux)
