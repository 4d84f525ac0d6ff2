"""
Artifact plumbing behind the CLI: run a configured construction into a trace file,
verify a trace against its config, and sweep a parameter grid.

Every command returns an exit code (0 success, 1 verification failure, 2 I/O or
configuration error) together with what it produced.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
import uuid
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import RunConfig, SweepGrid, config_digest, load_run_config, load_sweep_grid, settings
from .construction import PriorityConstruction
from .errors import ConfigError, SimulationError
from .trace import TraceHeader, parse_line
from .verifier import CheckStatus, VerifierReport, verify_trace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2


class RunManifest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    config_digest: str = Field(alias="configDigest")
    config_path: Optional[str] = Field(default=None, alias="configPath")
    horizon: int
    max_depth: int = Field(alias="maxDepth")
    seed: int
    trace_path: Optional[str] = Field(default=None, alias="tracePath")
    report_path: Optional[str] = Field(default=None, alias="reportPath")
    wall_clock: float = Field(alias="wallClock")
    stages: int
    events: int  # trace lines, header included
    initializations: int

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


def execute_run(config: RunConfig, trace_path: Path, digest: str,
                config_path: Optional[str] = None) -> RunManifest:
    """Run the construction streaming its trace to trace_path; OSError propagates"""
    trace_path.parent.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    with open(trace_path, "w", encoding="utf-8") as sink:
        construction = PriorityConstruction(config, sink).run()
    return RunManifest(
        config_digest=digest,
        config_path=config_path,
        horizon=config.horizon,
        max_depth=config.max_depth,
        seed=config.seed,
        trace_path=str(trace_path),
        wall_clock=round(time.perf_counter() - started, 4),
        stages=config.horizon,
        events=len(construction.trace),
        initializations=construction.initializations,
    )


def _persist_run(manifest: RunManifest, status: str, verdicts: Optional[Dict[str, Any]] = None) -> Optional[str]:
    if not settings.persist_runs:
        return None
    from .database import create_tables, record_run

    create_tables()
    fields = manifest.model_dump(by_alias=False)
    fields.update(status=status, verdicts=verdicts)
    return record_run(fields)


def cmd_run(config_path: Path, trace_out: Path, seed: Optional[int] = None) -> Tuple[int, Optional[RunManifest]]:
    try:
        config, digest = load_run_config(config_path)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_IO, None
    if seed is not None:
        config = config.with_seed(seed)

    logger.info(f"🚀 Run {config_path} → {trace_out} (seed {config.seed})")
    try:
        manifest = execute_run(config, Path(trace_out), digest, str(config_path))
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_IO, None
    except OSError as e:
        logger.error(f"❌ Cannot write trace {trace_out}: {e}")
        return EXIT_IO, None

    _persist_run(manifest, "ok")
    logger.info(f"✅ {manifest.events} trace lines in {manifest.wall_clock}s")
    return EXIT_OK, manifest


def _header_seed(lines: List[str]) -> Optional[int]:
    if not lines or not lines[0].startswith("HDR"):
        return None
    try:
        header = parse_line(lines[0], 1)
    except SimulationError:
        return None
    return header.seed if isinstance(header, TraceHeader) else None


def cmd_verify(trace_path: Path, config_path: Path,
               report_out: Optional[Path] = None) -> Tuple[int, Optional[VerifierReport]]:
    try:
        lines = Path(trace_path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        logger.error(f"❌ Cannot read trace {trace_path}: {e}")
        return EXIT_IO, None
    try:
        config, _ = load_run_config(config_path)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_IO, None

    # a `run --seed` override lives only in the trace header
    seed = _header_seed(lines)
    if seed is not None and seed != config.seed:
        logger.info(f"Using trace seed {seed} instead of config seed {config.seed}")
        config = config.with_seed(seed)

    report = verify_trace(lines, config)
    if report_out is not None:
        try:
            Path(report_out).parent.mkdir(parents=True, exist_ok=True)
            Path(report_out).write_text("\n".join(report.to_lines()) + "\n", encoding="utf-8")
        except OSError as e:
            logger.error(f"❌ Cannot write report {report_out}: {e}")
            return EXIT_IO, report
    status = "FAIL" if report.failed else "ok"
    logger.info(f"{'❌' if report.failed else '✅'} Verification of {trace_path}: {status}")
    return report.exit_code, report


# -- sweeps -------------------------------------------------------------------


def sweep_cells(grid: SweepGrid) -> List[Tuple[str, str, Dict[str, Any]]]:
    """(label, mix, run-config dict) for every point of the grid, in a fixed order"""
    cells = []
    for depth, horizon, (mix, adversaries), seed in itertools.product(
            grid.max_depth, grid.horizon, sorted(grid.mixes.items()), grid.seeds):
        data = {
            "maxDepth": depth,
            "horizon": horizon,
            "seed": seed,
            "budget": grid.budget,
            "adversaries": [a.model_dump() for a in adversaries],
            "kScript": [list(entry) for entry in grid.k_script],
            "kMode": grid.k_mode,
            "kToyLimit": grid.k_toy_limit,
        }
        cells.append((f"d{depth}-h{horizon}-{mix}-s{seed}", mix, data))
    return cells


def run_cell(label: str, mix: str, data: Dict[str, Any], out_dir: str, replay: bool = True) -> Dict[str, Any]:
    """One isolated sweep cell; module-level so worker processes can pickle it"""
    out = Path(out_dir)
    result: Dict[str, Any] = {"cell": label, "mix": mix, "status": "error", "failed": [], "bounds": {}}
    try:
        config = RunConfig.parse(data)
        digest = config_digest(json.dumps(data, sort_keys=True))
        trace_path = out / f"{label}.trace"
        manifest = execute_run(config, trace_path, digest)
        report = verify_trace(trace_path.read_text(encoding="utf-8").splitlines(), config, replay=replay)
    except (SimulationError, OSError) as e:
        logger.error(f"❌ Cell {label} failed to run: {e}")
        result["error"] = str(e)
        return result

    report_path = out / f"{label}.report"
    report_path.write_text("\n".join(report.to_lines()) + "\n", encoding="utf-8")
    manifest.report_path = str(report_path)
    (out / f"{label}.manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")

    bounds = report.check("bounds")
    outcomes = report.check("outcomes")
    result.update(
        status="FAIL" if report.failed else "ok",
        failed=[c.name for c in report.checks if c.status is CheckStatus.FAIL],
        bounds=dict(bounds.statistics) if bounds else {},
        verdicts=(outcomes.statistics.get("verdicts") if outcomes else None),
        manifest=manifest.model_dump(by_alias=False),
    )
    return result


def _row(values: List[Optional[int]], e: int) -> str:
    return str(values[e]) if e < len(values) and values[e] is not None else "-"


def aggregate_table(results: List[Dict[str, Any]]) -> str:
    """Per cell and per e: observed cycCount maximum and f'/g'/h' next to the closed forms"""
    rows = ["cell\tmix\tstatus\te\tmax_cyc\tcyc_bound\tf\tg\th\tclosed_f\tclosed_g\tfailed"]
    per_e: Dict[int, Dict[str, List[int]]] = {}
    for result in results:
        stats = result.get("bounds") or {}
        e_count = len(stats.get("f", []))
        if not e_count:
            rows.append(f"{result['cell']}\t{result['mix']}\t{result['status']}\t-\t-\t-\t-\t-\t-\t-\t-\t"
                        f"{','.join(result['failed']) or '-'}")
            continue
        for e in range(e_count):
            rows.append("\t".join([
                result["cell"], result["mix"], result["status"], str(e),
                _row(stats["max_cyc"], e), str(2 ** e),
                _row(stats["f"], e), _row(stats["g"], e), _row(stats["h"], e),
                _row(stats["closed_f"], e), _row(stats["closed_g"], e),
                ",".join(result["failed"]) or "-",
            ]))
            bucket = per_e.setdefault(e, {"max_cyc": [], "f": [], "g": [], "h": []})
            for key in bucket:
                if e < len(stats[key]) and stats[key][e] is not None:
                    bucket[key].append(stats[key][e])

    for e in sorted(per_e):
        bucket = per_e[e]
        maxima = {key: (str(int(np.max(np.asarray(values)))) if values else "-") for key, values in bucket.items()}
        rows.append(f"MAX\t*\t-\t{e}\t{maxima['max_cyc']}\t{2 ** e}\t{maxima['f']}\t{maxima['g']}\t{maxima['h']}\t-\t-\t-")
    return "\n".join(rows) + "\n"


def cmd_sweep(grid_path: Path, out_dir: Path) -> Tuple[int, Optional[str]]:
    try:
        grid = load_sweep_grid(grid_path)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_IO, None
    if grid.is_empty():
        logger.error(f"❌ Sweep grid {grid_path} has no cells")
        return EXIT_IO, None
    try:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"❌ Cannot create {out_dir}: {e}")
        return EXIT_IO, None

    cells = sweep_cells(grid)
    logger.info(f"🚀 Sweep of {len(cells)} cells with {grid.workers} worker(s)")
    args = [(label, mix, data, str(out_dir), grid.replay) for label, mix, data in cells]
    if grid.workers > 1:
        with ProcessPoolExecutor(max_workers=grid.workers) as pool:
            results = list(pool.map(run_cell, *zip(*args)))
    else:
        results = [run_cell(*a) for a in args]

    table = aggregate_table(results)
    try:
        (Path(out_dir) / "summary.tsv").write_text(table, encoding="utf-8")
    except OSError as e:
        logger.error(f"❌ Cannot write summary: {e}")
        return EXIT_IO, table

    if settings.persist_runs:
        _persist_sweep(results)

    bad = [r["cell"] for r in results if r["status"] != "ok"]
    if bad:
        logger.error(f"❌ {len(bad)}/{len(results)} cells failed: {', '.join(bad)}")
        return EXIT_FAIL, table
    logger.info(f"✅ Sweep finished: {len(results)} cells")
    return EXIT_OK, table


def _persist_sweep(results: List[Dict[str, Any]]) -> None:
    from .database import create_tables, record_run, record_sweep_cell

    create_tables()
    sweep_id = str(uuid.uuid4())
    for result in results:
        run_id = None
        if "manifest" in result:
            fields = dict(result["manifest"])
            fields.update(status=result["status"], verdicts=result.get("verdicts"))
            run_id = record_run(fields)
        stats = result.get("bounds") or {}
        record_sweep_cell({
            "sweep_id": sweep_id,
            "run_id": run_id,
            "cell": result["cell"],
            "mix": result["mix"],
            "status": result["status"],
            "max_cyc": stats.get("max_cyc"),
            "observed": {key: stats.get(key) for key in ("f", "g", "h")},
            "closed_forms": {"f": stats.get("closed_f"), "g": stats.get("closed_g")},
            "failed_checks": ",".join(result["failed"]) or None,
        })
