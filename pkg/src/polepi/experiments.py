"""Campaign definitions and the parallel sweep runner.

A campaign is a cartesian grid of parameter overrides times a replicate
count. Each run's seed is derived from (base_seed, replicate, grid
point), so results are independent of worker count and execution order.
Rows are appended to `runs.csv` as they complete (making interrupted
campaigns resumable) and the file is rewritten in canonical order when
the campaign finishes, so reruns are byte-comparable.

The runs CSV carries the engine schema prefixed with a `params_digest`
column, which together with the seed keys the idempotent resume logic.
"""

from __future__ import annotations

import json
import multiprocessing
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Callable, Optional

from pydantic import BaseModel, Field, ValidationError

import polepi
from polepi.analysis import aggregate, log_pairs, pearson
from polepi.engine import (
    CSV_COLUMNS,
    Params,
    derive_seed,
    format_value,
    graph_seed_for,
    params_digest,
    record_rows,
    run,
)
from polepi.errors import ConfigError, UndefinedMetricError, config_error_from_validation
from polepi.graph import cached_holme_kim

RUNS_COLUMNS = ["params_digest"] + CSV_COLUMNS

CAMPAIGN_NAMES = (
    "gamma-sweep",
    "scenario-mild",
    "scenario-severe",
    "heatmap",
    "epsilon-calibration",
)

# scenario parameter bundles: (beta, mu, epi_interval)
SCENARIOS = {
    "mild": (0.005, 0.1, 1),
    "severe": (0.05, 0.01, 10),
}

_DESK_REPLICATES = {
    "gamma-sweep": 10,
    "scenario-mild": 10,
    "scenario-severe": 10,
    "heatmap": 10,
    "epsilon-calibration": 5,
}
_FULL_REPLICATES = {
    "gamma-sweep": 100,
    "scenario-mild": 100,
    "scenario-severe": 100,
    "heatmap": 10,
    "epsilon-calibration": 10,
}


def gamma_grid() -> list[float]:
    """0 to 1 in steps of 0.02 (51 values)."""
    return [round(0.02 * i, 2) for i in range(51)]


def coarse_gamma_grid() -> list[float]:
    """0 to 1 in steps of 0.2 (6 values), for calibration sweeps."""
    return [round(0.2 * i, 1) for i in range(6)]


def heatmap_beta_grid() -> list[float]:
    """0.001 to 0.05 in steps of 0.001 (50 values)."""
    return [round(0.001 * i, 3) for i in range(1, 51)]


def heatmap_gamma_grid() -> list[float]:
    """0 to 1 in steps of 0.1 (11 values)."""
    return [round(0.1 * i, 1) for i in range(11)]


def apply_overrides(p: Params, overrides: dict) -> Params:
    """Return params with dotted-path overrides applied and re-validated."""
    if not overrides:
        return p
    data = p.model_dump()
    for path, value in overrides.items():
        parts = path.split(".")
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown parameter path: {path}")
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError(f"unknown parameter path: {path}")
        node[parts[-1]] = value
    try:
        return Params.model_validate(data)
    except ValidationError as exc:
        raise config_error_from_validation(exc) from exc


class SweepSpec(BaseModel):
    """One campaign: a grid of overrides, replicates, and seeding."""

    model_config = {"frozen": True}

    name: str
    base: Params = Params()
    axes: tuple[tuple[str, tuple[float, ...]], ...] = ()
    replicates: int = Field(default=10, ge=1)
    base_seed: int = Field(default=0, ge=0, lt=2**64)
    workers: Optional[int] = Field(default=None, ge=1)
    shared_graph: bool = False
    grid_offset: int = Field(default=0, ge=0)

    def grid(self) -> list[dict]:
        """Override dicts in row-major axis order."""
        if not self.axes:
            return [{}]
        paths = [axis[0] for axis in self.axes]
        value_lists = [axis[1] for axis in self.axes]
        return [dict(zip(paths, combo)) for combo in product(*value_lists)]

    def total_runs(self) -> int:
        return len(self.grid()) * self.replicates


@dataclass(frozen=True)
class RunTask:
    grid_index: int
    run_index: int
    params: Params
    digest: str


def plan_runs(spec: SweepSpec) -> list[RunTask]:
    """Fully resolved per-run parameter sets, with derived seeds."""
    tasks = []
    for gi, overrides in enumerate(spec.grid()):
        grid_index = spec.grid_offset + gi
        with_grid = apply_overrides(spec.base, overrides)
        for ri in range(spec.replicates):
            seed = derive_seed(spec.base_seed, ri, grid_index)
            update: dict = {"seed": seed}
            if not spec.shared_graph:
                update["graph"] = with_grid.graph.model_copy(
                    update={"seed": graph_seed_for(seed)}
                )
            p = with_grid.model_copy(update=update)
            tasks.append(RunTask(grid_index, ri, p, params_digest(p)))
    return tasks


def execute_run(params: Params) -> list[str]:
    """Run one simulation and return its final-state CSV row (digest-prefixed)."""
    g = cached_holme_kim(params.graph)
    rec = run(g, params)
    row = record_rows(params, rec)[-1]
    return [rec.params_digest] + row


def _worker(params_json: str) -> list[str]:
    return execute_run(Params.model_validate_json(params_json))


def _row_sort_key(row: list[str]):
    # canonical order: grid tuple (gamma, beta, mu, epsilon, epi_interval), then seed, step
    return (
        float(row[1]),
        float(row[2]),
        float(row[3]),
        float(row[4]),
        int(row[5]),
        int(row[6]),
        int(row[7]),
    )


def _read_rows(path: Path) -> list[list[str]]:
    rows = []
    with path.open() as fh:
        header = fh.readline().strip()
        if header != ",".join(RUNS_COLUMNS):
            raise ConfigError(f"{path}: unexpected header; not a campaign runs file")
        for line in fh:
            line = line.strip()
            if line:
                rows.append(line.split(","))
    return rows


def _write_canonical(path: Path, rows: list[list[str]]) -> None:
    unique = {(r[0], r[6]): r for r in rows}
    ordered = sorted(unique.values(), key=_row_sort_key)
    tmp = path.with_suffix(".tmp")
    with tmp.open("w") as fh:
        fh.write(",".join(RUNS_COLUMNS) + "\n")
        for r in ordered:
            fh.write(",".join(r) + "\n")
    os.replace(tmp, path)


@dataclass
class CampaignResult:
    spec: SweepSpec
    rows: list[dict]
    csv_path: Path
    manifest_path: Path
    extra_paths: dict


def _rows_to_dicts(rows: list[list[str]]) -> list[dict]:
    out = []
    for r in rows:
        d = {"params_digest": r[0]}
        for col, cell in zip(CSV_COLUMNS, r[1:]):
            d[col] = int(cell) if col in ("epi_interval", "seed", "step") else float(cell)
        out.append(d)
    return out


def run_sweep(
    spec: SweepSpec,
    out_dir: str | Path,
    progress: Optional[Callable[[int, int], None]] = None,
) -> tuple[list[list[str]], Path]:
    """Execute (or resume) a sweep, returning all raw rows and the CSV path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "runs.csv"

    tasks = plan_runs(spec)
    existing: list[list[str]] = []
    if csv_path.exists():
        existing = _read_rows(csv_path)
    done_keys = {(r[0], r[6]) for r in existing}
    pending = [t for t in tasks if (t.digest, str(t.params.seed)) not in done_keys]

    total = len(tasks)
    completed = total - len(pending)
    if progress:
        progress(completed, total)

    new_rows: list[list[str]] = []
    if pending:
        workers = spec.workers or os.cpu_count() or 1
        append = csv_path.open("a")
        if not existing and csv_path.stat().st_size == 0:
            append.write(",".join(RUNS_COLUMNS) + "\n")
        try:
            if workers == 1:
                for task in pending:
                    row = execute_run(task.params)
                    new_rows.append(row)
                    append.write(",".join(row) + "\n")
                    append.flush()
                    completed += 1
                    if progress:
                        progress(completed, total)
            else:
                ctx = multiprocessing.get_context("spawn")
                with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                    futures = {
                        pool.submit(_worker, t.params.model_dump_json()): t for t in pending
                    }
                    not_done = set(futures)
                    while not_done:
                        finished, not_done = wait(not_done, return_when=FIRST_COMPLETED)
                        for fut in finished:
                            row = fut.result()
                            new_rows.append(row)
                            append.write(",".join(row) + "\n")
                            append.flush()
                            completed += 1
                            if progress:
                                progress(completed, total)
        finally:
            append.close()

    all_rows = existing + new_rows
    _write_canonical(csv_path, all_rows)
    return _read_rows(csv_path), csv_path


def _write_manifest(out_dir: Path, specs: list[SweepSpec], profile: str) -> Path:
    manifest = {
        "campaign": specs[0].name,
        "profile": profile,
        "version": polepi.__version__,
        "columns": RUNS_COLUMNS,
        "sweeps": [
            {
                "base_params": s.base.model_dump(mode="json"),
                "axes": [[path, list(values)] for path, values in s.axes],
                "replicates": s.replicates,
                "base_seed": s.base_seed,
                "shared_graph": s.shared_graph,
                "grid_offset": s.grid_offset,
                "total_runs": s.total_runs(),
            }
            for s in specs
        ],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def build_sweep_specs(
    name: str,
    profile: str = "desk",
    base_seed: int = 0,
    workers: Optional[int] = None,
    replicates: Optional[int] = None,
    overrides: Optional[dict] = None,
    shared_graph: bool = False,
) -> list[SweepSpec]:
    """Sweep definitions for a named campaign (two for epsilon-calibration)."""
    if name not in CAMPAIGN_NAMES:
        raise ConfigError(
            f"unknown campaign {name!r}; valid names: {', '.join(CAMPAIGN_NAMES)}"
        )
    if profile not in ("desk", "full"):
        raise ConfigError(f"unknown profile {profile!r}; valid profiles: desk, full")
    reps = replicates or (_DESK_REPLICATES if profile == "desk" else _FULL_REPLICATES)[name]
    base = apply_overrides(Params(), overrides or {})
    common = dict(
        replicates=reps, base_seed=base_seed, workers=workers, shared_graph=shared_graph
    )

    if name == "gamma-sweep":
        return [
            SweepSpec(
                name=name,
                base=base,
                axes=(("info.gamma", tuple(gamma_grid())),),
                **common,
            )
        ]
    if name in ("scenario-mild", "scenario-severe"):
        beta, mu, interval = SCENARIOS[name.split("-", 1)[1]]
        scen_base = apply_overrides(
            base, {"epi.beta": beta, "epi.mu": mu, "epi_interval": interval}
        )
        return [
            SweepSpec(
                name=name,
                base=scen_base,
                axes=(("info.gamma", tuple(gamma_grid())),),
                **common,
            )
        ]
    if name == "heatmap":
        hm_base = apply_overrides(base, {"epi.mu": 0.1, "steps": 5000, "epi_interval": 1})
        return [
            SweepSpec(
                name=name,
                base=hm_base,
                axes=(
                    ("epi.beta", tuple(heatmap_beta_grid())),
                    ("info.gamma", tuple(heatmap_gamma_grid())),
                ),
                **common,
            )
        ]
    # epsilon-calibration: one sub-sweep per scenario, disjoint grid indices
    eps_values = (0.0, 0.25, 0.5, 0.75, 1.0)
    specs = []
    offset = 0
    for scen in ("mild", "severe"):
        beta, mu, interval = SCENARIOS[scen]
        scen_base = apply_overrides(
            base, {"epi.beta": beta, "epi.mu": mu, "epi_interval": interval}
        )
        axes = (
            ("epi.epsilon", eps_values),
            ("info.gamma", tuple(coarse_gamma_grid())),
        )
        specs.append(
            SweepSpec(name=name, base=scen_base, axes=axes, grid_offset=offset, **common)
        )
        offset += len(specs[-1].grid())
    return specs


def write_heatmap_cells(rows: list[dict], out_dir: Path) -> Path:
    """Per-(beta, gamma) mean infected fraction for the heatmap figure."""
    aggs = aggregate(rows, keys=("beta", "gamma"))
    path = out_dir / "cells.csv"
    lines = ["beta,gamma,rho_i_mean,rho_i_std,n"]
    for a in aggs:
        lines.append(
            ",".join(
                [
                    format_value(a.key[0]),
                    format_value(a.key[1]),
                    format_value(a.rho_i_mean),
                    format_value(a.rho_i_std),
                    str(a.n),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def scenario_of_row(row: dict) -> Optional[str]:
    for scen, (beta, mu, interval) in SCENARIOS.items():
        if row["beta"] == beta and row["mu"] == mu and row["epi_interval"] == interval:
            return scen
    return None


def write_epsilon_report(rows: list[dict], out_dir: Path) -> Path:
    """Sign of the log psi vs log rho_i correlation per (epsilon, scenario)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        scen = scenario_of_row(row)
        if scen is not None:
            groups.setdefault((row["epsilon"], scen), []).append(row)
    lines = ["epsilon,scenario,r_log_psi_log_rho_i,sign,n,dropped"]
    for (eps, scen) in sorted(groups):
        aggs = aggregate(groups[(eps, scen)], keys=("gamma",))
        psi = [a.psi_mean for a in aggs]
        rho_i = [a.rho_i_mean for a in aggs]
        try:
            lx, ly, dropped = log_pairs(psi, rho_i)
            r = pearson(lx, ly)
            sign = "positive" if r > 0 else "negative" if r < 0 else "zero"
            cells = [format_value(eps), scen, format_value(r), sign, str(len(lx)), str(dropped)]
        except UndefinedMetricError:
            cells = [format_value(eps), scen, "", "undefined", "0", "0"]
        lines.append(",".join(cells))
    path = out_dir / "epsilon_report.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def run_campaign(
    name: str,
    out_dir: str | Path,
    profile: str = "desk",
    base_seed: int = 0,
    workers: Optional[int] = None,
    replicates: Optional[int] = None,
    overrides: Optional[dict] = None,
    shared_graph: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
) -> CampaignResult:
    """Build and execute a named campaign, writing runs.csv, manifest and extras."""
    specs = build_sweep_specs(
        name,
        profile=profile,
        base_seed=base_seed,
        workers=workers,
        replicates=replicates,
        overrides=overrides,
        shared_graph=shared_graph,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    total = sum(s.total_runs() for s in specs)
    done_so_far = 0
    raw: list[list[str]] = []
    csv_path = out_dir / "runs.csv"
    for spec in specs:
        base_done = done_so_far

        def sub_progress(done, _sub_total, base=base_done):
            if progress:
                progress(base + done, total)

        raw, csv_path = run_sweep(spec, out_dir, progress=sub_progress)
        done_so_far = base_done + spec.total_runs()

    manifest_path = _write_manifest(out_dir, specs, profile)
    rows = _rows_to_dicts(raw)
    extra_paths = {}
    if name == "heatmap":
        extra_paths["cells"] = write_heatmap_cells(rows, out_dir)
    if name == "epsilon-calibration":
        extra_paths["epsilon_report"] = write_epsilon_report(rows, out_dir)
    return CampaignResult(specs[0], rows, csv_path, manifest_path, extra_paths)


def campaign_gamma_sweep(out_dir, **kwargs) -> CampaignResult:
    return run_campaign("gamma-sweep", out_dir, **kwargs)


def campaign_scenarios(out_root, **kwargs) -> tuple[CampaignResult, CampaignResult]:
    """Mild and severe sweeps over the same gamma grid."""
    out_root = Path(out_root)
    mild = run_campaign("scenario-mild", out_root / "scenario-mild", **kwargs)
    severe = run_campaign("scenario-severe", out_root / "scenario-severe", **kwargs)
    return mild, severe


def campaign_heatmap(out_dir, **kwargs) -> CampaignResult:
    return run_campaign("heatmap", out_dir, **kwargs)


def campaign_epsilon_calibration(out_dir, **kwargs) -> CampaignResult:
    return run_campaign("epsilon-calibration", out_dir, **kwargs)
