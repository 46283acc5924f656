"""Statistical post-processing of sweep outputs.

Reads the runs CSV schema written by the campaign runner, aggregates per
parameter key, and computes the correlation/residual battery: log-log
polarisation vs infection correlation, polarisation vs awareness, and
both residual orientations against the infected fraction. Correlations
are evaluated on per-gamma means, one point per grid value.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from polepi.engine import CSV_COLUMNS, format_value
from polepi.errors import SchemaError, UndefinedMetricError

REPORT_COLUMNS = ["metric", "scenario", "value", "n", "dropped"]
AGG_COLUMNS = [
    "gamma",
    "beta",
    "mu",
    "epsilon",
    "psi_mean",
    "psi_std",
    "rho_a_mean",
    "rho_a_std",
    "rho_i_mean",
    "rho_i_std",
    "n",
]


def load_runs_csv(path: str | Path) -> list[dict]:
    """Parse a runs CSV, checking the documented schema."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        rows = []
        for raw in reader:
            row = {}
            for col in CSV_COLUMNS:
                if col in ("epi_interval", "seed", "step"):
                    row[col] = int(raw[col])
                else:
                    row[col] = float(raw[col])
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def parse_runs_text(text: str, label: str = "<inline>") -> list[dict]:
    """Same as load_runs_csv but over in-memory CSV text."""
    lines = text.splitlines()
    reader = csv.DictReader(lines)
    header = reader.fieldnames or []
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{label}: missing columns: {', '.join(missing)}")
    rows = []
    for raw in reader:
        row = {}
        for col in CSV_COLUMNS:
            if col in ("epi_interval", "seed", "step"):
                row[col] = int(raw[col])
            else:
                row[col] = float(raw[col])
        rows.append(row)
    if not rows:
        raise SchemaError(f"{label}: no data rows")
    return rows


def final_rows(rows: list[dict]) -> list[dict]:
    """Keep only the last sampled step of each (params, seed) trajectory."""
    latest: dict[tuple, dict] = {}
    for row in rows:
        key = (row["gamma"], row["beta"], row["mu"], row["epsilon"], row["epi_interval"], row["seed"])
        cur = latest.get(key)
        if cur is None or row["step"] > cur["step"]:
            latest[key] = row
    return list(latest.values())


def _mean_std(values: list[float]) -> tuple[float, float, int]:
    vals = [v for v in values if not math.isnan(v)]
    n = len(vals)
    if n == 0:
        return float("nan"), float("nan"), 0
    mean = math.fsum(vals) / n
    if n == 1:
        return mean, float("nan"), 1
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var), n


@dataclass(frozen=True)
class AggRow:
    key: tuple
    psi_mean: float
    psi_std: float
    rho_a_mean: float
    rho_a_std: float
    rho_i_mean: float
    rho_i_std: float
    n: int


def aggregate(rows: list[dict], keys: tuple[str, ...] = ("gamma",)) -> list[AggRow]:
    """Per-key means and sample standard deviations of psi, rho_a, rho_i.

    Only the final step of each run contributes. Output is sorted by key,
    so it is independent of input row order.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in final_rows(rows):
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    out = []
    for key in sorted(groups):
        grp = groups[key]
        psi = _mean_std([r["psi"] for r in grp])
        rho_a = _mean_std([r["rho_a"] for r in grp])
        rho_i = _mean_std([r["rho_i"] for r in grp])
        out.append(AggRow(key, psi[0], psi[1], rho_a[0], rho_a[1], rho_i[0], rho_i[1], len(grp)))
    return out


def pearson(xs: list[float], ys: list[float]) -> float:
    """Product-moment correlation; UndefinedMetricError on zero variance or n < 3."""
    if len(xs) != len(ys):
        raise ValueError("pearson needs equal-length inputs")
    n = len(xs)
    if n < 3:
        raise UndefinedMetricError(f"pearson needs >= 3 points, got {n}")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedMetricError("pearson undefined: zero variance")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def _ranks(xs: list[float]) -> list[float]:
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1  # average rank for ties
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def spearman(xs: list[float], ys: list[float]) -> float:
    """Rank correlation (Pearson over average ranks)."""
    return pearson(_ranks(xs), _ranks(ys))


def log_pairs(xs: list[float], ys: list[float]) -> tuple[list[float], list[float], int]:
    """Natural logs of strictly positive pairs; any nonpositive member drops the pair.

    Returns (log xs, log ys, dropped count); raises UndefinedMetricError
    when fewer than three pairs survive.
    """
    lx, ly, dropped = [], [], 0
    for x, y in zip(xs, ys):
        if x > 0 and y > 0 and not (math.isnan(x) or math.isnan(y)):
            lx.append(math.log(x))
            ly.append(math.log(y))
        else:
            dropped += 1
    if len(lx) < 3:
        raise UndefinedMetricError(
            f"log correlation needs >= 3 positive pairs, got {len(lx)} ({dropped} dropped)"
        )
    return lx, ly, dropped


def residualise(xs: list[float], ys: list[float]) -> list[float]:
    """Residuals of the OLS fit y = a + b*x; mean zero, uncorrelated with x."""
    if len(xs) != len(ys):
        raise ValueError("residualise needs equal-length inputs")
    n = len(xs)
    if n < 3:
        raise UndefinedMetricError(f"residualise needs >= 3 points, got {n}")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        raise UndefinedMetricError("residualise undefined: zero predictor variance")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    b = sxy / sxx
    a = my - b * mx
    return [y - (a + b * x) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class ReportRow:
    metric: str
    scenario: str
    value: float | None
    n: int
    dropped: int


def _corr_row(metric: str, scenario: str, fn) -> ReportRow:
    try:
        value, n, dropped = fn()
        return ReportRow(metric, scenario, value, n, dropped)
    except UndefinedMetricError:
        return ReportRow(metric, scenario, None, 0, 0)


def analyze_table(label: str, rows: list[dict]) -> tuple[list[ReportRow], list[AggRow]]:
    """Correlation battery for one scenario table, computed on per-gamma means."""
    aggs = aggregate(rows, keys=("gamma",))
    psi = [a.psi_mean for a in aggs]
    rho_a = [a.rho_a_mean for a in aggs]
    rho_i = [a.rho_i_mean for a in aggs]

    def log_psi_rho_i():
        lx, ly, dropped = log_pairs(psi, rho_i)
        return pearson(lx, ly), len(lx), dropped

    def psi_rho_a():
        return pearson(psi, rho_a), len(psi), 0

    def resid_rho_a_vs_rho_i():
        # remove the psi -> rho_a fit, correlate leftover awareness with infection
        res = residualise(psi, rho_a)
        return pearson(res, rho_i), len(res), 0

    def resid_psi_vs_rho_i():
        res = residualise(rho_a, psi)
        return pearson(res, rho_i), len(res), 0

    report = [
        _corr_row("pearson_log_psi_log_rho_i", label, log_psi_rho_i),
        _corr_row("pearson_psi_rho_a", label, psi_rho_a),
        _corr_row("pearson_resid_rho_a_on_psi_vs_rho_i", label, resid_rho_a_vs_rho_i),
        _corr_row("pearson_resid_psi_on_rho_a_vs_rho_i", label, resid_psi_vs_rho_i),
    ]
    return report, aggs


def analyze_tables(tables: dict[str, list[dict]]) -> tuple[list[ReportRow], dict[str, list[AggRow]]]:
    report: list[ReportRow] = []
    aggregates: dict[str, list[AggRow]] = {}
    for label in sorted(tables):
        rows, aggs = analyze_table(label, tables[label])
        report.extend(rows)
        aggregates[label] = aggs
    return report, aggregates


def report_to_csv(report: list[ReportRow]) -> str:
    lines = [",".join(REPORT_COLUMNS)]
    for r in report:
        value = "" if r.value is None else format_value(float(r.value))
        lines.append(f"{r.metric},{r.scenario},{value},{r.n},{r.dropped}")
    return "\n".join(lines) + "\n"


def aggregates_to_csv(aggs: list[AggRow], rows: list[dict]) -> str:
    """Per-gamma aggregate CSV; beta/mu/epsilon echoed from the (constant) table."""
    first = rows[0]
    lines = [",".join(AGG_COLUMNS)]
    for a in aggs:
        cells = [
            format_value(a.key[0]),
            format_value(first["beta"]),
            format_value(first["mu"]),
            format_value(first["epsilon"]),
            format_value(a.psi_mean),
            format_value(a.psi_std),
            format_value(a.rho_a_mean),
            format_value(a.rho_a_std),
            format_value(a.rho_i_mean),
            format_value(a.rho_i_std),
            str(a.n),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def summary_text(report: list[ReportRow]) -> str:
    """Human-readable digest of the correlation battery."""
    lines = ["analysis summary", "================"]
    scenarios = sorted({r.scenario for r in report})
    for scen in scenarios:
        lines.append(f"\nscenario: {scen}")
        for r in report:
            if r.scenario != scen:
                continue
            if r.value is None:
                lines.append(f"  {r.metric}: undefined")
            else:
                extra = f", dropped={r.dropped}" if r.dropped else ""
                lines.append(f"  {r.metric}: r={r.value:+.4f} (n={r.n}{extra})")
    return "\n".join(lines) + "\n"
