"""Regenerate the frontend test fixtures from the polepi package.

Run from this directory:  python3 generate.py

Produces a miniature but fully schema-conformant set of campaign outputs
and analysis artifacts. The vitest suite cross-checks make-figures
sidecar values against these Python-computed numbers.
"""

from pathlib import Path

from polepi.analysis import aggregates_to_csv, analyze_tables, report_to_csv
from polepi.engine import Params
from polepi.experiments import (
    SweepSpec,
    run_sweep,
    write_heatmap_cells,
    _rows_to_dicts,
    _read_rows,
)

HERE = Path(__file__).parent

GAMMAS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
COMMON = dict(replicates=3, base_seed=7, workers=1)
GRAPH = {"n_nodes": 120, "m_attach": 3, "p_triad": 0.05}


def sweep(name, base, axes):
    spec = SweepSpec(name=name, base=base, axes=axes, **COMMON)
    raw, csv_path = run_sweep(spec, HERE / name)
    return _rows_to_dicts(raw), csv_path


def main():
    base = Params(graph=GRAPH, steps=2000)
    sweep("gamma-sweep", base, (("info.gamma", GAMMAS),))

    mild_base = Params(graph=GRAPH, steps=2000, epi={"beta": 0.005, "mu": 0.1})
    mild_rows, _ = sweep("scenario-mild", mild_base, (("info.gamma", GAMMAS),))
    severe_base = Params(
        graph=GRAPH, steps=2000, epi_interval=10, epi={"beta": 0.05, "mu": 0.01}
    )
    severe_rows, _ = sweep("scenario-severe", severe_base, (("info.gamma", GAMMAS),))

    heatmap_base = Params(graph=GRAPH, steps=1000, epi={"mu": 0.1})
    heatmap_rows, _ = sweep(
        "heatmap",
        heatmap_base,
        (("epi.beta", (0.005, 0.02, 0.05)), ("info.gamma", GAMMAS)),
    )
    write_heatmap_cells(heatmap_rows, HERE / "heatmap")

    tables = {"mild": mild_rows, "severe": severe_rows}
    report, aggregates = analyze_tables(tables)
    analysis_dir = HERE / "analysis"
    analysis_dir.mkdir(exist_ok=True)
    (analysis_dir / "report.csv").write_text(report_to_csv(report))
    for label, aggs in aggregates.items():
        (analysis_dir / f"aggregates_{label}.csv").write_text(
            aggregates_to_csv(aggs, tables[label])
        )
    print("fixtures written under", HERE)


if __name__ == "__main__":
    main()
