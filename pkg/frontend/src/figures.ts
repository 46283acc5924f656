/** The four figure families built from the documented CSV schemas.
 *
 * Every builder returns the rendered scene plus a sidecar object holding
 * the exact numbers plotted, so figure correctness is testable without
 * image diffing.
 */

import { parseCsv, requireColumns, numericColumn, SchemaError, Table } from "./csv.js";
import {
  DIVERGING,
  Frame,
  Mark,
  Scene,
  SEQUENTIAL,
  axes,
  colorBar,
  extentOf,
  lerpColor,
  xPixel,
  yPixel,
} from "./scene.js";
import { mean, pearson, residualise } from "./stats.js";

const WIDTH = 640;
const HEIGHT = 480;
const PLOT = { x0: 70, y0: 50, x1: 560, y1: 420 };

const RUNS_COLUMNS = ["gamma", "beta", "mu", "epsilon", "epi_interval", "seed", "step", "psi", "rho_a", "rho_i"];
const AGG_COLUMNS = ["gamma", "psi_mean", "rho_a_mean", "rho_i_mean", "n"];

export interface Figure {
  name: string;
  scene: Scene;
}

export interface FigureResult {
  figures: Figure[];
  sidecar: Record<string, unknown>;
  warnings: string[];
}

function frameFor(xs: number[], ys: number[]): Frame {
  return { ...PLOT, xExtent: extentOf(xs), yExtent: extentOf(ys) };
}

// ------------------------------------------------------------- fig2-scatter

interface RunPoint {
  gamma: number;
  seed: number;
  step: number;
  psi: number;
  rho_a: number;
  rho_i: number;
}

export function parseRuns(text: string, label: string): RunPoint[] {
  const table = parseCsv(text, label);
  const index = requireColumns(table, RUNS_COLUMNS, label);
  const get = (name: string) => numericColumn(table, index, name, label);
  const gamma = get("gamma");
  const seed = get("seed");
  const step = get("step");
  const psi = get("psi");
  const rhoA = get("rho_a");
  const rhoI = get("rho_i");
  // keep only the last sampled step of each run
  const latest = new Map<string, RunPoint>();
  for (let i = 0; i < gamma.length; i++) {
    const key = table.rows[i]
      .filter((_, c) => c !== index.get("step") && c !== index.get("psi") && c !== index.get("rho_a") && c !== index.get("rho_i"))
      .join("|");
    const cur = latest.get(key);
    if (!cur || step[i] > cur.step) {
      latest.set(key, { gamma: gamma[i], seed: seed[i], step: step[i], psi: psi[i], rho_a: rhoA[i], rho_i: rhoI[i] });
    }
  }
  return [...latest.values()];
}

function groupMeans(points: RunPoint[], field: "psi" | "rho_a" | "rho_i"): { gamma: number; value: number; n: number }[] {
  const groups = new Map<number, number[]>();
  for (const p of points) {
    if (!groups.has(p.gamma)) groups.set(p.gamma, []);
    groups.get(p.gamma)!.push(p[field]);
  }
  return [...groups.keys()]
    .sort((a, b) => a - b)
    .map((g) => {
      const values = groups.get(g)!.filter((v) => !Number.isNaN(v));
      return { gamma: g, value: mean(values), n: values.length };
    });
}

export function figGammaPsi(runsText: string): FigureResult {
  const points = parseRuns(runsText, "runs.csv");
  const means = groupMeans(points, "psi");
  const frame = frameFor(points.map((p) => p.gamma), points.map((p) => p.psi));
  const marks: Mark[] = axes(frame, "gamma", "psi", "polarisation vs digital media influence");
  for (const p of points) {
    marks.push({ kind: "circle", x: xPixel(frame, p.gamma), y: yPixel(frame, p.psi), r: 2.4, color: "#9ecae1", alpha: 0.55 });
  }
  for (let i = 1; i < means.length; i++) {
    marks.push({
      kind: "line",
      x1: xPixel(frame, means[i - 1].gamma),
      y1: yPixel(frame, means[i - 1].value),
      x2: xPixel(frame, means[i].gamma),
      y2: yPixel(frame, means[i].value),
      color: "#08519c",
      width: 2,
    });
  }
  for (const m of means) {
    marks.push({ kind: "circle", x: xPixel(frame, m.gamma), y: yPixel(frame, m.value), r: 3.2, color: "#08519c", alpha: 1 });
  }
  return {
    figures: [{ name: "fig2-scatter", scene: { width: WIDTH, height: HEIGHT, marks } }],
    sidecar: {
      figure: "fig2-scatter",
      points: points.map((p) => ({ gamma: p.gamma, psi: p.psi, seed: p.seed })),
      means: means.map((m) => ({ gamma: m.gamma, psi_mean: m.value, n: m.n })),
    },
    warnings: [],
  };
}

// ------------------------------------------------------------ fig3-scenario

interface AggRow {
  gamma: number;
  psi_mean: number;
  rho_a_mean: number;
  rho_i_mean: number;
  n: number;
}

export function parseAggregates(text: string, label: string): AggRow[] {
  const table = parseCsv(text, label);
  const index = requireColumns(table, AGG_COLUMNS, label);
  const get = (name: string) => numericColumn(table, index, name, label);
  const gamma = get("gamma");
  const psi = get("psi_mean");
  const rhoA = get("rho_a_mean");
  const rhoI = get("rho_i_mean");
  const n = get("n");
  return gamma.map((g, i) => ({ gamma: g, psi_mean: psi[i], rho_a_mean: rhoA[i], rho_i_mean: rhoI[i], n: n[i] }));
}

export function figScenario(tables: Map<string, string>): FigureResult {
  if (tables.size === 0) {
    throw new SchemaError("fig3-scenario: no aggregates_<label>.csv inputs found");
  }
  const figures: Figure[] = [];
  const sidecarTables: Record<string, unknown> = {};
  for (const [label, text] of [...tables.entries()].sort()) {
    const rows = parseAggregates(text, `aggregates_${label}.csv`);
    const frame = frameFor(rows.map((r) => r.psi_mean), rows.map((r) => r.rho_i_mean));
    const marks = axes(frame, "psi", "rho_I", `infection vs polarisation (${label})`);
    const gammaExtent = extentOf(rows.map((r) => r.gamma), 0);
    for (const r of rows) {
      const t = (r.gamma - gammaExtent.min) / (gammaExtent.max - gammaExtent.min || 1);
      marks.push({
        kind: "circle",
        x: xPixel(frame, r.psi_mean),
        y: yPixel(frame, r.rho_i_mean),
        r: 4,
        color: lerpColor(SEQUENTIAL, t),
        alpha: 0.95,
      });
    }
    marks.push(...colorBar(580, PLOT.y0, PLOT.y1, SEQUENTIAL, gammaExtent, "gamma"));
    figures.push({ name: `fig3-scenario-${label}`, scene: { width: WIDTH, height: HEIGHT, marks } });
    sidecarTables[label] = rows.map((r) => ({
      gamma: r.gamma,
      psi_mean: r.psi_mean,
      rho_i_mean: r.rho_i_mean,
    }));
  }
  return {
    figures,
    sidecar: { figure: "fig3-scenario", scenarios: sidecarTables },
    warnings: [],
  };
}

// ------------------------------------------------------------- fig4-heatmap

export function figHeatmap(cellsText: string): FigureResult {
  const table = parseCsv(cellsText, "cells.csv");
  const index = requireColumns(table, ["beta", "gamma", "rho_i_mean", "n"], "cells.csv");
  const beta = numericColumn(table, index, "beta", "cells.csv");
  const gamma = numericColumn(table, index, "gamma", "cells.csv");
  const rhoI = numericColumn(table, index, "rho_i_mean", "cells.csv");

  const betas = [...new Set(beta)].sort((a, b) => a - b);
  const gammas = [...new Set(gamma)].sort((a, b) => a - b);
  const byCell = new Map<string, number>();
  for (let i = 0; i < beta.length; i++) {
    const key = `${beta[i]}|${gamma[i]}`;
    if (byCell.has(key)) {
      throw new SchemaError(`cells.csv: duplicate cell (beta=${beta[i]}, gamma=${gamma[i]})`);
    }
    byCell.set(key, rhoI[i]);
  }
  for (const b of betas) {
    for (const g of gammas) {
      if (!byCell.has(`${b}|${g}`)) {
        throw new SchemaError(`cells.csv: missing cell (beta=${b}, gamma=${g})`);
      }
    }
  }

  const valueExtent = extentOf(rhoI, 0);
  const marks: Mark[] = [];
  const cellW = (PLOT.x1 - PLOT.x0) / gammas.length;
  const cellH = (PLOT.y1 - PLOT.y0) / betas.length;
  const grid: { beta: number; gamma: number; rho_i_mean: number }[] = [];
  betas.forEach((b, bi) => {
    gammas.forEach((g, gi) => {
      const value = byCell.get(`${b}|${g}`)!;
      const t = (value - valueExtent.min) / (valueExtent.max - valueExtent.min || 1);
      marks.push({
        kind: "rect",
        x: PLOT.x0 + gi * cellW,
        y: PLOT.y1 - (bi + 1) * cellH,
        w: cellW + 0.5,
        h: cellH + 0.5,
        color: lerpColor(DIVERGING, t),
      });
      grid.push({ beta: b, gamma: g, rho_i_mean: value });
    });
  });
  const frame: Frame = {
    ...PLOT,
    xExtent: { min: gammas[0], max: gammas[gammas.length - 1] },
    yExtent: { min: betas[0], max: betas[betas.length - 1] },
  };
  marks.push(...axes(frame, "gamma", "beta", "mean infected fraction"));
  marks.push(...colorBar(580, PLOT.y0, PLOT.y1, DIVERGING, valueExtent, "rho_I"));
  return {
    figures: [{ name: "fig4-heatmap", scene: { width: WIDTH, height: HEIGHT, marks } }],
    sidecar: { figure: "fig4-heatmap", betas, gammas, cells: grid },
    warnings: [],
  };
}

// ----------------------------------------------------------- fig5-residuals

export type Orientation = "rho_a_on_psi" | "psi_on_rho_a";

function panel(frame: Frame, marks: Mark[], xs: number[], ys: number[], color: string) {
  for (let i = 0; i < xs.length; i++) {
    marks.push({ kind: "circle", x: xPixel(frame, xs[i]), y: yPixel(frame, ys[i]), r: 3, color, alpha: 0.85 });
  }
}

export function figResiduals(
  tables: Map<string, string>,
  reportText: string | null,
  orientation: Orientation,
): FigureResult {
  if (tables.size === 0) {
    throw new SchemaError("fig5-residuals: no aggregates_<label>.csv inputs found");
  }
  const warnings: string[] = [];
  for (const expected of ["mild", "severe"]) {
    if (!tables.has(expected)) {
      warnings.push(`scenario '${expected}' missing; rendering partial figure`);
    }
  }
  const labels = [...tables.keys()].sort();
  const marks: Mark[] = [];
  const panelW = 250;
  const panelH = 170;
  const sidecarPanels: Record<string, unknown> = {};
  let row = 0;
  for (const label of labels) {
    const rows = parseAggregates(tables.get(label)!, `aggregates_${label}.csv`);
    const psi = rows.map((r) => r.psi_mean);
    const rhoA = rows.map((r) => r.rho_a_mean);
    const rhoI = rows.map((r) => r.rho_i_mean);
    const residuals = orientation === "rho_a_on_psi" ? residualise(psi, rhoA) : residualise(rhoA, psi);
    const residualLabel = orientation === "rho_a_on_psi" ? "residual(rho_A|psi)" : "residual(psi|rho_A)";

    const left: Frame = {
      x0: 60,
      y0: 40 + row * (panelH + 70),
      x1: 60 + panelW,
      y1: 40 + row * (panelH + 70) + panelH,
      xExtent: extentOf(psi),
      yExtent: extentOf(rhoA),
    };
    marks.push(...axes(left, "psi", "rho_A", `${label}`));
    panel(left, marks, psi, rhoA, "#6a51a3");

    const right: Frame = {
      x0: 390,
      y0: left.y0,
      x1: 390 + panelW,
      y1: left.y1,
      xExtent: extentOf(residuals),
      yExtent: extentOf(rhoI),
    };
    marks.push(...axes(right, residualLabel, "rho_I", `${label}`));
    panel(right, marks, residuals, rhoI, "#e6550d");

    sidecarPanels[label] = {
      psi,
      rho_a: rhoA,
      rho_i: rhoI,
      residuals,
      orientation,
      pearson_psi_rho_a: pearson(psi, rhoA),
      pearson_residual_vs_rho_i: pearson(residuals, rhoI),
    };
    row++;
  }
  const sidecar: Record<string, unknown> = {
    figure: "fig5-residuals",
    orientation,
    panels: sidecarPanels,
  };
  if (reportText !== null) {
    const report = parseCsv(reportText, "report.csv");
    requireColumns(report, ["metric", "scenario", "value"], "report.csv");
    sidecar.report = report.rows.map((r) => ({
      metric: r[0],
      scenario: r[1],
      value: r[2] === "" ? null : Number(r[2]),
    }));
  }
  const height = 40 + labels.length * (panelH + 70);
  return {
    figures: [{ name: "fig5-residuals", scene: { width: 700, height, marks } }],
    sidecar,
    warnings,
  };
}
