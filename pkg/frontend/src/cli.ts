#!/usr/bin/env node
/** make-figures --which <id> --in <dir> --out <dir> [--orientation <o>]
 *
 * Input conventions under --in (either the campaign layout or a flat dir):
 *   fig2-scatter    gamma-sweep/runs.csv | runs.csv
 *   fig3-scenario   analysis/aggregates_<label>.csv | aggregates_<label>.csv
 *   fig4-heatmap    heatmap/cells.csv | cells.csv
 *   fig5-residuals  analysis/{aggregates_<label>.csv, report.csv}
 *
 * Emits <out>/<figure>.svg, <figure>.png and a <which>.json sidecar with
 * the exact plotted values.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { SchemaError } from "./csv.js";
import { FigureResult, Orientation, figGammaPsi, figHeatmap, figResiduals, figScenario } from "./figures.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";

const FIGURE_IDS = ["fig2-scatter", "fig3-scenario", "fig4-heatmap", "fig5-residuals"];

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new SchemaError(`bad argument: ${key}`);
    }
    args.set(key.slice(2), argv[i + 1]);
  }
  return args;
}

function firstExisting(inDir: string, candidates: string[]): string {
  for (const candidate of candidates) {
    const full = path.join(inDir, candidate);
    if (fs.existsSync(full)) return full;
  }
  throw new SchemaError(`none of ${candidates.join(", ")} found under ${inDir}`);
}

function aggregatesIn(inDir: string): Map<string, string> {
  const tables = new Map<string, string>();
  for (const dir of [path.join(inDir, "analysis"), inDir]) {
    if (!fs.existsSync(dir)) continue;
    for (const entry of fs.readdirSync(dir)) {
      const match = /^aggregates_(.+)\.csv$/.exec(entry);
      if (match && !tables.has(match[1])) {
        tables.set(match[1], fs.readFileSync(path.join(dir, entry), "utf8"));
      }
    }
    if (tables.size > 0) break;
  }
  return tables;
}

export function buildFigure(which: string, inDir: string, orientation: Orientation): FigureResult {
  switch (which) {
    case "fig2-scatter":
      return figGammaPsi(fs.readFileSync(firstExisting(inDir, ["gamma-sweep/runs.csv", "runs.csv"]), "utf8"));
    case "fig3-scenario":
      return figScenario(aggregatesIn(inDir));
    case "fig4-heatmap":
      return figHeatmap(fs.readFileSync(firstExisting(inDir, ["heatmap/cells.csv", "cells.csv"]), "utf8"));
    case "fig5-residuals": {
      let report: string | null = null;
      try {
        report = fs.readFileSync(firstExisting(inDir, ["analysis/report.csv", "report.csv"]), "utf8");
      } catch {
        report = null;
      }
      return figResiduals(aggregatesIn(inDir), report, orientation);
    }
    default:
      throw new SchemaError(`unknown figure id '${which}'; valid: ${FIGURE_IDS.join(", ")}`);
  }
}

export function writeFigure(result: FigureResult, which: string, outDir: string): string[] {
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const figure of result.figures) {
    const svgPath = path.join(outDir, `${figure.name}.svg`);
    fs.writeFileSync(svgPath, renderSvg(figure.scene));
    written.push(svgPath);
    const pngPath = path.join(outDir, `${figure.name}.png`);
    fs.writeFileSync(pngPath, renderPng(figure.scene));
    written.push(pngPath);
  }
  const sidecarPath = path.join(outDir, `${which}.json`);
  fs.writeFileSync(sidecarPath, JSON.stringify(result.sidecar, null, 2) + "\n");
  written.push(sidecarPath);
  return written;
}

function main() {
  const args = parseArgs(process.argv.slice(2));
  const which = args.get("which");
  const inDir = args.get("in");
  const outDir = args.get("out");
  const orientation = (args.get("orientation") ?? "rho_a_on_psi") as Orientation;
  if (!which || !inDir || !outDir) {
    console.error("usage: make-figures --which <id> --in <dir> --out <dir> [--orientation rho_a_on_psi|psi_on_rho_a]");
    console.error(`figure ids: ${FIGURE_IDS.join(", ")}`);
    process.exit(2);
  }
  if (orientation !== "rho_a_on_psi" && orientation !== "psi_on_rho_a") {
    console.error(`unknown orientation '${orientation}'`);
    process.exit(2);
  }
  try {
    const result = buildFigure(which, inDir, orientation);
    for (const warning of result.warnings) {
      console.error(`warning: ${warning}`);
    }
    for (const file of writeFigure(result, which, outDir)) {
      console.log(file);
    }
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      process.exit(2);
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  (process.argv[1].endsWith("cli.js") || process.argv[1].endsWith("make-figures"));
if (invokedDirectly) {
  main();
}
