import * as fs from "node:fs";
import * as path from "node:path";
import * as zlib from "node:zlib";
import { describe, expect, it } from "vitest";

import { parseCsv, requireColumns, SchemaError } from "../src/csv.js";
import { figGammaPsi, figHeatmap, figResiduals, figScenario, parseAggregates } from "../src/figures.js";
import { renderPng } from "../src/png.js";
import { renderSvg } from "../src/svg.js";
import { pearson, residualise } from "../src/stats.js";
import { buildFigure, writeFigure } from "../src/cli.js";

const FIXTURES = path.join(__dirname, "fixtures");

function read(rel: string): string {
  return fs.readFileSync(path.join(FIXTURES, rel), "utf8");
}

function reportValues(): Map<string, number | null> {
  const table = parseCsv(read("analysis/report.csv"), "report.csv");
  const out = new Map<string, number | null>();
  for (const row of table.rows) {
    out.set(`${row[0]}|${row[1]}`, row[2] === "" ? null : Number(row[2]));
  }
  return out;
}

describe("stats", () => {
  it("matches the hand-computed pearson example", () => {
    expect(pearson([1, 2, 3], [1, 3, 2])).toBeCloseTo(0.5, 12);
  });
  it("matches the hand-computed residual example", () => {
    const res = residualise([0, 1, 2], [0, 1, 0]);
    expect(res[0]).toBeCloseTo(-1 / 3, 12);
    expect(res[1]).toBeCloseTo(2 / 3, 12);
    expect(res[2]).toBeCloseTo(-1 / 3, 12);
  });
});

describe("csv", () => {
  it("rejects empty input", () => {
    expect(() => parseCsv("", "x")).toThrow(SchemaError);
  });
  it("names missing columns", () => {
    const table = parseCsv("a,b\n1,2\n", "x");
    expect(() => requireColumns(table, ["a", "gamma", "psi"], "x")).toThrow(/gamma, psi/);
  });
});

describe("fig2-scatter", () => {
  it("mean curve matches python per-gamma aggregation to 1e-9", () => {
    const result = figGammaPsi(read("gamma-sweep/runs.csv"));
    const means = result.sidecar.means as { gamma: number; psi_mean: number; n: number }[];
    expect(means.length).toBe(6);
    // independent check: recompute from the raw rows
    const table = parseCsv(read("gamma-sweep/runs.csv"), "runs");
    const idx = requireColumns(table, ["gamma", "psi"], "runs");
    for (const m of means) {
      const values = table.rows
        .filter((r) => Number(r[idx.get("gamma")!]) === m.gamma)
        .map((r) => Number(r[idx.get("psi")!]));
      const mean = values.reduce((a, b) => a + b, 0) / values.length;
      expect(Math.abs(m.psi_mean - mean)).toBeLessThan(1e-9);
      expect(m.n).toBe(3);
    }
    expect((result.sidecar.points as unknown[]).length).toBe(18);
  });

  it("single-gamma input renders a vertical strip with one mean", () => {
    const rows = [
      "gamma,beta,mu,epsilon,epi_interval,seed,step,psi,rho_a,rho_i",
      "0.5,0.05,0.01,0.25,1,1,100,0.1,0.5,0.2",
      "0.5,0.05,0.01,0.25,1,2,100,0.3,0.5,0.2",
    ].join("\n");
    const result = figGammaPsi(rows);
    expect((result.sidecar.means as unknown[]).length).toBe(1);
  });

  it("rejects a CSV without data", () => {
    expect(() => figGammaPsi("gamma,beta\n")).toThrow(SchemaError);
  });
});

describe("fig3-scenario", () => {
  it("plots exactly the aggregate values, one image per scenario", () => {
    const tables = new Map([
      ["mild", read("analysis/aggregates_mild.csv")],
      ["severe", read("analysis/aggregates_severe.csv")],
    ]);
    const result = figScenario(tables);
    expect(result.figures.map((f) => f.name).sort()).toEqual([
      "fig3-scenario-mild",
      "fig3-scenario-severe",
    ]);
    const scen = result.sidecar.scenarios as Record<string, { gamma: number; psi_mean: number; rho_i_mean: number }[]>;
    const fromFile = parseAggregates(read("analysis/aggregates_mild.csv"), "agg");
    scen.mild.forEach((row, i) => {
      expect(Math.abs(row.psi_mean - fromFile[i].psi_mean)).toBeLessThan(1e-12);
      expect(Math.abs(row.rho_i_mean - fromFile[i].rho_i_mean)).toBeLessThan(1e-12);
    });
  });

  it("fails without any aggregates", () => {
    expect(() => figScenario(new Map())).toThrow(SchemaError);
  });
});

describe("fig4-heatmap", () => {
  it("renders the full rectangular grid", () => {
    const result = figHeatmap(read("heatmap/cells.csv"));
    const cells = result.sidecar.cells as { beta: number; gamma: number; rho_i_mean: number }[];
    expect(cells.length).toBe(3 * 6);
    expect((result.sidecar.betas as number[]).length).toBe(3);
  });

  it("names the missing cell", () => {
    const lines = read("heatmap/cells.csv").trim().split("\n");
    const truncated = lines.slice(0, -1).join("\n") + "\n";
    expect(() => figHeatmap(truncated)).toThrow(/missing cell \(beta=/);
  });

  it("constant values give a uniform colour", () => {
    const rows = ["beta,gamma,rho_i_mean,rho_i_std,n"];
    for (const b of [0.01, 0.02]) {
      for (const g of [0.0, 0.5, 1.0]) {
        rows.push(`${b},${g},0.25,0.0,3`);
      }
    }
    const result = figHeatmap(rows.join("\n"));
    const rects = result.figures[0].scene.marks.filter(
      (m) => m.kind === "rect" && m.w > 20,
    ) as { color: string }[];
    expect(new Set(rects.map((r) => r.color)).size).toBe(1);
  });
});

describe("fig5-residuals", () => {
  it("correlations match the python analysis report to 1e-9", () => {
    const tables = new Map([
      ["mild", read("analysis/aggregates_mild.csv")],
      ["severe", read("analysis/aggregates_severe.csv")],
    ]);
    const result = figResiduals(tables, read("analysis/report.csv"), "rho_a_on_psi");
    const report = reportValues();
    const panels = result.sidecar.panels as Record<
      string,
      { pearson_psi_rho_a: number; pearson_residual_vs_rho_i: number }
    >;
    for (const label of ["mild", "severe"]) {
      const expectedRaw = report.get(`pearson_psi_rho_a|${label}`);
      const expectedResid = report.get(`pearson_resid_rho_a_on_psi_vs_rho_i|${label}`);
      expect(expectedRaw).not.toBeNull();
      expect(Math.abs(panels[label].pearson_psi_rho_a - expectedRaw!)).toBeLessThan(1e-9);
      expect(Math.abs(panels[label].pearson_residual_vs_rho_i - expectedResid!)).toBeLessThan(1e-9);
    }
    expect(result.warnings).toEqual([]);
  });

  it("the orientation flag flips the residual definition", () => {
    const tables = new Map([["mild", read("analysis/aggregates_mild.csv")]]);
    const flipped = figResiduals(tables, null, "psi_on_rho_a");
    const report = reportValues();
    const panels = flipped.sidecar.panels as Record<string, { pearson_residual_vs_rho_i: number }>;
    const expected = report.get("pearson_resid_psi_on_rho_a_vs_rho_i|mild");
    expect(Math.abs(panels.mild.pearson_residual_vs_rho_i - expected!)).toBeLessThan(1e-9);
    expect(JSON.stringify(flipped.sidecar)).toContain("psi_on_rho_a");
  });

  it("renders partially with a warning when a scenario is missing", () => {
    const tables = new Map([["mild", read("analysis/aggregates_mild.csv")]]);
    const result = figResiduals(tables, null, "rho_a_on_psi");
    expect(result.warnings.some((w) => w.includes("severe"))).toBe(true);
    expect(result.figures.length).toBe(1);
  });
});

describe("rendering", () => {
  it("produces svg with points, axes and labels", () => {
    const result = figGammaPsi(read("gamma-sweep/runs.csv"));
    const svg = renderSvg(result.figures[0].scene);
    expect(svg).toContain("<svg");
    expect(svg).toContain("<circle");
    expect(svg).toContain("gamma");
  });

  it("produces a decodable PNG", () => {
    const result = figHeatmap(read("heatmap/cells.csv"));
    const png = renderPng(result.figures[0].scene);
    expect([...png.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    // IDAT payload inflates to (width*4 + 1) * height filtered bytes
    const idatOffset = png.indexOf("IDAT");
    const length = png.readUInt32BE(idatOffset - 4);
    const raw = zlib.inflateSync(png.subarray(idatOffset + 4, idatOffset + 4 + length));
    const { width, height } = result.figures[0].scene;
    expect(raw.length).toBe((width * 4 + 1) * height);
  });
});

describe("cli pipeline", () => {
  it("writes svg, png and sidecar for every figure id", () => {
    const out = fs.mkdtempSync("/tmp/polepi-figs-");
    for (const which of ["fig2-scatter", "fig3-scenario", "fig4-heatmap", "fig5-residuals"]) {
      const result = buildFigure(which, FIXTURES, "rho_a_on_psi");
      const files = writeFigure(result, which, out);
      for (const file of files) {
        expect(fs.existsSync(file)).toBe(true);
        expect(fs.statSync(file).size).toBeGreaterThan(0);
      }
      expect(fs.existsSync(path.join(out, `${which}.json`))).toBe(true);
    }
    fs.rmSync(out, { recursive: true, force: true });
  });

  it("reports schema errors without writing output", () => {
    const dir = fs.mkdtempSync("/tmp/polepi-bad-");
    fs.writeFileSync(path.join(dir, "runs.csv"), "");
    expect(() => buildFigure("fig2-scatter", dir, "rho_a_on_psi")).toThrow(SchemaError);
    fs.rmSync(dir, { recursive: true, force: true });
  });

  it("rejects unknown figure ids", () => {
    expect(() => buildFigure("fig9-nope", FIXTURES, "rho_a_on_psi")).toThrow(/unknown figure id/);
  });
});
