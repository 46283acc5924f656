/** Backend-independent plot scene: figures build marks, svg/png render them. */

export type Mark =
  | { kind: "rect"; x: number; y: number; w: number; h: number; color: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { kind: "circle"; x: number; y: number; r: number; color: string; alpha: number }
  | { kind: "text"; x: number; y: number; text: string; size: number; anchor: "start" | "middle" | "end"; color: string };

export interface Scene {
  width: number;
  height: number;
  marks: Mark[];
}

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: number[], padFraction = 0.05): Extent {
  const finite = values.filter((v) => Number.isFinite(v));
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

export function ticks(extent: Extent, count = 5): number[] {
  const span = extent.max - extent.min;
  const rawStep = span / (count - 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * power);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[candidates.length - 1];
  const first = Math.ceil(extent.min / step) * step;
  const out: number[] = [];
  for (let v = first; v <= extent.max + step * 1e-9; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 0.001 && abs < 10000) {
    return Number(v.toPrecision(4)).toString();
  }
  return v.toExponential(2);
}

export interface Frame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  xExtent: Extent;
  yExtent: Extent;
}

export function xPixel(frame: Frame, v: number): number {
  return frame.x0 + ((v - frame.xExtent.min) / (frame.xExtent.max - frame.xExtent.min)) * (frame.x1 - frame.x0);
}

export function yPixel(frame: Frame, v: number): number {
  return frame.y1 - ((v - frame.yExtent.min) / (frame.yExtent.max - frame.yExtent.min)) * (frame.y1 - frame.y0);
}

const AXIS = "#333333";

export function axes(frame: Frame, xLabel: string, yLabel: string, title: string): Mark[] {
  const marks: Mark[] = [];
  marks.push({ kind: "line", x1: frame.x0, y1: frame.y1, x2: frame.x1, y2: frame.y1, color: AXIS, width: 1 });
  marks.push({ kind: "line", x1: frame.x0, y1: frame.y0, x2: frame.x0, y2: frame.y1, color: AXIS, width: 1 });
  for (const t of ticks(frame.xExtent)) {
    const px = xPixel(frame, t);
    marks.push({ kind: "line", x1: px, y1: frame.y1, x2: px, y2: frame.y1 + 5, color: AXIS, width: 1 });
    marks.push({ kind: "text", x: px, y: frame.y1 + 18, text: formatTick(t), size: 11, anchor: "middle", color: AXIS });
  }
  for (const t of ticks(frame.yExtent)) {
    const py = yPixel(frame, t);
    marks.push({ kind: "line", x1: frame.x0 - 5, y1: py, x2: frame.x0, y2: py, color: AXIS, width: 1 });
    marks.push({ kind: "text", x: frame.x0 - 8, y: py + 4, text: formatTick(t), size: 11, anchor: "end", color: AXIS });
  }
  marks.push({ kind: "text", x: (frame.x0 + frame.x1) / 2, y: frame.y1 + 36, text: xLabel, size: 13, anchor: "middle", color: AXIS });
  marks.push({ kind: "text", x: frame.x0, y: frame.y0 - 10, text: yLabel, size: 13, anchor: "start", color: AXIS });
  marks.push({ kind: "text", x: (frame.x0 + frame.x1) / 2, y: 22, text: title, size: 14, anchor: "middle", color: "#111111" });
  return marks;
}

function hex2(v: number): string {
  return Math.max(0, Math.min(255, Math.round(v))).toString(16).padStart(2, "0");
}

export function lerpColor(stops: [number, number, number][], t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const pos = clamped * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(pos));
  const f = pos - i;
  const [r0, g0, b0] = stops[i];
  const [r1, g1, b1] = stops[i + 1];
  return `#${hex2(r0 + (r1 - r0) * f)}${hex2(g0 + (g1 - g0) * f)}${hex2(b0 + (b1 - b0) * f)}`;
}

/** blue -> white -> red, low to high (heatmap convention: red = more infection) */
export const DIVERGING: [number, number, number][] = [
  [33, 102, 172],
  [247, 247, 247],
  [178, 24, 43],
];

/** dark blue -> teal -> yellow, used to encode gamma on scatter points */
export const SEQUENTIAL: [number, number, number][] = [
  [54, 14, 110],
  [33, 145, 140],
  [253, 231, 37],
];

export function colorBar(
  x: number,
  y0: number,
  y1: number,
  stops: [number, number, number][],
  extent: Extent,
  label: string,
): Mark[] {
  const marks: Mark[] = [];
  const steps = 64;
  const h = (y1 - y0) / steps;
  for (let i = 0; i < steps; i++) {
    marks.push({
      kind: "rect",
      x,
      y: y1 - (i + 1) * h,
      w: 14,
      h: h + 0.5,
      color: lerpColor(stops, i / (steps - 1)),
    });
  }
  marks.push({ kind: "text", x: x + 18, y: y1 + 4, text: formatTick(extent.min), size: 10, anchor: "start", color: AXIS });
  marks.push({ kind: "text", x: x + 18, y: y0 + 4, text: formatTick(extent.max), size: 10, anchor: "start", color: AXIS });
  marks.push({ kind: "text", x, y: y0 - 8, text: label, size: 11, anchor: "start", color: AXIS });
  return marks;
}
