/** Scene to SVG string. */

import { Mark, Scene } from "./scene.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function round(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function markSvg(mark: Mark): string {
  switch (mark.kind) {
    case "rect":
      return `<rect x="${round(mark.x)}" y="${round(mark.y)}" width="${round(mark.w)}" height="${round(mark.h)}" fill="${mark.color}"/>`;
    case "line":
      return `<line x1="${round(mark.x1)}" y1="${round(mark.y1)}" x2="${round(mark.x2)}" y2="${round(mark.y2)}" stroke="${mark.color}" stroke-width="${mark.width}"/>`;
    case "circle":
      return `<circle cx="${round(mark.x)}" cy="${round(mark.y)}" r="${mark.r}" fill="${mark.color}" fill-opacity="${mark.alpha}"/>`;
    case "text":
      return `<text x="${round(mark.x)}" y="${round(mark.y)}" font-size="${mark.size}" text-anchor="${mark.anchor}" fill="${mark.color}" font-family="sans-serif">${esc(mark.text)}</text>`;
  }
}

export function renderSvg(scene: Scene): string {
  const body = scene.marks.map(markSvg).join("\n  ");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
    `viewBox="0 0 ${scene.width} ${scene.height}">\n` +
    `  <rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="#ffffff"/>\n` +
    `  ${body}\n</svg>\n`
  );
}
