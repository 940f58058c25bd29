import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { filterRows, loadResults, ResultRow } from "./csv.js";
import { FigureSpec } from "./figspec.js";
import { renderBars } from "./figures/bars.js";
import { renderHeatmap } from "./figures/heatmap.js";
import { renderKsBox } from "./figures/ksBox.js";
import { renderOrderSlope } from "./figures/orderSlope.js";

const RENDERERS = {
  "order-slope": renderOrderSlope,
  bars: renderBars,
  "ks-box": renderKsBox,
  heatmap: renderHeatmap,
} as const;

export interface RenderResult {
  svgPath: string;
  sidecarPath: string;
  rowCount: number;
}

export function sidecarPathFor(outputPath: string): string {
  return outputPath.replace(/\.svg$/, "") + ".csv";
}

/** The sidecar holds exactly the filtered input rows, bytes preserved. */
export function sidecarContent(header: string, rows: ResultRow[]): string {
  return [header, ...rows.map((r) => r.raw)].join("\n") + "\n";
}

export function renderFigure(spec: FigureSpec): RenderResult {
  const table = loadResults(spec.input);
  const rows = filterRows(table, spec.filter);
  const svg = RENDERERS[spec.kind](rows, spec.axes);

  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg);
  const sidecarPath = sidecarPathFor(spec.output);
  writeFileSync(sidecarPath, sidecarContent(table.header, rows));
  return { svgPath: spec.output, sidecarPath, rowCount: rows.length };
}
