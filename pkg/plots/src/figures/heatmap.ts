/** Heatmap of the k-step jump-distance difference over the (k, eps) grid.
 * Rows arrive as eps/k/esjd triples sharing a trial index. */

import { PlotsError, ResultRow } from "../csv.js";
import { AxisOptions } from "../figspec.js";
import { plotArea, tickLabel, title } from "../chrome.js";
import { document, el, fmt, text } from "../svg.js";
import * as theme from "../theme.js";

export interface HeatCell {
  eps: number;
  k: number;
  value: number;
}

export function collectCells(rows: ResultRow[]): HeatCell[] {
  const byTrial = new Map<number, Partial<HeatCell>>();
  for (const row of rows) {
    const slot = byTrial.get(row.trial) ?? {};
    if (row.metric === "eps") slot.eps = row.value;
    if (row.metric === "k") slot.k = row.value;
    if (row.metric === "esjd") slot.value = row.value;
    byTrial.set(row.trial, slot);
  }
  const cells: HeatCell[] = [];
  for (const [trial, slot] of byTrial) {
    if (slot.eps === undefined || slot.k === undefined || slot.value === undefined) {
      throw new PlotsError(`trial ${trial} lacks a complete eps/k/esjd triple`);
    }
    cells.push(slot as HeatCell);
  }
  if (cells.length === 0) throw new PlotsError("no heatmap cells");
  return cells;
}

export function renderHeatmap(rows: ResultRow[], axes: AxisOptions): string {
  const cells = collectCells(rows);
  const epsValues = [...new Set(cells.map((c) => c.eps))].sort((a, b) => a - b);
  const kValues = [...new Set(cells.map((c) => c.k))].sort((a, b) => a - b);
  const top = Math.max(...cells.map((c) => c.value));
  const scale = top === 0 ? 1 : top;

  const innerW = plotArea.x1 - plotArea.x0 - 56; // reserve room for the color bar
  const innerH = plotArea.y0 - plotArea.y1;
  const cellW = innerW / kValues.length;
  const cellH = innerH / epsValues.length;

  const body: string[] = [];
  body.push(title(axes.title ?? "Jump-distance difference"));

  for (const cell of cells) {
    const col = kValues.indexOf(cell.k);
    const row = epsValues.indexOf(cell.eps);
    // eps grows upward
    const cy = plotArea.y0 - (row + 1) * cellH;
    body.push(
      el("rect", {
        x: plotArea.x0 + col * cellW, y: cy,
        width: cellW, height: cellH,
        fill: theme.heatColor(cell.value / scale),
      }),
    );
  }

  // axis labels: every eps row, sparse k columns
  epsValues.forEach((eps, row) => {
    body.push(
      text(tickLabel(eps), {
        x: plotArea.x0 - 8, y: plotArea.y0 - (row + 0.5) * cellH + 4,
        "text-anchor": "end", "font-family": theme.FONT_FAMILY,
        "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
      }),
    );
  });
  const kStride = Math.max(1, Math.floor(kValues.length / 10));
  kValues.forEach((k, col) => {
    if (col % kStride !== 0) return;
    body.push(
      text(tickLabel(k), {
        x: plotArea.x0 + (col + 0.5) * cellW, y: plotArea.y0 + 18,
        "text-anchor": "middle", "font-family": theme.FONT_FAMILY,
        "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
      }),
    );
  });
  body.push(
    text(axes.xLabel ?? "steps k", {
      x: plotArea.x0 + innerW / 2, y: theme.HEIGHT - 14,
      "text-anchor": "middle", "font-family": theme.FONT_FAMILY,
      "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
    }),
    text(axes.yLabel ?? "step size", {
      x: 16, y: plotArea.y1 + innerH / 2, "text-anchor": "middle",
      transform: `rotate(-90 16 ${fmt(plotArea.y1 + innerH / 2)})`,
      "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
      fill: theme.AXIS_COLOR,
    }),
  );

  // color bar with min/max annotation
  const barX = plotArea.x1 - 36;
  const steps = 24;
  const stepH = innerH / steps;
  for (let i = 0; i < steps; i += 1) {
    body.push(
      el("rect", {
        x: barX, y: plotArea.y0 - (i + 1) * stepH,
        width: 14, height: stepH + 0.5,
        fill: theme.heatColor((i + 0.5) / steps),
      }),
    );
  }
  const low = Math.min(...cells.map((c) => c.value));
  body.push(
    text(top.toPrecision(3), {
      x: barX + 18, y: plotArea.y1 + 10, "font-family": theme.FONT_FAMILY,
      "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
    }),
    text(low.toPrecision(3), {
      x: barX + 18, y: plotArea.y0, "font-family": theme.FONT_FAMILY,
      "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
    }),
  );
  return document(theme.WIDTH, theme.HEIGHT, body);
}
