/** Shared frame, axes, tick, and legend drawing for every figure kind. */

import { Scale } from "./scales.js";
import { el, fmt, text } from "./svg.js";
import * as theme from "./theme.js";

export const plotArea = {
  x0: theme.MARGIN.left,
  x1: theme.WIDTH - theme.MARGIN.right,
  y0: theme.HEIGHT - theme.MARGIN.bottom,
  y1: theme.MARGIN.top,
};

export function tickLabel(value: number): string {
  const abs = Math.abs(value);
  if (value !== 0 && (abs >= 1e4 || abs < 1e-3)) {
    const exp = Math.round(Math.log10(abs));
    if (Math.abs(abs / Math.pow(10, exp) - 1) < 1e-9) {
      return `1e${exp}`;
    }
    return value.toExponential(1);
  }
  return fmt(value);
}

export function xAxis(scale: Scale, label: string): string[] {
  const parts: string[] = [];
  parts.push(
    el("line", {
      x1: plotArea.x0, y1: plotArea.y0, x2: plotArea.x1, y2: plotArea.y0,
      stroke: theme.AXIS_COLOR, "stroke-width": 1,
    }),
  );
  for (const tick of scale.ticks) {
    const x = scale(tick);
    parts.push(
      el("line", {
        x1: x, y1: plotArea.y1, x2: x, y2: plotArea.y0,
        stroke: theme.GRID_COLOR, "stroke-width": 0.5,
      }),
      el("line", {
        x1: x, y1: plotArea.y0, x2: x, y2: plotArea.y0 + 4,
        stroke: theme.AXIS_COLOR, "stroke-width": 1,
      }),
      text(tickLabel(tick), {
        x, y: plotArea.y0 + 18, "text-anchor": "middle",
        "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
        fill: theme.AXIS_COLOR,
      }),
    );
  }
  parts.push(
    text(label, {
      x: (plotArea.x0 + plotArea.x1) / 2, y: theme.HEIGHT - 14,
      "text-anchor": "middle", "font-family": theme.FONT_FAMILY,
      "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
    }),
  );
  return parts;
}

export function yAxis(scale: Scale, label: string): string[] {
  const parts: string[] = [];
  parts.push(
    el("line", {
      x1: plotArea.x0, y1: plotArea.y0, x2: plotArea.x0, y2: plotArea.y1,
      stroke: theme.AXIS_COLOR, "stroke-width": 1,
    }),
  );
  for (const tick of scale.ticks) {
    const y = scale(tick);
    parts.push(
      el("line", {
        x1: plotArea.x0, y1: y, x2: plotArea.x1, y2: y,
        stroke: theme.GRID_COLOR, "stroke-width": 0.5,
      }),
      el("line", {
        x1: plotArea.x0 - 4, y1: y, x2: plotArea.x0, y2: y,
        stroke: theme.AXIS_COLOR, "stroke-width": 1,
      }),
      text(tickLabel(tick), {
        x: plotArea.x0 - 8, y: y + 4, "text-anchor": "end",
        "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
        fill: theme.AXIS_COLOR,
      }),
    );
  }
  parts.push(
    text(label, {
      x: 16, y: (plotArea.y0 + plotArea.y1) / 2, "text-anchor": "middle",
      transform: `rotate(-90 16 ${fmt((plotArea.y0 + plotArea.y1) / 2)})`,
      "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
      fill: theme.AXIS_COLOR,
    }),
  );
  return parts;
}

export function title(label: string): string {
  return text(label, {
    x: (plotArea.x0 + plotArea.x1) / 2, y: theme.MARGIN.top - 16,
    "text-anchor": "middle", "font-family": theme.FONT_FAMILY,
    "font-size": theme.TITLE_SIZE, "font-weight": "bold",
    fill: theme.AXIS_COLOR,
  });
}

export interface LegendEntry {
  label: string;
  color: string;
  dash?: string;
}

export function legend(entries: LegendEntry[], x: number, y: number): string[] {
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const rowY = y + i * 18;
    parts.push(
      el("line", {
        x1: x, y1: rowY - 4, x2: x + 22, y2: rowY - 4,
        stroke: entry.color, "stroke-width": theme.LINE_WIDTH,
        ...(entry.dash ? { "stroke-dasharray": entry.dash } : {}),
      }),
      text(entry.label, {
        x: x + 28, y: rowY, "font-family": theme.FONT_FAMILY,
        "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
      }),
    );
  });
  return parts;
}
