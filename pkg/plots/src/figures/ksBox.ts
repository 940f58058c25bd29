/** Box plot of per-direction KS statistics, one box per method.
 * Boxes span the quartiles, whiskers span the full range; no outlier carving
 * so two renders of the same rows cannot differ. */

import { ResultRow, distinct } from "../csv.js";
import { AxisOptions } from "../figspec.js";
import { plotArea, title, yAxis } from "../chrome.js";
import { linearScale } from "../scales.js";
import { document, el, text } from "../svg.js";
import * as theme from "../theme.js";

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

/** Quartiles by linear interpolation over the sorted sample. */
export function boxStats(values: number[]): BoxStats {
  const sorted = [...values].sort((a, b) => a - b);
  const at = (p: number): number => {
    const pos = p * (sorted.length - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    const frac = pos - lo;
    return sorted[lo]! * (1 - frac) + sorted[hi]! * frac;
  };
  return {
    min: sorted[0]!,
    q1: at(0.25),
    median: at(0.5),
    q3: at(0.75),
    max: sorted[sorted.length - 1]!,
  };
}

export function renderKsBox(rows: ResultRow[], axes: AxisOptions): string {
  const methods = distinct(rows, "method");
  const stats = methods.map((method) =>
    boxStats(rows.filter((r) => r.method === method).map((r) => r.value)),
  );

  const top = Math.max(...stats.map((s) => s.max));
  const y = linearScale([0, top === 0 ? 1 : top * 1.1], [plotArea.y0, plotArea.y1]);

  const body: string[] = [];
  body.push(...yAxis(y, axes.yLabel ?? "KS statistic"));
  body.push(title(axes.title ?? "Random-projection KS"));

  const span = plotArea.x1 - plotArea.x0;
  const slot = span / methods.length;
  const boxWidth = slot * 0.4;
  methods.forEach((method, i) => {
    const center = plotArea.x0 + slot * (i + 0.5);
    const s = stats[i]!;
    const color = theme.seriesColor(method, i);
    body.push(
      // whisker
      el("line", {
        x1: center, y1: y(s.min), x2: center, y2: y(s.max),
        stroke: color, "stroke-width": 1,
      }),
      el("line", {
        x1: center - boxWidth / 4, y1: y(s.min),
        x2: center + boxWidth / 4, y2: y(s.min),
        stroke: color, "stroke-width": 1,
      }),
      el("line", {
        x1: center - boxWidth / 4, y1: y(s.max),
        x2: center + boxWidth / 4, y2: y(s.max),
        stroke: color, "stroke-width": 1,
      }),
      // interquartile box
      el("rect", {
        x: center - boxWidth / 2, y: y(s.q3),
        width: boxWidth, height: y(s.q1) - y(s.q3),
        fill: color, "fill-opacity": theme.BOX_FILL_OPACITY,
        stroke: color, "stroke-width": 1,
      }),
      el("line", {
        x1: center - boxWidth / 2, y1: y(s.median),
        x2: center + boxWidth / 2, y2: y(s.median),
        stroke: color, "stroke-width": theme.LINE_WIDTH,
      }),
      text(method, {
        x: center, y: plotArea.y0 + 18, "text-anchor": "middle",
        "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
        fill: theme.AXIS_COLOR,
      }),
    );
  });
  body.push(
    el("line", {
      x1: plotArea.x0, y1: plotArea.y0, x2: plotArea.x1, y2: plotArea.y0,
      stroke: theme.AXIS_COLOR, "stroke-width": 1,
    }),
  );
  return document(theme.WIDTH, theme.HEIGHT, body);
}
