/** Bar panel for one scalar metric grouped by method (trial-averaged). */

import { PlotsError, ResultRow, distinct } from "../csv.js";
import { AxisOptions } from "../figspec.js";
import { plotArea, title, yAxis } from "../chrome.js";
import { linearScale } from "../scales.js";
import { document, el, fmt, text } from "../svg.js";
import * as theme from "../theme.js";

export function renderBars(rows: ResultRow[], axes: AxisOptions): string {
  const metrics = distinct(rows, "metric");
  if (metrics.length !== 1) {
    throw new PlotsError(
      `bar figure needs exactly one metric, got: ${metrics.join(", ")} ` +
        "(add a metric filter)",
    );
  }
  const metric = metrics[0]!;
  const methods = distinct(rows, "method");
  const heights = methods.map((method) => {
    const values = rows.filter((r) => r.method === method).map((r) => r.value);
    return values.reduce((a, b) => a + b, 0) / values.length;
  });

  const top = Math.max(...heights, 0);
  const y = linearScale([0, top === 0 ? 1 : top * 1.1], [plotArea.y0, plotArea.y1]);

  const body: string[] = [];
  body.push(...yAxis(y, axes.yLabel ?? metric));
  body.push(title(axes.title ?? metric));

  const span = plotArea.x1 - plotArea.x0;
  const slot = span / methods.length;
  const barWidth = slot * 0.6;
  methods.forEach((method, i) => {
    const center = plotArea.x0 + slot * (i + 0.5);
    const height = heights[i]!;
    body.push(
      el("rect", {
        x: center - barWidth / 2,
        y: y(height),
        width: barWidth,
        height: Math.max(0, plotArea.y0 - y(height)),
        fill: theme.seriesColor(method, i),
        "fill-opacity": theme.BAR_FILL_OPACITY,
      }),
      text(method, {
        x: center, y: plotArea.y0 + 18, "text-anchor": "middle",
        "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
        fill: theme.AXIS_COLOR,
      }),
      text(height.toPrecision(3), {
        x: center, y: y(height) - 6, "text-anchor": "middle",
        "font-family": theme.FONT_FAMILY, "font-size": theme.FONT_SIZE,
        fill: theme.AXIS_COLOR,
      }),
    );
  });
  // baseline on top of the bars
  body.push(
    el("line", {
      x1: plotArea.x0, y1: plotArea.y0, x2: plotArea.x1, y2: plotArea.y0,
      stroke: theme.AXIS_COLOR, "stroke-width": 1,
    }),
  );
  body.push(
    text(axes.xLabel ?? "method", {
      x: (plotArea.x0 + plotArea.x1) / 2, y: theme.HEIGHT - 14,
      "text-anchor": "middle", "font-family": theme.FONT_FAMILY,
      "font-size": theme.FONT_SIZE, fill: theme.AXIS_COLOR,
    }),
  );
  return document(theme.WIDTH, theme.HEIGHT, body);
}
