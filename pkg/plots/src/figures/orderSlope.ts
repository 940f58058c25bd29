/** Log-log local-error-vs-step-size figure: one line per integrator, plus a
 * dashed slope-3 guide. Input rows carry squared errors; the y axis shows the
 * error itself, so the guide slope is 3 (the squared data would fit 6). */

import { PlotsError, ResultRow, distinct } from "../csv.js";
import { AxisOptions } from "../figspec.js";
import { LegendEntry, legend, plotArea, title, xAxis, yAxis } from "../chrome.js";
import { extent, logScale } from "../scales.js";
import { document, el, fmt } from "../svg.js";
import * as theme from "../theme.js";

interface SeriesPoint {
  eps: number;
  error: number;
}

function collectSeries(rows: ResultRow[], method: string): SeriesPoint[] {
  const byTrial = new Map<number, { eps?: number; sqError?: number }>();
  for (const row of rows) {
    if (row.method !== method) continue;
    const slot = byTrial.get(row.trial) ?? {};
    if (row.metric === "eps") slot.eps = row.value;
    if (row.metric === "sq_error") slot.sqError = row.value;
    byTrial.set(row.trial, slot);
  }
  const points: SeriesPoint[] = [];
  for (const slot of byTrial.values()) {
    if (slot.eps === undefined || slot.sqError === undefined) continue;
    points.push({ eps: slot.eps, error: Math.sqrt(slot.sqError) });
  }
  if (points.length === 0) {
    throw new PlotsError(`no eps/sq_error pairs for method '${method}'`);
  }
  points.sort((a, b) => a.eps - b.eps);
  return points;
}

function fittedSlope(rows: ResultRow[], method: string): number | undefined {
  const row = rows.find((r) => r.method === method && r.metric === "slope");
  return row?.value;
}

export function renderOrderSlope(rows: ResultRow[], axes: AxisOptions): string {
  const methods = distinct(
    rows.filter((r) => r.metric === "eps" || r.metric === "sq_error"),
    "method",
  );
  if (methods.length === 0) {
    throw new PlotsError("no eps/sq_error rows; is this an order-study results file?");
  }
  const series = methods.map((m) => ({ method: m, points: collectSeries(rows, m) }));

  const allEps = series.flatMap((s) => s.points.map((p) => p.eps));
  const allErr = series.flatMap((s) => s.points.map((p) => p.error));
  const x = logScale(extent(allEps), [plotArea.x0, plotArea.x1]);
  const y = logScale(extent(allErr), [plotArea.y0, plotArea.y1]);

  const body: string[] = [];
  body.push(...xAxis(x, axes.xLabel ?? "step size"));
  body.push(...yAxis(y, axes.yLabel ?? "local error"));
  body.push(title(axes.title ?? "Integrator local error"));

  // slope-3 guide anchored on the first series' smallest step
  const anchor = series[0]!.points[0]!;
  const c = anchor.error / Math.pow(anchor.eps, 3);
  const [gx0, gx1] = x.domain;
  body.push(
    el("line", {
      x1: x(gx0), y1: y(c * Math.pow(gx0, 3)),
      x2: x(gx1), y2: y(c * Math.pow(gx1, 3)),
      stroke: theme.GUIDE_COLOR, "stroke-width": theme.LINE_WIDTH,
      "stroke-dasharray": theme.GUIDE_DASH,
    }),
  );

  const entries: LegendEntry[] = [
    { label: "slope 3", color: theme.GUIDE_COLOR, dash: theme.GUIDE_DASH },
  ];
  series.forEach((s, i) => {
    const color = theme.seriesColor(s.method, i);
    const pointsAttr = s.points
      .map((p) => `${fmt(x(p.eps))},${fmt(y(p.error))}`)
      .join(" ");
    body.push(
      el("polyline", {
        points: pointsAttr, fill: "none", stroke: color,
        "stroke-width": theme.LINE_WIDTH,
      }),
    );
    for (const p of s.points) {
      body.push(
        el("circle", {
          cx: x(p.eps), cy: y(p.error), r: theme.MARKER_RADIUS, fill: color,
        }),
      );
    }
    const slope = fittedSlope(rows, s.method);
    const label = slope === undefined ? s.method : `${s.method} (slope ${slope.toFixed(2)})`;
    entries.push({ label, color });
  });
  body.push(...legend(entries, plotArea.x0 + 12, plotArea.y1 + 16));

  return document(theme.WIDTH, theme.HEIGHT, body);
}
