import { test } from "node:test";
import assert from "node:assert/strict";
import { PlotsError, ResultRow } from "../src/csv.js";
import { renderBars } from "../src/figures/bars.js";
import { collectCells, renderHeatmap } from "../src/figures/heatmap.js";
import { boxStats, renderKsBox } from "../src/figures/ksBox.js";
import { renderOrderSlope } from "../src/figures/orderSlope.js";

function row(method: string, trial: number, metric: string, value: number): ResultRow {
  return {
    experiment: "t",
    model: "m",
    method,
    trial,
    metric,
    value,
    raw: `t,m,${method},${trial},${metric},${value}`,
  };
}

const count = (haystack: string, needle: string): number =>
  haystack.split(needle).length - 1;

function orderRows(): ResultRow[] {
  const rows: ResultRow[] = [];
  const grid = [0.4, 0.2, 0.1];
  for (const [mi, method] of (["lagrangian", "generalized"] as const).entries()) {
    grid.forEach((eps, i) => {
      const error = (mi + 1) * Math.pow(eps, 3); // perfect cubic data
      rows.push(row(method, i, "eps", eps));
      rows.push(row(method, i, "sq_error", error * error));
    });
    rows.push(row(method, 0, "slope", 3 + mi / 100));
  }
  return rows;
}

test("order-slope figure draws one line per method plus the slope-3 guide", () => {
  const svg = renderOrderSlope(orderRows(), {});
  assert.equal(count(svg, "<polyline"), 2);
  assert.equal(count(svg, "<circle"), 6);
  assert.ok(count(svg, "stroke-dasharray") >= 1, "dashed guide missing");
  assert.ok(svg.includes("lagrangian (slope 3.00)"));
  assert.ok(svg.includes("generalized (slope 3.01)"));
  assert.ok(svg.includes("slope 3"));
  assert.ok(svg.startsWith('<svg xmlns="http://www.w3.org/2000/svg"'));
  assert.ok(svg.endsWith("</svg>\n"));
});

test("order-slope rejects rows without eps/sq_error pairs", () => {
  assert.throws(
    () => renderOrderSlope([row("lmc", 0, "esjd", 0.1)], {}),
    (err: unknown) => err instanceof PlotsError && err.message.includes("eps/sq_error"),
  );
});

test("bars average trials per method and label the values", () => {
  const svg = renderBars(
    [
      row("hmc", 0, "esjd", 2),
      row("hmc", 1, "esjd", 4),
      row("lmc", 0, "esjd", 10),
      row("lmc", 1, "esjd", 14),
    ],
    {},
  );
  assert.equal(count(svg, "<rect"), 2);
  assert.ok(svg.includes(">3.00<"), "hmc mean label");
  assert.ok(svg.includes(">12.0<"), "lmc mean label");
  assert.ok(svg.includes(">hmc<") && svg.includes(">lmc<"));
});

test("bars demand a single metric", () => {
  assert.throws(
    () => renderBars([row("hmc", 0, "esjd", 1), row("hmc", 0, "min_ess", 2)], {}),
    (err: unknown) =>
      err instanceof PlotsError &&
      err.message.includes("exactly one metric") &&
      err.message.includes("esjd, min_ess"),
  );
});

test("box stats interpolate quartiles over the sorted sample", () => {
  assert.deepEqual(boxStats([4, 1, 3, 2]), {
    min: 1,
    q1: 1.75,
    median: 2.5,
    q3: 3.25,
    max: 4,
  });
  assert.deepEqual(boxStats([1, 2, 3, 4, 5]), {
    min: 1,
    q1: 2,
    median: 3,
    q3: 4,
    max: 5,
  });
  assert.deepEqual(boxStats([7]), { min: 7, q1: 7, median: 7, q3: 7, max: 7 });
});

test("ks box figure draws one box per method", () => {
  const rows: ResultRow[] = [];
  for (let trial = 0; trial < 8; trial += 1) {
    rows.push(row("lmc", trial, "ks_stat", 0.01 + 0.001 * trial));
    rows.push(row("ilmc", trial, "ks_stat", 0.02 + 0.002 * trial));
  }
  const svg = renderKsBox(rows, {});
  assert.equal(count(svg, "<rect"), 2);
  assert.ok(svg.includes(">lmc<") && svg.includes(">ilmc<"));
});

test("heatmap cells come from eps/k/esjd triples", () => {
  const rows = [
    row("difference", 0, "eps", 0.1),
    row("difference", 0, "k", 1),
    row("difference", 0, "esjd", 0.5),
    row("difference", 1, "eps", 0.1),
    row("difference", 1, "k", 2),
    row("difference", 1, "esjd", 0.25),
  ];
  assert.deepEqual(collectCells(rows), [
    { eps: 0.1, k: 1, value: 0.5 },
    { eps: 0.1, k: 2, value: 0.25 },
  ]);
  assert.throws(
    () => collectCells([row("difference", 5, "eps", 0.1), row("difference", 5, "k", 1)]),
    (err: unknown) =>
      err instanceof PlotsError && err.message.includes("trial 5 lacks"),
  );
});

test("heatmap renders the full grid plus a 24-step color bar", () => {
  const rows: ResultRow[] = [];
  let trial = 0;
  for (const eps of [0.1, 0.5]) {
    for (const k of [1, 2, 3]) {
      rows.push(row("difference", trial, "eps", eps));
      rows.push(row("difference", trial, "k", k));
      rows.push(row("difference", trial, "esjd", eps * k));
      trial += 1;
    }
  }
  const svg = renderHeatmap(rows, {});
  assert.equal(count(svg, "<rect"), 6 + 24);
  assert.ok(svg.includes("1.50"), "max annotation");
  assert.ok(svg.includes("0.100"), "min annotation");
});
