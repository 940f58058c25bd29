import { test } from "node:test";
import assert from "node:assert/strict";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import {
  PlotsError,
  distinct,
  filterRows,
  loadResults,
} from "../src/csv.js";

const HEADER = "experiment,model,method,trial,metric,value";

function writeCsv(lines: string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-csv-"));
  const path = join(dir, "results.csv");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

test("loads a well-formed results file", () => {
  const path = writeCsv([
    HEADER,
    "sample,banana,lmc,0,esjd,0.123",
    "sample,banana,ilmc,1,esjd,4.5e-2",
  ]);
  const table = loadResults(path);
  assert.equal(table.header, HEADER);
  assert.equal(table.rows.length, 2);
  const first = table.rows[0]!;
  assert.equal(first.experiment, "sample");
  assert.equal(first.model, "banana");
  assert.equal(first.method, "lmc");
  assert.equal(first.trial, 0);
  assert.equal(first.metric, "esjd");
  assert.equal(first.value, 0.123);
  assert.equal(table.rows[1]!.value, 0.045);
});

test("raw field reproduces the source line byte for byte", () => {
  const line = "sample,banana,lmc,3,acceptance_rate,0.8707123456789012";
  const table = loadResults(writeCsv([HEADER, line]));
  assert.equal(table.rows[0]!.raw, line);
});

test("names the missing column", () => {
  const path = writeCsv([
    "experiment,model,method,trial,value",
    "sample,banana,lmc,0,0.1",
  ]);
  assert.throws(
    () => loadResults(path),
    (err: unknown) =>
      err instanceof PlotsError && err.message.includes("missing column 'metric'"),
  );
});

test("rejects a non-integer trial with its row number", () => {
  const path = writeCsv([HEADER, "sample,banana,lmc,first,esjd,0.1"]);
  assert.throws(
    () => loadResults(path),
    (err: unknown) =>
      err instanceof PlotsError &&
      err.message.includes("row 1") &&
      err.message.includes("trial"),
  );
});

test("rejects a non-numeric value", () => {
  const path = writeCsv([
    HEADER,
    "sample,banana,lmc,0,esjd,0.1",
    "sample,banana,lmc,1,esjd,oops",
  ]);
  assert.throws(
    () => loadResults(path),
    (err: unknown) =>
      err instanceof PlotsError && err.message.includes("'oops' is not a number"),
  );
});

test("missing file raises a readable error", () => {
  assert.throws(
    () => loadResults("/nonexistent/results.csv"),
    (err: unknown) => err instanceof PlotsError && err.message.includes("cannot read"),
  );
});

test("filter keeps matching rows in input order", () => {
  const table = loadResults(
    writeCsv([
      HEADER,
      "sample,banana,lmc,0,esjd,0.1",
      "sample,banana,hmc,0,esjd,0.2",
      "sample,banana,lmc,0,min_ess,900",
      "sample,banana,lmc,1,esjd,0.3",
    ]),
  );
  const rows = filterRows(table, { method: "lmc", metric: "esjd" });
  assert.deepEqual(
    rows.map((r) => r.value),
    [0.1, 0.3],
  );
});

test("empty filter result reports the filter that matched nothing", () => {
  const table = loadResults(writeCsv([HEADER, "sample,banana,lmc,0,esjd,0.1"]));
  assert.throws(
    () => filterRows(table, { model: "banana", metric: "missing" }),
    (err: unknown) =>
      err instanceof PlotsError &&
      err.message.includes("no rows matched") &&
      err.message.includes("model=banana") &&
      err.message.includes("metric=missing"),
  );
});

test("distinct preserves first-seen order", () => {
  const table = loadResults(
    writeCsv([
      HEADER,
      "sample,banana,lmc,0,esjd,0.1",
      "sample,banana,hmc,0,esjd,0.2",
      "sample,banana,lmc,1,esjd,0.3",
      "sample,banana,ilmc,0,esjd,0.4",
    ]),
  );
  assert.deepEqual(distinct(table.rows, "method"), ["lmc", "hmc", "ilmc"]);
});
