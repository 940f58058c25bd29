import { test } from "node:test";
import assert from "node:assert/strict";
import {
  decadeTicks,
  extent,
  linearScale,
  linearTicks,
  logScale,
} from "../src/scales.js";
import { el, escapeText, fmt, text } from "../src/svg.js";

test("linear scale maps domain endpoints onto the range", () => {
  const scale = linearScale([0, 10], [100, 500]);
  assert.equal(scale(0), 100);
  assert.equal(scale(10), 500);
  assert.equal(scale(5), 300);
  // inverted ranges are how y pixels work
  const y = linearScale([0, 1], [400, 40]);
  assert.equal(y(0), 400);
  assert.equal(y(1), 40);
});

test("linear ticks land on 1/2/5 multiples without float drift", () => {
  assert.deepEqual(linearTicks(0, 10), [0, 2, 4, 6, 8, 10]);
  assert.deepEqual(linearTicks(0, 0.3), [0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]);
  for (const tick of linearTicks(0, 0.3)) {
    assert.equal(String(tick).length <= 4, true, `drifted tick ${tick}`);
  }
  assert.deepEqual(linearTicks(3, 3), [3]);
});

test("log scale ticks every decade and rejects nonpositive domains", () => {
  assert.deepEqual(decadeTicks(1e-4, 1e-1), [1e-4, 1e-3, 1e-2, 1e-1]);
  const scale = logScale([1e-4, 1e-1], [0, 300]);
  assert.equal(scale(1e-4), 0);
  assert.equal(scale(1e-1), 300);
  assert.ok(Math.abs(scale(1e-3) - 100) < 1e-9);
  assert.throws(() => logScale([0, 1], [0, 1]), /positive domain/);
});

test("extent scans min and max", () => {
  assert.deepEqual(extent([3, -1, 7, 2]), [-1, 7]);
  assert.throws(() => extent([]), /empty/);
});

test("fmt is stable: integers verbatim, six significant digits otherwise", () => {
  assert.equal(fmt(42), "42");
  assert.equal(fmt(-3), "-3");
  assert.equal(fmt(0.5), "0.5");
  assert.equal(fmt(1 / 3), "0.333333");
  assert.equal(fmt(123.456789), "123.457");
  assert.equal(fmt(100.0), "100");
  assert.throws(() => fmt(Number.NaN), /non-finite/);
  assert.throws(() => fmt(Infinity), /non-finite/);
});

test("svg assembly keeps attribute insertion order and escapes text", () => {
  assert.equal(el("rect", { x: 1, y: 2, width: 3.5 }), '<rect x="1" y="2" width="3.5"/>');
  assert.equal(
    el("g", { id: "a" }, ["<rect/>"]),
    '<g id="a"><rect/></g>',
  );
  assert.equal(escapeText("a<b & c>d"), "a&lt;b &amp; c&gt;d");
  assert.equal(
    text("x<1", { x: 0, y: 0 }),
    '<text x="0" y="0">x&lt;1</text>',
  );
});
