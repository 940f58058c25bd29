/** The standard figure set over a directory of per-experiment CLI outputs:
 * results/<experiment>/results.csv as produced by the sampler package. */

import { existsSync } from "node:fs";
import { join } from "node:path";
import { PlotsError } from "./csv.js";
import { FigureSpec } from "./figspec.js";
import { renderFigure, RenderResult } from "./render.js";

export function standardFigures(resultsDir: string, outDir: string): FigureSpec[] {
  const input = (experiment: string) => join(resultsDir, experiment, "results.csv");
  return [
    {
      kind: "order-slope",
      input: input("order-study"),
      output: join(outDir, "order-slope.svg"),
      filter: { model: "geodesic" },
      axes: { title: "Integrator local error", xLabel: "step size", yLabel: "local error" },
    },
    {
      kind: "bars",
      input: input("sample"),
      output: join(outDir, "esjd-bars.svg"),
      filter: { metric: "esjd" },
      axes: { title: "Expected squared jump distance" },
    },
    {
      kind: "bars",
      input: input("sample"),
      output: join(outDir, "min-ess-bars.svg"),
      filter: { metric: "min_ess" },
      axes: { title: "Minimum effective sample size" },
    },
    {
      kind: "ks-box",
      input: input("sample"),
      output: join(outDir, "ks-box.svg"),
      filter: { metric: "ks_stat" },
      axes: { title: "Random-projection KS by method" },
    },
    {
      kind: "heatmap",
      input: input("harmonic-esjd"),
      output: join(outDir, "esjd-difference-heatmap.svg"),
      filter: { method: "difference" },
      axes: { title: "Jump-distance difference (leapfrog minus inverted)" },
    },
  ];
}

export function renderAll(resultsDir: string, outDir: string): RenderResult[] {
  const specs = standardFigures(resultsDir, outDir);
  for (const spec of specs) {
    if (!existsSync(spec.input)) {
      const experiment = spec.input.split("/").slice(-2, -1)[0];
      throw new PlotsError(
        `${spec.input} not found; run \`geomc ${experiment} --out ${join(
          resultsDir,
          experiment ?? "",
        )}\` first`,
      );
    }
  }
  return specs.map(renderFigure);
}
