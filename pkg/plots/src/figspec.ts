import { readFileSync } from "node:fs";
import { FILTER_COLUMNS, PlotsError, RowFilter } from "./csv.js";

export const FIGURE_KINDS = ["order-slope", "bars", "ks-box", "heatmap"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface AxisOptions {
  xScale?: "linear" | "log";
  yScale?: "linear" | "log";
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  filter: RowFilter;
  axes: AxisOptions;
}

const SPEC_KEYS = new Set(["kind", "input", "output", "filter", "axes"]);
const AXIS_KEYS = new Set(["xScale", "yScale", "title", "xLabel", "yLabel"]);

export function validateSpec(data: unknown, source: string): FigureSpec {
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new PlotsError(`${source}: figure spec must be a JSON object`);
  }
  const record = data as Record<string, unknown>;
  for (const key of Object.keys(record)) {
    if (!SPEC_KEYS.has(key)) throw new PlotsError(`${source}: unknown key '${key}'`);
  }
  const kind = record.kind;
  if (typeof kind !== "string" || !FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new PlotsError(
      `${source}: kind must be one of ${FIGURE_KINDS.join(", ")}`,
    );
  }
  for (const field of ["input", "output"] as const) {
    if (typeof record[field] !== "string" || record[field] === "") {
      throw new PlotsError(`${source}: '${field}' must be a non-empty string`);
    }
  }
  const filter: RowFilter = {};
  if (record.filter !== undefined) {
    if (typeof record.filter !== "object" || record.filter === null) {
      throw new PlotsError(`${source}: 'filter' must be an object`);
    }
    for (const [key, value] of Object.entries(record.filter)) {
      if (!(FILTER_COLUMNS as readonly string[]).includes(key)) {
        throw new PlotsError(`${source}: filter refers to unknown column '${key}'`);
      }
      if (typeof value !== "string") {
        throw new PlotsError(`${source}: filter.${key} must be a string`);
      }
      filter[key as keyof RowFilter] = value;
    }
  }
  const axes: AxisOptions = {};
  if (record.axes !== undefined) {
    if (typeof record.axes !== "object" || record.axes === null) {
      throw new PlotsError(`${source}: 'axes' must be an object`);
    }
    for (const [key, value] of Object.entries(record.axes)) {
      if (!AXIS_KEYS.has(key)) {
        throw new PlotsError(`${source}: unknown axes key '${key}'`);
      }
      if (key === "xScale" || key === "yScale") {
        if (value !== "linear" && value !== "log") {
          throw new PlotsError(`${source}: axes.${key} must be 'linear' or 'log'`);
        }
        axes[key] = value;
      } else if (typeof value === "string") {
        axes[key as "title" | "xLabel" | "yLabel"] = value;
      } else {
        throw new PlotsError(`${source}: axes.${key} must be a string`);
      }
    }
  }
  return { kind: kind as FigureKind, input: record.input as string, output: record.output as string, filter, axes };
}

export function loadSpec(path: string): FigureSpec {
  let content: string;
  try {
    content = readFileSync(path, "utf8");
  } catch {
    throw new PlotsError(`cannot read ${path}`);
  }
  let data: unknown;
  try {
    data = JSON.parse(content);
  } catch (err) {
    throw new PlotsError(`${path}: invalid JSON (${(err as Error).message})`);
  }
  return validateSpec(data, path);
}
