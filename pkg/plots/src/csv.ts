import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class PlotsError extends Error {}

export const RESULT_COLUMNS = [
  "experiment",
  "model",
  "method",
  "trial",
  "metric",
  "value",
] as const;

export interface ResultRow {
  experiment: string;
  model: string;
  method: string;
  trial: number;
  metric: string;
  value: number;
  /** verbatim source line so sidecars can echo input bytes */
  raw: string;
}

export interface ResultTable {
  rows: ResultRow[];
  header: string;
}

export function loadResults(path: string): ResultTable {
  let content: string;
  try {
    content = readFileSync(path, "utf8");
  } catch {
    throw new PlotsError(`cannot read ${path}`);
  }
  const parsed = Papa.parse<Record<string, string>>(content.trimEnd(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new PlotsError(`${path}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of RESULT_COLUMNS) {
    if (!fields.includes(column)) {
      throw new PlotsError(`${path}: missing column '${column}'`);
    }
  }
  const rows = parsed.data.map((record, i) => {
    const trial = Number(record.trial);
    const value = Number(record.value);
    if (!Number.isInteger(trial)) {
      throw new PlotsError(`${path} row ${i + 1}: trial '${record.trial}' is not an integer`);
    }
    if (!Number.isFinite(value)) {
      throw new PlotsError(`${path} row ${i + 1}: value '${record.value}' is not a number`);
    }
    return {
      experiment: record.experiment ?? "",
      model: record.model ?? "",
      method: record.method ?? "",
      trial,
      metric: record.metric ?? "",
      value,
      raw: RESULT_COLUMNS.map((c) => record[c] ?? "").join(","),
    };
  });
  return { rows, header: RESULT_COLUMNS.join(",") };
}

export interface RowFilter {
  model?: string;
  method?: string;
  metric?: string;
}

export const FILTER_COLUMNS = ["model", "method", "metric"] as const;

export function filterRows(table: ResultTable, filter: RowFilter): ResultRow[] {
  const matched = table.rows.filter(
    (row) =>
      (filter.model === undefined || row.model === filter.model) &&
      (filter.method === undefined || row.method === filter.method) &&
      (filter.metric === undefined || row.metric === filter.metric),
  );
  if (matched.length === 0) {
    const description = FILTER_COLUMNS.filter((c) => filter[c] !== undefined)
      .map((c) => `${c}=${filter[c]}`)
      .join(" ");
    throw new PlotsError(`no rows matched${description ? " " + description : ""}`);
  }
  return matched;
}

/** In-order distinct values of one column. */
export function distinct(rows: ResultRow[], column: "method" | "model" | "metric"): string[] {
  const out: string[] = [];
  for (const row of rows) {
    const v = row[column];
    if (!out.includes(v)) out.push(v);
  }
  return out;
}
