/**
 * Replica aggregation: every plotted point is the median across Monte
 * Carlo replicas and every error bar is the sample standard deviation
 * (ddof = 1) across the replica column, matching the simulator's own
 * aggregate statistics.
 */

import { CsvTable, columnIndex } from "./csv.js";

export interface SweepRow {
  variable: string;
  value: string;
  metric: string;
  replica: number;
  result: number;
}

export interface AggregatePoint {
  value: string;
  numeric: number | null;
  median: number;
  std: number;
  count: number;
}

export function parseSweep(table: CsvTable): SweepRow[] {
  const v = columnIndex(table, "sweep_variable");
  const val = columnIndex(table, "value");
  const m = columnIndex(table, "metric");
  const rep = columnIndex(table, "replica");
  const res = columnIndex(table, "result");
  return table.rows.map((row) => ({
    variable: row[v],
    value: row[val],
    metric: row[m],
    replica: Number(row[rep]),
    result: Number(row[res]),
  }));
}

export function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1
    ? sorted[mid]
    : 0.5 * (sorted[mid - 1] + sorted[mid]);
}

/** Sample standard deviation (ddof = 1); zero for fewer than two values. */
export function sampleStd(values: number[]): number {
  if (values.length < 2) return 0;
  const mean = values.reduce((a, b) => a + b, 0) / values.length;
  const ss = values.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return Math.sqrt(ss / (values.length - 1));
}

/**
 * Group one metric's rows by sweep value, preserving numeric order when
 * every value parses as a number and first-appearance order otherwise.
 */
export function aggregate(rows: SweepRow[], metric: string): AggregatePoint[] {
  const groups = new Map<string, number[]>();
  for (const row of rows) {
    if (row.metric !== metric) continue;
    const bucket = groups.get(row.value);
    if (bucket) bucket.push(row.result);
    else groups.set(row.value, [row.result]);
  }
  const points: AggregatePoint[] = [...groups.entries()].map(
    ([value, results]) => ({
      value,
      numeric: numericValue(value),
      median: median(results),
      std: sampleStd(results),
      count: results.length,
    }),
  );
  if (points.every((p) => p.numeric !== null)) {
    points.sort((a, b) => (a.numeric as number) - (b.numeric as number));
  }
  return points;
}

function numericValue(value: string): number | null {
  if (value === "inf") return null;
  const parsed = Number(value);
  return Number.isFinite(parsed) ? parsed : null;
}

export function metricsIn(rows: SweepRow[]): string[] {
  return [...new Set(rows.map((r) => r.metric))];
}
