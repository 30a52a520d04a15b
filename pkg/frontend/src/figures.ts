/**
 * Figure recipes: map a figure id plus input CSVs onto a rendered chart.
 *
 * Sweep figures read the long-format `sweep.csv` schema
 * (sweep_variable,value,metric,replica,result), one file per plotted
 * series. Prediction figures read `predictions.csv`
 * (replica,k,split,input,target,prediction); the plotted line is the
 * median across replicas and the shaded band its sample std.
 */

import { basename } from "path";
import { aggregate, parseSweep, SweepRow } from "./aggregate.js";
import { readCsv, columnIndex } from "./csv.js";
import {
  BandSeries,
  ChartSpec,
  ReferenceLine,
  renderBarChart,
  renderLineChart,
  renderTimeSeries,
  Series,
} from "./svg.js";
import { median, sampleStd } from "./aggregate.js";

export const PALETTE = [
  "#4aa3d8", // indistinguishable pair
  "#e87ea1", // distinguishable pair
  "#6dbf6d", // single photon
  "#f2a65a",
  "#8a7fd4",
  "#777777",
];

const REFERENCE_COLOR = "#d43d3d";

interface LineRecipe {
  kind: "line";
  metric: string;
  xLabel: string;
  yLabel: string;
  title: string;
  xLog?: boolean;
  yLog?: boolean;
}

interface BarRecipe {
  kind: "bar";
  metric: string;
  xLabel: string;
  yLabel: string;
  title: string;
}

interface PredictionRecipe {
  kind: "prediction";
  title: string;
  testOnly?: boolean;
  xFromInput?: boolean;
  splitMarker?: boolean;
}

interface MaeRecipe {
  kind: "mae";
  title: string;
}

interface DelayProfileRecipe {
  kind: "delay_profile";
  title: string;
}

type Recipe =
  | LineRecipe
  | BarRecipe
  | PredictionRecipe
  | MaeRecipe
  | DelayProfileRecipe;

const mseLine = (title: string, xLabel: string): LineRecipe => ({
  kind: "line",
  metric: "mse",
  xLabel,
  yLabel: "test MSE",
  title,
  yLog: true,
});

export const RECIPES: Record<string, Recipe> = {
  fig2a: {
    kind: "line",
    metric: "r2_d",
    xLabel: "delay d",
    yLabel: "recall R2",
    title: "Short-term memory",
  },
  fig2b: mseLine("Monomial reconstruction", "monomial degree n"),
  fig2c: mseLine("Polynomial reconstruction", "polynomial order N"),
  fig2d: { kind: "prediction", title: "Polynomial reconstruction example",
           xFromInput: true },
  fig3a: { kind: "bar", metric: "accuracy", xLabel: "delay d",
           yLabel: "accuracy", title: "Temporal XOR" },
  fig3b: { kind: "prediction", title: "Temporal XOR test output",
           testOnly: true },
  fig3c: mseLine("Autoregressive benchmark", "recurrence order N"),
  fig3d: { kind: "prediction", title: "Order-5 benchmark test output",
           testOnly: true },
  fig3e: { kind: "mae", title: "Mean absolute test error" },
  fig4b: { kind: "prediction", title: "Chaotic forecasting (distinguishable)",
           splitMarker: true },
  fig4c: { kind: "prediction", title: "Chaotic forecasting (indistinguishable)",
           splitMarker: true },
  fig5: { kind: "prediction", title: "Shuffled-input control", testOnly: true },
  s5: {
    kind: "line",
    metric: "mse",
    xLabel: "detection events per step",
    yLabel: "test MSE",
    title: "Finite counting statistics",
    xLog: true,
    yLog: true,
  },
  s11a: mseLine("Monomial reconstruction vs visibility", "monomial degree n"),
  s11b: mseLine("Monomial reconstruction vs photon number", "monomial degree n"),
  s12: { kind: "delay_profile", title: "Memory vs feedback loops" },
  s13a: mseLine("Autoregressive benchmark (ideal)", "recurrence order N"),
  s13c: { kind: "bar", metric: "accuracy", xLabel: "delay d",
          yLabel: "accuracy", title: "Temporal XOR (ideal)" },
  s13d: mseLine("Forecast horizon sweep", "prediction horizon t_f"),
};

export const FIGURE_IDS = Object.keys(RECIPES);

export interface RenderRequest {
  figure: string;
  inputs: string[];
  labels?: string[];
  colors?: string[];
  title?: string;
}

export function renderFigure(req: RenderRequest): string {
  const recipe = RECIPES[req.figure];
  if (!recipe) {
    throw new Error(
      `unknown figure id "${req.figure}" (known: ${FIGURE_IDS.join(", ")})`,
    );
  }
  if (req.inputs.length === 0) {
    throw new Error("at least one --input CSV is required");
  }
  const labels = req.inputs.map(
    (path, i) => req.labels?.[i] ?? basename(path).replace(/\.csv$/, ""),
  );
  const colors = req.inputs.map(
    (_, i) => req.colors?.[i] ?? PALETTE[i % PALETTE.length],
  );
  const title = req.title ?? recipe.title;
  switch (recipe.kind) {
    case "line":
      return renderSweepLines(recipe, req.inputs, labels, colors, title);
    case "bar":
      return renderSweepBars(recipe, req.inputs, labels, colors, title);
    case "prediction":
      return renderPredictions(recipe, req.inputs, labels, colors, title);
    case "mae":
      return renderMae(req.inputs, labels, colors, title);
    case "delay_profile":
      return renderDelayProfile(req.inputs, labels, colors, title);
  }
}

function loadSweep(path: string): SweepRow[] {
  return parseSweep(readCsv(path));
}

function renderSweepLines(
  recipe: LineRecipe,
  inputs: string[],
  labels: string[],
  colors: string[],
  title: string,
): string {
  const series: Series[] = [];
  const references: ReferenceLine[] = [];
  inputs.forEach((path, i) => {
    const rows = loadSweep(path);
    const points = aggregate(rows, recipe.metric);
    const finite = points.filter((p) => p.numeric !== null);
    series.push({
      label: labels[i],
      color: colors[i],
      points: finite.map((p) => ({
        x: p.numeric as number,
        y: p.median,
        std: p.std,
      })),
    });
    for (const p of points.filter((p) => p.numeric === null)) {
      references.push({
        label: `${labels[i]} (exact)`,
        color: REFERENCE_COLOR,
        y: p.median,
      });
    }
  });
  return renderLineChart({
    title,
    xLabel: recipe.xLabel,
    yLabel: recipe.yLabel,
    xLog: recipe.xLog,
    yLog: recipe.yLog,
    series,
    references,
  });
}

function renderSweepBars(
  recipe: BarRecipe,
  inputs: string[],
  labels: string[],
  colors: string[],
  title: string,
): string {
  const perInput = inputs.map((path) => aggregate(loadSweep(path), recipe.metric));
  const categories = [
    ...new Set(perInput.flatMap((points) => points.map((p) => p.value))),
  ];
  const series: Series[] = perInput.map((points, i) => ({
    label: labels[i],
    color: colors[i],
    points: points.map((p) => ({
      x: categories.indexOf(p.value),
      y: p.median,
      std: p.std,
    })),
  }));
  const spec: ChartSpec = {
    title,
    xLabel: recipe.xLabel,
    yLabel: recipe.yLabel,
    series,
    categories,
  };
  return renderBarChart(spec);
}

interface PredictionRows {
  k: number[];
  input: number[];
  target: number[];
  split: string[];
  /** prediction medians and stds across replicas, aligned with k */
  median: number[];
  std: number[];
}

function loadPredictions(path: string, testOnly: boolean): PredictionRows {
  const table = readCsv(path);
  const rep = columnIndex(table, "replica");
  const kCol = columnIndex(table, "k");
  const splitCol = columnIndex(table, "split");
  const inputCol = columnIndex(table, "input");
  const targetCol = columnIndex(table, "target");
  const predCol = columnIndex(table, "prediction");
  const byStep = new Map<
    number,
    { input: number; target: number; split: string; preds: number[] }
  >();
  for (const row of table.rows) {
    const split = row[splitCol];
    if (testOnly && split !== "test") continue;
    const k = Number(row[kCol]);
    const entry = byStep.get(k);
    const pred = Number(row[predCol]);
    if (entry) {
      entry.preds.push(pred);
    } else {
      byStep.set(k, {
        input: Number(row[inputCol]),
        target: Number(row[targetCol]),
        split,
        preds: [pred],
      });
    }
    void rep;
  }
  const ks = [...byStep.keys()].sort((a, b) => a - b);
  return {
    k: ks,
    input: ks.map((k) => byStep.get(k)!.input),
    target: ks.map((k) => byStep.get(k)!.target),
    split: ks.map((k) => byStep.get(k)!.split),
    median: ks.map((k) => median(byStep.get(k)!.preds)),
    std: ks.map((k) => sampleStd(byStep.get(k)!.preds)),
  };
}

function renderPredictions(
  recipe: PredictionRecipe,
  inputs: string[],
  labels: string[],
  colors: string[],
  title: string,
): string {
  const loaded = inputs.map((path) => loadPredictions(path, !!recipe.testOnly));
  const first = loaded[0];
  const xOf = (rows: PredictionRows, i: number) =>
    recipe.xFromInput ? rows.input[i] : rows.k[i];
  const order = (rows: PredictionRows) => {
    const idx = rows.k.map((_, i) => i);
    if (recipe.xFromInput) idx.sort((a, b) => rows.input[a] - rows.input[b]);
    return idx;
  };
  const firstOrder = order(first);
  const target = firstOrder.map((i) => ({ x: xOf(first, i), y: first.target[i] }));
  const series: BandSeries[] = loaded.map((rows, si) => {
    const idx = order(rows);
    return {
      label: labels[si],
      color: colors[si],
      points: idx.map((i) => ({
        x: xOf(rows, i),
        y: rows.median[i],
        std: rows.std[i],
      })),
    };
  });
  let splitAt: number | undefined;
  if (recipe.splitMarker) {
    const firstTest = first.split.indexOf("test");
    if (firstTest > 0) splitAt = first.k[firstTest] - 0.5;
  }
  return renderTimeSeries({
    title,
    xLabel: recipe.xFromInput ? "input x" : "step k",
    yLabel: recipe.xFromInput ? "target f(x)" : "signal",
    target,
    series,
    splitAt,
  });
}

function renderMae(
  inputs: string[],
  labels: string[],
  colors: string[],
  title: string,
): string {
  // one bar per configuration: normalized mean absolute test error,
  // median and std across replicas
  const series: Series[] = inputs.map((path, i) => {
    const table = readCsv(path);
    const rep = columnIndex(table, "replica");
    const splitCol = columnIndex(table, "split");
    const targetCol = columnIndex(table, "target");
    const predCol = columnIndex(table, "prediction");
    const byReplica = new Map<number, { t: number[]; p: number[] }>();
    for (const row of table.rows) {
      if (row[splitCol] !== "test") continue;
      const r = Number(row[rep]);
      const entry = byReplica.get(r) ?? { t: [], p: [] };
      entry.t.push(Number(row[targetCol]));
      entry.p.push(Number(row[predCol]));
      byReplica.set(r, entry);
    }
    const maes = [...byReplica.values()].map(({ t, p }) => {
      const lo = Math.min(...t);
      const hi = Math.max(...t);
      const scale = hi > lo ? hi - lo : 1;
      const norm = (x: number) => (x - lo) / scale;
      const err = t.map((ti, j) => Math.abs(norm(p[j]) - norm(ti)));
      return err.reduce((a, b) => a + b, 0) / Math.max(err.length, 1);
    });
    return {
      label: labels[i],
      color: colors[i],
      points: [{ x: i, y: median(maes), std: sampleStd(maes) }],
    };
  });
  return renderBarChart({
    title,
    xLabel: "input configuration",
    yLabel: "normalized MAE",
    series,
    categories: labels,
  });
}

function renderDelayProfile(
  inputs: string[],
  labels: string[],
  colors: string[],
  title: string,
): string {
  // accepts memory-suite CSVs (metric r2_d, value = delay) and
  // feedback-sweep CSVs (metrics r2_d<k>, value = mode label)
  const series: Series[] = [];
  let next = 0;
  for (let i = 0; i < inputs.length; i += 1) {
    const rows = loadSweep(inputs[i]);
    const plain = aggregate(rows, "r2_d");
    if (plain.length > 0) {
      series.push({
        label: labels[i],
        color: colors[next % PALETTE.length] ?? PALETTE[next % PALETTE.length],
        points: plain
          .filter((p) => p.numeric !== null)
          .map((p) => ({ x: p.numeric as number, y: p.median, std: p.std })),
      });
      next += 1;
      continue;
    }
    const delayMetrics = [...new Set(rows.map((r) => r.metric))]
      .filter((m) => /^r2_d\d+$/.test(m))
      .sort((a, b) => Number(a.slice(4)) - Number(b.slice(4)));
    const modes = [...new Set(rows.map((r) => r.value))];
    for (const mode of modes) {
      const points = delayMetrics.map((m) => {
        const values = rows
          .filter((r) => r.metric === m && r.value === mode)
          .map((r) => r.result);
        return {
          x: Number(m.slice(4)),
          y: median(values),
          std: sampleStd(values),
        };
      });
      series.push({
        label: `${labels[i]}:${mode}`,
        color: PALETTE[next % PALETTE.length],
        points,
      });
      next += 1;
    }
  }
  return renderLineChart({
    title,
    xLabel: "delay d",
    yLabel: "recall R2",
    series,
  });
}
