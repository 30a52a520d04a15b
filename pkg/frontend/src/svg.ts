/**
 * Hand-built SVG charts: line charts with error bars, grouped bars, and
 * time-series overlays. String assembly only, so output is deterministic
 * byte for byte for identical inputs.
 *
 * Every plotted point carries its aggregation as data attributes
 * (data-median / data-std) so downstream checks can read the numbers
 * straight out of the figure.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { top: 42, right: 24, bottom: 56, left: 74 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

export interface SeriesPoint {
  x: number;
  y: number;
  std: number;
}

export interface Series {
  label: string;
  color: string;
  points: SeriesPoint[];
}

export interface ReferenceLine {
  label: string;
  color: string;
  y: number;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  xLog?: boolean;
  yLog?: boolean;
  references?: ReferenceLine[];
  /** categorical x positions (bar charts); when set, x is an index */
  categories?: string[];
}

const fmt = (x: number): string => {
  if (!Number.isFinite(x)) return "0";
  return (Math.round(x * 100) / 100).toString();
};

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Scale {
  pos(x: number): number;
  ticks(): number[];
}

class LinearScale implements Scale {
  constructor(
    private lo: number,
    private hi: number,
    private a: number,
    private b: number,
  ) {}

  pos(x: number): number {
    if (this.hi === this.lo) return (this.a + this.b) / 2;
    return this.a + ((x - this.lo) / (this.hi - this.lo)) * (this.b - this.a);
  }

  ticks(): number[] {
    const span = this.hi - this.lo;
    if (span <= 0) return [this.lo];
    const rawStep = span / 5;
    const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const step = [1, 2, 5, 10].map((m) => m * power).find((s) => span / s <= 6)!;
    const out: number[] = [];
    for (let t = Math.ceil(this.lo / step) * step; t <= this.hi + 1e-12; t += step) {
      out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
    }
    return out;
  }
}

class LogScale implements Scale {
  constructor(
    private lo: number,
    private hi: number,
    private a: number,
    private b: number,
  ) {}

  pos(x: number): number {
    const [llo, lhi] = [Math.log10(this.lo), Math.log10(this.hi)];
    if (lhi === llo) return (this.a + this.b) / 2;
    return this.a + ((Math.log10(x) - llo) / (lhi - llo)) * (this.b - this.a);
  }

  ticks(): number[] {
    const out: number[] = [];
    const lo = Math.floor(Math.log10(this.lo));
    const hi = Math.ceil(Math.log10(this.hi));
    for (let d = lo; d <= hi; d += 1) out.push(Math.pow(10, d));
    return out.filter((t) => t >= this.lo / 1.001 && t <= this.hi * 1.001);
  }
}

function makeScale(
  values: number[],
  log: boolean,
  a: number,
  b: number,
  padFraction = 0.06,
): Scale {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) return new LinearScale(0, 1, a, b);
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (log) {
    if (lo === hi) {
      lo /= 10;
      hi *= 10;
    }
    return new LogScale(lo / 1.3, hi * 1.3, a, b);
  }
  const pad = (hi - lo) * padFraction || Math.max(Math.abs(hi), 1) * padFraction;
  return new LinearScale(lo - pad, hi + pad, a, b);
}

function tickLabel(t: number, log: boolean): string {
  if (log) {
    const exp = Math.round(Math.log10(t));
    return `1e${exp}`;
  }
  const rounded = Math.round(t * 1e6) / 1e6;
  return rounded.toString();
}

function frame(spec: ChartSpec, xScale: Scale, yScale: Scale): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" fill="none" stroke="#444" stroke-width="1"/>`,
  );
  const xTicks = spec.categories
    ? spec.categories.map((_, i) => i)
    : xScale.ticks();
  for (const t of xTicks) {
    const x = fmt(xScale.pos(t));
    const label = spec.categories
      ? spec.categories[t]
      : tickLabel(t, !!spec.xLog);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top + PLOT_H}" x2="${x}" y2="${MARGIN.top + PLOT_H + 5}" stroke="#444"/>`,
      `<text x="${x}" y="${MARGIN.top + PLOT_H + 20}" text-anchor="middle" font-size="12">${escapeXml(label)}</text>`,
    );
  }
  for (const t of yScale.ticks()) {
    const y = fmt(yScale.pos(t));
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#444"/>`,
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" stroke="#ddd" stroke-width="0.5"/>`,
      `<text x="${MARGIN.left - 9}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12">${escapeXml(tickLabel(t, !!spec.yLog))}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${escapeXml(spec.xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})">${escapeXml(spec.yLabel)}</text>`,
    `<text x="${MARGIN.left + PLOT_W / 2}" y="24" text-anchor="middle" font-size="15" font-weight="bold">${escapeXml(spec.title)}</text>`,
  );
  return parts.join("\n");
}

function legend(series: Series[], extra: ReferenceLine[] = []): string {
  const parts: string[] = [];
  let y = MARGIN.top + 14;
  const x = MARGIN.left + PLOT_W - 10;
  for (const s of [...series, ...extra.map((r) => ({ label: r.label, color: r.color }))]) {
    parts.push(
      `<line x1="${x - 46}" y1="${y - 4}" x2="${x - 30}" y2="${y - 4}" stroke="${s.color}" stroke-width="2.5"/>`,
      `<text x="${x - 24}" y="${y}" text-anchor="start" font-size="12">${escapeXml(s.label)}</text>`,
    );
    y += 17;
  }
  return parts.join("\n");
}

function document(body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}

function emptyFigure(spec: ChartSpec): string {
  const xScale = new LinearScale(0, 1, MARGIN.left, MARGIN.left + PLOT_W);
  const yScale = new LinearScale(0, 1, MARGIN.top + PLOT_H, MARGIN.top);
  return document(
    frame({ ...spec, xLog: false, yLog: false }, xScale, yScale) +
      `\n<text x="${MARGIN.left + PLOT_W / 2}" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" fill="#888">no data</text>`,
  );
}

export function renderLineChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) =>
    s.points.flatMap((p) => [p.y, p.y + p.std, spec.yLog ? p.y : p.y - p.std]),
  );
  for (const ref of spec.references ?? []) ys.push(ref.y);
  if (xs.length === 0) return emptyFigure(spec);
  const xScale = makeScale(xs, !!spec.xLog, MARGIN.left, MARGIN.left + PLOT_W);
  const yScale = makeScale(ys, !!spec.yLog, MARGIN.top + PLOT_H, MARGIN.top);
  const parts = [frame(spec, xScale, yScale)];
  for (const ref of spec.references ?? []) {
    const y = fmt(yScale.pos(ref.y));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" stroke="${ref.color}" stroke-width="1.5" stroke-dasharray="6 4" data-reference="${ref.y}"/>`,
    );
  }
  for (const s of spec.series) {
    const path = s.points
      .map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y))}`)
      .join(" ");
    parts.push(
      `<g data-series="${escapeXml(s.label)}">`,
      `<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="2"/>`,
    );
    for (const p of s.points) {
      const x = fmt(xScale.pos(p.x));
      const lo = spec.yLog ? Math.max(p.y - p.std, p.y * 1e-3) : p.y - p.std;
      parts.push(
        `<line x1="${x}" y1="${fmt(yScale.pos(lo))}" x2="${x}" y2="${fmt(yScale.pos(p.y + p.std))}" stroke="${s.color}" stroke-width="1.2"/>`,
        `<circle cx="${x}" cy="${fmt(yScale.pos(p.y))}" r="3.4" fill="${s.color}" data-x="${p.x}" data-median="${p.y}" data-std="${p.std}"/>`,
      );
    }
    parts.push(`</g>`);
  }
  parts.push(legend(spec.series, spec.references ?? []));
  return document(parts.join("\n"));
}

export function renderBarChart(spec: ChartSpec): string {
  const categories = spec.categories ?? [];
  if (categories.length === 0 || spec.series.length === 0) {
    return emptyFigure(spec);
  }
  const ys = spec.series.flatMap((s) => s.points.flatMap((p) => [0, p.y + p.std]));
  const xScale = new LinearScale(
    -0.5,
    categories.length - 0.5,
    MARGIN.left,
    MARGIN.left + PLOT_W,
  );
  const yScale = makeScale(ys, false, MARGIN.top + PLOT_H, MARGIN.top, 0.02);
  const parts = [frame(spec, xScale, yScale)];
  const groupWidth = PLOT_W / categories.length;
  const barWidth = (groupWidth * 0.72) / spec.series.length;
  spec.series.forEach((s, si) => {
    parts.push(`<g data-series="${escapeXml(s.label)}">`);
    for (const p of s.points) {
      const cx =
        xScale.pos(p.x) - (groupWidth * 0.72) / 2 + si * barWidth;
      const y0 = yScale.pos(0);
      const y1 = yScale.pos(p.y);
      parts.push(
        `<rect x="${fmt(cx)}" y="${fmt(Math.min(y0, y1))}" width="${fmt(barWidth * 0.9)}" height="${fmt(Math.abs(y0 - y1))}" fill="${s.color}" data-x="${p.x}" data-median="${p.y}" data-std="${p.std}"/>`,
      );
      const ex = cx + (barWidth * 0.9) / 2;
      parts.push(
        `<line x1="${fmt(ex)}" y1="${fmt(yScale.pos(p.y - p.std))}" x2="${fmt(ex)}" y2="${fmt(yScale.pos(p.y + p.std))}" stroke="#333" stroke-width="1.2"/>`,
      );
    }
    parts.push(`</g>`);
  });
  parts.push(legend(spec.series));
  return document(parts.join("\n"));
}

export interface BandSeries {
  label: string;
  color: string;
  /** per step: x, median, std */
  points: SeriesPoint[];
}

export interface TimeSeriesSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  target: { x: number; y: number }[];
  series: BandSeries[];
  /** x position separating train from test, if any */
  splitAt?: number;
}

export function renderTimeSeries(spec: TimeSeriesSpec): string {
  if (spec.target.length === 0 && spec.series.every((s) => s.points.length === 0)) {
    return emptyFigure({ ...spec, series: [] });
  }
  const xs = [
    ...spec.target.map((p) => p.x),
    ...spec.series.flatMap((s) => s.points.map((p) => p.x)),
  ];
  const ys = [
    ...spec.target.map((p) => p.y),
    ...spec.series.flatMap((s) => s.points.flatMap((p) => [p.y - p.std, p.y + p.std])),
  ];
  const xScale = makeScale(xs, false, MARGIN.left, MARGIN.left + PLOT_W, 0.01);
  const yScale = makeScale(ys, false, MARGIN.top + PLOT_H, MARGIN.top);
  const chart: ChartSpec = { ...spec, series: [] };
  const parts = [frame(chart, xScale, yScale)];
  if (spec.splitAt !== undefined) {
    const x = fmt(xScale.pos(spec.splitAt));
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + PLOT_H}" stroke="#999" stroke-dasharray="4 4" data-split="${spec.splitAt}"/>`,
    );
  }
  for (const s of spec.series) {
    if (s.points.length === 0) continue;
    const upper = s.points
      .map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y + p.std))}`)
      .join(" ");
    const lower = [...s.points]
      .reverse()
      .map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y - p.std))}`)
      .join(" ");
    parts.push(
      `<g data-series="${escapeXml(s.label)}">`,
      `<polygon points="${upper} ${lower}" fill="${s.color}" opacity="0.25"/>`,
      `<polyline points="${s.points.map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y))}`).join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.8"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${fmt(xScale.pos(p.x))}" cy="${fmt(yScale.pos(p.y))}" r="1.6" fill="${s.color}" data-x="${p.x}" data-median="${p.y}" data-std="${p.std}"/>`,
      );
    }
    parts.push(`</g>`);
  }
  if (spec.target.length > 0) {
    parts.push(
      `<polyline points="${spec.target.map((p) => `${fmt(xScale.pos(p.x))},${fmt(yScale.pos(p.y))}`).join(" ")}" fill="none" stroke="#111" stroke-width="1.6" data-series="target"/>`,
    );
  }
  parts.push(
    legend(
      [
        { label: "target", color: "#111", points: [] },
        ...spec.series.map((s) => ({ ...s, points: [] })),
      ],
    ),
  );
  return document(parts.join("\n"));
}
