/**
 * Minimal deterministic SVG chart renderer: line series, shaded min-max
 * bands, linear/log x, one or two y axes, legend. Pure string building so a
 * given chart spec always yields byte-identical output.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  name: string;
  points: Point[];
  axis: "left" | "right";
  band?: { x: number; lo: number; hi: number }[];
}

export interface Chart {
  title: string;
  xLabel: string;
  yLabel: string;
  y2Label?: string;
  logX?: boolean;
  series: Series[];
}

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { top: 44, right: 76, bottom: 56, left: 84 };
const PALETTE = ["#1f6fb2", "#d1495b", "#3a9a5c", "#8e6bb2", "#c98a1c", "#4f4f4f"];

interface Scale {
  (v: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const f = ((v: number) => rLo + ((v - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  const a = Math.log10(Math.max(lo, Number.MIN_VALUE));
  let b = Math.log10(Math.max(hi, Number.MIN_VALUE));
  if (a === b) b = a + 1;
  const f = ((v: number) =>
    rLo + ((Math.log10(Math.max(v, Number.MIN_VALUE)) - a) / (b - a)) * (rHi - rLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(a); e <= Math.floor(b); e++) ticks.push(10 ** e);
  f.ticks = ticks.length >= 2 ? ticks : [10 ** a, 10 ** b];
  return f;
}

function linearTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / n));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= n) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + chosen * 1e-9; v += chosen) {
    ticks.push(v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(1).replace("+", "");
  return Number(v.toPrecision(6)).toString();
}

function coord(v: number): string {
  return v.toFixed(2);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) throw new Error("no finite values to plot");
  if (lo === hi) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.05 : 1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

export function renderChart(chart: Chart): string {
  if (chart.series.length === 0) throw new Error("chart has no series");
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = chart.series.flatMap((s) => s.points.map((p) => p.x));
  const [xLo, xHi] = extent(xs);
  const xScale = chart.logX
    ? logScale(Math.min(...xs), Math.max(...xs), x0, x1)
    : linearScale(xLo, xHi, x0, x1);

  const axes: ("left" | "right")[] = chart.series.some((s) => s.axis === "right")
    ? ["left", "right"] : ["left"];
  const yScales = new Map<string, Scale>();
  for (const axis of axes) {
    const vals = chart.series.filter((s) => s.axis === axis).flatMap((s) => [
      ...s.points.map((p) => p.y),
      ...(s.band ?? []).flatMap((b) => [b.lo, b.hi]),
    ]);
    const [lo, hi] = extent(vals);
    yScales.set(axis, linearScale(lo, hi, y0, y1));
  }

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(chart.title)}</text>`);

  // gridlines and x ticks
  for (const t of xScale.ticks) {
    const px = xScale(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    parts.push(`<line x1="${coord(px)}" y1="${y0}" x2="${coord(px)}" y2="${y1}" stroke="#e0e0e0" stroke-width="1"/>`);
    parts.push(`<text x="${coord(px)}" y="${y0 + 20}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
  }
  const left = yScales.get("left")!;
  for (const t of left.ticks) {
    const py = left(t);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    parts.push(`<line x1="${x0}" y1="${coord(py)}" x2="${x1}" y2="${coord(py)}" stroke="#eeeeee" stroke-width="1"/>`);
    parts.push(`<text x="${x0 - 8}" y="${coord(py + 4)}" text-anchor="end" font-size="11">${fmt(t)}</text>`);
  }
  const right = yScales.get("right");
  if (right) {
    for (const t of right.ticks) {
      const py = right(t);
      if (py > y0 + 0.5 || py < y1 - 0.5) continue;
      parts.push(`<text x="${x1 + 8}" y="${coord(py + 4)}" text-anchor="start" font-size="11">${fmt(t)}</text>`);
    }
  }

  // frame and axis labels
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${esc(chart.xLabel)}</text>`);
  parts.push(`<text x="20" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${(y0 + y1) / 2})">${esc(chart.yLabel)}</text>`);
  if (chart.y2Label && right) {
    const cx = WIDTH - 18;
    parts.push(`<text x="${cx}" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(90 ${cx} ${(y0 + y1) / 2})">${esc(chart.y2Label)}</text>`);
  }

  chart.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const scale = yScales.get(s.axis)!;
    parts.push(`<g class="series" data-name="${esc(s.name)}" data-axis="${s.axis}">`);
    if (s.band && s.band.length > 1) {
      const fwd = s.band.map((b) => `${coord(xScale(b.x))},${coord(scale(b.hi))}`);
      const back = [...s.band].reverse().map((b) => `${coord(xScale(b.x))},${coord(scale(b.lo))}`);
      parts.push(`<polygon points="${[...fwd, ...back].join(" ")}" fill="${color}" opacity="0.15" stroke="none"/>`);
    }
    const pts = s.points.map((p) => `${coord(xScale(p.x))},${coord(scale(p.y))}`);
    parts.push(`<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const p of s.points) {
      parts.push(`<circle cx="${coord(xScale(p.x))}" cy="${coord(scale(p.y))}" r="3" fill="${color}"/>`);
    }
    parts.push(`</g>`);
  });

  // legend
  chart.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const lx = x0 + 12;
    const ly = y1 + 16 + i * 18;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="12">${esc(s.name)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
