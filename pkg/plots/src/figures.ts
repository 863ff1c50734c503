/**
 * Figure builders: turn parsed harness CSVs into chart specs.
 *
 * Kinds:
 *   v-tradeoff   summary sweep CSV -> cost (left axis) and queue (right
 *                axis) against the control parameter, log x
 *   rth-sweep    summary sweep CSV -> seed-mean cost per policy with
 *                min-max seed bands
 *   eps-sweep    same as rth-sweep over the migration unit
 *   time-series  trace CSV(s) -> per-slot total cost; one series per file
 */

import { parseSummary, parseTrace, SummaryRow } from "./csv.js";
import { Chart, Series } from "./svg.js";

export type FigureKind = "v-tradeoff" | "time-series" | "rth-sweep" | "eps-sweep";

export const FIGURE_KINDS: FigureKind[] = [
  "v-tradeoff", "time-series", "rth-sweep", "eps-sweep",
];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];              // file paths (for labels) ...
  texts: string[];               // ... and their contents, 1:1
  policies?: string[];           // optional subset filter
}

function policiesIn(rows: SummaryRow[], subset?: string[]): string[] {
  const seen: string[] = [];
  for (const r of rows) {
    if (!seen.includes(r.policy)) seen.push(r.policy);
  }
  return subset ? seen.filter((p) => subset.includes(p)) : seen;
}

function sweepRows(text: string, subset?: string[]): {
  rows: SummaryRow[]; policies: string[]; axisValues: number[];
} {
  const rows = parseSummary(text).filter((r) => r.axisValue !== null);
  if (rows.length === 0) {
    throw new Error("summary CSV carries no axis_value column data; not a sweep");
  }
  const policies = policiesIn(rows, subset);
  if (policies.length === 0) throw new Error("no matching policies in CSV");
  const axisValues = [...new Set(rows.map((r) => r.axisValue as number))]
    .sort((a, b) => a - b);
  return { rows, policies, axisValues };
}

function meanAt(rows: SummaryRow[], policy: string, v: number,
                pick: (r: SummaryRow) => number): number {
  const mean = rows.find((r) => r.policy === policy && r.axisValue === v
    && r.seed === "mean");
  if (mean) return pick(mean);
  const data = rows.filter((r) => r.policy === policy && r.axisValue === v);
  if (data.length === 0) throw new Error(`no rows for ${policy} at ${v}`);
  return data.reduce((s, r) => s + pick(r), 0) / data.length;
}

function bandAt(rows: SummaryRow[], policy: string, v: number,
                pick: (r: SummaryRow) => number): { lo: number; hi: number } {
  const data = rows.filter((r) => r.policy === policy && r.axisValue === v
    && r.seed !== "mean");
  if (data.length === 0) {
    const m = meanAt(rows, policy, v, pick);
    return { lo: m, hi: m };
  }
  const vals = data.map(pick);
  return { lo: Math.min(...vals), hi: Math.max(...vals) };
}

function sweepSeries(text: string, subset: string[] | undefined,
                     pick: (r: SummaryRow) => number,
                     axis: "left" | "right", suffix = ""): Series[] {
  const { rows, policies, axisValues } = sweepRows(text, subset);
  return policies.map((policy) => ({
    name: policy + suffix,
    axis,
    points: axisValues.map((v) => ({ x: v, y: meanAt(rows, policy, v, pick) })),
    band: axisValues.map((v) => ({ x: v, ...bandAt(rows, policy, v, pick) })),
  }));
}

export function buildFigure(spec: FigureSpec): Chart {
  switch (spec.kind) {
    case "v-tradeoff": {
      const text = onlyInput(spec);
      const cost = sweepSeries(text, spec.policies,
        (r) => r.avgServiceCost, "left", " cost");
      const queue = sweepSeries(text, spec.policies,
        (r) => r.avgQueueBits, "right", " queue");
      return {
        title: "Service cost and queue length vs control parameter",
        xLabel: "control parameter V (log scale)",
        yLabel: "avg service cost per slot",
        y2Label: "avg queue length (bits)",
        logX: true,
        series: [...cost, ...queue],
      };
    }
    case "rth-sweep":
      return {
        title: "Service cost vs minimum rate floor",
        xLabel: "minimum required rate (bit/s)",
        yLabel: "avg service cost per slot",
        series: sweepSeries(onlyInput(spec), spec.policies,
          (r) => r.avgServiceCost, "left"),
      };
    case "eps-sweep":
      return {
        title: "Service cost vs migration cost unit",
        xLabel: "migration cost unit",
        yLabel: "avg service cost per slot",
        series: sweepSeries(onlyInput(spec), spec.policies,
          (r) => r.avgServiceCost, "left"),
      };
    case "time-series": {
      if (spec.texts.length === 0) throw new Error("no input CSV given");
      const series = spec.texts.map((text, i) => {
        const rows = parseTrace(text);
        const perSlot = new Map<number, number>();
        for (const r of rows) {
          perSlot.set(r.t, (perSlot.get(r.t) ?? 0) + r.cost);
        }
        const ts = [...perSlot.keys()].sort((a, b) => a - b);
        return {
          name: seriesLabel(spec.inputs[i] ?? `input ${i + 1}`),
          axis: "left" as const,
          points: ts.map((t) => ({ x: t, y: perSlot.get(t) as number })),
        };
      });
      return {
        title: "Service cost over time",
        xLabel: "slot",
        yLabel: "total service cost",
        series,
      };
    }
  }
}

function onlyInput(spec: FigureSpec): string {
  if (spec.texts.length !== 1) {
    throw new Error(`${spec.kind} expects exactly one input CSV`);
  }
  return spec.texts[0];
}

function seriesLabel(path: string): string {
  const base = path.split(/[\\/]/).pop() ?? path;
  return base.replace(/\.csv$/i, "");
}
