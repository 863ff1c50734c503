/**
 * Acceptance: each of the four figure kinds renders from its harness CSV
 * without error and contains one series per policy present in the CSV.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { parseSummary } from "../src/csv.js";
import { buildFigure, FigureKind } from "../src/figures.js";
import { renderChart } from "../src/svg.js";

const fixturePath = (name: string) =>
  new URL(`../fixtures/${name}`, import.meta.url).pathname;
const fixture = (name: string) => readFileSync(fixturePath(name), "utf8");

function render(kind: FigureKind, names: string[]) {
  const chart = buildFigure({
    kind,
    inputs: names.map(fixturePath),
    texts: names.map(fixture),
  });
  return { chart, svg: renderChart(chart) };
}

function policiesOf(name: string): string[] {
  return [...new Set(parseSummary(fixture(name)).map((r) => r.policy))];
}

function seriesNames(svg: string): string[] {
  return [...svg.matchAll(/class="series" data-name="([^"]+)"/g)]
    .map((m) => m[1]);
}

describe("figure acceptance", () => {
  it("v-tradeoff: renders with a cost and a queue series per policy", () => {
    const policies = policiesOf("v_sweep.csv");
    const { svg } = render("v-tradeoff", ["v_sweep.csv"]);
    const names = seriesNames(svg);
    for (const p of policies) {
      expect(names).toContain(`${p} cost`);
      expect(names).toContain(`${p} queue`);
    }
    expect(names).toHaveLength(2 * policies.length);
  });

  it("rth-sweep: one series per policy present in the CSV", () => {
    const policies = policiesOf("rth_sweep.csv");
    const { svg } = render("rth-sweep", ["rth_sweep.csv"]);
    expect(seriesNames(svg).sort()).toEqual(policies.sort());
  });

  it("eps-sweep: one series per policy present in the CSV", () => {
    const policies = policiesOf("eps_sweep.csv");
    const { svg } = render("eps-sweep", ["eps_sweep.csv"]);
    expect(seriesNames(svg).sort()).toEqual(policies.sort());
  });

  it("time-series: one series per (single-policy) trace CSV", () => {
    const files = ["trace.omora-sdp.seed1.csv", "trace.nl.seed1.csv",
                   "trace.nm.seed1.csv"];
    const { svg } = render("time-series", files);
    expect(seriesNames(svg)).toEqual([
      "trace.omora-sdp.seed1", "trace.nl.seed1", "trace.nm.seed1",
    ]);
  });
});
