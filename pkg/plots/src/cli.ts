/**
 * CLI: render --kind K --in CSV[,CSV...] --out IMG [--policies a,b,c]
 *
 * Exit codes: 0 on success, 1 on schema/data errors (no file written), 2 on
 * usage errors.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { renderChart } from "./svg.js";

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
  policies?: string[];
}

function usage(): string {
  return `usage: render --kind {${FIGURE_KINDS.join("|")}} --in CSV[,CSV...] ` +
    `--out IMG [--policies a,b,c]`;
}

export function parseArgs(argv: string[]): Args {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new UsageError(`bad argument "${flag}"`);
    }
    opts.set(flag.slice(2), value);
  }
  for (const key of opts.keys()) {
    if (!["kind", "in", "out", "policies"].includes(key)) {
      throw new UsageError(`unknown flag --${key}`);
    }
  }
  const kind = opts.get("kind");
  const input = opts.get("in");
  const out = opts.get("out");
  if (!kind || !input || !out) {
    throw new UsageError("--kind, --in and --out are required");
  }
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`unknown kind "${kind}"`);
  }
  const policies = opts.get("policies")?.split(",").filter((p) => p.length > 0);
  return { kind: kind as FigureKind, inputs: input.split(","), out, policies };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(usage());
    return 2;
  }
  try {
    const texts = args.inputs.map((p) => readFileSync(p, "utf8"));
    const chart = buildFigure({
      kind: args.kind,
      inputs: args.inputs,
      texts,
      policies: args.policies,
    });
    const svg = renderChart(chart);
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out} (${chart.series.length} series)`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js")
  || process.argv[1]?.endsWith("cli.ts");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
