/**
 * Parsing and schema validation for the harness CSV files.
 *
 * Two schemas exist: run summaries (one row per run, sweeps add seed="mean"
 * rows) and per-slot traces (one row per slot and device). Column order is
 * fixed; a mismatch is reported by column name.
 */

export const SUMMARY_COLUMNS = [
  "axis_value", "policy", "seed", "avg_service_cost", "avg_queue_bits",
  "rate_violation_frac", "avg_power", "avg_migration",
] as const;

export const TRACE_COLUMNS = [
  "t", "mid", "Q", "A", "D_local", "D_off", "p_tx", "f", "assoc", "cost",
] as const;

export interface SummaryRow {
  axisValue: number | null;
  policy: string;
  seed: string;           // numeric seed or "mean"
  avgServiceCost: number;
  avgQueueBits: number;
  rateViolationFrac: number;
  avgPower: number;
  avgMigration: number;
}

export interface TraceRow {
  t: number;
  mid: number;
  queue: number;
  arrivals: number;
  dLocal: number;
  dOff: number;
  pTx: number;
  f: number;
  assoc: number;
  cost: number;
}

export class SchemaError extends Error {}

function splitCsv(text: string): string[][] {
  // the harness never quotes or embeds separators; plain splitting suffices
  return text
    .split(/\r?\n/)
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function checkHeader(header: string[], expected: readonly string[]): void {
  for (let i = 0; i < expected.length; i++) {
    if (header[i] !== expected[i]) {
      throw new SchemaError(
        `column ${i + 1}: expected "${expected[i]}", found "${header[i] ?? ""}"`,
      );
    }
  }
  if (header.length !== expected.length) {
    throw new SchemaError(`unexpected extra column "${header[expected.length]}"`);
  }
}

function num(value: string, column: string, line: number): number {
  const x = Number(value);
  if (!Number.isFinite(x)) {
    throw new SchemaError(`line ${line}: column "${column}" is not a number: "${value}"`);
  }
  return x;
}

export function parseSummary(text: string): SummaryRow[] {
  const lines = splitCsv(text);
  if (lines.length === 0) throw new SchemaError("empty CSV: no header row");
  checkHeader(lines[0], SUMMARY_COLUMNS);
  if (lines.length === 1) throw new SchemaError("empty CSV: no data rows");
  return lines.slice(1).map((cells, i) => {
    const line = i + 2;
    if (cells.length !== SUMMARY_COLUMNS.length) {
      throw new SchemaError(`line ${line}: expected ${SUMMARY_COLUMNS.length} columns`);
    }
    return {
      axisValue: cells[0] === "" ? null : num(cells[0], "axis_value", line),
      policy: cells[1],
      seed: cells[2],
      avgServiceCost: num(cells[3], "avg_service_cost", line),
      avgQueueBits: num(cells[4], "avg_queue_bits", line),
      rateViolationFrac: num(cells[5], "rate_violation_frac", line),
      avgPower: num(cells[6], "avg_power", line),
      avgMigration: num(cells[7], "avg_migration", line),
    };
  });
}

export function parseTrace(text: string): TraceRow[] {
  const lines = splitCsv(text);
  if (lines.length === 0) throw new SchemaError("empty CSV: no header row");
  checkHeader(lines[0], TRACE_COLUMNS);
  if (lines.length === 1) throw new SchemaError("empty CSV: no data rows");
  return lines.slice(1).map((cells, i) => {
    const line = i + 2;
    if (cells.length !== TRACE_COLUMNS.length) {
      throw new SchemaError(`line ${line}: expected ${TRACE_COLUMNS.length} columns`);
    }
    return {
      t: num(cells[0], "t", line),
      mid: num(cells[1], "mid", line),
      queue: num(cells[2], "Q", line),
      arrivals: num(cells[3], "A", line),
      dLocal: num(cells[4], "D_local", line),
      dOff: num(cells[5], "D_off", line),
      pTx: num(cells[6], "p_tx", line),
      f: num(cells[7], "f", line),
      assoc: num(cells[8], "assoc", line),
      cost: num(cells[9], "cost", line),
    };
  });
}
