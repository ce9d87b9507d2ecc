import Papa from "papaparse";

/** Column order of the sweep CSVs produced by the solver package. */
export const SWEEP_COLUMNS = [
  "sweep_param",
  "value",
  "scheme",
  "seed",
  "t_ms",
  "per_wd_latency_ms",
  "ell_bits",
  "fe_cycles",
  "iters",
  "wall_ms",
] as const;

export interface SweepRow {
  sweepParam: string;
  value: number;
  scheme: string;
  seed: string;
  tMs: number;
  /** per-WD latencies in ms; empty for trace-style rows */
  perWdLatencyMs: number[];
  iters: number;
}

export class MissingColumnError extends Error {
  constructor(readonly column: string) {
    super(`sweep CSV is missing required column "${column}"`);
    this.name = "MissingColumnError";
  }
}

function splitList(field: string): number[] {
  if (field === "") return [];
  return field.split("|").map(Number);
}

/** Parse a sweep CSV string into typed rows, validating the schema. */
export function parseSweepCsv(text: string): SweepRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of SWEEP_COLUMNS) {
    if (!fields.includes(col)) throw new MissingColumnError(col);
  }
  return parsed.data.map((raw) => {
    const value = Number(raw.value);
    const tMs = Number(raw.t_ms);
    if (!Number.isFinite(value) || !Number.isFinite(tMs)) {
      throw new Error(`non-numeric value/t_ms in row: ${JSON.stringify(raw)}`);
    }
    return {
      sweepParam: raw.sweep_param,
      value,
      scheme: raw.scheme,
      seed: raw.seed,
      tMs,
      perWdLatencyMs: splitList(raw.per_wd_latency_ms),
      iters: Number(raw.iters),
    };
  });
}
