import { aggregate } from "./aggregate.js";
import { parseSweepCsv, type SweepRow } from "./csv.js";
import { renderChart, type ChartOptions } from "./svg.js";

export interface FigureSpec {
  /** short figure name, also the fixture / output file stem */
  name: string;
  title: string;
  xLabel: string;
  yLabel: string;
  xTransform?: (x: number) => number;
  /** keep only these schemes; undefined keeps all */
  schemes?: string[];
}

export const FIGURES: FigureSpec[] = [
  {
    name: "distance",
    title: "Latency vs WD distance",
    xLabel: "WD distance (m)",
    yLabel: "max latency (ms)",
  },
  {
    name: "edge_cpu",
    title: "Latency vs edge CPU budget",
    xLabel: "edge CPU (Gcycles/s)",
    yLabel: "max latency (ms)",
    xTransform: (hz) => hz / 1e9,
  },
  {
    name: "iterations",
    title: "Convergence of the outer loop",
    xLabel: "outer iteration",
    yLabel: "objective (ms)",
  },
  {
    name: "power",
    title: "Latency vs transmit power",
    xLabel: "transmit power (dBm)",
    yLabel: "max latency (ms)",
  },
  {
    name: "ici",
    title: "Latency vs inter-cell interference",
    xLabel: "interference over noise (dB)",
    yLabel: "max latency (ms)",
  },
];

export interface RenderResult {
  svg: string;
  warnings: string[];
}

/** Render one figure from raw CSV text; empty scheme groups warn, not throw. */
export function renderFigure(spec: FigureSpec, csvText: string): RenderResult {
  const rows: SweepRow[] = parseSweepCsv(csvText);
  const kept = spec.schemes
    ? rows.filter((r) => spec.schemes!.includes(r.scheme))
    : rows;
  const warnings: string[] = [];
  if (spec.schemes) {
    for (const s of spec.schemes) {
      if (!kept.some((r) => r.scheme === s)) {
        warnings.push(`scheme "${s}" matched no rows; skipped`);
      }
    }
  }
  if (kept.length === 0) warnings.push("no rows to plot");
  const opts: ChartOptions = {
    title: spec.title,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    xTransform: spec.xTransform,
  };
  return { svg: renderChart(aggregate(kept), opts), warnings };
}

export function figureByName(name: string): FigureSpec {
  const spec = FIGURES.find((f) => f.name === name);
  if (!spec) {
    const known = FIGURES.map((f) => f.name).join(", ");
    throw new Error(`unknown figure "${name}"; expected one of: ${known}`);
  }
  return spec;
}
