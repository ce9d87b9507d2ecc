import type { SweepRow } from "./csv.js";

/** One aggregated point: median latency with the interquartile band. */
export interface BandPoint {
  x: number;
  median: number;
  q25: number;
  q75: number;
  n: number;
}

export interface Series {
  scheme: string;
  points: BandPoint[];
}

/** Linear-interpolation quantile of a sorted array, q in [0, 1]. */
export function quantile(sorted: number[], q: number): number {
  if (sorted.length === 0) throw new Error("quantile of empty sample");
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

/**
 * Group rows by scheme, then aggregate the seeds at each x value into a
 * median plus 25-75% band. Scheme order follows first appearance in the
 * input; points are sorted by x.
 */
export function aggregate(rows: SweepRow[]): Series[] {
  const bySch = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    let byX = bySch.get(row.scheme);
    if (!byX) bySch.set(row.scheme, (byX = new Map()));
    let sample = byX.get(row.value);
    if (!sample) byX.set(row.value, (sample = []));
    sample.push(row.tMs);
  }
  const out: Series[] = [];
  for (const [scheme, byX] of bySch) {
    const points = [...byX.entries()]
      .map(([x, sample]) => {
        const sorted = [...sample].sort((a, b) => a - b);
        return {
          x,
          median: quantile(sorted, 0.5),
          q25: quantile(sorted, 0.25),
          q75: quantile(sorted, 0.75),
          n: sorted.length,
        };
      })
      .sort((a, b) => a.x - b.x);
    out.push({ scheme, points });
  }
  return out;
}
