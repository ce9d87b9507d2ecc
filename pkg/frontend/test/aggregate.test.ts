import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { aggregate, quantile } from "../src/aggregate.js";
import { parseSweepCsv, type SweepRow } from "../src/csv.js";

const row = (scheme: string, value: number, tMs: number): SweepRow => ({
  sweepParam: "wd_distance",
  value,
  scheme,
  seed: "0",
  tMs,
  perWdLatencyMs: [],
  iters: 1,
});

describe("quantile", () => {
  it("interpolates linearly", () => {
    expect(quantile([1, 2, 3, 4], 0.5)).toBe(2.5);
    expect(quantile([1, 2, 3, 4], 0.25)).toBe(1.75);
    expect(quantile([7], 0.5)).toBe(7);
  });

  it("rejects empty samples", () => {
    expect(() => quantile([], 0.5)).toThrowError(/empty/);
  });
});

describe("aggregate", () => {
  it("computes median and band per x, sorted", () => {
    const series = aggregate([
      row("sca", 80, 30),
      row("sca", 60, 10),
      row("sca", 60, 20),
      row("sca", 60, 90),
    ]);
    expect(series.length).toBe(1);
    expect(series[0].points.map((p) => p.x)).toEqual([60, 80]);
    const p = series[0].points[0];
    expect(p.median).toBe(20);
    expect(p.q25).toBe(15);
    expect(p.q75).toBe(55);
    expect(p.n).toBe(3);
  });

  it("keeps scheme order of first appearance", () => {
    const series = aggregate([row("no_irs", 60, 1), row("sca", 60, 2)]);
    expect(series.map((s) => s.scheme)).toEqual(["no_irs", "sca"]);
  });

  it("single seed collapses the band onto the line", () => {
    const series = aggregate([row("sca", 60, 42)]);
    const p = series[0].points[0];
    expect(p.q25).toBe(42);
    expect(p.q75).toBe(42);
    expect(p.median).toBe(42);
  });

  it("fixture medians: IRS beats no-IRS at every distance", () => {
    const text = readFileSync(
      new URL("../fixtures/sweep_distance.csv", import.meta.url),
      "utf8",
    );
    const series = aggregate(parseSweepCsv(text));
    const sca = series.find((s) => s.scheme === "sca")!;
    const noIrs = series.find((s) => s.scheme === "no_irs")!;
    for (let i = 0; i < sca.points.length; i++) {
      expect(sca.points[i].median).toBeLessThanOrEqual(noIrs.points[i].median);
    }
  });
});
