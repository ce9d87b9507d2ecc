import type { Series } from "./aggregate.js";

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  /** applied to x values before plotting, e.g. Hz -> GHz */
  xTransform?: (x: number) => number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const MARGIN = { top: 34, right: 16, bottom: 44, left: 58 };

const fmtCoord = (v: number) => (Math.round(v * 100) / 100).toFixed(2);

/** Fixed-grammar tick label: plain decimal, no locale, no exponent. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const r = Math.round(v * 1e6) / 1e6;
  return String(r);
}

/** d3-style "nice" linear ticks covering [min, max]. */
export function niceTicks(min: number, max: number, count = 5): number[] {
  if (min === max) return [min];
  const span = max - min;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const ticks: number[] = [];
  for (let t = Math.ceil(min / step) * step; t <= max + step * 1e-9; t += step) {
    ticks.push(Math.round(t / step) * step);
  }
  return ticks;
}

function scale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const k = d1 === d0 ? 0 : (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * k;
}

/**
 * Render one median-line chart with interquartile bands as a standalone SVG
 * string. Output is a pure function of (series, options): fixed palette,
 * fixed coordinate rounding, no timestamps.
 */
export function renderChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const tx = opts.xTransform ?? ((x: number) => x);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => tx(p.x)));
  const ys = series.flatMap((s) => s.points.flatMap((p) => [p.q25, p.q75]));
  if (xs.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="${width / 2}" y="${height / 2}" text-anchor="middle" font-family="sans-serif">no data</text></svg>`;
  }
  const xDom: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yPad = (Math.max(...ys) - Math.min(...ys)) * 0.05 || Math.max(...ys) * 0.05 || 1;
  const yDom: [number, number] = [Math.min(...ys) - yPad, Math.max(...ys) + yPad];
  const sx = scale(xDom, [MARGIN.left, MARGIN.left + plotW]);
  const sy = scale(yDom, [MARGIN.top + plotH, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${opts.title}</text>`,
  );

  for (const t of niceTicks(yDom[0], yDom[1])) {
    const y = fmtCoord(sy(t));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${y}" dy="4" text-anchor="end" font-size="11">${fmtTick(t)}</text>`,
    );
  }
  for (const t of niceTicks(xDom[0], xDom[1])) {
    const x = fmtCoord(sx(t));
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top + plotH}" x2="${x}" y2="${MARGIN.top + plotH + 4}" stroke="#333"/>`,
      `<text x="${x}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="11">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" x2="${MARGIN.left + plotW}" y2="${MARGIN.top + plotH}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${MARGIN.top + plotH}" stroke="#333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" text-anchor="middle" font-size="12">${opts.xLabel}</text>`,
    `<text transform="rotate(-90 14 ${MARGIN.top + plotH / 2})" x="14" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12">${opts.yLabel}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.points;
    if (pts.length === 0) return;
    const band = [
      ...pts.map((p) => `${fmtCoord(sx(tx(p.x)))},${fmtCoord(sy(p.q75))}`),
      ...[...pts].reverse().map((p) => `${fmtCoord(sx(tx(p.x)))},${fmtCoord(sy(p.q25))}`),
    ].join(" ");
    parts.push(`<polygon points="${band}" fill="${color}" fill-opacity="0.15"/>`);
    const line = pts
      .map((p) => `${fmtCoord(sx(tx(p.x)))},${fmtCoord(sy(p.median))}`)
      .join(" ");
    parts.push(
      `<polyline points="${line}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const p of pts) {
      parts.push(
        `<circle cx="${fmtCoord(sx(tx(p.x)))}" cy="${fmtCoord(sy(p.median))}" r="2.6" fill="${color}"/>`,
      );
    }
    const ly = MARGIN.top + 8 + i * 16;
    parts.push(
      `<line x1="${MARGIN.left + plotW - 120}" y1="${ly}" x2="${MARGIN.left + plotW - 96}" y2="${ly}" stroke="${color}" stroke-width="1.8"/>`,
      `<text x="${MARGIN.left + plotW - 90}" y="${ly}" dy="4" font-size="11">${s.scheme}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/** Stack prerendered charts vertically into one report SVG. */
export function stackCharts(svgs: string[], width = 640, height = 420): string {
  const inner = svgs
    .map((svg, i) => `<g transform="translate(0 ${i * height})">${svg}</g>`)
    .join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height * svgs.length}">\n${inner}\n</svg>`;
}
