import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { FIGURES, figureByName, renderFigure } from "./figures.js";
import { stackCharts } from "./svg.js";

function usage(): never {
  console.error(
    "usage: node dist/cli.js <figure|all> [--input DIR] [--outdir DIR]\n" +
      `figures: ${FIGURES.map((f) => f.name).join(", ")}, all`,
  );
  process.exit(2);
}

function parseArgs(argv: string[]) {
  let target: string | undefined;
  let input = "fixtures";
  let outdir = "out";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--input") input = argv[++i] ?? usage();
    else if (argv[i] === "--outdir") outdir = argv[++i] ?? usage();
    else if (target === undefined) target = argv[i];
    else usage();
  }
  if (!target) usage();
  return { target, input, outdir };
}

function main() {
  const { target, input, outdir } = parseArgs(process.argv.slice(2));
  const specs = target === "all" ? FIGURES : [figureByName(target)];
  mkdirSync(outdir, { recursive: true });
  const svgs: string[] = [];
  for (const spec of specs) {
    const csvPath = join(input, `sweep_${spec.name}.csv`);
    const { svg, warnings } = renderFigure(spec, readFileSync(csvPath, "utf8"));
    for (const w of warnings) console.warn(`${spec.name}: ${w}`);
    const outPath = join(outdir, `${spec.name}.svg`);
    writeFileSync(outPath, svg + "\n");
    console.log(`wrote ${outPath}`);
    svgs.push(svg);
  }
  if (target === "all") {
    const combined = join(outdir, "combined.svg");
    writeFileSync(combined, stackCharts(svgs) + "\n");
    console.log(`wrote ${combined}`);
  }
}

try {
  main();
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
