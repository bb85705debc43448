/** plotgen: render an experiment CSV (with its sidecar) to an SVG figure. */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { loadDataset } from "./csv.js";
import { renderKind } from "./figures.js";
import { FIGURE_KINDS, InputError, isFigureKind } from "./types.js";

const USAGE = `usage: plotgen --input <results.csv> --kind <${FIGURE_KINDS.join("|")}> --out <figure.svg> [--no-bands]

Reads <results.csv> plus its <results.csv>.meta.json sidecar and writes a
deterministic SVG figure. Exits 0 on success, 1 on any input error.`;

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
        "no-bands": { type: "boolean", default: false },
        help: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(`plotgen: ${(err as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  const { input, kind, out, help } = parsed.values;
  if (help) {
    console.log(USAGE);
    return 0;
  }
  if (!input || !kind || !out) {
    console.error("plotgen: --input, --kind and --out are all required");
    console.error(USAGE);
    return 1;
  }
  if (!isFigureKind(kind)) {
    console.error(`plotgen: unknown figure kind '${kind}'; expected one of ${FIGURE_KINDS.join(", ")}`);
    return 1;
  }
  try {
    const data = loadDataset(input, kind);
    const svg = renderKind(data, kind, { bands: !parsed.values["no-bands"] });
    writeFileSync(out, svg, "utf-8");
  } catch (err) {
    if (err instanceof InputError) {
      console.error(`plotgen: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
