#!/usr/bin/env node
/**
 * Figure renderer CLI: --figure <id> --in <csv...> --out <path>.
 *
 * Writes <out>.svg and <out>.png (any .svg/.png extension on --out is
 * stripped first). Exit codes: 0 success, 2 usage, 3 data errors.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { Resvg } from "@resvg/resvg-js";

import { ParseError, parseMeasureCsv, parseTrendCsv } from "./csv.js";
import { FIGURE_IDS, FigureId, renderFigure } from "./render.js";

const USAGE =
  "usage: cpr-figures --figure <fig2a|fig2b|fig2c|fig3|fig4|fig5> --in <csv...> --out <path>";

interface Args {
  figure: FigureId;
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): Args {
  let figure: string | null = null;
  const inputs: string[] = [];
  let out: string | null = null;
  let i = 0;
  while (i < argv.length) {
    const flag = argv[i];
    if (flag === "--figure") {
      figure = argv[++i];
    } else if (flag === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        inputs.push(argv[++i]);
      }
    } else if (flag === "--out") {
      out = argv[++i];
    } else {
      throw new UsageError(`unknown flag '${flag}'`);
    }
    i += 1;
  }
  if (!figure || !out || inputs.length === 0) {
    throw new UsageError("missing --figure, --in, or --out");
  }
  if (!(FIGURE_IDS as readonly string[]).includes(figure)) {
    throw new UsageError(`unknown figure '${figure}'`);
  }
  return { figure: figure as FigureId, inputs, out };
}

class UsageError extends Error {}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error(`cpr-figures: ${(error as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  try {
    const result =
      args.figure === "fig3"
        ? renderFigure(args.figure, [], parseTrendCsv(readFileSync(args.inputs[0], "utf8"), args.inputs[0]))
        : renderFigure(
            args.figure,
            args.inputs.map((path) => ({
              source: path,
              rows: parseMeasureCsv(readFileSync(path, "utf8"), path),
            })),
          );
    const base = args.out.replace(/\.(svg|png)$/i, "");
    mkdirSync(dirname(base) || ".", { recursive: true });
    writeFileSync(`${base}.svg`, result.svg);
    const png = new Resvg(result.svg, { background: "white" }).render().asPng();
    writeFileSync(`${base}.png`, png);
    console.log(`${base}.svg`);
    console.log(`${base}.png`);
    return 0;
  } catch (error) {
    if (error instanceof ParseError) {
      console.error(`cpr-figures: ${error.message}`);
    } else {
      console.error(`cpr-figures: ${(error as Error).message}`);
    }
    return 3;
  }
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
