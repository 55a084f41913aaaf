#!/usr/bin/env node
/**
 * render --figure ID --csv-dir DIR --out FILE
 *
 * Exit codes: 0 success, 1 usage or write problem, 2 invalid or
 * schema-drifted input data. The SVG is assembled fully in memory and
 * written in one call, so a failing run never leaves a partial image.
 */

import * as fs from "node:fs";

import { CsvError } from "./csv";
import { renderFigure, UsageError } from "./render";
import { FIGURES } from "./schema";

const USAGE = `usage: render --figure ID --csv-dir DIR --out FILE
figure ids: ${Object.keys(FIGURES).join(", ")}`;

interface Args {
  figure: string;
  csvDir: string;
  out: string;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i]!;
    const name = { "--figure": "figure", "--csv-dir": "csvDir", "--out": "out" }[flag];
    if (name === undefined) {
      throw new UsageError(`unknown argument: ${flag}`);
    }
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new UsageError(`missing value for ${flag}`);
    }
    if (name in values) {
      throw new UsageError(`duplicate argument: ${flag}`);
    }
    values[name] = value;
  }
  for (const required of ["figure", "csvDir", "out"]) {
    if (!(required in values)) {
      throw new UsageError("all of --figure, --csv-dir and --out are required");
    }
  }
  return values as unknown as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n${USAGE}\n`);
    return 1;
  }

  try {
    const result = renderFigure(args.figure, args.csvDir);
    for (const note of result.notes) {
      process.stderr.write(`note: ${note}\n`);
    }
    fs.writeFileSync(args.out, result.svg, "utf8");
    process.stdout.write(`${args.out} (${result.panelCount} panels)\n`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`${err.message}\n${USAGE}\n`);
      return 1;
    }
    if (err instanceof CsvError) {
      process.stderr.write(`invalid input: ${err.message}\n`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      // fs-level problem writing the output file
      process.stderr.write(`${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
