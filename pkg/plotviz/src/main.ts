#!/usr/bin/env node
/**
 * plot <kind> <csv...> -o <out.svg> [--task name]
 *
 * kinds:
 *   error-sweep   one or more model-error CSVs (t,err_x,err_v,psi), one curve
 *                 per file, labels parsed from the *_M_N.csv filenames
 *   tracking      one closed-loop tracking CSV; task inferred from the
 *                 filename or forced with --task
 *
 * Output is an SVG image (no raster backend is assumed to exist); a .png
 * output path is rewritten to .svg with a notice.
 */

import { writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { mkdirSync } from "node:fs";

import { CsvError } from "./csv.js";
import { plotErrorSweep, plotTracking } from "./plots.js";

interface Args {
  kind: string;
  inputs: string[];
  out: string;
  task?: string;
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  let out = "";
  let task: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "-o" || a === "--out") {
      out = argv[++i] ?? "";
    } else if (a === "--task") {
      task = argv[++i];
    } else if (a === "-h" || a === "--help") {
      positional.length = 0;
      break;
    } else {
      positional.push(a);
    }
  }
  if (positional.length < 2 || !out) {
    throw new Error(
      "usage: plot <error-sweep|tracking> <csv...> -o <out.svg> [--task name]",
    );
  }
  const [kind, ...inputs] = positional;
  return { kind, inputs, out, task };
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    let svg: string;
    if (args.kind === "error-sweep") {
      svg = plotErrorSweep(args.inputs);
    } else if (args.kind === "tracking") {
      if (args.inputs.length !== 1) {
        throw new Error("tracking takes exactly one CSV");
      }
      svg = plotTracking(args.inputs[0], args.task);
    } else {
      throw new Error(`unknown figure kind '${args.kind}' (error-sweep | tracking)`);
    }
    let out = args.out;
    if (out.toLowerCase().endsWith(".png")) {
      out = out.slice(0, -4) + ".svg";
      console.error(`note: no raster backend; writing SVG to ${out}`);
    }
    mkdirSync(dirname(out) || ".", { recursive: true });
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof Error) {
      console.error((err as Error).message);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("main.js") || entry.endsWith("plot")) {
  process.exit(run(process.argv.slice(2)));
}
