#!/usr/bin/env node
/**
 * dsmlab-plots <plane|lyapunov|survivors> <input> [-o output.svg]
 *
 * plane, lyapunov read a scan-plane raster CSV; survivors reads an
 * induction report JSON. Output defaults to <input>.<kind>.svg.
 */

import { readFileSync, writeFileSync } from "fs";
import { parseRaster, parseReport, SchemaError } from "./schema.js";
import { plotLyapunov, plotPlane, plotSurvivors } from "./plots.js";

export function render(kind: string, inputText: string): string {
  switch (kind) {
    case "plane":
      return plotPlane(parseRaster(inputText));
    case "lyapunov":
      return plotLyapunov(parseRaster(inputText));
    case "survivors":
      return plotSurvivors(parseReport(inputText));
    default:
      throw new SchemaError(`unknown figure kind: ${kind}`);
  }
}

export function main(argv: string[]): number {
  const args = [...argv];
  let out: string | null = null;
  const oIdx = args.indexOf("-o");
  if (oIdx >= 0) {
    out = args[oIdx + 1] ?? null;
    args.splice(oIdx, 2);
  }
  const [kind, input] = args;
  if (!kind || !input) {
    process.stderr.write(
      "usage: dsmlab-plots <plane|lyapunov|survivors> <input> [-o out.svg]\n");
    return 2;
  }
  let svg: string;
  try {
    svg = render(kind, readFileSync(input, "utf8"));
  } catch (e) {
    if (e instanceof SchemaError) {
      process.stderr.write(`schema error: ${e.message}\n`);
      return 2;
    }
    throw e;
  }
  const target = out ?? `${input}.${kind}.svg`;
  writeFileSync(target, svg);
  process.stderr.write(`wrote ${target}\n`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
