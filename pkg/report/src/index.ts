#!/usr/bin/env node
/**
 * report --in <dir> --out <dir>
 *
 * Renders the four diagnostic figures (decay, iterations, sharpness,
 * quadratic smallness) and a summary page from a run directory's CSVs.
 */

import { existsSync, statSync } from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { renderAll } from "./render.js";

export function main(argvRaw: string[]): number {
  const argv = yargs(argvRaw)
    .scriptName("report")
    .usage("$0 --in <run dir> --out <figure dir>")
    .option("in", {
      type: "string",
      demandOption: true,
      describe: "run directory containing diagnostics CSVs",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "directory to write figures and summary into",
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  const inDir = argv.in;
  if (!existsSync(inDir) || !statSync(inDir).isDirectory()) {
    console.error(`report: input directory not found: ${inDir}`);
    return 1;
  }
  const { written, warnings } = renderAll(inDir, argv.out);
  for (const w of warnings) console.error(`warning: ${w}`);
  console.log(`report: wrote ${written.join(", ")} to ${argv.out}`);
  return 0;
}

const isDirect =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isDirect) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    console.error(`report: ${err instanceof Error ? err.message : String(err)}`);
    process.exitCode = 1;
  }
}
