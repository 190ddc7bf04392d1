/**
 * End-to-end rendering: run directory in, figures plus summary out.
 * The input directory is only ever read.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { loadBundle } from "./bundle.js";
import {
  buildDecayFigure,
  buildIterationsFigure,
  buildQsmallFigure,
  buildSharpnessFigure,
  buildSummaryPage,
} from "./figures.js";

export interface RenderResult {
  written: string[];
  warnings: string[];
}

export function renderAll(inDir: string, outDir: string): RenderResult {
  const bundle = loadBundle(inDir);
  const decay = buildDecayFigure(bundle);
  const iterations = buildIterationsFigure(bundle);
  const sharpness = buildSharpnessFigure(bundle);
  const qsmall = buildQsmallFigure(bundle);

  const warnings = [
    ...bundle.warnings,
    ...decay.warnings,
    ...iterations.warnings,
    ...sharpness.warnings,
    ...qsmall.warnings,
  ];
  const summary = buildSummaryPage(bundle, decay.slopes, warnings);

  mkdirSync(outDir, { recursive: true });
  const files: Array<[string, string]> = [
    ["decay.svg", decay.svg],
    ["iterations.svg", iterations.svg],
    ["sharpness.svg", sharpness.svg],
    ["qsmall.svg", qsmall.svg],
    ["summary.html", summary],
  ];
  const written: string[] = [];
  for (const [name, text] of files) {
    writeFileSync(join(outDir, name), text, "utf8");
    written.push(name);
  }
  return { written, warnings };
}
