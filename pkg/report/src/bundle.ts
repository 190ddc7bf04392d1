/**
 * Assemble a ReportBundle from a run directory.
 *
 * Absent or empty inputs become nulls plus a warning (the figures fall
 * back to placeholders); present-but-malformed inputs raise. Reading
 * never touches the directory's contents.
 */

import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { readCsvFile } from "./csv.js";
import { parseS } from "./config.js";
import {
  decayFitRowSchema,
  decayRowSchema,
  iterationRowSchema,
  normsRowSchema,
  qsmallRowSchema,
  shellRowSchema,
  verifyRowSchema,
  type ReportBundle,
} from "./types.js";

const FILES = {
  decayH0: ["decay_h0.csv", decayRowSchema, ["r", "value", "L"]],
  decayPi0: ["decay_pi0.csv", decayRowSchema, ["r", "value", "L"]],
  decayH1: ["decay_h1.csv", decayRowSchema, ["r", "value", "L"]],
  decayFits: ["decay_fits.csv", decayFitRowSchema, ["field", "slope", "reference", "passed"]],
  iterations: ["iterations.csv", iterationRowSchema, ["iter", "update_norm", "phi_norm", "ratio"]],
  sharpnessS: ["sharpness_s.csv", shellRowSchema, ["R_lo", "R_hi", "increment"]],
  sharpnessSPlus1: ["sharpness_s_plus_1.csv", shellRowSchema, ["R_lo", "R_hi", "increment"]],
  qsmall: ["qsmall.csv", qsmallRowSchema, ["eps0", "phi_norm"]],
  verify: ["verify.csv", verifyRowSchema, ["check", "value", "threshold", "passed"]],
  normsH1: ["norms_h1.csv", normsRowSchema, ["k", "delta", "value"]],
  normsPi1: ["norms_pi1.csv", normsRowSchema, ["k", "delta", "value"]],
} as const;

export function loadBundle(inDir: string): ReportBundle {
  const warnings: string[] = [];
  const bundle: Record<string, unknown> = { warnings };

  for (const [key, [name, schema, columns]] of Object.entries(FILES)) {
    const path = join(inDir, name);
    if (!existsSync(path)) {
      bundle[key] = null;
      warnings.push(`${name}: not found in ${inDir}`);
      continue;
    }
    const rows = readCsvFile(path, schema, columns);
    if (rows === null) warnings.push(`${name}: no data rows`);
    bundle[key] = rows;
  }

  const cfgPath = join(inDir, "effective-config");
  if (existsSync(cfgPath)) {
    const s = parseS(readFileSync(cfgPath, "utf8"));
    if (s === null) warnings.push("effective-config: no run.s value");
    bundle.s = s;
  } else {
    warnings.push(`effective-config: not found in ${inDir}`);
    bundle.s = null;
  }

  return bundle as unknown as ReportBundle;
}
