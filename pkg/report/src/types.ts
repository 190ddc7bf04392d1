/**
 * Row shapes for the CSV artifacts a run directory may contain.
 *
 * Columns mirror the producing CLI exactly; the report never invents
 * numbers, it only re-plots (and re-fits) what the run wrote.
 */

import { z } from "zod";

const num = z
  .string()
  .transform((s) => Number(s))
  .refine((v) => Number.isFinite(v), { message: "not a finite number" });

// the producer writes Python reprs, so "nan"/"inf" are legitimate cells
// in columns that may hold undefined ratios (e.g. the first iteration)
const numOrNan = z.string().transform((s, ctx) => {
  if (s === "nan") return Number.NaN;
  if (s === "inf") return Number.POSITIVE_INFINITY;
  if (s === "-inf") return Number.NEGATIVE_INFINITY;
  const v = Number(s);
  if (!Number.isFinite(v)) {
    ctx.addIssue({ code: z.ZodIssueCode.custom, message: "not a number" });
    return z.NEVER;
  }
  return v;
});

const flag = z
  .string()
  .refine((s) => s === "0" || s === "1", { message: "expected 0 or 1" })
  .transform((s) => s === "1");

export const decayRowSchema = z.object({ r: num, value: num, L: num });
export type DecayRow = z.infer<typeof decayRowSchema>;

export const decayFitRowSchema = z.object({
  field: z.string(),
  slope: num,
  reference: num,
  passed: flag,
});
export type DecayFitRow = z.infer<typeof decayFitRowSchema>;

export const iterationRowSchema = z.object({
  iter: num,
  update_norm: num,
  phi_norm: num,
  ratio: numOrNan,
});
export type IterationRow = z.infer<typeof iterationRowSchema>;

export const shellRowSchema = z.object({ R_lo: num, R_hi: num, increment: num });
export type ShellRow = z.infer<typeof shellRowSchema>;

export const qsmallRowSchema = z.object({ eps0: num, phi_norm: num });
export type QsmallRow = z.infer<typeof qsmallRowSchema>;

export const verifyRowSchema = z.object({
  check: z.string(),
  value: num,
  threshold: num,
  passed: flag,
});
export type VerifyRow = z.infer<typeof verifyRowSchema>;

export const normsRowSchema = z.object({ k: num, delta: num, value: num });
export type NormsRow = z.infer<typeof normsRowSchema>;

/** Everything render() consumes, with absent or empty inputs as null. */
export interface ReportBundle {
  decayH0: DecayRow[] | null;
  decayPi0: DecayRow[] | null;
  decayH1: DecayRow[] | null;
  decayFits: DecayFitRow[] | null;
  iterations: IterationRow[] | null;
  sharpnessS: ShellRow[] | null;
  sharpnessSPlus1: ShellRow[] | null;
  qsmall: QsmallRow[] | null;
  verify: VerifyRow[] | null;
  normsH1: NormsRow[] | null;
  normsPi1: NormsRow[] | null;
  /** decay exponent parameter from effective-config, if available */
  s: number | null;
  warnings: string[];
}
