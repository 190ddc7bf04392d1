/**
 * Log-log least-squares slopes, matching the producing pipeline's fits.
 *
 * The seed decay tables store (r, value, L) where value ~ r^p / L(r), so
 * the seed fit regresses log(value) + log(L) on log(r). Correction tables
 * are fitted on the raw magnitude, without the weight factor. Both are
 * ordinary least squares on natural logs, which is what the producer uses;
 * annotations derived here must agree with its recorded slopes to ~1e-15.
 */

import type { DecayRow } from "./types.js";

export function olsSlope(x: readonly number[], y: readonly number[]): number {
  const n = x.length;
  if (n < 2 || y.length !== n) throw new Error("olsSlope needs two paired samples");
  let mx = 0;
  let my = 0;
  for (let i = 0; i < n; i++) {
    mx += x[i]!;
    my += y[i]!;
  }
  mx /= n;
  my /= n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    const dx = x[i]! - mx;
    sxy += dx * (y[i]! - my);
    sxx += dx * dx;
  }
  if (sxx === 0) throw new Error("olsSlope: degenerate abscissae");
  return sxy / sxx;
}

/**
 * Fitted decay exponent of a (r, value, L) table.
 *
 * With multiplyByWeight the weight's log is added, so a field behaving
 * like r^p / L(r) fits the bare exponent p. Returns null when any value
 * is nonpositive (fit undefined, e.g. a field vanishing along the ray).
 */
export function decaySlope(rows: readonly DecayRow[], multiplyByWeight: boolean): number | null {
  if (rows.length < 2) return null;
  if (rows.some((row) => !(row.value > 0) || !(row.r > 0) || !(row.L > 0))) return null;
  const lx = rows.map((row) => Math.log(row.r));
  const ly = rows.map((row) => Math.log(row.value) + (multiplyByWeight ? Math.log(row.L) : 0));
  return olsSlope(lx, ly);
}
