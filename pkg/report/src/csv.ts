/**
 * CSV ingestion with strict column checking.
 *
 * A file that exists but lacks a required column is a hard error naming
 * the file and the column; a file with a header and no data rows is
 * "empty" and reported as null so callers can fall back to a placeholder.
 */

import { readFileSync } from "node:fs";
import { basename } from "node:path";
import Papa from "papaparse";
import type { z } from "zod";

export class MissingColumnError extends Error {
  constructor(
    public readonly file: string,
    public readonly column: string,
  ) {
    super(`${basename(file)}: missing column "${column}"`);
    this.name = "MissingColumnError";
  }
}

export class BadCellError extends Error {
  constructor(file: string, column: string, rowIndex: number, detail: string) {
    super(`${basename(file)}: column "${column}", row ${rowIndex}: ${detail}`);
    this.name = "BadCellError";
  }
}

/**
 * Parse a CSV file against a zod row schema.
 *
 * Returns null when the file has a header but no data rows. The schema's
 * keys define the required columns.
 */
export function readCsvFile<S extends z.ZodType<unknown, z.ZodTypeDef, Record<string, string>>>(
  path: string,
  schema: S,
  columns: readonly string[],
): z.infer<S>[] | null {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0]!;
    throw new Error(`${basename(path)}: CSV parse error: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of columns) {
    if (!fields.includes(col)) throw new MissingColumnError(path, col);
  }
  if (parsed.data.length === 0) return null;
  const rows: z.infer<S>[] = [];
  parsed.data.forEach((raw, i) => {
    const res = schema.safeParse(raw);
    if (!res.success) {
      const issue = res.error.issues[0]!;
      const col = String(issue.path[0] ?? "?");
      throw new BadCellError(path, col, i, issue.message);
    }
    rows.push(res.data);
  });
  return rows;
}
