import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { MissingColumnError, readCsvFile } from "../src/csv.js";
import { loadBundle } from "../src/bundle.js";
import { decayRowSchema, iterationRowSchema } from "../src/types.js";

function tmpWith(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "report-csv-"));
  const path = join(dir, name);
  writeFileSync(path, text, "utf8");
  return path;
}

describe("readCsvFile", () => {
  it("parses full-precision reprs bit-exactly", () => {
    const path = tmpWith(
      "decay_h0.csv",
      "r,value,L\n100.0,0.0030227754552113354,1.8930622013220076\n",
    );
    const rows = readCsvFile(path, decayRowSchema, ["r", "value", "L"]);
    expect(rows).not.toBeNull();
    expect(rows![0]!.value).toBe(0.0030227754552113354);
    expect(rows![0]!.L).toBe(1.8930622013220076);
  });

  it("names the file and the column when a column is missing", () => {
    const path = tmpWith("decay_h0.csv", "r,value\n1.0,2.0\n");
    expect(() => readCsvFile(path, decayRowSchema, ["r", "value", "L"])).toThrow(
      MissingColumnError,
    );
    expect(() => readCsvFile(path, decayRowSchema, ["r", "value", "L"])).toThrow(
      /decay_h0\.csv: missing column "L"/,
    );
  });

  it("names the column and row of a malformed cell", () => {
    const path = tmpWith("decay_h0.csv", "r,value,L\n1.0,two,3.0\n");
    expect(() => readCsvFile(path, decayRowSchema, ["r", "value", "L"])).toThrow(
      /decay_h0\.csv: column "value", row 0/,
    );
  });

  it("returns null for a header-only file", () => {
    const path = tmpWith("decay_h0.csv", "r,value,L\n");
    expect(readCsvFile(path, decayRowSchema, ["r", "value", "L"])).toBeNull();
  });

  it("accepts nan in the iteration ratio column only", () => {
    const ok = tmpWith("iterations.csv", "iter,update_norm,phi_norm,ratio\n1,0.5,0.25,nan\n");
    const rows = readCsvFile(ok, iterationRowSchema, ["iter", "update_norm", "phi_norm", "ratio"]);
    expect(Number.isNaN(rows![0]!.ratio)).toBe(true);
    const bad = tmpWith("iterations.csv", "iter,update_norm,phi_norm,ratio\n1,nan,0.25,0.5\n");
    expect(() =>
      readCsvFile(bad, iterationRowSchema, ["iter", "update_norm", "phi_norm", "ratio"]),
    ).toThrow(/column "update_norm"/);
  });
});

describe("loadBundle", () => {
  it("warns about absent inputs instead of failing", () => {
    const dir = mkdtempSync(join(tmpdir(), "report-none-"));
    const bundle = loadBundle(dir);
    expect(bundle.decayH0).toBeNull();
    expect(bundle.iterations).toBeNull();
    expect(bundle.s).toBeNull();
    expect(bundle.warnings.some((w) => w.includes("decay_h0.csv"))).toBe(true);
    expect(bundle.warnings.some((w) => w.includes("effective-config"))).toBe(true);
  });

  it("reads run.s from effective-config", () => {
    const dir = mkdtempSync(join(tmpdir(), "report-cfg-"));
    writeFileSync(join(dir, "effective-config"), "[run]\ns = 1.5\nq = 2\n", "utf8");
    expect(loadBundle(dir).s).toBe(1.5);
  });
});
