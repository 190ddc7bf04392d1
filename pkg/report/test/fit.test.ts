import { describe, expect, it } from "vitest";
import { decaySlope, olsSlope } from "../src/fit.js";
import type { DecayRow } from "../src/types.js";

describe("olsSlope", () => {
  it("recovers an exact affine relation", () => {
    const x = [1, 2, 3, 5, 8];
    const y = x.map((v) => 3 * v + 1);
    expect(olsSlope(x, y)).toBeCloseTo(3, 14);
  });

  it("averages symmetric noise away", () => {
    // symmetric residuals around slope 2 cancel in the normal equations
    const x = [0, 1, 2, 3];
    const y = [0 + 0.5, 2 - 0.5, 4 - 0.5, 6 + 0.5];
    expect(olsSlope(x, y)).toBeCloseTo(2, 12);
  });

  it("rejects degenerate input", () => {
    expect(() => olsSlope([1], [2])).toThrow(/two paired/);
    expect(() => olsSlope([2, 2, 2], [1, 2, 3])).toThrow(/degenerate/);
  });
});

describe("decaySlope", () => {
  const rows = (fn: (r: number) => [number, number]): DecayRow[] =>
    [10, 100, 1000, 10000].map((r) => {
      const [value, L] = fn(r);
      return { r, value, L };
    });

  it("fits the bare exponent of r^p / L after multiplying back", () => {
    // value = 4 r^{-0.25} / L with a slowly varying L
    const tab = rows((r) => {
      const L = Math.pow(Math.log(r), 2);
      return [(4 * Math.pow(r, -0.25)) / L, L];
    });
    expect(decaySlope(tab, true)).toBeCloseTo(-0.25, 12);
  });

  it("fits the raw magnitude when the weight is not folded in", () => {
    const tab = rows((r) => [0.5 * Math.pow(r, -1.0), 7.0]);
    expect(decaySlope(tab, false)).toBeCloseTo(-1.0, 12);
  });

  it("is undefined on vanishing values or short tables", () => {
    const tab = rows((r) => [r === 1000 ? 0 : 1 / r, 1]);
    expect(decaySlope(tab, true)).toBeNull();
    expect(decaySlope(tab.slice(0, 1), true)).toBeNull();
  });
});
