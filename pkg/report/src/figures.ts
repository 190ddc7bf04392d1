/**
 * The four diagnostic figures and the summary page.
 *
 * Figures are derived artifacts only: every number shown is either read
 * from a CSV or re-fitted from CSV columns with the producer's own
 * arithmetic (see fit.ts). Missing or empty inputs yield placeholder
 * panels and a warning instead of an error.
 */

import { decaySlope, olsSlope } from "./fit.js";
import {
  PALETTE,
  renderChart,
  renderPlaceholder,
  escapeXml,
  type Annotation,
  type Series,
} from "./svg.js";
import type { DecayRow, ReportBundle } from "./types.js";

export interface FigureResult {
  svg: string;
  warnings: string[];
}

export interface SlopeRecord {
  field: string;
  /** re-fitted from the decay table, null when the fit is undefined */
  slope: number | null;
  /** target or ceiling for the slope, when known */
  reference: number | null;
  /** whether the fit folds in the weight factor L */
  weighted: boolean;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(3);
  return String(Number(v.toPrecision(4)));
}

function refLine(
  rows: readonly DecayRow[],
  slope: number,
  weighted: boolean,
  lift: number,
): Array<readonly [number, number]> {
  const first = rows[0]!;
  const last = rows[rows.length - 1]!;
  const y0 = (weighted ? first.value * first.L : first.value) * lift;
  return [
    [first.r, y0],
    [last.r, y0 * Math.pow(last.r / first.r, slope)],
  ];
}

// ---- decay ------------------------------------------------------------

export interface DecayFigure extends FigureResult {
  slopes: SlopeRecord[];
}

export function buildDecayFigure(bundle: ReportBundle): DecayFigure {
  const warnings: string[] = [];
  if (!bundle.decayH0 && !bundle.decayPi0 && !bundle.decayH1) {
    warnings.push("decay figure: no decay tables, placeholder emitted");
    return {
      svg: renderPlaceholder("Seed and correction decay", "decay tables absent or empty"),
      slopes: [],
      warnings,
    };
  }

  const fits = new Map((bundle.decayFits ?? []).map((r) => [r.field, r]));
  const series: Series[] = [];
  const annotations: Annotation[] = [];
  const slopes: SlopeRecord[] = [];

  const entries: Array<{
    field: string;
    rows: readonly DecayRow[] | null;
    weighted: boolean;
    label: string;
    refSlope: number | null;
    refWord: string;
  }> = [
    {
      field: "h0",
      rows: bundle.decayH0,
      weighted: true,
      label: "|h0| L(r)",
      refSlope: bundle.s !== null ? -(bundle.s - 1) / 2 : (fits.get("h0")?.reference ?? null),
      refWord: "target",
    },
    {
      field: "pi0",
      rows: bundle.decayPi0,
      weighted: true,
      label: "|pi0| L(r)",
      refSlope: bundle.s !== null ? -(bundle.s + 1) / 2 : (fits.get("pi0")?.reference ?? null),
      refWord: "target",
    },
    {
      field: "h1",
      rows: bundle.decayH1,
      weighted: false,
      label: "|h1|",
      refSlope: fits.get("h1")?.reference ?? null,
      refWord: "ceiling",
    },
  ];

  entries.forEach((e, i) => {
    if (!e.rows) return;
    const color = PALETTE[i]!;
    series.push({
      label: e.label,
      color,
      points: e.rows.map((row) => [row.r, e.weighted ? row.value * row.L : row.value] as const),
    });
    if (e.refSlope !== null) {
      series.push({
        label: `slope ${fmt(e.refSlope)}`,
        color,
        dashed: true,
        markers: false,
        points: refLine(e.rows, e.refSlope, e.weighted, 2.0),
      });
    }
    const slope = decaySlope(e.rows, e.weighted);
    slopes.push({ field: e.field, slope, reference: e.refSlope, weighted: e.weighted });
    if (slope === null) {
      warnings.push(`decay figure: ${e.field} fit undefined (nonpositive values)`);
      annotations.push({ text: `${e.field} slope undefined`, data: { field: e.field } });
      return;
    }
    const refText = e.refSlope !== null ? ` (${e.refWord} ${fmt(e.refSlope)})` : "";
    annotations.push({
      text: `${e.field} slope ${fmt(slope)}${refText}`,
      data: {
        field: e.field,
        slope: String(slope),
        ...(e.refSlope !== null ? { reference: String(e.refSlope) } : {}),
      },
    });
  });

  for (const e of entries) {
    if (!e.rows) warnings.push(`decay figure: ${e.field} table absent or empty`);
  }
  if (bundle.s === null) {
    warnings.push("decay figure: run.s unknown, reference slopes taken from decay_fits.csv");
  }

  return {
    svg: renderChart({
      title: "Seed and correction decay along the cone axis",
      xLabel: "r",
      yLabel: "Frobenius magnitude",
      xLog: true,
      yLog: true,
      series,
      annotations,
    }),
    slopes,
    warnings,
  };
}

// ---- iterations -------------------------------------------------------

export function buildIterationsFigure(bundle: ReportBundle): FigureResult {
  const rows = bundle.iterations;
  if (!rows) {
    return {
      svg: renderPlaceholder("Fixed-point iteration", "iterations.csv absent or empty"),
      warnings: ["iterations figure: no iteration history, placeholder emitted"],
    };
  }
  const series: Series[] = [
    {
      label: "update norm",
      color: PALETTE[0]!,
      points: rows.map((r) => [r.iter, r.update_norm] as const),
    },
    {
      label: "phi norm",
      color: PALETTE[1]!,
      points: rows.map((r) => [r.iter, r.phi_norm] as const),
    },
  ];
  const finiteRatios = rows.map((r) => r.ratio).filter((v) => Number.isFinite(v));
  const annotations: Annotation[] = [];
  const last = rows[rows.length - 1]!;
  annotations.push({
    text: `final update ${fmt(last.update_norm)} after ${rows.length} iterations`,
    data: { final_update: String(last.update_norm), iterations: String(rows.length) },
  });
  if (finiteRatios.length > 0) {
    const lastRatio = finiteRatios[finiteRatios.length - 1]!;
    annotations.push({
      text: `last contraction ratio ${fmt(lastRatio)}`,
      data: { last_ratio: String(lastRatio) },
    });
  }
  return {
    svg: renderChart({
      title: "Fixed-point iteration history",
      xLabel: "iteration",
      yLabel: "norm",
      yLog: true,
      series,
      annotations,
    }),
    warnings: [],
  };
}

// ---- sharpness --------------------------------------------------------

export function buildSharpnessFigure(bundle: ReportBundle): FigureResult {
  const conv = bundle.sharpnessS;
  const div = bundle.sharpnessSPlus1;
  if (!conv && !div) {
    return {
      svg: renderPlaceholder("Sharpness shell increments", "sharpness tables absent or empty"),
      warnings: ["sharpness figure: no shell tables, placeholder emitted"],
    };
  }
  const warnings: string[] = [];
  const series: Series[] = [];
  const annotations: Annotation[] = [];
  if (conv) {
    series.push({
      label: "s' = s",
      color: PALETTE[0]!,
      points: conv.map((r) => [r.R_hi, r.increment] as const),
    });
    const decreasing = conv.every((r, i) => i === 0 || r.increment < conv[i - 1]!.increment);
    annotations.push({
      text: `s' = s increments ${decreasing ? "decreasing" : "NOT decreasing"}`,
      data: { s_decreasing: decreasing ? "1" : "0" },
    });
  } else {
    warnings.push("sharpness figure: sharpness_s.csv absent or empty");
  }
  if (div) {
    series.push({
      label: "s' = s + 1",
      color: PALETTE[1]!,
      points: div.map((r) => [r.R_hi, r.increment] as const),
    });
    const first = div[0]!.increment;
    const lastInc = div[div.length - 1]!.increment;
    if (first > 0) {
      const growth = lastInc / first;
      annotations.push({
        text: `s' = s + 1 last/first = ${fmt(growth)}`,
        data: { growth: String(growth) },
      });
    }
  } else {
    warnings.push("sharpness figure: sharpness_s_plus_1.csv absent or empty");
  }
  return {
    svg: renderChart({
      title: "Shell increments of the weighted squared norm",
      xLabel: "shell outer radius",
      yLabel: "increment",
      xLog: true,
      yLog: true,
      series,
      annotations,
    }),
    warnings,
  };
}

// ---- quadratic smallness ----------------------------------------------

export interface QsmallFigure extends FigureResult {
  slope: number | null;
}

export function buildQsmallFigure(bundle: ReportBundle): QsmallFigure {
  const rows = bundle.qsmall;
  if (!rows) {
    return {
      svg: renderPlaceholder("Quadratic smallness", "qsmall.csv absent or empty"),
      slope: null,
      warnings: ["qsmall figure: no amplitude scan, placeholder emitted"],
    };
  }
  const series: Series[] = [
    {
      label: "|Phi(seed)|",
      color: PALETTE[0]!,
      line: false,
      points: rows.map((r) => [r.eps0, r.phi_norm] as const),
    },
  ];
  const annotations: Annotation[] = [];
  let slope: number | null = null;
  const positive = rows.filter((r) => r.eps0 > 0 && r.phi_norm > 0);
  if (positive.length >= 2) {
    slope = olsSlope(
      positive.map((r) => Math.log(r.eps0)),
      positive.map((r) => Math.log(r.phi_norm)),
    );
    annotations.push({
      text: `fitted slope ${fmt(slope)} (quadratic reference 2)`,
      data: { slope: String(slope), reference: "2" },
    });
    const anchor = positive.reduce((a, b) => (b.eps0 > a.eps0 ? b : a));
    const lo = positive.reduce((a, b) => (b.eps0 < a.eps0 ? b : a));
    series.push({
      label: "slope 2",
      color: PALETTE[1]!,
      dashed: true,
      markers: false,
      points: [
        [lo.eps0, 2.0 * anchor.phi_norm * Math.pow(lo.eps0 / anchor.eps0, 2)],
        [anchor.eps0, 2.0 * anchor.phi_norm],
      ],
    });
  }
  return {
    svg: renderChart({
      title: "Constraint image versus seed amplitude",
      xLabel: "eps0",
      yLabel: "|Phi(seed)|",
      xLog: true,
      yLog: true,
      series,
      annotations,
    }),
    slope,
    warnings: [],
  };
}

// ---- summary page -----------------------------------------------------

function htmlTable(header: string[], rows: string[][], rowAttrs?: string[]): string {
  const h = header.map((c) => `<th>${escapeXml(c)}</th>`).join("");
  const body = rows
    .map((cells, i) => {
      const attrs = rowAttrs?.[i] ?? "";
      return `<tr${attrs}>${cells.map((c) => `<td>${escapeXml(c)}</td>`).join("")}</tr>`;
    })
    .join("\n");
  return `<table>\n<tr>${h}</tr>\n${body}\n</table>`;
}

export function buildSummaryPage(
  bundle: ReportBundle,
  slopes: SlopeRecord[],
  allWarnings: string[],
): string {
  const parts: string[] = [];
  parts.push("<!DOCTYPE html>");
  parts.push('<html><head><meta charset="utf-8"><title>Run report</title>');
  parts.push(
    "<style>body{font-family:sans-serif;margin:2em;max-width:70em}" +
      "table{border-collapse:collapse;margin:0.7em 0}" +
      "td,th{border:1px solid #999;padding:0.25em 0.7em;font-size:0.92em}" +
      "th{background:#eee}.fail{background:#fdd}.warn{color:#a50}</style>",
  );
  parts.push("</head><body>");
  parts.push("<h1>Run report</h1>");
  parts.push(
    "<p>Figures: <a href='decay.svg'>decay</a>, <a href='iterations.svg'>iterations</a>, " +
      "<a href='sharpness.svg'>sharpness</a>, <a href='qsmall.svg'>qsmall</a></p>",
  );

  parts.push("<h2>Fitted decay slopes</h2>");
  if (bundle.decayFits || slopes.length > 0) {
    const fits = bundle.decayFits ?? [];
    const refit = new Map(slopes.map((s) => [s.field, s]));
    const fields = [...new Set([...fits.map((f) => f.field), ...slopes.map((s) => s.field)])];
    const rows: string[][] = [];
    const attrs: string[] = [];
    for (const field of fields) {
      const rec = fits.find((f) => f.field === field);
      const re = refit.get(field);
      const diff =
        rec && re?.slope != null ? Math.abs(rec.slope - re.slope).toExponential(2) : "";
      rows.push([
        field,
        rec ? String(rec.slope) : "",
        rec ? String(rec.reference) : re?.reference != null ? String(re.reference) : "",
        rec ? (rec.passed ? "pass" : "FAIL") : "",
        re?.slope != null ? String(re.slope) : "",
        diff,
      ]);
      const dataSlope = re?.slope != null ? ` data-refit="${re.slope}"` : "";
      const dataRec = rec ? ` data-slope="${rec.slope}"` : "";
      attrs.push(
        `${rec && !rec.passed ? ' class="fail"' : ""} data-field="${escapeXml(field)}"${dataRec}${dataSlope}`,
      );
    }
    parts.push(
      htmlTable(
        ["field", "recorded slope", "reference", "passed", "re-fit from table", "|diff|"],
        rows,
        attrs,
      ),
    );
  } else {
    parts.push("<p class='warn'>no decay fits available</p>");
  }

  parts.push("<h2>Verification checks</h2>");
  if (bundle.verify) {
    parts.push(
      htmlTable(
        ["check", "value", "threshold", "passed"],
        bundle.verify.map((r) => [r.check, String(r.value), String(r.threshold), r.passed ? "pass" : "FAIL"]),
        bundle.verify.map((r) => (r.passed ? "" : ' class="fail"')),
      ),
    );
  } else {
    parts.push("<p class='warn'>verify.csv absent or empty</p>");
  }

  for (const [name, rows] of [
    ["correction h1", bundle.normsH1],
    ["correction pi1", bundle.normsPi1],
  ] as const) {
    if (!rows) continue;
    parts.push(`<h2>Norm ladder: ${escapeXml(name)}</h2>`);
    parts.push(
      htmlTable(
        ["k", "delta", "value"],
        rows.map((r) => [String(r.k), String(r.delta), String(r.value)]),
      ),
    );
  }

  parts.push("<h2>Warnings</h2>");
  if (allWarnings.length === 0) {
    parts.push("<p>none</p>");
  } else {
    parts.push("<ul>" + allWarnings.map((w) => `<li class="warn">${escapeXml(w)}</li>`).join("") + "</ul>");
  }

  parts.push("</body></html>");
  return parts.join("\n") + "\n";
}
