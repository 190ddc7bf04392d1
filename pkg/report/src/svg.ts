/**
 * Deterministic standalone SVG charts, no DOM required.
 *
 * Output contains no timestamps or random ids, so re-rendering the same
 * bundle is byte-identical. Machine-readable values (fitted slopes and
 * similar) ride along as data-* attributes at full precision while the
 * visible annotation text stays short.
 */

import { scaleLinear, scaleLog } from "d3-scale";

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { top: 42, right: 24, bottom: 48, left: 68 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];

export interface Series {
  label: string;
  color: string;
  points: Array<readonly [number, number]>;
  /** draw a connecting polyline (default true) */
  line?: boolean;
  /** draw point markers (default true) */
  markers?: boolean;
  dashed?: boolean;
}

export interface Annotation {
  /** visible label, e.g. "h0 slope -0.2373 (target -0.25)" */
  text: string;
  /** full-precision payload emitted as data-* attributes */
  data: Record<string, string>;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  series: Series[];
  annotations?: Annotation[];
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtCoord(v: number): string {
  return v.toFixed(2);
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const e = Math.round(Math.log10(Math.abs(v)));
  if (Math.abs(Math.pow(10, e) - Math.abs(v)) <= 1e-9 * Math.abs(v)) {
    if (e >= -2 && e <= 3) return String(v);
    return `${v < 0 ? "-" : ""}1e${e}`;
  }
  if (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(3)));
}

interface Extent {
  min: number;
  max: number;
}

function extentOf(values: number[], log: boolean): Extent {
  const finite = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (finite.length === 0) return log ? { min: 0.1, max: 10 } : { min: 0, max: 1 };
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    if (log) {
      min /= 2;
      max *= 2;
    } else {
      min -= 0.5;
      max += 0.5;
    }
  } else if (log) {
    const pad = Math.pow(max / min, 0.06);
    min /= pad;
    max *= pad;
  } else {
    const pad = 0.06 * (max - min);
    min -= pad;
    max += pad;
  }
  return { min, max };
}

function makeScale(ext: Extent, log: boolean, range: [number, number]) {
  return log
    ? scaleLog().domain([ext.min, ext.max]).range(range)
    : scaleLinear().domain([ext.min, ext.max]).range(range);
}

function chooseTicks(scale: ReturnType<typeof makeScale>, log: boolean): number[] {
  const raw = scale.ticks(log ? 8 : 6);
  if (!log || raw.length <= 9) return raw;
  // keep decade ticks when a log axis spans many orders of magnitude
  const decades = raw.filter((v) => {
    const e = Math.round(Math.log10(v));
    return Math.abs(Math.pow(10, e) - v) <= 1e-9 * v;
  });
  return decades.length >= 2 ? decades : raw.filter((_, i) => i % 3 === 0);
}

/** Render a complete chart; pure function of its spec. */
export function renderChart(spec: ChartSpec): string {
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const xLog = spec.xLog ?? false;
  const yLog = spec.yLog ?? false;

  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  const xScale = makeScale(extentOf(xs, xLog), xLog, [left, right]);
  const yScale = makeScale(extentOf(ys, yLog), yLog, [bottom, top]);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  out.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  out.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" font-weight="bold">` +
      `${escapeXml(spec.title)}</text>`,
  );

  // axes and grid
  for (const t of chooseTicks(xScale, xLog)) {
    const px = fmtCoord(xScale(t));
    out.push(`<line x1="${px}" y1="${top}" x2="${px}" y2="${bottom}" stroke="#eee"/>`);
    out.push(
      `<text x="${px}" y="${bottom + 16}" text-anchor="middle" font-size="11">` +
        `${escapeXml(fmtTick(t))}</text>`,
    );
  }
  for (const t of chooseTicks(yScale, yLog)) {
    const py = fmtCoord(yScale(t));
    out.push(`<line x1="${left}" y1="${py}" x2="${right}" y2="${py}" stroke="#eee"/>`);
    out.push(
      `<text x="${left - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${escapeXml(fmtTick(t))}</text>`,
    );
  }
  out.push(
    `<rect x="${left}" y="${top}" width="${right - left}" height="${bottom - top}" ` +
      `fill="none" stroke="#444"/>`,
  );
  out.push(
    `<text x="${(left + right) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="12">` +
      `${escapeXml(spec.xLabel)}</text>`,
  );
  out.push(
    `<text x="16" y="${(top + bottom) / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 16 ${(top + bottom) / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  // series
  spec.series.forEach((s, si) => {
    const pts = s.points
      .filter(
        ([x, y]) =>
          Number.isFinite(x) && Number.isFinite(y) && (!xLog || x > 0) && (!yLog || y > 0),
      )
      .map(([x, y]) => [xScale(x), yScale(y)] as const);
    if (pts.length === 0) return;
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    if (s.line !== false && pts.length > 1) {
      const d = pts.map((p) => `${fmtCoord(p[0])},${fmtCoord(p[1])}`).join(" ");
      out.push(
        `<polyline points="${d}" fill="none" stroke="${s.color}" stroke-width="1.6"${dash} ` +
          `data-series="${escapeXml(s.label)}"/>`,
      );
    }
    if (s.markers !== false) {
      for (const p of pts) {
        out.push(
          `<circle cx="${fmtCoord(p[0])}" cy="${fmtCoord(p[1])}" r="3" fill="${s.color}"/>`,
        );
      }
    }
    // legend swatch rows in the top-right corner of the plot area
    const ly = top + 14 + 16 * si;
    out.push(
      `<line x1="${right - 150}" y1="${ly - 4}" x2="${right - 128}" y2="${ly - 4}" ` +
        `stroke="${s.color}" stroke-width="2"${dash}/>`,
    );
    out.push(
      `<text x="${right - 122}" y="${ly}" font-size="11">${escapeXml(s.label)}</text>`,
    );
  });

  // annotations: visible text plus full-precision data attributes
  (spec.annotations ?? []).forEach((a, ai) => {
    const ay = bottom - 10 - 15 * ((spec.annotations?.length ?? 0) - 1 - ai);
    const attrs = Object.entries(a.data)
      .map(([k, v]) => ` data-${k}="${escapeXml(v)}"`)
      .join("");
    out.push(
      `<text x="${left + 8}" y="${ay}" font-size="11.5" fill="#222"${attrs}>` +
        `${escapeXml(a.text)}</text>`,
    );
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}

/** Placeholder emitted when a figure's inputs are absent or empty. */
export function renderPlaceholder(title: string, message: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" data-empty="true">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<rect x="8" y="8" width="${WIDTH - 16}" height="${HEIGHT - 16}" fill="none" ` +
      `stroke="#bbb" stroke-dasharray="8 6"/>`,
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" font-weight="bold">` +
      `${escapeXml(title)}</text>`,
    `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" font-size="13" fill="#888">` +
      `${escapeXml(`no data: ${message}`)}</text>`,
    `</svg>`,
  ].join("\n") + "\n";
}
