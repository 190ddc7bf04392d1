/**
 * Minimal reader for the flat `key = value` effective-config that every
 * run directory carries. The report only needs the decay parameter s
 * (for the reference slopes -(s-1)/2 and -(s+1)/2).
 */

export function parseConfigValue(text: string, section: string, key: string): string | null {
  let current = "";
  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.trim();
    if (line === "" || line.startsWith("#") || line.startsWith(";")) continue;
    const m = line.match(/^\[(.+)\]$/);
    if (m) {
      current = m[1]!.trim();
      continue;
    }
    const eq = line.indexOf("=");
    if (eq < 0) continue;
    if (current === section && line.slice(0, eq).trim() === key) {
      return line.slice(eq + 1).trim();
    }
  }
  return null;
}

export function parseS(text: string): number | null {
  const raw = parseConfigValue(text, "run", "s");
  if (raw === null) return null;
  const v = Number(raw);
  return Number.isFinite(v) ? v : null;
}
