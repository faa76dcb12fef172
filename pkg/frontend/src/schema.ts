/**
 * Parsers for the dsmlab CLI's documented output formats.
 *
 * Raster CSV: leading `# key: value` metadata lines, then the fixed header
 *   a,b,class,period,multiplier,lyapunov,cert_N,cert_lambda
 * Induction report JSON: schema "induction-report-v1" with hex-float
 * interval endpoints.
 *
 * Anything that does not match the documented shape throws SchemaError;
 * silent reinterpretation of a drifted schema would make the figures lie.
 */

export class SchemaError extends Error {}

export const RASTER_HEADER =
  "a,b,class,period,multiplier,lyapunov,cert_N,cert_lambda";

export type CellClass =
  | "tongue"
  | "neutral"
  | "expanding_candidate"
  | "certified_expanding"
  | "undecided";

const CELL_CLASSES: ReadonlySet<string> = new Set([
  "tongue", "neutral", "expanding_candidate", "certified_expanding",
  "undecided",
]);

export interface RasterRow {
  a: number;
  b: number;
  cls: CellClass;
  period: number | null;
  multiplier: number | null;
  lyapunov: number | null;
  certN: number | null;
  certLambda: number | null;
}

export interface Raster {
  meta: Record<string, string>;
  rows: RasterRow[];
  aValues: number[];
  bValues: number[];
}

function optional(field: string): number | null {
  if (field === "") return null;
  const v = Number(field);
  if (!Number.isFinite(v)) throw new SchemaError(`non-numeric field: ${field}`);
  return v;
}

export function parseRaster(text: string): Raster {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const meta: Record<string, string> = {};
  let i = 0;
  for (; i < lines.length && lines[i].startsWith("#"); i++) {
    const m = lines[i].match(/^#\s*([^:]+):\s*(.*)$/);
    if (m) meta[m[1].trim()] = m[2];
  }
  if (i >= lines.length || lines[i] !== RASTER_HEADER) {
    throw new SchemaError(
      `raster header mismatch: expected "${RASTER_HEADER}", got "${lines[i] ?? ""}"`);
  }
  i += 1;
  const rows: RasterRow[] = [];
  for (; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 8) {
      throw new SchemaError(`raster row has ${parts.length} fields: ${lines[i]}`);
    }
    const cls = parts[2];
    if (!CELL_CLASSES.has(cls)) {
      throw new SchemaError(`unknown cell class: ${cls}`);
    }
    rows.push({
      a: Number(parts[0]),
      b: Number(parts[1]),
      cls: cls as CellClass,
      period: optional(parts[3]),
      multiplier: optional(parts[4]),
      lyapunov: optional(parts[5]),
      certN: optional(parts[6]),
      certLambda: optional(parts[7]),
    });
  }
  if (rows.length === 0) throw new SchemaError("raster has no data rows");
  const aValues = [...new Set(rows.map((r) => r.a))].sort((x, y) => x - y);
  const bValues = [...new Set(rows.map((r) => r.b))].sort((x, y) => x - y);
  return { meta, rows, aValues, bValues };
}

/** Hexadecimal float of Python's float.hex(), e.g. "0x1.a3p-3". */
export function parseHexFloat(s: string): number {
  const m = s.trim().match(/^([+-]?)0x([0-9a-f]+)(?:\.([0-9a-f]*))?p([+-]?\d+)$/i);
  if (!m) throw new SchemaError(`not a hex float: ${s}`);
  const [, sign, intPart, fracPart = "", expPart] = m;
  let value = parseInt(intPart, 16);
  for (let i = 0; i < fracPart.length; i++) {
    value += parseInt(fracPart[i], 16) * Math.pow(16, -(i + 1));
  }
  value *= Math.pow(2, Number(expPart));
  return sign === "-" ? -value : value;
}

export interface SurvivorInterval {
  id: number;
  lo: number;
  hi: number;
  measure: number;
  n0: number | null;
}

export interface InductionReport {
  meta: { config: Record<string, unknown>; configHash: string };
  omega0Measure: number;
  omega0Intervals: Array<[number, number]>;
  survivors: SurvivorInterval[];
  survivorRatio: number;
  excludedMeasure: number;
  nHat: number;
}

export function parseReport(text: string): InductionReport {
  let doc: any;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new SchemaError(`report is not JSON: ${e}`);
  }
  if (doc?.meta?.schema !== "induction-report-v1") {
    throw new SchemaError(
      `unexpected report schema: ${doc?.meta?.schema ?? "(missing)"}`);
  }
  const required = ["omega0", "survivors", "totals", "stopping"];
  for (const key of required) {
    if (!(key in doc)) throw new SchemaError(`report missing key: ${key}`);
  }
  const survivors: SurvivorInterval[] = doc.survivors.map((s: any) => ({
    id: s.id,
    lo: parseHexFloat(s.lo_hex),
    hi: parseHexFloat(s.hi_hex),
    measure: s.measure,
    n0: s.n0 ?? null,
  }));
  return {
    meta: {
      config: doc.meta.config ?? {},
      configHash: doc.meta.config_hash ?? "",
    },
    omega0Measure: doc.omega0.measure,
    omega0Intervals: doc.omega0.intervals.map(
      (iv: [string, string]) => [parseHexFloat(iv[0]), parseHexFloat(iv[1])]),
    survivors,
    survivorRatio: doc.totals.survivor_ratio,
    excludedMeasure: doc.totals.excluded_measure,
    nHat: doc.stopping.n_hat,
  };
}
