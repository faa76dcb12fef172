/**
 * Figure generators. Inputs are the parsed CLI outputs; outputs are SVG
 * strings, deterministic down to the byte for fixed inputs. The legend of
 * every figure carries the config hash embedded in the input file, so a
 * figure can always be traced back to the run that produced it.
 */

import { InductionReport, Raster, RasterRow, SchemaError } from "./schema.js";
import { document, ramp, rect, text } from "./svg.js";

export const PLOT_W = 960;
export const PLOT_H = 640;
const MARGIN = { left: 60, right: 20, top: 20, bottom: 60 };

const TONGUE_PALETTE = [
  "#c23b22", "#d9793a", "#b5a642", "#7a9f35", "#3e8c5f", "#2e7f7a",
  "#3b6ea5", "#5c4f9c", "#8a4f9c", "#a8447a",
];

export const CLASS_COLORS: Record<string, string> = {
  neutral: "#f2d249",
  expanding_candidate: "#9cc6de",
  undecided: "#bdbdbd",
};

export function classColor(row: RasterRow): string {
  if (row.cls === "tongue") {
    const p = row.period ?? 1;
    return TONGUE_PALETTE[(p - 1) % TONGUE_PALETTE.length];
  }
  if (row.cls === "certified_expanding") {
    // shade by the certified expansion factor; lambda in (1, 2]
    const lam = row.certLambda ?? 1.0;
    return ramp(Math.max(0, Math.min(1, (lam - 1.0))));
  }
  return CLASS_COLORS[row.cls];
}

function gridGeometry(raster: Raster) {
  const { aValues, bValues } = raster;
  const innerW = PLOT_W - MARGIN.left - MARGIN.right;
  const innerH = PLOT_H - MARGIN.top - MARGIN.bottom;
  const cw = innerW / aValues.length;
  const ch = innerH / bValues.length;
  const ax = new Map(aValues.map((v, i) => [v, MARGIN.left + i * cw]));
  // b grows upward
  const by = new Map(bValues.map((v, j) => [v, MARGIN.top + (bValues.length - 1 - j) * ch]));
  return { cw, ch, ax, by };
}

function legend(lines: string[]): string[] {
  return lines.map((l, i) => text(MARGIN.left, PLOT_H - 36 + 14 * i, l, 11));
}

export function plotPlane(raster: Raster): string {
  const { cw, ch, ax, by } = gridGeometry(raster);
  const body: string[] = [rect({ x: 0, y: 0, w: PLOT_W, h: PLOT_H, fill: "#ffffff" })];
  for (const row of raster.rows) {
    body.push(rect({
      x: ax.get(row.a)!, y: by.get(row.b)!, w: cw, h: ch,
      fill: classColor(row), cls: `cell ${row.cls}`,
    }));
  }
  const hash = raster.meta["config_hash"] ?? "";
  body.push(...legend([
    `parameter plane: tongues by period, certified expansion by lambda`,
    `a in [${raster.aValues[0]}, ${raster.aValues[raster.aValues.length - 1]}], ` +
    `b in [${raster.bValues[0]}, ${raster.bValues[raster.bValues.length - 1]}]`,
    `config ${hash}`,
  ]));
  return document(PLOT_W, PLOT_H, body);
}

export function plotLyapunov(raster: Raster): string {
  const { cw, ch, ax, by } = gridGeometry(raster);
  const vals = raster.rows.map((r) => r.lyapunov).filter((v): v is number => v !== null);
  if (vals.length === 0) {
    throw new SchemaError("raster has no Lyapunov data to plot");
  }
  const lo = Math.min(...vals);
  const hi = Math.max(...vals);
  const span = hi - lo || 1;
  const body: string[] = [rect({ x: 0, y: 0, w: PLOT_W, h: PLOT_H, fill: "#ffffff" })];
  for (const row of raster.rows) {
    const fill = row.lyapunov === null ? "#e0e0e0" : ramp((row.lyapunov - lo) / span);
    body.push(rect({
      x: ax.get(row.a)!, y: by.get(row.b)!, w: cw, h: ch, fill, cls: "cell",
    }));
  }
  const hash = raster.meta["config_hash"] ?? "";
  body.push(...legend([
    `critical-orbit Lyapunov estimate, range [${lo}, ${hi}]`,
    `config ${hash}`,
  ]));
  return document(PLOT_W, PLOT_H, body);
}

export const STRIP_W = 1000;
export const STRIP_H = 120;

export const SURVIVOR_FILL = "#2e7d32";
export const EXCLUDED_FILL = "#c62828";

export function plotSurvivors(report: InductionReport): string {
  const lo = Math.min(...report.omega0Intervals.map((iv) => iv[0]));
  const hi = Math.max(...report.omega0Intervals.map((iv) => iv[1]));
  const span = hi - lo;
  if (!(span > 0)) throw new SchemaError("empty parameter domain in report");
  const xOf = (v: number) => ((v - lo) / span) * STRIP_W;
  const body: string[] = [
    rect({ x: 0, y: 0, w: STRIP_W, h: STRIP_H, fill: "#ffffff" }),
  ];
  // domain painted as excluded, survivors painted over it
  for (const [ilo, ihi] of report.omega0Intervals) {
    body.push(rect({
      x: xOf(ilo), y: 20, w: xOf(ihi) - xOf(ilo), h: 50,
      fill: EXCLUDED_FILL, cls: "domain",
    }));
  }
  for (const s of report.survivors) {
    body.push(rect({
      x: xOf(s.lo), y: 20, w: xOf(s.hi) - xOf(s.lo), h: 50,
      fill: SURVIVOR_FILL, cls: "survivor",
    }));
  }
  body.push(text(10, 90, `survivor ratio ${report.survivorRatio}`, 12));
  body.push(text(10, 106, `horizon ${report.nHat}  config ${report.meta.configHash}`, 11));
  return document(STRIP_W, STRIP_H, body);
}

/** Colored-length accounting of a survivor strip, in pixels. */
export function stripLengths(report: InductionReport): {
  survivorPx: number; domainPx: number;
} {
  const lo = Math.min(...report.omega0Intervals.map((iv) => iv[0]));
  const hi = Math.max(...report.omega0Intervals.map((iv) => iv[1]));
  const span = hi - lo;
  const scale = STRIP_W / span;
  const survivorPx = report.survivors.reduce((t, s) => t + (s.hi - s.lo) * scale, 0);
  const domainPx = report.omega0Intervals.reduce((t, iv) => t + (iv[1] - iv[0]) * scale, 0);
  return { survivorPx, domainPx };
}
