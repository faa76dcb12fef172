/** Minimal deterministic SVG string builder: fixed attribute order, numbers
 * via the default shortest round-trip formatting. */

export function num(x: number): string {
  return Number.isInteger(x) ? x.toString() : x.toString();
}

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  cls?: string;
}

export function rect(r: Rect): string {
  const cls = r.cls ? ` class="${r.cls}"` : "";
  return `<rect x="${num(r.x)}" y="${num(r.y)}" width="${num(r.w)}" ` +
    `height="${num(r.h)}" fill="${r.fill}"${cls}/>`;
}

export function text(x: number, y: number, content: string,
                     size = 12, fill = "#222"): string {
  const esc = content.replace(/&/g, "&amp;").replace(/</g, "&lt;");
  return `<text x="${num(x)}" y="${num(y)}" font-family="monospace" ` +
    `font-size="${size}" fill="${fill}">${esc}</text>`;
}

export function document(width: number, height: number,
                         body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}">`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

/** Piecewise-linear color ramp from cold to hot, hex output. */
export function ramp(t: number): string {
  const clamp = Math.max(0, Math.min(1, t));
  const stops: Array<[number, [number, number, number]]> = [
    [0.0, [33, 53, 120]],
    [0.5, [72, 160, 170]],
    [1.0, [245, 213, 86]],
  ];
  let lo = stops[0];
  let hi = stops[stops.length - 1];
  for (let i = 0; i + 1 < stops.length; i++) {
    if (clamp >= stops[i][0] && clamp <= stops[i + 1][0]) {
      lo = stops[i];
      hi = stops[i + 1];
      break;
    }
  }
  const u = hi[0] === lo[0] ? 0 : (clamp - lo[0]) / (hi[0] - lo[0]);
  const mix = lo[1].map((c, k) => Math.round(c + (hi[1][k] - c) * u));
  return "#" + mix.map((c) => c.toString(16).padStart(2, "0")).join("");
}
