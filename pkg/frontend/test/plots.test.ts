import { readFileSync } from "fs";
import { describe, expect, it } from "vitest";

import { parseRaster, parseReport } from "../src/schema.js";
import { classColor, plotLyapunov, plotPlane, plotSurvivors, stripLengths,
         STRIP_W } from "../src/plots.js";
import { render } from "../src/cli.js";

const rasterText = readFileSync(new URL("./fixtures/raster.csv", import.meta.url), "utf8");
const reportText = readFileSync(new URL("./fixtures/report.json", import.meta.url), "utf8");

describe("survivor strip", () => {
  it("colored length ratio equals the reported survivor ratio to 1 pixel", () => {
    const rep = parseReport(reportText);
    const { survivorPx, domainPx } = stripLengths(rep);
    const drawnRatio = survivorPx / domainPx;
    // both in pixels of the strip: agreement well inside one pixel
    expect(Math.abs(survivorPx - rep.survivorRatio * domainPx)).toBeLessThan(1.0);
    expect(Math.abs(drawnRatio - rep.survivorRatio)).toBeLessThan(1.0 / STRIP_W);
  });

  it("renders survivor rects over the domain and embeds the config hash", () => {
    const rep = parseReport(reportText);
    const svg = plotSurvivors(rep);
    expect((svg.match(/class="survivor"/g) ?? []).length).toBe(rep.survivors.length);
    expect(svg).toContain(rep.meta.configHash);
    expect(svg).toContain("survivor ratio");
  });

  it("is deterministic for fixed input", () => {
    const rep = parseReport(reportText);
    expect(plotSurvivors(rep)).toBe(plotSurvivors(parseReport(reportText)));
  });
});

describe("parameter plane", () => {
  it("renders the expanding band below b = 1/2 in a single class color", () => {
    const raster = parseRaster(rasterText);
    const band = raster.rows.filter((r) => r.b < 0.5);
    expect(band.length).toBeGreaterThan(0);
    expect(band.every((r) => r.cls === "certified_expanding")).toBe(true);
    const svg = plotPlane(raster);
    // every band cell is drawn with the certified_expanding class marker
    const cells = (svg.match(/class="cell certified_expanding"/g) ?? []).length;
    expect(cells).toBeGreaterThanOrEqual(band.length);
  });

  it("colors tongues by period and embeds the config hash", () => {
    const raster = parseRaster(rasterText);
    const tongues = raster.rows.filter((r) => r.cls === "tongue");
    for (const t of tongues) {
      expect(classColor(t)).toMatch(/^#[0-9a-f]{6}$/);
    }
    const svg = plotPlane(raster);
    expect(svg).toContain(raster.meta["config_hash"]);
  });

  it("is deterministic for fixed input", () => {
    expect(plotPlane(parseRaster(rasterText)))
      .toBe(plotPlane(parseRaster(rasterText)));
  });
});

describe("lyapunov heatmap", () => {
  it("renders one cell per grid node", () => {
    const raster = parseRaster(rasterText);
    const svg = plotLyapunov(raster);
    const cells = (svg.match(/class="cell"/g) ?? []).length;
    expect(cells).toBe(raster.rows.length);
  });
});

describe("cli rendering", () => {
  it("dispatches kinds and produces svg documents", () => {
    for (const kind of ["plane", "lyapunov"]) {
      const svg = render(kind, rasterText);
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    }
    const svg = render("survivors", reportText);
    expect(svg.startsWith("<svg ")).toBe(true);
  });

  it("throws on a kind/input mismatch", () => {
    expect(() => render("survivors", rasterText)).toThrow();
    expect(() => render("plane", reportText)).toThrow();
  });
});
