/**
 * Figure assembly: reads a CSV bundle directory, validates every present
 * file against the frozen schema, lays the panels out on a grid and
 * returns the finished SVG as a string. Nothing is written here, so a
 * validation failure can never leave a partial image behind.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { CsvTable, parseCsv, validateTable } from "./csv";
import { buildPanels, Panel } from "./panels";
import { formatTick, makeScale, Scale } from "./scale";
import { FIGURES, TABLES } from "./schema";
import {
  circleEl,
  lineEl,
  polygonEl,
  polylineEl,
  rectEl,
  svgDocument,
  textEl,
} from "./svg";

export class UsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UsageError";
  }
}

export interface RenderResult {
  readonly svg: string;
  readonly panelCount: number;
  readonly notes: readonly string[];
}

const CELL_W = 440;
const CELL_H = 330;
const TITLE_BAND = 34;
const MARGIN = { left: 62, right: 14, top: 30, bottom: 44 };

export function renderFigure(figureId: string, csvDir: string): RenderResult {
  const spec = FIGURES[figureId];
  if (spec === undefined) {
    const known = Object.keys(FIGURES).join(", ");
    throw new UsageError(`unknown figure id ${JSON.stringify(figureId)} (known: ${known})`);
  }

  const notes: string[] = [];
  const tables = new Map<string, CsvTable>();
  for (const file of spec.files) {
    const p = path.join(csvDir, file.name);
    if (!fs.existsSync(p)) {
      notes.push(`${file.name}: not present, panels from it are skipped`);
      continue;
    }
    const table = parseCsv(fs.readFileSync(p, "utf8"), p);
    validateTable(table, TABLES[file.table]!);
    tables.set(file.name, table);
  }

  const { panels, notes: buildNotes } = buildPanels(figureId, tables);
  notes.push(...buildNotes);

  const heading = `${figureId}: ${spec.title}`;
  if (panels.length === 0) {
    const w = CELL_W;
    const h = 120;
    const body = [
      textEl(w / 2, 22, heading, { anchor: "middle", size: 14, bold: true }),
      textEl(w / 2, 70, "no data available in this bundle", {
        anchor: "middle",
        size: 12,
        fill: "#666666",
      }),
    ].join("\n");
    return { svg: svgDocument(w, h, body), panelCount: 0, notes };
  }

  const cols = panels.length > 1 ? 2 : 1;
  const rows = Math.ceil(panels.length / cols);
  const width = cols * CELL_W;
  const height = TITLE_BAND + rows * CELL_H;

  const parts: string[] = [
    textEl(width / 2, 22, heading, { anchor: "middle", size: 14, bold: true }),
  ];
  panels.forEach((panel, i) => {
    const cx = (i % cols) * CELL_W;
    const cy = TITLE_BAND + Math.floor(i / cols) * CELL_H;
    parts.push(drawPanel(panel, cx, cy));
  });

  return {
    svg: svgDocument(width, height, parts.join("\n")),
    panelCount: panels.length,
    notes,
  };
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  return [lo, hi];
}

function drawPanel(panel: Panel, cx: number, cy: number): string {
  const px0 = cx + MARGIN.left;
  const px1 = cx + CELL_W - MARGIN.right;
  const py0 = cy + MARGIN.top;
  const py1 = cy + CELL_H - MARGIN.bottom;

  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of panel.series) {
    for (const [x, y] of s.points) {
      xs.push(x);
      ys.push(y);
    }
  }
  for (const m of panel.markers ?? []) {
    xs.push(m.x);
  }
  for (const l of panel.hlines ?? []) {
    ys.push(l.y);
  }
  let [xLo, xHi] = extent(xs);
  let [yLo, yHi] = extent(ys);
  if (panel.shade && panel.yKind === "linear") {
    yLo = Math.min(yLo, 0);
  }
  if (panel.xKind === "linear" && xHi > xLo) {
    const pad = 0.04 * (xHi - xLo);
    xLo -= pad;
    xHi += pad;
  }
  if (panel.yKind === "linear" && yHi > yLo) {
    const pad = 0.06 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;
  }

  const sx = makeScale(panel.xKind, [xLo, xHi], [px0, px1]);
  const sy = makeScale(panel.yKind, [yLo, yHi], [py1, py0]);

  const parts: string[] = [];

  // frame, grid, ticks
  parts.push(
    rectEl(px0, py0, px1 - px0, py1 - py0, {
      fill: "none",
      stroke: "#444444",
      "stroke-width": "1",
    }),
  );
  for (const t of sx.ticks()) {
    const x = sx.map(t);
    parts.push(lineEl(x, py0, x, py1, "#dddddd", 0.6));
    parts.push(lineEl(x, py1, x, py1 + 4, "#444444", 1));
    parts.push(
      textEl(x, py1 + 16, formatTick(t, panel.xKind), { anchor: "middle", size: 10 }),
    );
  }
  for (const t of sy.ticks()) {
    const y = sy.map(t);
    parts.push(lineEl(px0, y, px1, y, "#dddddd", 0.6));
    parts.push(lineEl(px0 - 4, y, px0, y, "#444444", 1));
    parts.push(
      textEl(px0 - 6, y + 3, formatTick(t, panel.yKind), { anchor: "end", size: 10 }),
    );
  }

  // shaded stable regions, under the curves
  if (panel.shade) {
    const base = sy.map(Math.max(0, sy.domain[0]));
    for (const s of panel.series) {
      if (s.points.length < 2) {
        continue;
      }
      const poly = s.points.map(
        ([x, y]) => [sx.map(x), sy.map(y)] as [number, number],
      );
      const first = s.points[0]!;
      const last = s.points[s.points.length - 1]!;
      poly.push([sx.map(last[0]), base]);
      poly.push([sx.map(first[0]), base]);
      parts.push(polygonEl(poly, s.color, 0.08));
    }
  }

  // order-slope guide line for log-log panels
  if (panel.guideSlope !== undefined && panel.xKind === "log" && panel.yKind === "log") {
    parts.push(...drawGuide(panel.guideSlope, sx, sy));
  }

  // reference levels
  for (const l of panel.hlines ?? []) {
    const y = sy.map(l.y);
    parts.push(lineEl(px0, y, px1, y, "#888888", 1, "2 3"));
    parts.push(textEl(px1 - 4, y - 4, l.label, { anchor: "end", size: 9, fill: "#666666" }));
  }

  // crossover markers
  (panel.markers ?? []).forEach((m, i) => {
    const x = sx.map(m.x);
    parts.push(lineEl(x, py0, x, py1, "#555555", 1, "4 3"));
    parts.push(
      textEl(x + 3, py0 + 12 + 10 * i, m.label, { size: 9, fill: "#555555" }),
    );
  });

  // curves
  for (const s of panel.series) {
    const pts = s.points.map(([x, y]) => [sx.map(x), sy.map(y)] as [number, number]);
    if (pts.length === 1) {
      parts.push(circleEl(pts[0]![0], pts[0]![1], 2.5, s.color));
      continue;
    }
    parts.push(polylineEl(pts, s.color, 1.6, s.dash));
    if (pts.length <= 30) {
      for (const [x, y] of pts) {
        parts.push(circleEl(x, y, 2, s.color));
      }
    }
  }

  // legend, top-right corner of the plot area
  panel.series.forEach((s, i) => {
    const lx = px1 - 108;
    const ly = py0 + 12 + 13 * i;
    parts.push(lineEl(lx, ly - 3, lx + 18, ly - 3, s.color, 2, s.dash));
    parts.push(textEl(lx + 23, ly, s.label, { size: 10 }));
  });

  // labels and title
  parts.push(
    textEl(cx + CELL_W / 2, cy + 18, panel.title, { anchor: "middle", size: 12, bold: true }),
  );
  parts.push(
    textEl((px0 + px1) / 2, py1 + 32, panel.xLabel, { anchor: "middle", size: 11 }),
  );
  parts.push(
    textEl(cx + 14, (py0 + py1) / 2, panel.yLabel, {
      anchor: "middle",
      size: 11,
      rotate: -90,
    }),
  );

  return parts.join("\n");
}

/** Dashed y = c * x^slope reference through the middle of the data cloud. */
function drawGuide(slope: number, sx: Scale, sy: Scale): string[] {
  const [xLo, xHi] = sx.domain;
  const [yLo, yHi] = sy.domain;
  // anchor so the guide passes through the domain center
  const cx = (Math.log10(xLo) + Math.log10(xHi)) / 2;
  const cyMid = (Math.log10(yLo) + Math.log10(yHi)) / 2;
  const c = cyMid - slope * cx;
  const yAt = (lx: number): number => c + slope * lx;
  const lxAt = (ly: number): number => (ly - c) / slope;

  let lx0 = Math.log10(xLo);
  let lx1 = Math.log10(xHi);
  const lyLo = Math.log10(yLo);
  const lyHi = Math.log10(yHi);
  if (yAt(lx0) < lyLo) {
    lx0 = lxAt(lyLo);
  }
  if (yAt(lx1) > lyHi) {
    lx1 = lxAt(lyHi);
  }
  if (!(lx0 < lx1)) {
    return [];
  }
  const p0: [number, number] = [
    sx.map(Math.pow(10, lx0)),
    sy.map(Math.pow(10, yAt(lx0))),
  ];
  const p1: [number, number] = [
    sx.map(Math.pow(10, lx1)),
    sy.map(Math.pow(10, yAt(lx1))),
  ];
  return [
    polylineEl([p0, p1], "#999999", 1.2, "6 4"),
    textEl(p1[0] - 4, p1[1] + 12, `slope ${slope}`, {
      anchor: "end",
      size: 9,
      fill: "#777777",
    }),
  ];
}
