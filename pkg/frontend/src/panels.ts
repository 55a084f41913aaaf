/**
 * Turns validated tables into an abstract panel/series description.
 * All layout-free: the drawing code consumes the structures built here.
 */

import { CsvTable, numberColumn, stringColumn } from "./csv";
import { ScaleKind } from "./scale";
import { EXTRA_COLORS, SCHEME_COLORS, SCHEME_ORDER } from "./schema";

export interface Series {
  readonly label: string;
  readonly color: string;
  readonly dash?: string;
  readonly points: ReadonlyArray<readonly [number, number]>;
}

export interface VMarker {
  readonly x: number;
  readonly label: string;
}

export interface HLine {
  readonly y: number;
  readonly label: string;
}

export interface Panel {
  readonly title: string;
  readonly xLabel: string;
  readonly yLabel: string;
  readonly xKind: ScaleKind;
  readonly yKind: ScaleKind;
  readonly series: readonly Series[];
  /** Reference power-law slope drawn on log-log panels. */
  readonly guideSlope?: number;
  readonly markers?: readonly VMarker[];
  readonly hlines?: readonly HLine[];
  /** Fill the area under each curve (stability regions). */
  readonly shade?: boolean;
}

export interface PanelSet {
  readonly panels: readonly Panel[];
  readonly notes: readonly string[];
}

/** Shortest round-trip decimal, e.g. "0.10000000000000001" -> "0.1". */
export function fmtNum(v: number): string {
  return String(v);
}

function schemeColor(label: string, fallbackIdx: number): string {
  return (
    SCHEME_COLORS[label] ?? EXTRA_COLORS[fallbackIdx % EXTRA_COLORS.length]!
  );
}

function schemeSort(labels: Iterable<string>): string[] {
  const known: string[] = [];
  const rest: string[] = [];
  const seen = new Set<string>();
  for (const l of labels) {
    if (!seen.has(l)) {
      seen.add(l);
      (SCHEME_ORDER.includes(l as (typeof SCHEME_ORDER)[number]) ? known : rest).push(l);
    }
  }
  known.sort(
    (a, b) =>
      SCHEME_ORDER.indexOf(a as (typeof SCHEME_ORDER)[number]) -
      SCHEME_ORDER.indexOf(b as (typeof SCHEME_ORDER)[number]),
  );
  rest.sort();
  return [...known, ...rest];
}

interface SeriesDraft {
  label: string;
  color: string;
  dash?: string;
  points: Array<[number, number]>;
}

/**
 * A log-y series whose largest value sits below this is indistinguishable
 * from zero in double arithmetic (identically-zero biases come out of the
 * producer around 1e-90); plotting it would stretch the axis across
 * dozens of meaningless decades.
 */
const MACHINE_FLOOR = 1e-16;

/** Drop points a log axis cannot show, then drop numerically-zero series. */
function finishSeries(
  drafts: SeriesDraft[],
  xKind: ScaleKind,
  yKind: ScaleKind,
  panelName: string,
  notes: string[],
): Series[] {
  const cleaned = drafts.map((d) => ({
    ...d,
    points: d.points.filter(
      ([x, y]) =>
        Number.isFinite(x) &&
        Number.isFinite(y) &&
        (xKind !== "log" || x > 0) &&
        (yKind !== "log" || y > 0),
    ),
  }));
  const out: Series[] = [];
  for (const d of cleaned) {
    if (d.points.length === 0) {
      continue;
    }
    if (
      yKind === "log" &&
      Math.max(...d.points.map(([, y]) => y)) < MACHINE_FLOOR
    ) {
      notes.push(`${panelName}: series ${d.label} is numerically zero, skipped`);
      continue;
    }
    out.push(d);
  }
  return out;
}

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function buildAccuracy(table: CsvTable, notes: string[]): Panel[] {
  const eta = numberColumn(table, "eta");
  const moment = stringColumn(table, "moment");
  const scheme = stringColumn(table, "scheme");
  const h = numberColumn(table, "h");
  const err = numberColumn(table, "abs_err");

  const panels: Panel[] = [];
  for (const e of sortedUnique(eta)) {
    for (const m of sortedUnique(moment.map(Number))) {
      const idx = eta
        .map((_, i) => i)
        .filter((i) => eta[i] === e && Number(moment[i]) === m);
      if (idx.length === 0) {
        continue;
      }
      const title = `eta=${fmtNum(e)}, moment ${m}`;
      const drafts: SeriesDraft[] = schemeSort(idx.map((i) => scheme[i]!)).map(
        (s, k) => ({
          label: s,
          color: schemeColor(s, k),
          points: idx
            .filter((i) => scheme[i] === s)
            .map((i) => [h[i]!, err[i]!] as [number, number])
            .sort((a, b) => a[0] - b[0]),
        }),
      );
      const series = finishSeries(drafts, "log", "log", title, notes);
      if (series.length > 0) {
        panels.push({
          title,
          xLabel: "step size h",
          yLabel: "|asymptotic bias|",
          xKind: "log",
          yKind: "log",
          series,
          guideSlope: 1,
        });
      }
    }
  }
  return panels;
}

function buildEvolution(
  table: CsvTable,
  errColumn: "abs_err_mu1" | "rel_err_mu2",
  yLabel: string,
  notes: string[],
): Panel[] {
  const eta = numberColumn(table, "eta");
  const h = numberColumn(table, "h");
  const scheme = stringColumn(table, "scheme");
  const t = numberColumn(table, "t");
  const err = numberColumn(table, errColumn);

  const panels: Panel[] = [];
  for (const e of sortedUnique(eta)) {
    for (const step of sortedUnique(h)) {
      const idx = eta
        .map((_, i) => i)
        .filter((i) => eta[i] === e && h[i] === step);
      if (idx.length === 0) {
        continue;
      }
      const title = `eta=${fmtNum(e)}, h=${fmtNum(step)}`;
      const drafts: SeriesDraft[] = schemeSort(idx.map((i) => scheme[i]!)).map(
        (s, k) => ({
          label: s,
          color: schemeColor(s, k),
          points: idx
            .filter((i) => scheme[i] === s)
            .map((i) => [t[i]!, err[i]!] as [number, number])
            .sort((a, b) => a[0] - b[0]),
        }),
      );
      const series = finishSeries(drafts, "linear", "log", title, notes);
      if (series.length > 0) {
        panels.push({
          title,
          xLabel: "t",
          yLabel,
          xKind: "linear",
          yKind: "log",
          series,
        });
      }
    }
  }
  return panels;
}

function buildStability(
  boundary: CsvTable | undefined,
  crossover: CsvTable | undefined,
  notes: string[],
): Panel[] {
  if (boundary === undefined) {
    return [];
  }
  const eta = numberColumn(boundary, "eta");
  const hMax = numberColumn(boundary, "h_max");
  const scheme = stringColumn(boundary, "scheme");
  const moment = stringColumn(boundary, "moment");

  let crossMoment: number[] = [];
  let crossEta: number[] = [];
  let crossLabel: string[] = [];
  if (crossover !== undefined) {
    crossMoment = numberColumn(crossover, "moment");
    crossEta = numberColumn(crossover, "eta_cross");
    const a = stringColumn(crossover, "scheme_a");
    const b = stringColumn(crossover, "scheme_b");
    crossLabel = a.map((s, i) => `${s}/${b[i]}`);
  }

  const panels: Panel[] = [];
  for (const m of sortedUnique(moment.map(Number))) {
    const idx = eta.map((_, i) => i).filter((i) => Number(moment[i]) === m);
    if (idx.length === 0) {
      continue;
    }
    const title = `moment ${m} stability boundary`;
    const drafts: SeriesDraft[] = schemeSort(idx.map((i) => scheme[i]!)).map(
      (s, k) => ({
        label: s,
        color: schemeColor(s, k),
        points: idx
          .filter((i) => scheme[i] === s)
          .map((i) => [eta[i]!, hMax[i]!] as [number, number])
          .sort((a, b) => a[0] - b[0]),
      }),
    );
    const series = finishSeries(drafts, "linear", "linear", title, notes);
    if (series.length === 0) {
      continue;
    }
    const markers: VMarker[] = crossEta
      .map((x, i) => ({ x, label: crossLabel[i]!, m: crossMoment[i]! }))
      .filter((c) => c.m === m)
      .map((c) => ({ x: c.x, label: c.label }));
    panels.push({
      title,
      xLabel: "eta",
      yLabel: "max stable h",
      xKind: "linear",
      yKind: "linear",
      series,
      markers,
      shade: true,
    });
  }
  return panels;
}

function buildPorousMean(
  tables: ReadonlyArray<readonly [string, CsvTable]>,
  notes: string[],
): Panel[] {
  const panels: Panel[] = [];
  for (const [name, table] of tables) {
    const variant = name.includes("small") ? "small" : "large";
    const h = numberColumn(table, "h");
    const err = numberColumn(table, "abs_err_mean");
    const scheme = stringColumn(table, "scheme");
    const title = `${variant} noise parameters`;
    const drafts: SeriesDraft[] = schemeSort(scheme).map((s, k) => ({
      label: s,
      color: schemeColor(s, k),
      points: scheme
        .map((_, i) => i)
        .filter((i) => scheme[i] === s)
        .map((i) => [h[i]!, err[i]!] as [number, number])
        .sort((a, b) => a[0] - b[0]),
    }));
    const series = finishSeries(drafts, "log", "log", title, notes);
    if (series.length > 0) {
      panels.push({
        title,
        xLabel: "step size h",
        yLabel: "|equilibrium mean error|",
        xKind: "log",
        yKind: "log",
        series,
        guideSlope: 1,
      });
    }
  }
  return panels;
}

function buildPaths(table: CsvTable, notes: string[]): Panel[] {
  const params = stringColumn(table, "params");
  const scheme = stringColumn(table, "scheme");
  const h = numberColumn(table, "h");
  const t = numberColumn(table, "t");
  const mu1 = numberColumn(table, "mu1");

  const panels: Panel[] = [];
  const variants = [...new Set(params)];
  for (const variant of variants) {
    const idx = params.map((_, i) => i).filter((i) => params[i] === variant);
    const title = `${variant} noise parameters`;
    const hValues = sortedUnique(idx.map((i) => h[i]!));
    const coarsest = hValues[hValues.length - 1]!;
    const drafts: SeriesDraft[] = [];
    let k = 0;
    for (const s of schemeSort(idx.map((i) => scheme[i]!))) {
      for (const step of hValues) {
        const pts = idx
          .filter((i) => scheme[i] === s && h[i] === step)
          .map((i) => [t[i]!, mu1[i]!] as [number, number])
          .sort((a, b) => a[0] - b[0]);
        if (pts.length === 0) {
          continue;
        }
        drafts.push({
          label: `${s} h=${fmtNum(step)}`,
          color: schemeColor(s, k),
          dash: hValues.length > 1 && step === coarsest ? "5 3" : undefined,
          points: pts,
        });
      }
      k += 1;
    }
    const series = finishSeries(drafts, "linear", "linear", title, notes);
    if (series.length === 0) {
      continue;
    }
    const hlines: HLine[] = [];
    const ref = table.meta[`reference_mean.${variant}`];
    if (ref !== undefined && Number.isFinite(Number(ref))) {
      hlines.push({ y: Number(ref), label: "reference mean" });
    }
    panels.push({
      title,
      xLabel: "t",
      yLabel: "sample mean",
      xKind: "linear",
      yKind: "linear",
      series,
      hlines,
    });
  }
  return panels;
}

export function buildPanels(
  figureId: string,
  tables: ReadonlyMap<string, CsvTable>,
): PanelSet {
  const notes: string[] = [];
  let panels: Panel[];
  switch (figureId) {
    case "accuracy": {
      const t = tables.get("accuracy.csv");
      panels = t ? buildAccuracy(t, notes) : [];
      break;
    }
    case "1stMom": {
      const t = tables.get("evolution_error.csv");
      panels = t
        ? buildEvolution(t, "abs_err_mu1", "|mean error|", notes)
        : [];
      break;
    }
    case "2ndMom": {
      const t = tables.get("evolution_error.csv");
      panels = t
        ? buildEvolution(t, "rel_err_mu2", "relative second-moment error", notes)
        : [];
      break;
    }
    case "stab":
      panels = buildStability(
        tables.get("stability_boundary.csv"),
        tables.get("crossover.csv"),
        notes,
      );
      break;
    case "1d_porousM_mean": {
      const present: Array<[string, CsvTable]> = [];
      for (const name of ["porous_mean_error_small.csv", "porous_mean_error_large.csv"]) {
        const t = tables.get(name);
        if (t) {
          present.push([name, t]);
        }
      }
      panels = buildPorousMean(present, notes);
      break;
    }
    case "fine_vs_coarse": {
      const t = tables.get("porous_paths.csv");
      panels = t ? buildPaths(t, notes) : [];
      break;
    }
    default:
      throw new Error(`unknown figure id: ${figureId}`);
  }
  return { panels, notes };
}
