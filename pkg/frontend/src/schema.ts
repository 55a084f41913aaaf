/**
 * Frozen CSV contract.
 *
 * This is the renderer's own copy of the producer's schema manifest; the
 * two are kept in lockstep on purpose so that header drift on either side
 * fails loudly instead of silently mis-binding columns.
 */

export interface TableSchema {
  readonly columns: readonly string[];
  /** Columns that must parse as finite-or-infinite numbers. */
  readonly numeric: readonly string[];
}

export const TABLES: Record<string, TableSchema> = {
  asymptotic_accuracy: {
    columns: ["eta", "moment", "scheme", "h", "value", "exact", "abs_err", "rel_err"],
    numeric: ["eta", "moment", "h", "value", "exact", "abs_err", "rel_err"],
  },
  evolution_error: {
    columns: ["eta", "h", "scheme", "t", "abs_err_mu1", "se1", "rel_err_mu2", "rel_se2"],
    numeric: ["eta", "h", "t", "abs_err_mu1", "se1", "rel_err_mu2", "rel_se2"],
  },
  stability_boundary: {
    columns: ["eta", "h_max", "scheme", "model", "moment"],
    numeric: ["eta", "h_max", "moment"],
  },
  crossover: {
    columns: ["moment", "scheme_a", "scheme_b", "eta_cross", "bracket_lo", "bracket_hi"],
    numeric: ["moment", "eta_cross", "bracket_lo", "bracket_hi"],
  },
  porous_mean_error: {
    columns: ["h", "abs_err_mean", "se", "scheme"],
    numeric: ["h", "abs_err_mean", "se"],
  },
  porous_paths: {
    columns: ["params", "scheme", "h", "t", "mu1", "se1", "n_blowups"],
    numeric: ["h", "t", "mu1", "se1", "n_blowups"],
  },
};

export interface FigureFile {
  readonly name: string;
  readonly table: string;
}

export interface FigureSpec {
  readonly id: string;
  readonly title: string;
  readonly files: readonly FigureFile[];
}

export const FIGURES: Record<string, FigureSpec> = {
  accuracy: {
    id: "accuracy",
    title: "asymptotic moment bias vs step size",
    files: [{ name: "accuracy.csv", table: "asymptotic_accuracy" }],
  },
  "1stMom": {
    id: "1stMom",
    title: "first-moment error evolution",
    files: [{ name: "evolution_error.csv", table: "evolution_error" }],
  },
  "2ndMom": {
    id: "2ndMom",
    title: "second-moment relative error evolution",
    files: [{ name: "evolution_error.csv", table: "evolution_error" }],
  },
  stab: {
    id: "stab",
    title: "moment stability boundaries",
    files: [
      { name: "stability_boundary.csv", table: "stability_boundary" },
      { name: "crossover.csv", table: "crossover" },
    ],
  },
  "1d_porousM_mean": {
    id: "1d_porousM_mean",
    title: "equilibrium mean error vs step size",
    files: [
      { name: "porous_mean_error_small.csv", table: "porous_mean_error" },
      { name: "porous_mean_error_large.csv", table: "porous_mean_error" },
    ],
  },
  fine_vs_coarse: {
    id: "fine_vs_coarse",
    title: "sample mean at fine and coarse step sizes",
    files: [{ name: "porous_paths.csv", table: "porous_paths" }],
  },
};

export const SCHEME_ORDER = ["EM", "MIL", "SH", "RK3"] as const;

export const SCHEME_COLORS: Record<string, string> = {
  EM: "#1f77b4",
  MIL: "#d62728",
  SH: "#2ca02c",
  RK3: "#9467bd",
};

/** Stable fallback palette for series outside the scheme set. */
export const EXTRA_COLORS = [
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
] as const;
