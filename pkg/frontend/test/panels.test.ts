import { describe, expect, it } from "vitest";

import { CsvTable, parseCsv } from "../src/csv";
import { buildPanels, fmtNum } from "../src/panels";

function tables(entries: Record<string, string>): Map<string, CsvTable> {
  const m = new Map<string, CsvTable>();
  for (const [name, text] of Object.entries(entries)) {
    m.set(name, parseCsv(text, name));
  }
  return m;
}

const ACCURACY = [
  "eta,moment,scheme,h,value,exact,abs_err,rel_err",
  "0.5,1,EM,0.1,3e-92,0,3e-92,nan",
  "0.5,1,EM,0.05,1e-92,0,1e-92,nan",
  "0.5,1,SH,0.1,0.01,0,0.01,nan",
  "0.5,1,SH,0.05,0.005,0,0.005,nan",
  "0.5,2,EM,0.1,0.71,0.666,0.044,0.066",
  "0.5,2,EM,0.05,0.69,0.666,0.024,0.036",
  "1.412,2,MIL,0.1,7.9e+25,140,7.9e+25,5.6e+23",
  "1.412,2,MIL,0.05,2.7e+13,140,2.7e+13,1.9e+11",
  "1.412,2,SH,0.1,3.1,140,143,1.02",
  "1.412,2,SH,0.05,2.9,140,137,0.98",
  "",
].join("\n");

describe("accuracy figure", () => {
  const { panels, notes } = buildPanels("accuracy", tables({ "accuracy.csv": ACCURACY }));

  it("groups panels by eta and moment in sorted order", () => {
    expect(panels.map((p) => p.title)).toEqual([
      "eta=0.5, moment 1",
      "eta=0.5, moment 2",
      "eta=1.412, moment 2",
    ]);
  });

  it("is log-log with an order-1 guide", () => {
    for (const p of panels) {
      expect(p.xKind).toBe("log");
      expect(p.yKind).toBe("log");
      expect(p.guideSlope).toBe(1);
    }
  });

  it("skips numerically-zero series but keeps genuine ones", () => {
    expect(panels[0]!.series.map((s) => s.label)).toEqual(["SH"]);
    expect(notes).toContain("eta=0.5, moment 1: series EM is numerically zero, skipped");
  });

  it("keeps honestly small series next to exploded ones", () => {
    const wild = panels[2]!;
    expect(wild.series.map((s) => s.label)).toEqual(["MIL", "SH"]);
  });

  it("sorts points by step size within a series", () => {
    const sh = panels[0]!.series[0]!;
    expect(sh.points).toEqual([
      [0.05, 0.005],
      [0.1, 0.01],
    ]);
  });
});

const EVOLUTION = [
  "eta,h,scheme,t,abs_err_mu1,se1,rel_err_mu2,rel_se2",
  "0.1,0.005,EM,0,0,0,0,0",
  "0.1,0.005,EM,0.5,0.001,0.0005,0.002,0.001",
  "0.1,0.005,EM,1,0.002,0.0006,0.004,0.001",
  "0.1,0.005,RK3,0.5,0.0005,0.0005,0.001,0.001",
  "0.1,0.025,EM,0.5,0.003,0.0005,0.006,0.001",
  "1.41,0.005,MIL,0.5,0.004,0.001,0.008,0.002",
  "",
].join("\n");

describe("moment evolution figures", () => {
  const tbls = tables({ "evolution_error.csv": EVOLUTION });

  it("builds one panel per (eta, h) pair", () => {
    const { panels } = buildPanels("1stMom", tbls);
    expect(panels.map((p) => p.title)).toEqual([
      "eta=0.1, h=0.005",
      "eta=0.1, h=0.025",
      "eta=1.41, h=0.005",
    ]);
    expect(panels[0]!.series.map((s) => s.label)).toEqual(["EM", "RK3"]);
  });

  it("drops the zero-error t=0 point on the log axis", () => {
    const { panels } = buildPanels("1stMom", tbls);
    const em = panels[0]!.series[0]!;
    expect(em.points[0]).toEqual([0.5, 0.001]);
    expect(em.points).toHaveLength(2);
  });

  it("reads the second-moment column for the second figure", () => {
    const { panels } = buildPanels("2ndMom", tbls);
    expect(panels[0]!.series[0]!.points[0]).toEqual([0.5, 0.002]);
    expect(panels[0]!.yLabel).toContain("second-moment");
  });
});

const BOUNDARY = [
  "eta,h_max,scheme,model,moment",
  "0,2,EM,BENCHMARK,1",
  "0.5,2,EM,BENCHMARK,1",
  "1,2,EM,BENCHMARK,1",
  "0,2.38,RK3,BENCHMARK,1",
  "0.5,2.05,RK3,BENCHMARK,1",
  "1,1.37,RK3,BENCHMARK,1",
  "0,2,EM,BENCHMARK,2",
  "0.5,1.75,EM,BENCHMARK,2",
  "1,1,EM,BENCHMARK,2",
  "",
].join("\n");

const CROSSOVER = [
  "moment,scheme_a,scheme_b,eta_cross,bracket_lo,bracket_hi",
  "1,RK3,EM,0.52,0.4,0.7",
  "2,RK3,EM,0.5,0.4,0.6",
  "2,RK3,EM,1.15,1,1.3",
  "",
].join("\n");

describe("stability figure", () => {
  it("attaches crossover markers to the matching moment panel", () => {
    const { panels } = buildPanels(
      "stab",
      tables({ "stability_boundary.csv": BOUNDARY, "crossover.csv": CROSSOVER }),
    );
    expect(panels).toHaveLength(2);
    expect(panels[0]!.markers!.map((m) => m.x)).toEqual([0.52]);
    expect(panels[1]!.markers!.map((m) => m.x)).toEqual([0.5, 1.15]);
    expect(panels[0]!.markers![0]!.label).toBe("RK3/EM");
    expect(panels[0]!.shade).toBe(true);
  });

  it("renders without the optional crossover table", () => {
    const { panels } = buildPanels("stab", tables({ "stability_boundary.csv": BOUNDARY }));
    expect(panels).toHaveLength(2);
    expect(panels[0]!.markers).toEqual([]);
  });

  it("builds nothing when the boundary table is absent", () => {
    const { panels } = buildPanels("stab", tables({ "crossover.csv": CROSSOVER }));
    expect(panels).toHaveLength(0);
  });
});

const POROUS_MEAN = [
  "h,abs_err_mean,se,scheme",
  "0.04,0.002,0.0002,EM",
  "0.01,0.0005,0.0001,EM",
  "0.02,0.001,0.0001,EM",
  "0.01,0.0004,0.0001,RK3",
  "0.02,0.0008,0.0001,RK3",
  "0.04,0.0017,0.0002,RK3",
  "",
].join("\n");

describe("porous mean error figure", () => {
  it("builds one panel per variant file that is present", () => {
    const { panels } = buildPanels(
      "1d_porousM_mean",
      tables({ "porous_mean_error_large.csv": POROUS_MEAN }),
    );
    expect(panels).toHaveLength(1);
    expect(panels[0]!.title).toBe("large noise parameters");
    expect(panels[0]!.guideSlope).toBe(1);
    const em = panels[0]!.series[0]!;
    expect(em.points.map(([h]) => h)).toEqual([0.01, 0.02, 0.04]);
  });
});

const PATHS = [
  "# reference_mean.small = 1.25",
  "params,scheme,h,t,mu1,se1,n_blowups",
  "small,EM,1,0,2,0,0",
  "small,EM,1,1,1.2,0.01,0",
  "small,EM,0.01,0,2,0,0",
  "small,EM,0.01,1,1.1,0.01,0",
  "large,SH,0.01,0,2,0,0",
  "large,SH,0.01,1,1.3,0.01,0",
  "",
].join("\n");

describe("fine vs coarse figure", () => {
  const { panels } = buildPanels("fine_vs_coarse", tables({ "porous_paths.csv": PATHS }));

  it("splits panels by parameter set in file order", () => {
    expect(panels.map((p) => p.title)).toEqual([
      "small noise parameters",
      "large noise parameters",
    ]);
  });

  it("dashes the coarse step and keeps the fine one solid", () => {
    const bySuffix = Object.fromEntries(panels[0]!.series.map((s) => [s.label, s.dash]));
    expect(bySuffix["EM h=0.01"]).toBeUndefined();
    expect(bySuffix["EM h=1"]).toBe("5 3");
  });

  it("keeps a single step size solid", () => {
    expect(panels[1]!.series[0]!.dash).toBeUndefined();
  });

  it("turns reference-mean metadata into a horizontal guide", () => {
    expect(panels[0]!.hlines).toEqual([{ y: 1.25, label: "reference mean" }]);
    expect(panels[1]!.hlines).toEqual([]);
  });
});

describe("buildPanels argument checking", () => {
  it("rejects unknown figure ids", () => {
    expect(() => buildPanels("nope", new Map())).toThrowError(/unknown figure id/);
  });

  it("formats grouping values with shortest round-trip decimals", () => {
    expect(fmtNum(0.1)).toBe("0.1");
    expect(fmtNum(Number("0.10000000000000001"))).toBe("0.1");
    expect(fmtNum(1.412)).toBe("1.412");
  });
});
