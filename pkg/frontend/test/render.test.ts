import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { renderFigure, UsageError } from "../src/render";
import { FIGURES } from "../src/schema";

const FIXTURES: Record<string, string> = {
  "accuracy.csv": [
    "# table = asymptotic_accuracy",
    "eta,moment,scheme,h,value,exact,abs_err,rel_err",
    "0.5,1,SH,0.1,0.01,0,0.01,nan",
    "0.5,1,SH,0.05,0.005,0,0.005,nan",
    "0.5,2,EM,0.1,0.71,0.666,0.044,0.066",
    "0.5,2,EM,0.05,0.69,0.666,0.024,0.036",
    "",
  ].join("\n"),
  "evolution_error.csv": [
    "eta,h,scheme,t,abs_err_mu1,se1,rel_err_mu2,rel_se2",
    "0.1,0.005,EM,0,0,0,0,0",
    "0.1,0.005,EM,0.5,0.001,0.0005,0.002,0.001",
    "0.1,0.005,EM,1,0.002,0.0006,0.004,0.001",
    "",
  ].join("\n"),
  "stability_boundary.csv": [
    "eta,h_max,scheme,model,moment",
    "0,2,EM,BENCHMARK,1",
    "0.5,2,EM,BENCHMARK,1",
    "1,2,EM,BENCHMARK,1",
    "0,2,EM,BENCHMARK,2",
    "0.5,1.75,EM,BENCHMARK,2",
    "1,1,EM,BENCHMARK,2",
    "",
  ].join("\n"),
  "crossover.csv": [
    "moment,scheme_a,scheme_b,eta_cross,bracket_lo,bracket_hi",
    "1,RK3,EM,0.52,0.4,0.7",
    "",
  ].join("\n"),
  "porous_mean_error_small.csv": [
    "h,abs_err_mean,se,scheme",
    "0.01,0.0005,0.0001,EM",
    "0.02,0.001,0.0001,EM",
    "",
  ].join("\n"),
  "porous_mean_error_large.csv": [
    "h,abs_err_mean,se,scheme",
    "0.01,0.0008,0.0001,EM",
    "0.02,0.0016,0.0001,EM",
    "",
  ].join("\n"),
  "porous_paths.csv": [
    "# reference_mean.small = 1.0",
    "params,scheme,h,t,mu1,se1,n_blowups",
    "small,EM,1,0,2,0,0",
    "small,EM,1,1,1.2,0.01,0",
    "small,EM,0.01,0,2,0,0",
    "small,EM,0.01,1,1.1,0.01,0",
    "",
  ].join("\n"),
};

const tmpDirs: string[] = [];

function makeBundle(files: Record<string, string>): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figbundle-"));
  tmpDirs.push(dir);
  for (const [name, text] of Object.entries(files)) {
    fs.writeFileSync(path.join(dir, name), text, "utf8");
  }
  return dir;
}

afterAll(() => {
  for (const dir of tmpDirs) {
    fs.rmSync(dir, { recursive: true, force: true });
  }
});

describe("renderFigure", () => {
  const full = makeBundle(FIXTURES);

  it("renders every figure id from a complete bundle", () => {
    for (const id of Object.keys(FIGURES)) {
      const result = renderFigure(id, full);
      expect(result.panelCount, id).toBeGreaterThan(0);
      expect(result.svg.startsWith("<svg "), id).toBe(true);
      expect(result.svg.trimEnd().endsWith("</svg>"), id).toBe(true);
      expect(result.svg, id).not.toContain("NaN");
      expect(result.svg, id).not.toContain("Infinity");
    }
  });

  it("is byte-identical across repeated runs", async () => {
    const first = renderFigure("accuracy", full).svg;
    await new Promise((resolve) => setTimeout(resolve, 15));
    expect(renderFigure("accuracy", full).svg).toBe(first);
  });

  it("draws an order-1 guide on log-log figures", () => {
    expect(renderFigure("accuracy", full).svg).toContain("slope 1");
    expect(renderFigure("1d_porousM_mean", full).svg).toContain("slope 1");
  });

  it("shades the stability regions and marks crossovers", () => {
    const svg = renderFigure("stab", full).svg;
    expect(svg).toContain("<polygon");
    expect(svg).toContain("RK3/EM");
  });

  it("skips missing optional files and says so", () => {
    const partial = makeBundle({
      "stability_boundary.csv": FIXTURES["stability_boundary.csv"]!,
    });
    const result = renderFigure("stab", partial);
    expect(result.panelCount).toBe(2);
    expect(result.notes.some((n) => n.includes("crossover.csv"))).toBe(true);
  });

  it("renders a valid empty figure when no file is present", () => {
    const empty = makeBundle({});
    const result = renderFigure("accuracy", empty);
    expect(result.panelCount).toBe(0);
    expect(result.svg).toContain("no data available");
  });

  it("rejects unknown figure ids", () => {
    expect(() => renderFigure("nope", full)).toThrowError(UsageError);
  });

  it("refuses schema-drifted headers", () => {
    const drifted = makeBundle({
      "accuracy.csv": FIXTURES["accuracy.csv"]!.replace("abs_err", "abserr"),
    });
    expect(() => renderFigure("accuracy", drifted)).toThrowError(/header mismatch/);
  });

  it("refuses corrupt numeric cells", () => {
    const corrupt = makeBundle({
      "accuracy.csv": FIXTURES["accuracy.csv"]!.replace("0.71", "wat"),
    });
    expect(() => renderFigure("accuracy", corrupt)).toThrowError(/not a number/);
  });
});

describe("cli main", () => {
  const full = makeBundle(FIXTURES);

  function outPath(): string {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figout-"));
    tmpDirs.push(dir);
    return path.join(dir, "figure.svg");
  }

  it("writes the figure and returns 0", () => {
    const out = outPath();
    const rc = main(["--figure", "stab", "--csv-dir", full, "--out", out]);
    expect(rc).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("</svg>");
  });

  it("returns 0 with an empty bundle and still writes a placeholder", () => {
    const empty = makeBundle({});
    const out = outPath();
    const rc = main(["--figure", "1stMom", "--csv-dir", empty, "--out", out]);
    expect(rc).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("no data available");
  });

  it("returns 1 on usage problems without writing", () => {
    const out = outPath();
    expect(main([])).toBe(1);
    expect(main(["--figure", "stab", "--csv-dir", full])).toBe(1);
    expect(main(["--bogus", "x"])).toBe(1);
    expect(main(["--figure", "stab", "--csv-dir", full, "--out"])).toBe(1);
    expect(main(["--figure", "nope", "--csv-dir", full, "--out", out])).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("returns 2 on schema drift and leaves no partial image", () => {
    const drifted = makeBundle({
      "evolution_error.csv": FIXTURES["evolution_error.csv"]!.replace("se1", "stderr1"),
    });
    const out = outPath();
    const rc = main(["--figure", "1stMom", "--csv-dir", drifted, "--out", out]);
    expect(rc).toBe(2);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("returns 2 on malformed rows and leaves no partial image", () => {
    const ragged = makeBundle({
      "evolution_error.csv": FIXTURES["evolution_error.csv"]! + "1,2,3\n",
    });
    const out = outPath();
    const rc = main(["--figure", "1stMom", "--csv-dir", ragged, "--out", out]);
    expect(rc).toBe(2);
    expect(fs.existsSync(out)).toBe(false);
  });
});
