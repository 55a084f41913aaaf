/** Axis scales and tick placement. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  readonly kind: ScaleKind;
  readonly domain: readonly [number, number];
  readonly range: readonly [number, number];
  map(x: number): number;
  ticks(): number[];
}

/**
 * Round-number linear ticks covering [lo, hi] with on the order of
 * `target` steps, using the usual 1/2/5 progression.
 */
export function linearTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    step = m * mag;
    if (step >= rawStep) {
      break;
    }
  }
  const first = Math.ceil(lo / step - 1e-9);
  const last = Math.floor(hi / step + 1e-9);
  const out: number[] = [];
  for (let k = first; k <= last; k += 1) {
    out.push(roundToStep(k * step, step));
  }
  return out;
}

/** Kill float residue like 0.6000000000000001 in generated tick values. */
function roundToStep(value: number, step: number): number {
  const decimals = Math.max(0, -Math.floor(Math.log10(step)) + 1);
  return Number(value.toFixed(Math.min(decimals + 1, 15)));
}

/**
 * Powers of ten covering [lo, hi], strided so at most `maxTicks` remain.
 * Extremely wide domains (dozens of decades) stay legible this way.
 */
export function decadeTicks(lo: number, hi: number, maxTicks = 7): number[] {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error("log ticks need a positive domain");
  }
  const eLo = Math.ceil(Math.log10(lo) - 1e-9);
  const eHi = Math.floor(Math.log10(hi) + 1e-9);
  if (eHi < eLo) {
    return [Math.pow(10, Math.round(Math.log10(lo)))];
  }
  const span = eHi - eLo;
  const stride = Math.max(1, Math.ceil((span + 1) / maxTicks));
  const out: number[] = [];
  for (let e = eLo; e <= eHi; e += stride) {
    out.push(Math.pow(10, e));
  }
  return out;
}

export function makeScale(
  kind: ScaleKind,
  domain: readonly [number, number],
  range: readonly [number, number],
): Scale {
  let [lo, hi] = domain;
  if (kind === "log" && (!(lo > 0) || !(hi > 0))) {
    throw new Error(`log scale needs positive domain, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    // degenerate extent: pad so the single value sits mid-axis
    if (kind === "log") {
      lo /= 2;
      hi *= 2;
    } else {
      const pad = Math.max(0.5, Math.abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    }
  }
  const [r0, r1] = range;
  if (kind === "log") {
    const l0 = Math.log10(lo);
    const l1 = Math.log10(hi);
    return {
      kind,
      domain: [lo, hi],
      range,
      map: (x) => r0 + ((Math.log10(x) - l0) / (l1 - l0)) * (r1 - r0),
      ticks: () => decadeTicks(lo, hi),
    };
  }
  return {
    kind,
    domain: [lo, hi],
    range,
    map: (x) => r0 + ((x - lo) / (hi - lo)) * (r1 - r0),
    ticks: () => linearTicks(lo, hi),
  };
}

/** Deterministic tick label. */
export function formatTick(value: number, kind: ScaleKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(value));
    if (e >= -2 && e <= 3) {
      return String(Math.pow(10, e));
    }
    return `1e${e}`;
  }
  // String() yields the shortest round-trip form, stable across runs
  return String(value);
}
