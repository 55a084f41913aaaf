/**
 * Minimal SVG string builder. Coordinates are rounded to a fixed
 * precision so output is byte-stable and diff-friendly.
 */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Coordinate formatting: two decimals, no negative zero, no trailing dot. */
export function fmt(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`non-finite coordinate: ${v}`);
  }
  let s = v.toFixed(2);
  s = s.replace(/\.?0+$/, "");
  if (s === "-0" || s === "") {
    s = "0";
  }
  return s;
}

export type Attrs = Record<string, string | number>;

export function tag(name: string, attrs: Attrs, children?: string): string {
  const parts = [`<${name}`];
  for (const key of Object.keys(attrs)) {
    const raw = attrs[key]!;
    const val = typeof raw === "number" ? fmt(raw) : esc(raw);
    parts.push(` ${key}="${val}"`);
  }
  if (children === undefined) {
    parts.push("/>");
  } else {
    parts.push(`>${children}</${name}>`);
  }
  return parts.join("");
}

export function lineEl(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
  width = 1,
  dash?: string,
): string {
  const attrs: Attrs = { x1, y1, x2, y2, stroke, "stroke-width": width };
  if (dash) {
    attrs["stroke-dasharray"] = dash;
  }
  return tag("line", attrs);
}

export function polylineEl(
  points: ReadonlyArray<readonly [number, number]>,
  stroke: string,
  width = 1.5,
  dash?: string,
): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const attrs: Attrs = {
    points: pts,
    fill: "none",
    stroke,
    "stroke-width": width,
    "stroke-linejoin": "round",
  };
  if (dash) {
    attrs["stroke-dasharray"] = dash;
  }
  return tag("polyline", attrs);
}

export function polygonEl(
  points: ReadonlyArray<readonly [number, number]>,
  fill: string,
  opacity: number,
): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polygon", { points: pts, fill, "fill-opacity": opacity, stroke: "none" });
}

export function rectEl(
  x: number,
  y: number,
  w: number,
  h: number,
  attrs: Attrs = {},
): string {
  return tag("rect", { x, y, width: w, height: h, ...attrs });
}

export function circleEl(cx: number, cy: number, r: number, fill: string): string {
  return tag("circle", { cx, cy, r, fill });
}

export interface TextOpts {
  anchor?: "start" | "middle" | "end";
  size?: number;
  fill?: string;
  rotate?: number;
  bold?: boolean;
}

export function textEl(x: number, y: number, s: string, opts: TextOpts = {}): string {
  const attrs: Attrs = {
    x,
    y,
    "font-family": "Helvetica, Arial, sans-serif",
    "font-size": opts.size ?? 11,
    fill: opts.fill ?? "#222222",
    "text-anchor": opts.anchor ?? "start",
  };
  if (opts.bold) {
    attrs["font-weight"] = "bold";
  }
  if (opts.rotate !== undefined) {
    attrs.transform = `rotate(${fmt(opts.rotate)} ${fmt(x)} ${fmt(y)})`;
  }
  return tag("text", attrs, esc(s));
}

export function svgDocument(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" height="${fmt(
      height,
    )}" viewBox="0 0 ${fmt(width)} ${fmt(height)}">`,
    rectEl(0, 0, width, height, { fill: "#ffffff" }),
    body,
    "</svg>",
    "",
  ].join("\n");
}
