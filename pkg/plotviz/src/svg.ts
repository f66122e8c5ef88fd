/**
 * Minimal SVG scene construction: enough axes, polylines, and text for the
 * figure layouts used here, with linear and log10 y-scales.
 */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: Iterable<number>): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === Infinity) return { min: 0, max: 1 };
  if (min === max) {
    const pad = Math.abs(min) > 0 ? Math.abs(min) * 0.1 : 1;
    return { min: min - pad, max: max + pad };
  }
  return { min, max };
}

export function padded(e: Extent, frac = 0.05): Extent {
  const pad = (e.max - e.min) * frac;
  return { min: e.min - pad, max: e.max + pad };
}

export interface Scale {
  (v: number): number;
  ticks(): number[];
}

export function linearScale(domain: Extent, rangeLo: number, rangeHi: number): Scale {
  const span = domain.max - domain.min || 1;
  const fn = ((v: number) =>
    rangeLo + ((v - domain.min) / span) * (rangeHi - rangeLo)) as Scale;
  fn.ticks = () => niceTicks(domain, 5);
  return fn;
}

/** log10 scale; values at or below `floor` clamp to the floor decade. */
export function logScale(domain: Extent, rangeLo: number, rangeHi: number, floor = 1e-12): Scale {
  const lo = Math.log10(Math.max(domain.min, floor));
  const hi = Math.log10(Math.max(domain.max, floor * 10));
  const span = hi - lo || 1;
  const fn = ((v: number) => {
    const lv = Math.log10(Math.max(v, floor));
    return rangeLo + ((lv - lo) / span) * (rangeHi - rangeLo);
  }) as Scale;
  fn.ticks = () => {
    const ticks: number[] = [];
    for (let d = Math.ceil(lo); d <= Math.floor(hi); d++) ticks.push(10 ** d);
    if (ticks.length === 0) ticks.push(10 ** Math.round((lo + hi) / 2));
    return ticks;
  };
  return fn;
}

function niceTicks(e: Extent, count: number): number[] {
  const span = e.max - e.min;
  if (span <= 0) return [e.min];
  const step0 = span / count;
  const mag = 10 ** Math.floor(Math.log10(step0));
  const norm = step0 / mag;
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(e.min / step) * step; v <= e.max + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(4)).toString();
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgScene {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  open(cls: string): void {
    this.parts.push(`<g class="${cls}">`);
  }

  close(): void {
    this.parts.push("</g>");
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(xs: ArrayLike<number>, ys: ArrayLike<number>, stroke: string, width = 1.2, dash = ""): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      const x = xs[i];
      const y = ys[i];
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      pts.push(`${r(x)},${r(y)}`);
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr} points="${pts.join(" ")}"/>`,
    );
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; rotate?: number } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const rot = opts.rotate ? ` transform="rotate(${opts.rotate} ${r(x)} ${r(y)})"` : "";
    this.parts.push(
      `<text x="${r(x)}" y="${r(y)}" font-size="${size}" font-family="sans-serif" text-anchor="${anchor}"${rot}>${esc(content)}</text>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.parts.push(
      `<rect x="${r(x)}" y="${r(y)}" width="${r(w)}" height="${r(h)}" fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export interface PanelFrame {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Draw axes with ticks and labels; returns the x/y scales for the data area. */
export function drawPanel(
  scene: SvgScene,
  frame: PanelFrame,
  xDomain: Extent,
  yDomain: Extent,
  opts: { title?: string; xLabel?: string; yLabel?: string; logY?: boolean } = {},
): { sx: Scale; sy: Scale } {
  const inner = {
    x: frame.x + 52,
    y: frame.y + 22,
    width: frame.width - 64,
    height: frame.height - 56,
  };
  const sx = linearScale(xDomain, inner.x, inner.x + inner.width);
  const sy = opts.logY
    ? logScale(yDomain, inner.y + inner.height, inner.y)
    : linearScale(yDomain, inner.y + inner.height, inner.y);
  scene.rect(inner.x, inner.y, inner.width, inner.height, "none", "#222");
  for (const t of sx.ticks()) {
    const px = sx(t);
    scene.line(px, inner.y + inner.height, px, inner.y + inner.height + 4, "#222");
    scene.line(px, inner.y, px, inner.y + inner.height, "#eee");
    scene.text(px, inner.y + inner.height + 16, fmtTick(t), { anchor: "middle", size: 10 });
  }
  for (const t of sy.ticks()) {
    const py = sy(t);
    scene.line(inner.x - 4, py, inner.x, py, "#222");
    scene.line(inner.x, py, inner.x + inner.width, py, "#eee");
    scene.text(inner.x - 6, py + 3, fmtTick(t), { anchor: "end", size: 10 });
  }
  if (opts.title) {
    scene.text(frame.x + frame.width / 2, frame.y + 14, opts.title, { anchor: "middle", size: 12 });
  }
  if (opts.xLabel) {
    scene.text(inner.x + inner.width / 2, frame.y + frame.height - 6, opts.xLabel, {
      anchor: "middle",
      size: 11,
    });
  }
  if (opts.yLabel) {
    scene.text(frame.x + 14, inner.y + inner.height / 2, opts.yLabel, {
      anchor: "middle",
      size: 11,
      rotate: -90,
    });
  }
  return { sx, sy };
}

export const SERIES_COLORS = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];
