/** Minimal deterministic SVG scene builder: scales, axes, marks. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  const scale = ((value: number) => inner(Math.log10(value))) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(count - 1, 1);
  const power = Math.floor(Math.log10(rawStep));
  const base = 10 ** power;
  const step = [1, 2, 2.5, 5, 10].map((m) => m * base).find((s) => s >= rawStep) ?? base * 10;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e += 1) {
    ticks.push(10 ** e);
  }
  return ticks.length > 0 ? ticks : [lo];
}

export function fmtTick(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    const exponent = Math.round(Math.log10(Math.abs(value)));
    if (Math.abs(value / 10 ** exponent - 1) < 1e-9) return `1e${exponent}`;
    return value.toExponential(1);
  }
  return Number(value.toPrecision(6)).toString();
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgBuilder {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): void {
    this.parts.push(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}"${extra}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, extra = ""): void {
    this.parts.push(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" stroke="${stroke}"${extra}/>`,
    );
  }

  polyline(points: [number, number][], stroke: string, extra = ""): void {
    const attr = points.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    this.parts.push(`<polyline points="${attr}" fill="none" stroke="${stroke}"${extra}/>`);
  }

  path(d: string, stroke: string, fill: string, extra = ""): void {
    this.parts.push(`<path d="${d}" stroke="${stroke}" fill="${fill}"${extra}/>`);
  }

  circle(cx: number, cy: number, radius: number, fill: string): void {
    this.parts.push(`<circle cx="${r2(cx)}" cy="${r2(cy)}" r="${r2(radius)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, extra = ""): void {
    this.parts.push(`<text x="${r2(x)}" y="${r2(y)}"${extra}>${esc(content)}</text>`);
  }

  raw(markup: string): void {
    this.parts.push(markup);
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>` +
      this.parts.join("") +
      "</svg>"
    );
  }
}

function r2(value: number): string {
  return (Math.round(value * 100) / 100).toString();
}

// Compact viridis approximation: linear interpolation between anchors.
const VIRIDIS: [number, number, number][] = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function viridis(x: number): string {
  const clamped = Math.min(1, Math.max(0, x));
  const pos = clamped * (VIRIDIS.length - 1);
  const i = Math.min(Math.floor(pos), VIRIDIS.length - 2);
  const frac = pos - i;
  const mix = VIRIDIS[i].map((c, ch) => Math.round(c + frac * (VIRIDIS[i + 1][ch] - c)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

export const PROTOCOL_STYLE: Record<string, { dash: string; label: string }> = {
  pr: { dash: "", label: "replacement (solid)" },
  pa: { dash: ' stroke-dasharray="8,5"', label: "addition (dashed)" },
  ps: { dash: ' stroke-dasharray="2,4"', label: "subtraction (dotted)" },
};

export const SERIES_COLORS = ["#d4a017", "#e07020", "#c02020", "#3060c0", "#208060", "#803080"];
