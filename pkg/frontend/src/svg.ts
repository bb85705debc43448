/** Minimal deterministic SVG chart builder (no DOM, no timestamps). */

export interface Extent {
  min: number;
  max: number;
}

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: Extent;
  range: Extent;
  map(value: number): number;
  ticks(): number[];
}

const FMT_DIGITS = 2;

/** Fixed-precision coordinate formatting keeps output byte-stable. */
export function fmt(value: number): string {
  const text = value.toFixed(FMT_DIGITS);
  return text === "-0.00" ? "0.00" : text;
}

export function extent(values: number[], padFraction = 0.0): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!Number.isFinite(min) || !Number.isFinite(max)) {
    throw new Error("cannot compute an extent of no finite values");
  }
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

function linearTicks(domain: Extent, target = 6): number[] {
  const span = domain.max - domain.min;
  const rawStep = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= target) ?? 10 * mag;
  const first = Math.ceil(domain.min / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= domain.max + 1e-9 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function logTicks(domain: Extent): number[] {
  const ticks: number[] = [];
  const lo = Math.floor(Math.log10(domain.min));
  const hi = Math.ceil(Math.log10(domain.max));
  for (let e = lo; e <= hi; e += 1) {
    const v = Math.pow(10, e);
    if (v >= domain.min * 0.999 && v <= domain.max * 1.001) ticks.push(v);
  }
  return ticks.length >= 2 ? ticks : [domain.min, domain.max];
}

export function makeScale(kind: ScaleKind, domain: Extent, range: Extent): Scale {
  if (kind === "log" && domain.min <= 0) {
    throw new Error("log scale needs a strictly positive domain");
  }
  const map =
    kind === "linear"
      ? (v: number) =>
          range.min + ((v - domain.min) / (domain.max - domain.min)) * (range.max - range.min)
      : (v: number) =>
          range.min +
          ((Math.log10(v) - Math.log10(domain.min)) /
            (Math.log10(domain.max) - Math.log10(domain.min))) *
            (range.max - range.min);
  return {
    kind,
    domain,
    range,
    map,
    ticks: () => (kind === "linear" ? linearTicks(domain) : logTicks(domain)),
  };
}

export function tickLabel(value: number, kind: ScaleKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(value));
    return `1e${e}`;
  }
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-2) return value.toExponential(1);
  return String(Number(value.toPrecision(4)));
}

export interface Series {
  label: string;
  x: number[];
  y: (number | null)[];
  color: string;
  dash?: string;
  marker?: boolean;
  band?: { low: (number | null)[]; high: (number | null)[] };
}

export interface RefLine {
  label: string;
  y: number;
  color: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  yKind: ScaleKind;
  series: Series[];
  refLines?: RefLine[];
  showBands?: boolean;
}

const PANEL_WIDTH = 460;
const PANEL_HEIGHT = 330;
const MARGIN = { top: 34, right: 16, bottom: 44, left: 64 };

function finite(values: (number | null)[]): number[] {
  return values.filter((v): v is number => typeof v === "number" && Number.isFinite(v));
}

function renderPanel(spec: PanelSpec, originX: number, originY: number): string {
  const innerW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const left = originX + MARGIN.left;
  const top = originY + MARGIN.top;

  const xValues = spec.series.flatMap((s) => s.x);
  const yValues = spec.series.flatMap((s) => finite(s.y));
  for (const s of spec.series) {
    if (spec.showBands !== false && s.band) {
      yValues.push(...finite(s.band.low), ...finite(s.band.high));
    }
  }
  for (const ref of spec.refLines ?? []) yValues.push(ref.y);

  const xScale = makeScale("linear", extent(xValues, 0.04), { min: left, max: left + innerW });
  const yScale = makeScale(spec.yKind, extent(yValues, spec.yKind === "linear" ? 0.08 : 0.0), {
    min: top + innerH,
    max: top,
  });

  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(left)}" y="${fmt(top)}" width="${fmt(innerW)}" height="${fmt(innerH)}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt(originX + PANEL_WIDTH / 2)}" y="${fmt(originY + 18)}" text-anchor="middle" font-size="13" font-weight="bold">${spec.title}</text>`,
  );

  for (const t of xScale.ticks()) {
    const px = xScale.map(t);
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(top + innerH)}" x2="${fmt(px)}" y2="${fmt(top + innerH + 4)}" stroke="#333"/>`);
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(top + innerH + 17)}" text-anchor="middle" font-size="10">${tickLabel(t, "linear")}</text>`,
    );
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(top)}" x2="${fmt(px)}" y2="${fmt(top + innerH)}" stroke="#ddd" stroke-width="0.5"/>`);
  }
  for (const t of yScale.ticks()) {
    const py = yScale.map(t);
    parts.push(`<line x1="${fmt(left - 4)}" y1="${fmt(py)}" x2="${fmt(left)}" y2="${fmt(py)}" stroke="#333"/>`);
    parts.push(
      `<text x="${fmt(left - 7)}" y="${fmt(py + 3)}" text-anchor="end" font-size="10">${tickLabel(t, spec.yKind)}</text>`,
    );
    parts.push(`<line x1="${fmt(left)}" y1="${fmt(py)}" x2="${fmt(left + innerW)}" y2="${fmt(py)}" stroke="#ddd" stroke-width="0.5"/>`);
  }
  parts.push(
    `<text x="${fmt(left + innerW / 2)}" y="${fmt(top + innerH + 34)}" text-anchor="middle" font-size="11">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text transform="translate(${fmt(originX + 15)},${fmt(top + innerH / 2)}) rotate(-90)" text-anchor="middle" font-size="11">${spec.yLabel}</text>`,
  );

  for (const ref of spec.refLines ?? []) {
    const py = yScale.map(ref.y);
    parts.push(
      `<line x1="${fmt(left)}" y1="${fmt(py)}" x2="${fmt(left + innerW)}" y2="${fmt(py)}" stroke="${ref.color}" stroke-width="1.2" stroke-dasharray="7,3"/>`,
    );
  }

  for (const s of spec.series) {
    if (spec.showBands !== false && s.band) {
      const segs = segments(s.x, s.band.low, s.band.high);
      for (const seg of segs) {
        const upper = seg.map((p) => `${fmt(xScale.map(p.x))},${fmt(yScale.map(p.high))}`);
        const lower = seg
          .slice()
          .reverse()
          .map((p) => `${fmt(xScale.map(p.x))},${fmt(yScale.map(p.low))}`);
        parts.push(
          `<polygon points="${[...upper, ...lower].join(" ")}" fill="${s.color}" fill-opacity="0.15" stroke="none"/>`,
        );
      }
    }
    for (const seg of lineSegments(s.x, s.y)) {
      const points = seg.map((p) => `${fmt(xScale.map(p.x))},${fmt(yScale.map(p.y))}`).join(" ");
      parts.push(
        `<polyline points="${points}" fill="none" stroke="${s.color}" stroke-width="1.6"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
      );
      if (s.marker !== false) {
        for (const p of seg) {
          parts.push(
            `<circle cx="${fmt(xScale.map(p.x))}" cy="${fmt(yScale.map(p.y))}" r="2.4" fill="${s.color}"/>`,
          );
        }
      }
    }
  }

  let legendY = top + 8;
  const legendX = left + innerW - 170;
  const entries: { label: string; color: string; dash?: string }[] = [
    ...spec.series.map((s) => ({ label: s.label, color: s.color, dash: s.dash })),
    ...(spec.refLines ?? []).map((r) => ({ label: r.label, color: r.color, dash: "7,3" })),
  ];
  for (const e of entries) {
    parts.push(
      `<line x1="${fmt(legendX)}" y1="${fmt(legendY)}" x2="${fmt(legendX + 22)}" y2="${fmt(legendY)}" stroke="${e.color}" stroke-width="1.6"${e.dash ? ` stroke-dasharray="${e.dash}"` : ""}/>`,
    );
    parts.push(
      `<text x="${fmt(legendX + 27)}" y="${fmt(legendY + 3)}" font-size="9.5">${e.label}</text>`,
    );
    legendY += 13;
  }
  return parts.join("\n");
}

interface BandPoint {
  x: number;
  low: number;
  high: number;
}

function segments(x: number[], low: (number | null)[], high: (number | null)[]): BandPoint[][] {
  const out: BandPoint[][] = [];
  let current: BandPoint[] = [];
  for (let i = 0; i < x.length; i += 1) {
    const lo = low[i];
    const hi = high[i];
    if (typeof lo === "number" && typeof hi === "number") {
      current.push({ x: x[i], low: lo, high: hi });
    } else if (current.length > 0) {
      out.push(current);
      current = [];
    }
  }
  if (current.length > 0) out.push(current);
  return out;
}

function lineSegments(x: number[], y: (number | null)[]): { x: number; y: number }[][] {
  const out: { x: number; y: number }[][] = [];
  let current: { x: number; y: number }[] = [];
  for (let i = 0; i < x.length; i += 1) {
    const v = y[i];
    if (typeof v === "number" && Number.isFinite(v)) {
      current.push({ x: x[i], y: v });
    } else if (current.length > 0) {
      out.push(current);
      current = [];
    }
  }
  if (current.length > 0) out.push(current);
  return out;
}

/** Assemble one or more panels side by side into a complete SVG document. */
export function renderFigure(panels: PanelSpec[]): string {
  const width = PANEL_WIDTH * panels.length;
  const height = PANEL_HEIGHT;
  const body = panels.map((p, i) => renderPanel(p, i * PANEL_WIDTH, 0)).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica,Arial,sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
