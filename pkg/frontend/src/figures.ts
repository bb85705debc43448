/** Figure assembly for the three experiment kinds. */

import { numbers } from "./csv.js";
import { Dataset, FigureKind, InputError, Row } from "./types.js";
import { PanelSpec, renderFigure } from "./svg.js";

export interface PlotOptions {
  /** Draw confidence bands from the *_ci_low/high columns (default on). */
  bands?: boolean;
}

const COLORS = {
  closed: "#1f77b4",
  mc: "#d62728",
  ls: "#2ca02c",
  fullLos: "#9467bd",
  statistical: "#1f77b4",
  ideal: "#2ca02c",
  overhead: "#d62728",
  rician: "#1f77b4",
  rayleigh: "#d62728",
  rayleighN2: "#8c564b",
};

function optional(rows: Row[], column: string): (number | null)[] {
  return rows.map((row) => {
    const v = row[column];
    return typeof v === "number" ? v : null;
  });
}

function nmsePanels(data: Dataset, options: PlotOptions): PanelSpec[] {
  const rows = data.rows;
  const n = numbers(rows, "n");
  const msePanel: PanelSpec = {
    title: "Estimation error per antenna",
    xLabel: "reflecting elements n",
    yLabel: "MSE per antenna",
    yKind: "log",
    showBands: options.bands !== false,
    series: [
      { label: "closed form", x: n, y: numbers(rows, "mse_per_antenna_closed"), color: COLORS.closed },
      { label: "least squares (measured)", x: n, y: numbers(rows, "ls_mse_per_antenna_mc"), color: COLORS.ls, dash: "4,3" },
      { label: "near-deterministic reference", x: n, y: numbers(rows, "mse_per_antenna_closed_full_los"), color: COLORS.fullLos, dash: "2,3" },
    ],
    refLines: [
      { label: "noise floor", y: numbers(rows, "ls_mse_per_antenna_ref")[0], color: "#555" },
    ],
  };
  const nmsePanel: PanelSpec = {
    title: "Normalized estimation error",
    xLabel: "reflecting elements n",
    yLabel: "NMSE",
    yKind: "log",
    showBands: options.bands !== false,
    series: [
      { label: "closed form", x: n, y: numbers(rows, "nmse_closed"), color: COLORS.closed },
      {
        label: "Monte-Carlo",
        x: n,
        y: numbers(rows, "nmse_mc"),
        color: COLORS.mc,
        dash: "4,3",
        band: { low: optional(rows, "nmse_mc_ci_low"), high: optional(rows, "nmse_mc_ci_high") },
      },
      { label: "near-deterministic reference", x: n, y: numbers(rows, "nmse_closed_full_los"), color: COLORS.fullLos, dash: "2,3" },
    ],
  };
  return [msePanel, nmsePanel];
}

function statVsInstPanels(data: Dataset, options: PlotOptions): PanelSpec[] {
  const rows = data.rows;
  const n = numbers(rows, "n");
  return [
    {
      title: "Long-term phase design vs per-realization genie",
      xLabel: "reflecting elements n",
      yLabel: "rate (bits/s/Hz)",
      yKind: "linear",
      showBands: options.bands !== false,
      series: [
        { label: "statistical design", x: n, y: numbers(rows, "rate_statistical"), color: COLORS.statistical },
        {
          label: "genie, single-pilot overhead",
          x: n,
          y: optional(rows, "rate_inst_ideal"),
          color: COLORS.ideal,
          dash: "4,3",
          band: {
            low: optional(rows, "rate_inst_ideal_ci_low"),
            high: optional(rows, "rate_inst_ideal_ci_high"),
          },
        },
        {
          label: "genie, per-element overhead",
          x: n,
          y: optional(rows, "rate_inst_overhead"),
          color: COLORS.overhead,
          dash: "6,3",
          band: {
            low: optional(rows, "rate_inst_overhead_ci_low"),
            high: optional(rows, "rate_inst_overhead_ci_high"),
          },
        },
      ],
    },
  ];
}

function powerScalingPanels(data: Dataset, options: PlotOptions): PanelSpec[] {
  const rows = data.rows;
  const meta = data.meta;
  const n = numbers(rows, "n");
  const limits = meta.limits;
  if (!limits || typeof limits.rician_n2 !== "number" || typeof limits.rayleigh_n !== "number") {
    throw new InputError("power-scaling metadata lacks the rician_n2/rayleigh_n limit values");
  }
  return [
    {
      title: "Rate under shrinking transmit power",
      xLabel: "reflecting elements n",
      yLabel: "rate (bits/s/Hz)",
      yKind: "linear",
      showBands: options.bands !== false,
      series: [
        { label: "Rician links, power/n^2", x: n, y: numbers(rows, "rate_rician_n2"), color: COLORS.rician },
        { label: "Rayleigh links, power/n", x: n, y: numbers(rows, "rate_rayleigh_n"), color: COLORS.rayleigh, dash: "4,3" },
        { label: "Rayleigh links, power/n^2", x: n, y: numbers(rows, "rate_rayleigh_n2"), color: COLORS.rayleighN2, dash: "2,3" },
      ],
      refLines: [
        { label: "limit, power/n^2", y: limits.rician_n2, color: COLORS.rician },
        { label: "limit, power/n", y: limits.rayleigh_n, color: COLORS.rayleigh },
      ],
    },
  ];
}

export function renderKind(data: Dataset, kind: FigureKind, options: PlotOptions = {}): string {
  switch (kind) {
    case "nmse":
      return renderFigure(nmsePanels(data, options));
    case "stat-vs-inst":
      return renderFigure(statVsInstPanels(data, options));
    case "power-scaling":
      return renderFigure(powerScalingPanels(data, options));
  }
}
