/** Input contracts: figure kinds, CSV rows, and the sidecar metadata. */

export const FIGURE_KINDS = ["nmse", "stat-vs-inst", "power-scaling"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

/** Schema version this reader understands. */
export const SUPPORTED_SCHEMA_VERSION = 1;

/** Experiment name recorded in the sidecar for each figure kind. */
export const KIND_EXPERIMENT: Record<FigureKind, string> = {
  nmse: "nmse-sweep",
  "stat-vs-inst": "stat-vs-inst",
  "power-scaling": "power-scaling",
};

/** Columns each kind needs; extra columns are allowed, missing ones are not. */
export const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  nmse: [
    "n",
    "nmse_closed",
    "nmse_mc",
    "nmse_mc_ci_low",
    "nmse_mc_ci_high",
    "mse_per_antenna_closed",
    "ls_mse_per_antenna_mc",
    "ls_mse_per_antenna_ref",
    "nmse_closed_full_los",
    "mse_per_antenna_closed_full_los",
  ],
  "stat-vs-inst": [
    "n",
    "rate_statistical",
    "rate_inst_ideal",
    "rate_inst_ideal_ci_low",
    "rate_inst_ideal_ci_high",
    "rate_inst_overhead",
    "rate_inst_overhead_ci_low",
    "rate_inst_overhead_ci_high",
    "overhead_feasible",
  ],
  "power-scaling": [
    "n",
    "rate_rician_n2",
    "limit_rician_n2",
    "rate_rayleigh_n",
    "limit_rayleigh_n",
    "rate_rayleigh_n2",
  ],
};

/** One CSV record: numeric cells parsed, empty cells kept as null. */
export type Row = Record<string, number | string | boolean | null>;

export interface Metadata {
  schema_version: number;
  experiment: string;
  columns: string[];
  limits?: Record<string, number>;
  [extra: string]: unknown;
}

export interface Dataset {
  rows: Row[];
  meta: Metadata;
}

export class InputError extends Error {}

export function isFigureKind(value: string): value is FigureKind {
  return (FIGURE_KINDS as readonly string[]).includes(value);
}
