/** Loading and validating an experiment CSV plus its metadata sidecar. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";
import {
  Dataset,
  FigureKind,
  InputError,
  KIND_EXPERIMENT,
  Metadata,
  REQUIRED_COLUMNS,
  Row,
  SUPPORTED_SCHEMA_VERSION,
} from "./types.js";

export function sidecarPath(csvPath: string): string {
  return `${csvPath}.meta.json`;
}

function parseCell(raw: string): number | string | boolean | null {
  if (raw === "") return null;
  if (raw === "true") return true;
  if (raw === "false") return false;
  const num = Number(raw);
  return Number.isNaN(num) ? raw : num;
}

function readMetadata(csvPath: string): Metadata {
  let text: string;
  try {
    text = readFileSync(sidecarPath(csvPath), "utf-8");
  } catch (err) {
    throw new InputError(
      `missing metadata sidecar ${sidecarPath(csvPath)}: ${(err as Error).message}`,
    );
  }
  const meta = JSON.parse(text) as Metadata;
  if (typeof meta.schema_version !== "number") {
    throw new InputError("metadata sidecar has no numeric schema_version");
  }
  if (meta.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new InputError(
      `unsupported schema version ${meta.schema_version}; ` +
        `this reader supports version ${SUPPORTED_SCHEMA_VERSION}`,
    );
  }
  return meta;
}

export function loadDataset(csvPath: string, kind: FigureKind): Dataset {
  const meta = readMetadata(csvPath);
  if (meta.experiment !== KIND_EXPERIMENT[kind]) {
    throw new InputError(
      `figure kind '${kind}' needs a '${KIND_EXPERIMENT[kind]}' CSV, ` +
        `but the metadata says '${meta.experiment}'`,
    );
  }

  const text = readFileSync(csvPath, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new InputError(`cannot parse ${csvPath}: ${parsed.errors[0].message}`);
  }
  const [header, ...records] = parsed.data;
  if (!header) throw new InputError(`${csvPath} is empty`);

  const missing = REQUIRED_COLUMNS[kind].filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new InputError(`${csvPath} is missing column(s): ${missing.join(", ")}`);
  }

  const rows: Row[] = records.map((cells, i) => {
    if (cells.length !== header.length) {
      throw new InputError(`${csvPath} row ${i + 2} has ${cells.length} cells, expected ${header.length}`);
    }
    const row: Row = {};
    header.forEach((name, j) => {
      row[name] = parseCell(cells[j]);
    });
    return row;
  });
  if (rows.length === 0) throw new InputError(`${csvPath} has no data rows`);
  return { rows, meta };
}

/** Numeric column accessor that fails loudly on non-numeric cells. */
export function numbers(rows: Row[], column: string): number[] {
  return rows.map((row, i) => {
    const value = row[column];
    if (typeof value !== "number") {
      throw new InputError(`column '${column}' row ${i + 1} is not numeric: ${String(value)}`);
    }
    return value;
  });
}
