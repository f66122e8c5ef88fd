/**
 * Strict CSV reading for the simulator's data files.
 *
 * Both schemas are fixed upstream; any header deviation aborts with a column
 * diff so a schema drift is caught immediately rather than producing a
 * silently wrong figure.
 */

import { readFileSync } from "node:fs";

export interface Table {
  /** source path, for error messages */
  path: string;
  header: string[];
  /** column-major numeric data */
  columns: Map<string, Float64Array>;
  rows: number;
}

export class CsvError extends Error {}

export function parseCsv(path: string, text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${path}: file is empty`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  if (lines.length === 1) {
    throw new CsvError(`${path}: no data rows after the header`);
  }
  const rows = lines.length - 1;
  const cols = header.map(() => new Float64Array(rows));
  for (let i = 0; i < rows; i++) {
    const parts = lines[i + 1].split(",");
    if (parts.length !== header.length) {
      throw new CsvError(
        `${path}: row ${i + 2} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v)) {
        throw new CsvError(`${path}: row ${i + 2}, column '${header[j]}' is not numeric: '${parts[j]}'`);
      }
      cols[j][i] = v;
    }
  }
  const columns = new Map<string, Float64Array>();
  header.forEach((name, j) => columns.set(name, cols[j]));
  return { path, header, columns, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`${path}: ${(err as Error).message}`);
  }
  return parseCsv(path, text);
}

/** Abort with a missing/unexpected column diff unless the header matches. */
export function requireSchema(table: Table, expected: string[]): void {
  const got = new Set(table.header);
  const want = new Set(expected);
  const missing = expected.filter((c) => !got.has(c));
  const unexpected = table.header.filter((c) => !want.has(c));
  if (missing.length > 0 || unexpected.length > 0) {
    const parts = [`${table.path}: column mismatch`];
    if (missing.length > 0) parts.push(`missing: ${missing.join(", ")}`);
    if (unexpected.length > 0) parts.push(`unexpected: ${unexpected.join(", ")}`);
    throw new CsvError(parts.join("; "));
  }
}

export function column(table: Table, name: string): Float64Array {
  const col = table.columns.get(name);
  if (!col) throw new CsvError(`${table.path}: missing column '${name}'`);
  return col;
}

export const ERROR_SWEEP_SCHEMA = ["t", "err_x", "err_v", "psi"];

export const TRACKING_SCHEMA = [
  "t",
  "x1", "x2", "x3",
  "v1", "v2", "v3",
  "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33",
  "w1", "w2", "w3",
  "f", "M1", "M2", "M3",
  "psi", "err_pos", "err_vel", "qp_ms", "qp_iters",
];
