/**
 * Parsers for the CLI's output formats: CSV series (17-significant-digit
 * floats, header row) and the JSON summary sidecars.
 */

import { ConfigError } from "./errors.js";

/** A parsed CSV series: named columns of equal length. */
export interface Series {
  header: string[];
  columns: Map<string, Float64Array>;
  length: number;
}

export function parseCsv(text: string): Series {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new ConfigError("empty CSV");
  }
  const header = lines[0]!.split(",");
  if (header.some((name) => name === "" || /^[-\d.]/.test(name))) {
    throw new ConfigError(`CSV has no header row: '${lines[0]}'`);
  }
  const n = lines.length - 1;
  const cols = header.map(() => new Float64Array(n));
  for (let i = 0; i < n; i++) {
    const fields = lines[i + 1]!.split(",");
    if (fields.length !== header.length) {
      throw new ConfigError(
        `CSV row ${i + 1} has ${fields.length} fields, header has ${header.length}`,
      );
    }
    for (let j = 0; j < fields.length; j++) {
      const v = Number(fields[j]);
      if (Number.isNaN(v) && fields[j] !== "nan") {
        throw new ConfigError(`CSV row ${i + 1}, column '${header[j]}': not a number`);
      }
      cols[j]![i] = v;
    }
  }
  const columns = new Map<string, Float64Array>();
  header.forEach((name, j) => columns.set(name, cols[j]!));
  return { header, columns, length: n };
}

export function column(series: Series, name: string): Float64Array {
  const col = series.columns.get(name);
  if (col === undefined) {
    throw new ConfigError(`CSV has columns [${series.header.join(", ")}], not '${name}'`);
  }
  return col;
}

// --- JSON sidecars ---------------------------------------------------------------

export interface DriftReport {
  name: string;
  reference: number;
  max_abs: number;
  max_rel: number;
  t_at_max: number;
  n: number;
}

export interface EventRecord {
  t: number;
  component: string;
  direction: "rising" | "falling";
}

export interface SimulateSummary {
  command: "simulate";
  system: string;
  t_start: number;
  t_end: number;
  n_samples: number;
  drift: DriftReport[];
  events: EventRecord[];
  failure: { t: number; type: string; message: string } | null;
}

export interface ScanSummary {
  command: "scan";
  n: number;
  seed: number;
  fraction: number;
  rejected: number;
  failures: unknown[];
}

export interface SuperposeSummary {
  command: "superpose";
  delta: number;
  n: number;
  max_deviation: number;
  tol: number;
  passed: boolean;
}

export interface RescaleSummary {
  command: "rescale-check";
  max_residual: number;
  invariant_max_diff: number;
  invariant_tau_drift_rel: number;
  n_interior: number;
  tol: number;
  passed: boolean;
}

export type Summary = SimulateSummary | ScanSummary | SuperposeSummary | RescaleSummary;

const COMMANDS = new Set(["simulate", "scan", "superpose", "rescale-check", "analyze-potential"]);

export function parseSummary(text: string): Summary {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch (err) {
    throw new ConfigError(`summary is not valid JSON: ${String(err)}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ConfigError("summary must be a JSON object");
  }
  const command = (obj as { command?: unknown }).command;
  if (typeof command !== "string" || !COMMANDS.has(command)) {
    throw new ConfigError(`summary has unknown command '${String(command)}'`);
  }
  return obj as Summary;
}
