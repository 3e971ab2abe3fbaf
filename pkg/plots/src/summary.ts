/**
 * Reader for summary CSVs produced by `augrl aggregate`.
 *
 * Layout, in order:
 *   `# key=value` config echo lines (seed is never present),
 *   `# axis=env_steps|update_count`,
 *   optionally `# code_version=...`,
 *   the exact header `x,iqm,ci_lo,ci_hi,n_seeds`,
 *   one row per checkpoint with strictly increasing integer x.
 *
 * The reader is strict: anything that does not match fails with an error
 * naming the file (and line where it helps), so a bad input can never make
 * it into a figure silently.
 */

import { readFileSync } from "node:fs";

export const SUMMARY_HEADER = "x,iqm,ci_lo,ci_hi,n_seeds";
const RUN_HEADER = "env_steps,update_count,success_rate";

export const AXES = ["env_steps", "update_count"] as const;
export type Axis = (typeof AXES)[number];

export interface SummaryRow {
  x: number;
  iqm: number;
  ciLo: number;
  ciHi: number;
  nSeeds: number;
}

export interface SummaryFile {
  /** Path as given on the command line, for error messages and the dump. */
  path: string;
  /** Config echo, values kept as the exact strings from the file. */
  config: Record<string, string>;
  axis: Axis;
  codeVersion: string | null;
  rows: SummaryRow[];
}

export class SummaryFormatError extends Error {
  readonly path: string;

  constructor(path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = "SummaryFormatError";
    this.path = path;
  }
}

/** Parse one numeric field; Python reprs inf as `inf`, which Number() misses. */
function parseField(
  path: string,
  lineNo: number,
  name: string,
  text: string,
): number {
  const t = text.trim();
  let value: number;
  if (t === "inf") value = Infinity;
  else if (t === "-inf") value = -Infinity;
  else if (t === "" || t === "nan" || t === "-nan") value = NaN;
  else value = Number(t);
  if (Number.isNaN(value)) {
    throw new SummaryFormatError(
      path,
      `line ${lineNo}: bad ${name} value ${JSON.stringify(text)}`,
    );
  }
  return value;
}

export function parseSummaryText(path: string, text: string): SummaryFile {
  const config: Record<string, string> = {};
  let axis: Axis | null = null;
  let codeVersion: string | null = null;
  const rows: SummaryRow[] = [];
  let sawHeader = false;

  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const raw = lines[i]!;
    const lineNo = i + 1;
    if (raw.trim() === "") continue;

    if (raw.startsWith("#")) {
      if (sawHeader) {
        throw new SummaryFormatError(
          path,
          `line ${lineNo}: comment after the header`,
        );
      }
      const body = raw.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq < 1) {
        throw new SummaryFormatError(
          path,
          `line ${lineNo}: expected '# key=value', got ${JSON.stringify(raw)}`,
        );
      }
      const key = body.slice(0, eq).trim();
      const value = body.slice(eq + 1).trim();
      if (key === "axis") {
        if (!(AXES as readonly string[]).includes(value)) {
          throw new SummaryFormatError(
            path,
            `line ${lineNo}: axis must be one of ${AXES.join(", ")}, got ${JSON.stringify(value)}`,
          );
        }
        axis = value as Axis;
      } else if (key === "code_version") {
        codeVersion = value;
      } else {
        if (key in config) {
          throw new SummaryFormatError(
            path,
            `line ${lineNo}: duplicate config key ${JSON.stringify(key)}`,
          );
        }
        config[key] = value;
      }
      continue;
    }

    if (!sawHeader) {
      if (raw.trim() === RUN_HEADER) {
        throw new SummaryFormatError(
          path,
          "this is a per-seed run CSV; pass the *_summary.csv written by aggregate",
        );
      }
      if (raw.trim() !== SUMMARY_HEADER) {
        throw new SummaryFormatError(
          path,
          `line ${lineNo}: expected header ${JSON.stringify(SUMMARY_HEADER)}, got ${JSON.stringify(raw)}`,
        );
      }
      sawHeader = true;
      continue;
    }

    const fields = raw.split(",");
    if (fields.length !== 5) {
      throw new SummaryFormatError(
        path,
        `line ${lineNo}: expected 5 comma-separated fields, got ${fields.length}`,
      );
    }
    const x = parseField(path, lineNo, "x", fields[0]!);
    const iqm = parseField(path, lineNo, "iqm", fields[1]!);
    const ciLo = parseField(path, lineNo, "ci_lo", fields[2]!);
    const ciHi = parseField(path, lineNo, "ci_hi", fields[3]!);
    const nSeeds = parseField(path, lineNo, "n_seeds", fields[4]!);

    if (!Number.isInteger(x) || x < 0) {
      throw new SummaryFormatError(
        path,
        `line ${lineNo}: x must be a non-negative integer, got ${fields[0]}`,
      );
    }
    if (!Number.isInteger(nSeeds) || nSeeds < 1) {
      throw new SummaryFormatError(
        path,
        `line ${lineNo}: n_seeds must be a positive integer, got ${fields[4]}`,
      );
    }
    for (const [name, v] of [
      ["iqm", iqm],
      ["ci_lo", ciLo],
      ["ci_hi", ciHi],
    ] as const) {
      if (!Number.isFinite(v)) {
        throw new SummaryFormatError(
          path,
          `line ${lineNo}: ${name} must be finite, got ${v}`,
        );
      }
    }
    const prev = rows[rows.length - 1];
    if (prev !== undefined && x <= prev.x) {
      throw new SummaryFormatError(
        path,
        `line ${lineNo}: x must increase (${prev.x} then ${x})`,
      );
    }
    rows.push({ x, iqm, ciLo, ciHi, nSeeds });
  }

  if (!sawHeader) {
    throw new SummaryFormatError(path, `missing header ${JSON.stringify(SUMMARY_HEADER)}`);
  }
  if (axis === null) {
    throw new SummaryFormatError(path, "missing '# axis=...' comment");
  }
  if (rows.length === 0) {
    throw new SummaryFormatError(path, "no data rows");
  }
  return { path, config, axis, codeVersion, rows };
}

export function readSummaryFile(path: string): SummaryFile {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    const code = (err as NodeJS.ErrnoException).code;
    if (code === "ENOENT") {
      throw new SummaryFormatError(path, "no such file");
    }
    throw new SummaryFormatError(path, `cannot read file (${code ?? err})`);
  }
  return parseSummaryText(path, text);
}
