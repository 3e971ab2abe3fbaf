import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface RowSpec {
  x: number;
  iqm: string;
  ciLo: string;
  ciHi: string;
  nSeeds: number;
}

/** Compose summary text the way the aggregator writes it. */
export function summaryText(
  config: Record<string, string>,
  axis: string,
  rows: RowSpec[],
): string {
  const lines = Object.keys(config)
    .sort()
    .map((k) => `# ${k}=${config[k]}`);
  lines.push(`# axis=${axis}`);
  lines.push("# code_version=0.1.0");
  lines.push("x,iqm,ci_lo,ci_hi,n_seeds");
  for (const r of rows) {
    lines.push(`${r.x},${r.iqm},${r.ciLo},${r.ciHi},${r.nSeeds}`);
  }
  return lines.join("\n") + "\n";
}

export function rampRows(n: number, base = 0.1): RowSpec[] {
  const rows: RowSpec[] = [];
  for (let i = 0; i < n; i++) {
    const mid = base + 0.8 * (i / Math.max(1, n - 1));
    rows.push({
      x: i * 2500,
      iqm: String(mid),
      ciLo: String(mid - 0.05),
      ciHi: String(mid + 0.05),
      nSeeds: 10,
    });
  }
  return rows;
}

export const BASE_CONFIG: Record<string, string> = {
  "aug.alpha": "1.0",
  "aug.every_n_observed": "1",
  "aug.m": "1",
  batch_size: "256",
  "daf.kind": "translate",
  "daf.p": "0.0",
  "td3.hidden_sizes": "256,256",
  total_env_steps: "100000",
  update_every: "1",
  updates_per_cycle: "1",
};

export function makeTempDir(): string {
  return mkdtempSync(join(tmpdir(), "plots-test-"));
}

export function writeSummary(
  dir: string,
  name: string,
  config: Record<string, string>,
  axis: string,
  rows: RowSpec[],
): string {
  const path = join(dir, name);
  writeFileSync(path, summaryText(config, axis, rows));
  return path;
}
