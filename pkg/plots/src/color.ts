/** Color assignment, including the monotone-by-beta shading rule. */

import type { SummaryFile } from "./summary.js";

/** Okabe-Ito palette, colorblind safe; order is the assignment order. */
export const CATEGORICAL = [
  "#0072b2",
  "#d55e00",
  "#009e73",
  "#cc79a7",
  "#e69f00",
  "#56b4e9",
  "#666666",
  "#000000",
] as const;

// Sequential blues for the replay-ratio family; interpolation endpoints.
const SHADE_LIGHT = "#9ecae1";
const SHADE_DARK = "#08306b";

function hexToRgb(hex: string): [number, number, number] {
  const v = parseInt(hex.slice(1), 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

function rgbToHex(rgb: [number, number, number]): string {
  return (
    "#" +
    rgb
      .map((c) => Math.round(c).toString(16).padStart(2, "0"))
      .join("")
  );
}

function lerpHex(a: string, b: string, t: number): string {
  const ra = hexToRgb(a);
  const rb = hexToRgb(b);
  return rgbToHex([
    ra[0] + (rb[0] - ra[0]) * t,
    ra[1] + (rb[1] - ra[1]) * t,
    ra[2] + (rb[2] - ra[2]) * t,
  ]);
}

/** Relative luminance proxy; only used to order shades in tests. */
export function luminance(hex: string): number {
  const [r, g, b] = hexToRgb(hex);
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

/**
 * Augmented replay ratio implied by an echoed config: gradient updates per
 * augmented transition generated. Returns null when the config does not
 * describe an augmenting run.
 */
export function augmentedReplayRatio(config: Record<string, string>): number | null {
  const kind = config["daf.kind"];
  if (kind === undefined || kind === "none") return null;
  const updateEvery = Number(config["update_every"]);
  const updatesPerCycle = Number(config["updates_per_cycle"]);
  const m = Number(config["aug.m"]);
  const everyN = Number(config["aug.every_n_observed"] ?? "1");
  if (![updateEvery, updatesPerCycle, m, everyN].every(Number.isFinite)) return null;
  if (m <= 0 || updateEvery <= 0) return null;
  return (updatesPerCycle * everyN) / (updateEvery * m);
}

/** Config keys whose values are not identical across the group. */
export function differingKeys(files: SummaryFile[]): string[] {
  const keys = new Set<string>();
  for (const f of files) for (const k of Object.keys(f.config)) keys.add(k);
  const out: string[] = [];
  for (const k of [...keys].sort()) {
    const values = new Set(files.map((f) => f.config[k] ?? ""));
    if (values.size > 1) out.push(k);
  }
  return out;
}

/**
 * Colors for one panel, aligned with `files`.
 *
 * A panel whose configs differ only in the augmentation ratio is a
 * replay-ratio comparison: every curve gets the same hue with darkness
 * strictly monotone in beta, darker for smaller beta. Everything else
 * gets the categorical palette in input order.
 */
export function assignColors(files: SummaryFile[]): string[] {
  if (files.length >= 2) {
    const diff = differingKeys(files);
    const betas = files.map((f) => augmentedReplayRatio(f.config));
    const sorted = [...betas].filter((b): b is number => b !== null).sort((a, b) => a - b);
    const distinct = new Set(sorted).size === files.length;
    if (
      diff.length > 0 &&
      diff.every((k) => k === "aug.m") &&
      betas.every((b) => b !== null) &&
      distinct
    ) {
      // rank 0 = smallest beta = darkest
      return betas.map((b) => {
        const rank = sorted.indexOf(b as number);
        const t = files.length === 1 ? 0 : rank / (files.length - 1);
        return lerpHex(SHADE_DARK, SHADE_LIGHT, t);
      });
    }
  }
  return files.map((_, i) => CATEGORICAL[i % CATEGORICAL.length]!);
}
