/**
 * SVG renderer for the figure model. Pure string building: same model,
 * same bytes. One sub-plot per panel, laid out in rows of up to three.
 */

import type { FigureModel, Panel, Series } from "./figure.js";

export const PANEL_WIDTH = 560;
export const PANEL_HEIGHT = 420;
export const MARGIN = { left: 66, top: 40, right: 18, bottom: 52 } as const;
const MAX_COLS = 3;

const FONT = "DejaVu Sans";
const BAND_OPACITY = 0.22;

const AXIS_NAMES = { env_steps: "env steps", update_count: "updates" } as const;

/** Fixed two-decimal pixel coordinates keep the output byte-stable. */
function px(v: number): string {
  return v.toFixed(2).replace(/\.00$/, "").replace(/(\.\d)0$/, "$1");
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Tick positions with a 1/2/5 step covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, maxTicks = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const rawStep = span / Math.max(1, maxTicks - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * mag;
    if (span / step <= maxTicks - 1) break;
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    // snap near-zero values produced by float stepping
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Compact tick labels: 250000 -> 250k, 1500000 -> 1.5M. */
export function tickLabel(v: number): string {
  const fmt = (x: number): string => {
    const s = x.toFixed(2).replace(/0+$/, "").replace(/\.$/, "");
    return s === "-0" ? "0" : s;
  };
  if (Math.abs(v) >= 1e6) return fmt(v / 1e6) + "M";
  if (Math.abs(v) >= 1e3) return fmt(v / 1e3) + "k";
  return fmt(v);
}

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function panelDomains(panel: Panel): { x0: number; x1: number; y0: number; y1: number } {
  let xMax = 1;
  let yMax = 1;
  let yMin = 0;
  for (const s of panel.series) {
    for (const v of s.x) xMax = Math.max(xMax, v);
    for (const v of s.ciHi) yMax = Math.max(yMax, v);
    for (const v of s.ciLo) yMin = Math.min(yMin, v);
  }
  return { x0: 0, x1: xMax, y0: yMin, y1: yMax };
}

function seriesPaths(s: Series, xs: Scale, ys: Scale): string {
  const parts: string[] = [];
  if (s.x.length > 1) {
    const upper = s.x.map((x, i) => `${px(xs(x))},${px(ys(s.ciHi[i]!))}`);
    const lower = s.x
      .map((x, i) => `${px(xs(x))},${px(ys(s.ciLo[i]!))}`)
      .reverse();
    parts.push(
      `<path d="M${upper.join(" L")} L${lower.join(" L")} Z" ` +
        `fill="${s.color}" fill-opacity="${BAND_OPACITY}" stroke="none"/>`,
    );
    const line = s.x.map((x, i) => `${px(xs(x))},${px(ys(s.iqm[i]!))}`);
    parts.push(
      `<path d="M${line.join(" L")}" fill="none" stroke="${s.color}" stroke-width="2"/>`,
    );
  } else {
    // a single checkpoint cannot make a path; draw a point with an error bar
    const x = px(xs(s.x[0]!));
    parts.push(
      `<line x1="${x}" y1="${px(ys(s.ciLo[0]!))}" x2="${x}" y2="${px(ys(s.ciHi[0]!))}" ` +
        `stroke="${s.color}" stroke-width="2" opacity="${BAND_OPACITY + 0.3}"/>`,
    );
    parts.push(
      `<circle cx="${x}" cy="${px(ys(s.iqm[0]!))}" r="4" fill="${s.color}"/>`,
    );
  }
  return parts.join("\n");
}

function renderPanel(panel: Panel, xAxisName: string, ox: number, oy: number): string {
  const left = ox + MARGIN.left;
  const top = oy + MARGIN.top;
  const right = ox + PANEL_WIDTH - MARGIN.right;
  const bottom = oy + PANEL_HEIGHT - MARGIN.bottom;
  const dom = panelDomains(panel);
  const xs = linearScale(dom.x0, dom.x1, left, right);
  const ys = linearScale(dom.y0, dom.y1, bottom, top);

  const parts: string[] = [];

  for (const t of niceTicks(dom.x0, dom.x1)) {
    const x = px(xs(t));
    parts.push(
      `<line x1="${x}" y1="${px(top)}" x2="${x}" y2="${px(bottom)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${px(bottom + 18)}" font-family="${FONT}" font-size="12" ` +
        `fill="#333333" text-anchor="middle">${tickLabel(t)}</text>`,
    );
  }
  for (const t of niceTicks(dom.y0, dom.y1)) {
    const y = px(ys(t));
    parts.push(
      `<line x1="${px(left)}" y1="${y}" x2="${px(right)}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(left - 8)}" y="${px(ys(t) + 4)}" font-family="${FONT}" font-size="12" ` +
        `fill="#333333" text-anchor="end">${tickLabel(t)}</text>`,
    );
  }

  for (const s of panel.series) parts.push(seriesPaths(s, xs, ys));

  parts.push(
    `<rect x="${px(left)}" y="${px(top)}" width="${px(right - left)}" height="${px(bottom - top)}" ` +
      `fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  parts.push(
    `<text x="${px((left + right) / 2)}" y="${px(bottom + 38)}" font-family="${FONT}" ` +
      `font-size="13" fill="#000000" text-anchor="middle">${esc(xAxisName)}</text>`,
  );
  parts.push(
    `<text x="${px(ox + 16)}" y="${px((top + bottom) / 2)}" font-family="${FONT}" ` +
      `font-size="13" fill="#000000" text-anchor="middle" ` +
      `transform="rotate(-90 ${px(ox + 16)} ${px((top + bottom) / 2)})">IQM success rate</text>`,
  );
  if (panel.title !== null) {
    parts.push(
      `<text x="${px((left + right) / 2)}" y="${px(oy + 24)}" font-family="${FONT}" ` +
        `font-size="14" fill="#000000" text-anchor="middle">${esc(panel.title)}</text>`,
    );
  }

  // legend, top left of the plot area; sparse-reward curves start low so
  // this corner is usually clear
  const charW = 7.2;
  const labelW = Math.max(...panel.series.map((s) => s.label.length)) * charW;
  const legendW = 34 + labelW + 8;
  const legendH = panel.series.length * 18 + 8;
  const lx = left + 10;
  const ly = top + 10;
  parts.push(
    `<rect x="${px(lx)}" y="${px(ly)}" width="${px(legendW)}" height="${px(legendH)}" ` +
      `fill="#ffffff" fill-opacity="0.85" stroke="#999999" stroke-width="0.5"/>`,
  );
  panel.series.forEach((s, i) => {
    const cy = ly + 13 + i * 18;
    parts.push(
      `<line x1="${px(lx + 6)}" y1="${px(cy)}" x2="${px(lx + 28)}" y2="${px(cy)}" ` +
        `stroke="${s.color}" stroke-width="2.5"/>`,
    );
    parts.push(
      `<text x="${px(lx + 34)}" y="${px(cy + 4)}" font-family="${FONT}" font-size="12" ` +
        `fill="#000000">${esc(s.label)}</text>`,
    );
  });

  return parts.join("\n");
}

export function renderSvg(model: FigureModel): string {
  const n = model.panels.length;
  const cols = Math.min(MAX_COLS, n);
  const rows = Math.ceil(n / cols);
  const width = cols * PANEL_WIDTH;
  const height = rows * PANEL_HEIGHT;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
  ];
  model.panels.forEach((panel, i) => {
    const ox = (i % cols) * PANEL_WIDTH;
    const oy = Math.floor(i / cols) * PANEL_HEIGHT;
    parts.push(renderPanel(panel, AXIS_NAMES[model.xAxis], ox, oy));
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
