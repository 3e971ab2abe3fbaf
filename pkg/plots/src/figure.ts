/**
 * Figure model: the single place where summary files turn into something
 * drawable. The model carries the CSV numbers untouched; scales and pixel
 * work live in the SVG layer, statistics live nowhere here.
 */

import { basename } from "node:path";

import { assignColors, differingKeys } from "./color.js";
import type { Axis, SummaryFile } from "./summary.js";
import { readSummaryFile, SummaryFormatError } from "./summary.js";

export interface PanelSpec {
  /** Summary CSV paths, one curve each. */
  files: string[];
  title?: string;
  /** Optional per-curve legend labels, aligned with `files`. */
  labels?: string[];
}

export interface PlotSpec {
  panels: PanelSpec[];
  xAxis: Axis;
  /** Output PNG path. */
  output: string;
  /** Optional path for the data-level JSON dump. */
  dump?: string;
}

export interface Series {
  label: string;
  file: string;
  color: string;
  /** Column arrays exactly as parsed from the CSV. */
  x: number[];
  iqm: number[];
  ciLo: number[];
  ciHi: number[];
  nSeeds: number[];
}

export interface Panel {
  title: string | null;
  series: Series[];
}

export interface FigureModel {
  xAxis: Axis;
  panels: Panel[];
}

export class PlotSpecError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PlotSpecError";
  }
}

function fileStem(path: string): string {
  return basename(path).replace(/_summary\.csv$/, "");
}

/**
 * Legend label for one curve: the config entries that distinguish it within
 * its panel, or the file stem when nothing differs (single-file panels).
 */
function autoLabel(file: SummaryFile, diff: string[]): string {
  if (diff.length === 0) return fileStem(file.path);
  return diff.map((k) => `${k}=${file.config[k] ?? "?"}`).join(", ");
}

export function buildFigure(spec: PlotSpec): FigureModel {
  if (spec.panels.length === 0) {
    throw new PlotSpecError("no input files");
  }
  const panels: Panel[] = [];
  for (const panelSpec of spec.panels) {
    if (panelSpec.files.length === 0) {
      throw new PlotSpecError("panel with no input files");
    }
    if (
      panelSpec.labels !== undefined &&
      panelSpec.labels.length !== panelSpec.files.length
    ) {
      throw new PlotSpecError(
        `got ${panelSpec.labels.length} labels for ${panelSpec.files.length} files`,
      );
    }
    const files = panelSpec.files.map(readSummaryFile);
    for (const f of files) {
      if (f.axis !== spec.xAxis) {
        throw new SummaryFormatError(
          f.path,
          `file has axis=${f.axis} but the figure uses --x ${spec.xAxis}`,
        );
      }
    }
    const diff = differingKeys(files);
    const colors = assignColors(files);
    const series = files.map((f, i): Series => ({
      label: panelSpec.labels?.[i] ?? autoLabel(f, diff),
      file: f.path,
      color: colors[i]!,
      x: f.rows.map((r) => r.x),
      iqm: f.rows.map((r) => r.iqm),
      ciLo: f.rows.map((r) => r.ciLo),
      ciHi: f.rows.map((r) => r.ciHi),
      nSeeds: f.rows.map((r) => r.nSeeds),
    }));
    panels.push({ title: panelSpec.title ?? null, series });
  }
  return { xAxis: spec.xAxis, panels };
}

/** JSON value of the data-level dump; numbers are the CSV numbers. */
export function dumpModel(model: FigureModel): unknown {
  return {
    x_axis: model.xAxis,
    panels: model.panels.map((p) => ({
      title: p.title,
      series: p.series.map((s) => ({
        label: s.label,
        file: s.file,
        color: s.color,
        x: s.x,
        iqm: s.iqm,
        ci_lo: s.ciLo,
        ci_hi: s.ciHi,
        n_seeds: s.nSeeds,
      })),
    })),
  };
}
