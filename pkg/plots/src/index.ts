export {
  AXES,
  SummaryFormatError,
  parseSummaryText,
  readSummaryFile,
} from "./summary.js";
export type { Axis, SummaryFile, SummaryRow } from "./summary.js";
export {
  assignColors,
  augmentedReplayRatio,
  differingKeys,
  luminance,
} from "./color.js";
export { buildFigure, dumpModel, PlotSpecError } from "./figure.js";
export type { FigureModel, Panel, PanelSpec, PlotSpec, Series } from "./figure.js";
export { niceTicks, renderSvg, tickLabel } from "./svg.js";
export { renderPng } from "./png.js";
export { main } from "./cli.js";
