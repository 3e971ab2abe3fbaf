/** SVG to PNG rasterization with a pinned font set for stable bytes. */

import { existsSync } from "node:fs";

import { Resvg } from "@resvg/resvg-js";

// DejaVu ships with the base image; pinning the files (instead of letting
// resvg scan the system) keeps output identical across environments that
// share these fonts.
const FONT_FILES = [
  "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
  "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf",
];

export function renderPng(svg: string): Buffer {
  const fontFiles = FONT_FILES.filter((p) => existsSync(p));
  const resvg = new Resvg(svg, {
    font: {
      loadSystemFonts: fontFiles.length === 0,
      fontFiles,
      defaultFontFamily: "DejaVu Sans",
    },
  });
  return resvg.render().asPng();
}
