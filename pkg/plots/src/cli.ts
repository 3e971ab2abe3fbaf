#!/usr/bin/env node
/**
 * plot --in <summary...> --x {env_steps|update_count} --out FILE.png
 *
 * Extras: --dump writes the data-level JSON (the numbers behind every curve
 * and band, verbatim from the CSVs), --panel-by splits inputs into one
 * panel per value of an echoed config key, --label overrides legend text.
 */

import { realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import yargs from "yargs";

import { buildFigure, dumpModel, PlotSpecError } from "./figure.js";
import type { PanelSpec, PlotSpec } from "./figure.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";
import { readSummaryFile, SummaryFormatError, AXES } from "./summary.js";
import type { Axis } from "./summary.js";

function groupPanels(
  files: string[],
  labels: string[] | undefined,
  panelBy: string | undefined,
): PanelSpec[] {
  if (panelBy === undefined) {
    return [{ files, ...(labels !== undefined ? { labels } : {}) }];
  }
  // one panel per distinct value of the key, ordered by first appearance
  const order: string[] = [];
  const groups = new Map<string, { files: string[]; labels: string[] }>();
  files.forEach((path, i) => {
    const parsed = readSummaryFile(path);
    const value = parsed.config[panelBy];
    if (value === undefined) {
      throw new SummaryFormatError(path, `config has no key ${JSON.stringify(panelBy)}`);
    }
    let g = groups.get(value);
    if (g === undefined) {
      g = { files: [], labels: [] };
      groups.set(value, g);
      order.push(value);
    }
    g.files.push(path);
    if (labels?.[i] !== undefined) g.labels.push(labels[i]);
  });
  return order.map((value) => {
    const g = groups.get(value)!;
    const spec: PanelSpec = { files: g.files, title: `${panelBy}=${value}` };
    if (g.labels.length === g.files.length && g.labels.length > 0) {
      spec.labels = g.labels;
    }
    return spec;
  });
}

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("plot")
    .usage("$0 --in <summary...> --x <axis> --out FILE.png")
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "summary CSVs written by aggregate, one curve each",
    })
    .option("x", {
      type: "string",
      choices: AXES,
      demandOption: true,
      describe: "x axis; must match the axis the summaries were built on",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output PNG path",
    })
    .option("dump", {
      type: "string",
      describe: "also write the plotted numbers as JSON",
    })
    .option("label", {
      type: "string",
      array: true,
      describe: "legend labels, one per input, in order",
    })
    .option("panel-by", {
      type: "string",
      describe: "split inputs into panels by this echoed config key",
    })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new PlotSpecError(msg);
    })
    .help(false)
    .version(false);

  try {
    const args = parser.parseSync();
    if (args.label !== undefined && args.label.length !== args.in.length) {
      throw new PlotSpecError(
        `got ${args.label.length} labels for ${args.in.length} inputs`,
      );
    }
    const spec: PlotSpec = {
      panels: groupPanels(args.in, args.label, args.panelBy),
      xAxis: args.x as Axis,
      output: args.out,
      ...(args.dump !== undefined ? { dump: args.dump } : {}),
    };
    const model = buildFigure(spec);
    if (spec.dump !== undefined) {
      writeFileSync(spec.dump, JSON.stringify(dumpModel(model), null, 1) + "\n");
    }
    writeFileSync(spec.output, renderPng(renderSvg(model)));
    return 0;
  } catch (err) {
    if (err instanceof SummaryFormatError || err instanceof PlotSpecError) {
      process.stderr.write(`plot: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

function runDirect(): boolean {
  const entry = process.argv[1];
  if (entry === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(entry)).href;
  } catch {
    return false;
  }
}

if (runDirect()) {
  process.exit(await main(process.argv.slice(2)));
}
