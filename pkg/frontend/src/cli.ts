#!/usr/bin/env node
/**
 * Render one figure from simulator CSV output.
 *
 * Usage:
 *   pqrc-render --figure fig2a --input memory_2I.csv --label "2 indist." \
 *               --input memory_2D.csv --label "2 dist." --out fig2a.svg
 *   pqrc-render --list
 *
 * Inputs are never modified; output is a standalone SVG whose plotted
 * medians and error bars are embedded as data-median / data-std
 * attributes. Exit code 1 on any error (unknown figure, missing file or
 * column), 0 otherwise.
 */

import { writeFileSync } from "fs";
import { FIGURE_IDS, renderFigure, RenderRequest } from "./figures.js";

interface CliArgs {
  figure?: string;
  inputs: string[];
  labels: string[];
  colors: string[];
  out?: string;
  title?: string;
  list: boolean;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { inputs: [], labels: [], colors: [], list: false };
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    if (flag === "--list") {
      args.list = true;
      continue;
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    i += 1;
    switch (flag) {
      case "--figure":
        args.figure = value;
        break;
      case "--input":
        args.inputs.push(value);
        break;
      case "--label":
        args.labels.push(value);
        break;
      case "--color":
        args.colors.push(value);
        break;
      case "--out":
        args.out = value;
        break;
      case "--title":
        args.title = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  if (args.list) {
    for (const id of FIGURE_IDS) console.log(id);
    return 0;
  }
  if (!args.figure || !args.out) {
    console.error(
      "usage: pqrc-render --figure <id> --input <csv> [--input <csv> ...] " +
        "[--label <text> ...] [--color <css> ...] [--title <text>] --out <svg>",
    );
    return 1;
  }
  const request: RenderRequest = {
    figure: args.figure,
    inputs: args.inputs,
    labels: args.labels.length ? args.labels : undefined,
    colors: args.colors.length ? args.colors : undefined,
    title: args.title,
  };
  try {
    const svg = renderFigure(request);
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`render failed: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
