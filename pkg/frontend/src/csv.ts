/**
 * Minimal CSV reading for the simulator's output files.
 *
 * The files are machine-written with a fixed header, comma separators and
 * no quoting, so parsing is a straight split.
 */

import { readFileSync } from "fs";

export interface CsvTable {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("CSV is empty (missing header row)");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(
        `CSV row ${i + 2} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    return cells;
  });
  return { columns, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Index of a required column; throws a descriptive error when missing. */
export function columnIndex(table: CsvTable, name: string): number {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new Error(
      `missing column "${name}" (found: ${table.columns.join(", ")})`,
    );
  }
  return index;
}
