/**
 * Reader for the producer's CSV dialect.
 *
 * Files start with zero or more "# key = value" metadata lines, then one
 * header row, then data rows. Cells never contain commas, quotes or
 * newlines (the producer rejects such values at write time), so a plain
 * comma split is an exact parse, not an approximation.
 */

import { TableSchema } from "./schema";

export class CsvError extends Error {
  constructor(message: string, readonly path: string) {
    super(`${path}: ${message}`);
    this.name = "CsvError";
  }
}

export interface CsvTable {
  readonly path: string;
  readonly meta: Record<string, string>;
  readonly header: readonly string[];
  readonly rows: readonly (readonly string[])[];
}

export function parseCsv(text: string, path = "<memory>"): CsvTable {
  const lines = text.split(/\r?\n/);
  // a trailing newline leaves one empty final entry; drop it
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }

  const meta: Record<string, string> = {};
  let i = 0;
  for (; i < lines.length; i += 1) {
    const line = lines[i]!;
    if (!line.startsWith("#")) {
      break;
    }
    const body = line.replace(/^#\s?/, "");
    const sep = body.indexOf(" = ");
    if (sep <= 0) {
      throw new CsvError(`line ${i + 1}: malformed metadata line`, path);
    }
    const key = body.slice(0, sep);
    // values may be empty ("# param.x = ")
    meta[key] = body.slice(sep + 3);
  }

  if (i >= lines.length) {
    throw new CsvError("missing header row", path);
  }
  const header = lines[i]!.split(",");
  if (header.some((c) => c === "")) {
    throw new CsvError(`line ${i + 1}: empty header cell`, path);
  }
  if (new Set(header).size !== header.length) {
    throw new CsvError(`line ${i + 1}: duplicate header cell`, path);
  }
  i += 1;

  const rows: string[][] = [];
  for (; i < lines.length; i += 1) {
    const line = lines[i]!;
    if (line === "") {
      throw new CsvError(`line ${i + 1}: blank line inside table`, path);
    }
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${header.length} cells, got ${cells.length}`,
        path,
      );
    }
    rows.push(cells);
  }

  return { path, meta, header, rows };
}

/**
 * Parse one numeric cell. The producer writes floats with printf %.17g,
 * so besides ordinary decimals the tokens nan, inf and -inf occur.
 */
export function parseNumber(cell: string): number {
  switch (cell) {
    case "nan":
      return NaN;
    case "inf":
      return Infinity;
    case "-inf":
      return -Infinity;
  }
  if (cell.trim() === "") {
    throw new Error("empty numeric cell");
  }
  const v = Number(cell);
  if (Number.isNaN(v)) {
    throw new Error(`not a number: ${JSON.stringify(cell)}`);
  }
  return v;
}

/** Header must equal the frozen schema exactly; numeric columns must parse. */
export function validateTable(table: CsvTable, schema: TableSchema): void {
  const want = schema.columns.join(",");
  const got = table.header.join(",");
  if (want !== got) {
    throw new CsvError(`header mismatch: expected "${want}", got "${got}"`, table.path);
  }
  for (const name of schema.numeric) {
    const idx = table.header.indexOf(name);
    for (let r = 0; r < table.rows.length; r += 1) {
      const cell = table.rows[r]![idx]!;
      try {
        parseNumber(cell);
      } catch (err) {
        throw new CsvError(
          `column ${name}, data row ${r + 1}: ${(err as Error).message}`,
          table.path,
        );
      }
    }
  }
}

export function columnIndex(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`no column ${JSON.stringify(name)}`, table.path);
  }
  return idx;
}

export function stringColumn(table: CsvTable, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx]!);
}

export function numberColumn(table: CsvTable, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => parseNumber(row[idx]!));
}
