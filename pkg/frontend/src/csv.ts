import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface CsvTable {
  header: string[];
  rows: Record<string, string>[];
}

export function readCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    const row = first.row === undefined ? "?" : String(first.row + 2);
    throw new Error(`${path}:${row}: ${first.message}`);
  }
  const header = parsed.meta.fields ?? [];
  if (header.length === 0) {
    throw new Error(`${path}: no header row`);
  }
  return { header, rows: parsed.data };
}

/** The id column: an explicit *_id column when present, else "id". */
export function pickIdColumn(header: string[]): string {
  for (const preferred of ["arg_id", "key_point_id", "id"]) {
    if (header.includes(preferred)) return preferred;
  }
  const suffixed = header.find((h) => h.endsWith("_id"));
  if (suffixed) return suffixed;
  throw new Error(`no id column found among: ${header.join(", ")}`);
}

/**
 * Resolve a field spec against a row. "col" reads one column;
 * "colA+colB" joins the named columns with single spaces, which is how
 * key point records combine topic and key point text.
 */
export function fieldText(row: Record<string, string>, header: string[], spec: string): string {
  const columns = spec.split("+");
  const parts: string[] = [];
  for (const column of columns) {
    if (!header.includes(column)) {
      throw new Error(`field column ${JSON.stringify(column)} not in header: ${header.join(", ")}`);
    }
    parts.push(row[column] ?? "");
  }
  return parts.join(" ");
}
