import { renameSync, writeFileSync } from "node:fs";

import { fieldText, pickIdColumn, readCsv } from "./csv.js";
import { loadModel } from "./model.js";
import { EmbeddingRecord, serializeRecords } from "./jsonl.js";

export interface ExportOptions {
  input: string;
  field: string;
  model: string;
  maxLen: number;
  pool: "mean" | "none";
  out: string;
}

export interface ExportSummary {
  records: number;
  dim: number;
}

function meanPool(tokens: number[][]): number[] {
  const dim = tokens[0].length;
  const acc = new Array<number>(dim).fill(0);
  for (const row of tokens) {
    for (let i = 0; i < dim; i++) acc[i] += row[i];
  }
  let norm = 0;
  for (let i = 0; i < dim; i++) {
    acc[i] /= tokens.length;
    norm += acc[i] * acc[i];
  }
  norm = Math.sqrt(norm);
  if (norm === 0) {
    throw new Error("pooled vector is zero");
  }
  for (let i = 0; i < dim; i++) acc[i] /= norm;
  return acc;
}

/** Read the CSV, embed the requested field, and write exchange JSONL. */
export async function runExport(options: ExportOptions): Promise<ExportSummary> {
  if (options.maxLen <= 0) {
    throw new Error(`--max-len must be positive, got ${options.maxLen}`);
  }
  const table = readCsv(options.input);
  const idColumn = pickIdColumn(table.header);
  const encoder = await loadModel(options.model, options.maxLen);

  const records: EmbeddingRecord[] = [];
  const seen = new Set<string>();
  let dim = 0;
  for (let r = 0; r < table.rows.length; r++) {
    const row = table.rows[r];
    const id = (row[idColumn] ?? "").trim();
    if (!id) {
      throw new Error(`${options.input}:${r + 2}: empty ${idColumn}`);
    }
    if (seen.has(id)) {
      throw new Error(`${options.input}:${r + 2}: duplicate ${idColumn} ${JSON.stringify(id)}`);
    }
    seen.add(id);
    const text = fieldText(row, table.header, options.field).trim();
    if (!text) {
      throw new Error(`${options.input}:${r + 2}: empty text for id ${JSON.stringify(id)}`);
    }
    const tokens = await encoder.encode(text);
    if (tokens.length === 0) {
      throw new Error(`${options.input}:${r + 2}: no tokens for id ${JSON.stringify(id)}`);
    }
    if (dim === 0) {
      dim = tokens[0].length;
    }
    if (options.pool === "mean") {
      records.push({ id, dim, values: meanPool(tokens) });
    } else {
      tokens.forEach((vector, index) => {
        records.push({ id: `${id}#t${index}`, dim, values: vector });
      });
    }
  }
  if (records.length === 0) {
    throw new Error(`${options.input}: no data rows`);
  }

  const payload = serializeRecords(records);
  const tmp = `${options.out}.tmp-${process.pid}`;
  writeFileSync(tmp, payload, "utf-8");
  renameSync(tmp, options.out);
  return { records: records.length, dim };
}
