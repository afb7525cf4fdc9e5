/** JSONL exchange format: one {"id", "dim", "values"} object per line. */

export interface EmbeddingRecord {
  id: string;
  dim: number;
  values: number[];
}

/**
 * Serialize one record. Values are written with nine significant fraction
 * digits in exponential notation so files survive load/re-export cycles
 * well inside a 1e-6 tolerance, and JSON.stringify's shortest-round-trip
 * formatting never makes two exports of the same data differ.
 */
export function formatRecord(record: EmbeddingRecord): string {
  if (!record.id) {
    throw new Error("record id must be a non-empty string");
  }
  if (!Number.isInteger(record.dim) || record.dim <= 0) {
    throw new Error(`record ${record.id}: dim must be a positive integer, got ${record.dim}`);
  }
  if (record.values.length !== record.dim) {
    throw new Error(
      `record ${record.id}: ${record.values.length} values but dim ${record.dim}`,
    );
  }
  const parts: string[] = new Array(record.values.length);
  for (let i = 0; i < record.values.length; i++) {
    const v = record.values[i];
    if (!Number.isFinite(v)) {
      throw new Error(`record ${record.id}: non-finite value at index ${i}`);
    }
    parts[i] = v.toExponential(9);
  }
  return `{"id": ${JSON.stringify(record.id)}, "dim": ${record.dim}, "values": [${parts.join(", ")}]}`;
}

export function serializeRecords(records: EmbeddingRecord[]): string {
  return records.map(formatRecord).join("\n") + "\n";
}

/** Parse and validate a JSONL payload, mirroring what the consumer enforces. */
export function parseRecords(text: string): EmbeddingRecord[] {
  const records: EmbeddingRecord[] = [];
  const seen = new Set<string>();
  let fileDim: number | null = null;
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    const where = `line ${i + 1}`;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`${where}: invalid JSON (${(err as Error).message})`);
    }
    const obj = parsed as Partial<EmbeddingRecord>;
    if (typeof obj.id !== "string" || obj.id.length === 0) {
      throw new Error(`${where}: id must be a non-empty string`);
    }
    if (seen.has(obj.id)) {
      throw new Error(`${where}: duplicate id ${JSON.stringify(obj.id)}`);
    }
    if (typeof obj.dim !== "number" || !Number.isInteger(obj.dim) || obj.dim <= 0) {
      throw new Error(`${where}: dim must be a positive integer`);
    }
    if (!Array.isArray(obj.values) || obj.values.length !== obj.dim) {
      throw new Error(`${where}: values must be an array of length dim`);
    }
    for (const v of obj.values) {
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new Error(`${where}: values must all be finite numbers`);
      }
    }
    if (fileDim === null) {
      fileDim = obj.dim;
    } else if (obj.dim !== fileDim) {
      throw new Error(`${where}: dim ${obj.dim} differs from earlier dim ${fileDim}`);
    }
    seen.add(obj.id);
    records.push({ id: obj.id, dim: obj.dim, values: obj.values as number[] });
  }
  return records;
}
