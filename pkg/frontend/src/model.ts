import { encodeTokens } from "./hash.js";

/** A loaded encoder: text in, per-token vectors out. */
export interface TokenEncoder {
  id: string;
  dim: number;
  encode(text: string): Promise<number[][]>;
}

const HASH_ID = /^hash\/(\d+)$/;

/**
 * Resolve a model id to an encoder.
 *
 * "hash/<dim>" selects the built-in deterministic encoder. Anything else is
 * treated as a feature-extraction model id for @xenova/transformers, loaded
 * lazily; a missing package or checkpoint surfaces as a load error rather
 * than a crash mid-export.
 */
export async function loadModel(modelId: string, maxTokens: number): Promise<TokenEncoder> {
  const hashMatch = HASH_ID.exec(modelId);
  if (hashMatch) {
    const dim = Number(hashMatch[1]);
    if (!Number.isInteger(dim) || dim <= 0) {
      throw new Error(`bad hash encoder dim in model id ${JSON.stringify(modelId)}`);
    }
    return {
      id: modelId,
      dim,
      async encode(text: string): Promise<number[][]> {
        return encodeTokens(text, dim, maxTokens).map((v) => Array.from(v));
      },
    };
  }

  // Computed specifier: the package is optional and may not be installed,
  // so the resolver must not see a literal module name at build time.
  const packageName = "@xenova/transformers";
  let transformers;
  try {
    transformers = await import(packageName);
  } catch (err) {
    throw new Error(
      `model ${JSON.stringify(modelId)} needs the optional @xenova/transformers package ` +
        `(npm i @xenova/transformers), or use a built-in "hash/<dim>" model id ` +
        `(import failed: ${(err as Error).message})`,
    );
  }
  let extractor;
  try {
    extractor = await transformers.pipeline("feature-extraction", modelId);
  } catch (err) {
    throw new Error(`failed to load model ${JSON.stringify(modelId)}: ${(err as Error).message}`);
  }
  return {
    id: modelId,
    dim: 0, // discovered from the first output below
    async encode(text: string): Promise<number[][]> {
      // No pooling here; pooling is the exporter's job so that token-level
      // export works the same across backends.
      const output = await extractor(text, { normalize: false });
      const [, tokens, dim] = output.dims as number[];
      const flat = Array.from(output.data as Float32Array, (v) => Number(v));
      const rows: number[][] = [];
      const keep = Math.min(tokens, maxTokens);
      for (let t = 0; t < keep; t++) {
        rows.push(flat.slice(t * dim, (t + 1) * dim));
      }
      return rows;
    },
  };
}
