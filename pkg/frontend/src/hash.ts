/** Deterministic hashed character n-gram encoder.
 *
 * This is the built-in stand-in for a real sentence encoder: every token's
 * 3 to 5 character grams map to fixed pseudo-Gaussian vectors keyed by a
 * stable string hash, so the same text always yields the same vectors with
 * no model download and no native dependencies. Select it with a model id
 * of the form "hash/<dim>".
 */

const GRAM_MIN = 3;
const GRAM_MAX = 5;

/** FNV-1a over the UTF-8 bytes of a string, 64-bit. */
export function fnv1a64(input: string): bigint {
  const bytes = new TextEncoder().encode(input);
  let hash = 0xcbf29ce484222325n;
  for (const byte of bytes) {
    hash ^= BigInt(byte);
    hash = (hash * 0x100000001b3n) & 0xffffffffffffffffn;
  }
  return hash;
}

/** splitmix64; the standard way to stretch one 64-bit seed into a stream. */
function splitmix64(state: bigint): () => bigint {
  let s = state & 0xffffffffffffffffn;
  return () => {
    s = (s + 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
    let z = s;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
    return z ^ (z >> 31n);
  };
}

/** Uniform double in (0, 1] from the top 53 bits of a 64-bit word. */
function toUnit(word: bigint): number {
  return (Number(word >> 11n) + 1) / 9007199254740992;
}

/** Fixed pseudo-Gaussian vector for a gram, via Box-Muller. */
export function gramVector(gram: string, dim: number, seed: number): Float64Array {
  const next = splitmix64(fnv1a64(`${seed}:${gram}`));
  const out = new Float64Array(dim);
  for (let i = 0; i < dim; i += 2) {
    const u1 = toUnit(next());
    const u2 = toUnit(next());
    const radius = Math.sqrt(-2 * Math.log(u1));
    const angle = 2 * Math.PI * u2;
    out[i] = radius * Math.cos(angle);
    if (i + 1 < dim) {
      out[i + 1] = radius * Math.sin(angle);
    }
  }
  return out;
}

export function tokenizeText(text: string): string[] {
  return text
    .toLowerCase()
    .split(/\s+/)
    .map((t) => t.replace(/^[^\p{L}\p{N}]+|[^\p{L}\p{N}]+$/gu, ""))
    .filter((t) => t.length > 0);
}

/** Unit vector for one token: sum of its wrapped-gram vectors, normalized. */
export function tokenVector(token: string, dim: number, seed: number): Float64Array {
  const wrapped = `<${token}>`;
  const acc = new Float64Array(dim);
  let grams = 0;
  for (let size = GRAM_MIN; size <= GRAM_MAX; size++) {
    for (let start = 0; start + size <= wrapped.length; start++) {
      const vec = gramVector(wrapped.slice(start, start + size), dim, seed);
      for (let i = 0; i < dim; i++) acc[i] += vec[i];
      grams++;
    }
  }
  if (grams === 0) {
    const vec = gramVector(wrapped, dim, seed);
    for (let i = 0; i < dim; i++) acc[i] += vec[i];
  }
  let norm = 0;
  for (let i = 0; i < dim; i++) norm += acc[i] * acc[i];
  norm = Math.sqrt(norm);
  if (norm === 0) {
    throw new Error(`token ${JSON.stringify(token)} hashed to a zero vector`);
  }
  for (let i = 0; i < dim; i++) acc[i] /= norm;
  return acc;
}

/** Token-by-token encoding of a text, truncated to maxTokens. */
export function encodeTokens(
  text: string,
  dim: number,
  maxTokens: number,
  seed = 0,
): Float64Array[] {
  const tokens = tokenizeText(text).slice(0, maxTokens);
  return tokens.map((t) => tokenVector(t, dim, seed));
}
