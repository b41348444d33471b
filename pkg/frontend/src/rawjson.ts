/** Byte-faithful value extraction from JSON text.
 *
 * The console must display eta/alpha exactly as the server serialized
 * them — no parse/format round trip is allowed to rewrite a digit.  This
 * module finds the raw character span of a top-level key's value inside
 * the response body, so readouts can show the server's bytes verbatim.
 */

function skipString(text: string, i: number): number {
  // i points at the opening quote; returns the index after the closing one
  i += 1;
  while (i < text.length) {
    const ch = text[i];
    if (ch === "\\") {
      i += 2;
      continue;
    }
    if (ch === '"') return i + 1;
    i += 1;
  }
  throw new Error("unterminated string in JSON text");
}

/**
 * Raw text of `key`'s value in the top-level object of `text`.
 * Nested objects/arrays are skipped structurally, so keys inside them
 * never shadow a top-level key.  Throws if the key is absent.
 */
export function rawValue(text: string, key: string): string {
  let i = text.indexOf("{");
  if (i < 0) throw new Error("no JSON object in text");
  i += 1;
  let depth = 0;
  while (i < text.length) {
    const ch = text[i];
    if (ch === undefined) break;
    if (ch === '"') {
      const start = i;
      i = skipString(text, i);
      if (depth === 0) {
        const name = JSON.parse(text.slice(start, i)) as string;
        // move to the ':' then the value
        while (i < text.length && /\s/.test(text[i]!)) i += 1;
        if (text[i] !== ":") continue; // a string value, not a key
        i += 1;
        while (i < text.length && /\s/.test(text[i]!)) i += 1;
        const valueStart = i;
        i = skipValue(text, i);
        if (name === key) return text.slice(valueStart, i).trim();
      }
      continue;
    }
    if (ch === "{" || ch === "[") depth += 1;
    else if (ch === "]" ) depth -= 1;
    else if (ch === "}") {
      if (depth === 0) break;
      depth -= 1;
    }
    i += 1;
  }
  throw new Error(`key ${JSON.stringify(key)} not found at top level`);
}

function skipValue(text: string, i: number): number {
  const ch = text[i];
  if (ch === '"') return skipString(text, i);
  if (ch === "{" || ch === "[") {
    const open = ch;
    const close = ch === "{" ? "}" : "]";
    let depth = 0;
    while (i < text.length) {
      const c = text[i];
      if (c === '"') {
        i = skipString(text, i);
        continue;
      }
      if (c === open) depth += 1;
      else if (c === close) {
        depth -= 1;
        if (depth === 0) return i + 1;
      }
      i += 1;
    }
    throw new Error("unterminated container in JSON text");
  }
  // number / true / false / null
  while (i < text.length && !/[,\}\]\s]/.test(text[i]!)) i += 1;
  return i;
}

/** Raw eta/alpha readout: the server's bytes, or a dash for null. */
export function rawNumberOrDash(text: string, key: string): string {
  const v = rawValue(text, key);
  return v === "null" ? "—" : v;
}
