/**
 * Length-prefixed field packing shared by proof, bundle and message
 * encodings (u32 big-endian length before each field), plus the base64
 * helpers used for JSON transport of binary fields.
 *
 * Base64 is implemented strictly (standard alphabet, mandatory padding,
 * no whitespace) so the encoder/decoder pair matches the other
 * implementations byte for byte instead of inheriting the forgiving
 * WHATWG atob behavior.
 */

const B64_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

const B64_REVERSE = new Map<string, number>();
for (let i = 0; i < B64_ALPHABET.length; i++) B64_REVERSE.set(B64_ALPHABET[i], i);

export function b64(data: Uint8Array): string {
  let out = "";
  let i = 0;
  for (; i + 3 <= data.length; i += 3) {
    const n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += B64_ALPHABET[(n >> 18) & 63] + B64_ALPHABET[(n >> 12) & 63]
      + B64_ALPHABET[(n >> 6) & 63] + B64_ALPHABET[n & 63];
  }
  const rest = data.length - i;
  if (rest === 1) {
    const n = data[i] << 16;
    out += B64_ALPHABET[(n >> 18) & 63] + B64_ALPHABET[(n >> 12) & 63] + "==";
  } else if (rest === 2) {
    const n = (data[i] << 16) | (data[i + 1] << 8);
    out += B64_ALPHABET[(n >> 18) & 63] + B64_ALPHABET[(n >> 12) & 63]
      + B64_ALPHABET[(n >> 6) & 63] + "=";
  }
  return out;
}

export function unb64(text: unknown): Uint8Array {
  if (typeof text !== "string") throw new Error("expected base64 string");
  if (text.length % 4 !== 0) throw new Error("bad base64");
  let padding = 0;
  if (text.endsWith("==")) padding = 2;
  else if (text.endsWith("=")) padding = 1;
  const body = text.slice(0, text.length - padding);
  if (body.includes("=")) throw new Error("bad base64");
  const out = new Uint8Array((text.length / 4) * 3 - padding);
  let outPos = 0;
  for (let i = 0; i < body.length; i += 4) {
    let n = 0;
    let chars = 0;
    for (; chars < 4 && i + chars < body.length; chars++) {
      const v = B64_REVERSE.get(body[i + chars]);
      if (v === undefined) throw new Error("bad base64");
      n = (n << 6) | v;
    }
    n <<= 6 * (4 - chars);
    const bytes = [(n >> 16) & 0xff, (n >> 8) & 0xff, n & 0xff];
    for (let j = 0; j < chars - 1; j++) out[outPos++] = bytes[j];
  }
  // Canonical padding: the dropped bits must be zero, as validate=True
  // style decoders require.
  if (outPos !== out.length) throw new Error("bad base64");
  if (padding > 0) {
    const reencoded = b64(out);
    if (reencoded !== text) throw new Error("bad base64");
  }
  return out;
}

export function packFields(...fields: Uint8Array[]): Uint8Array {
  let total = 0;
  for (const field of fields) total += 4 + field.length;
  const out = new Uint8Array(total);
  const view = new DataView(out.buffer);
  let offset = 0;
  for (const field of fields) {
    view.setUint32(offset, field.length, false);
    out.set(field, offset + 4);
    offset += 4 + field.length;
  }
  return out;
}

/** Parses exactly count fields; rejects truncation and trailing bytes. */
export function unpackFields(data: Uint8Array, count: number): Uint8Array[] {
  const fields: Uint8Array[] = [];
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  let offset = 0;
  for (let i = 0; i < count; i++) {
    if (offset + 4 > data.length) throw new Error("truncated field header");
    const n = view.getUint32(offset, false);
    offset += 4;
    if (offset + n > data.length) throw new Error("truncated field body");
    fields.push(data.slice(offset, offset + n));
    offset += n;
  }
  if (offset !== data.length) throw new Error("trailing bytes");
  return fields;
}
