/**
 * Canonical JSON re-serialization shared by the wire-equivalence
 * tests: two JSON texts are considered the same message when they
 * parse to equal trees, i.e. when re-serializing with sorted keys and
 * no whitespace yields identical bytes.
 */

/** Recursively re-serialize with sorted keys and no whitespace. */
export function canonical(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonical).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const keys = Object.keys(value as Record<string, unknown>).sort();
    const body = keys.map(
      (k) => `${JSON.stringify(k)}:${canonical((value as Record<string, unknown>)[k])}`,
    );
    return `{${body.join(",")}}`;
  }
  return JSON.stringify(value);
}

export const canonicalText = (jsonText: string): string => canonical(JSON.parse(jsonText));
