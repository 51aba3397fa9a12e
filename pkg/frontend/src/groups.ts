/**
 * Typed layer over the pairing curve: scalars, G1/G2/GT elements, the
 * pairing, hash-to-point, randomness, and the canonical wire encodings
 * every other module serializes with.
 *
 * Scalars are plain bigints kept reduced mod ORDER by the functions
 * that produce them; points use additive notation (P.mul(k), P.add(Q)).
 */

import * as bn254 from "./bn254.js";
import { bigintToBytes, bytesConcat, bytesEq, bytesToBigint, utf8ToBytes } from "./bytesutil.js";
import { sha256Concat } from "./sha256.js";

// Order of G1, G2 and GT (the "p" of PublicParams).
export const ORDER = bn254.R;

export const G1_LEN = 65;
export const G2_LEN = 129;
export const GT_LEN = 384;
export const SCALAR_LEN = 32;

const fpBytes = (x: bigint): Uint8Array => bigintToBytes(x, 32);

export function scalarToBytes(x: bigint): Uint8Array {
  if (x < 0n || x >= ORDER) throw new Error("scalar out of range");
  return bigintToBytes(x, SCALAR_LEN);
}

export function scalarFromBytes(data: Uint8Array): bigint {
  if (data.length !== SCALAR_LEN) throw new Error("bad scalar length");
  const x = bytesToBigint(data);
  if (x >= ORDER) throw new Error("scalar out of range");
  return x;
}

/** Element of G1 (prime order; cofactor 1). */
export class G1Point {
  constructor(readonly pt: bn254.G1) {}

  static generator(): G1Point {
    return new G1Point(bn254.G1_GEN);
  }

  static identity(): G1Point {
    return new G1Point(null);
  }

  isIdentity(): boolean {
    return this.pt === null;
  }

  add(other: G1Point): G1Point {
    return new G1Point(bn254.g1Add(this.pt, other.pt));
  }

  sub(other: G1Point): G1Point {
    return new G1Point(bn254.g1Add(this.pt, bn254.g1Neg(other.pt)));
  }

  neg(): G1Point {
    return new G1Point(bn254.g1Neg(this.pt));
  }

  mul(k: bigint): G1Point {
    return new G1Point(bn254.g1Mul(this.pt, k));
  }

  eq(other: G1Point): boolean {
    if (this.pt === null || other.pt === null) return this.pt === other.pt;
    return this.pt[0] === other.pt[0] && this.pt[1] === other.pt[1];
  }

  toBytes(): Uint8Array {
    if (this.pt === null) return new Uint8Array(G1_LEN);
    const [x, y] = this.pt;
    return bytesConcat(Uint8Array.of(0x04), fpBytes(x), fpBytes(y));
  }

  static fromBytes(data: Uint8Array): G1Point {
    if (data.length !== G1_LEN) throw new Error("bad G1 length");
    if (bytesEq(data, new Uint8Array(G1_LEN))) return new G1Point(null);
    if (data[0] !== 0x04) throw new Error("bad G1 prefix");
    const x = bytesToBigint(data.subarray(1, 33));
    const y = bytesToBigint(data.subarray(33));
    if (x >= bn254.P || y >= bn254.P) throw new Error("G1 coordinate out of range");
    const pt: bn254.G1 = [x, y];
    if (!bn254.g1IsOnCurve(pt)) throw new Error("point not on curve");
    return new G1Point(pt);
  }
}

/** Element of the order-ORDER subgroup of the twist. */
export class G2Point {
  constructor(readonly pt: bn254.G2) {}

  static generator(): G2Point {
    return new G2Point(bn254.G2_GEN);
  }

  static identity(): G2Point {
    return new G2Point(null);
  }

  isIdentity(): boolean {
    return this.pt === null;
  }

  add(other: G2Point): G2Point {
    return new G2Point(bn254.g2Add(this.pt, other.pt));
  }

  sub(other: G2Point): G2Point {
    return new G2Point(bn254.g2Add(this.pt, bn254.g2Neg(other.pt)));
  }

  neg(): G2Point {
    return new G2Point(bn254.g2Neg(this.pt));
  }

  mul(k: bigint): G2Point {
    return new G2Point(bn254.g2Mul(this.pt, k));
  }

  eq(other: G2Point): boolean {
    return bn254.g2Eq(this.pt, other.pt);
  }

  toBytes(): Uint8Array {
    if (this.pt === null) return new Uint8Array(G2_LEN);
    const [[x0, x1], [y0, y1]] = this.pt;
    return bytesConcat(
      Uint8Array.of(0x04), fpBytes(x0), fpBytes(x1), fpBytes(y0), fpBytes(y1),
    );
  }

  static fromBytes(data: Uint8Array): G2Point {
    if (data.length !== G2_LEN) throw new Error("bad G2 length");
    if (bytesEq(data, new Uint8Array(G2_LEN))) return new G2Point(null);
    if (data[0] !== 0x04) throw new Error("bad G2 prefix");
    const coords: bigint[] = [];
    for (let i = 0; i < 4; i++) {
      coords.push(bytesToBigint(data.subarray(1 + 32 * i, 33 + 32 * i)));
    }
    if (coords.some((c) => c >= bn254.P)) throw new Error("G2 coordinate out of range");
    const pt: bn254.G2 = [[coords[0], coords[1]], [coords[2], coords[3]]];
    if (!bn254.g2InSubgroup(pt)) throw new Error("point not in G2 subgroup");
    return new G2Point(pt);
  }
}

/** Element of GT, written multiplicatively. */
export class GTElement {
  constructor(readonly val: bn254.Fp12) {}

  static one(): GTElement {
    return new GTElement(bn254.FP12_ONE);
  }

  mul(other: GTElement): GTElement {
    return new GTElement(bn254.fp12Mul(this.val, other.val));
  }

  inverse(): GTElement {
    return new GTElement(bn254.fp12Inv(this.val));
  }

  eq(other: GTElement): boolean {
    return bn254.fp12Eq(this.val, other.val);
  }

  toBytes(): Uint8Array {
    const out: Uint8Array[] = [];
    for (const c6 of this.val) {
      for (const c2 of c6) {
        out.push(fpBytes(c2[0]));
        out.push(fpBytes(c2[1]));
      }
    }
    return bytesConcat(...out);
  }
}

/** Bilinear-group context (p, g1, h1, g2) threaded through everything. */
export class PublicParams {
  constructor(
    readonly p: bigint,
    readonly g1: G1Point,
    readonly h1: G1Point,
    readonly g2: G2Point,
  ) {}

  /** Hash binding the parameters into every Fiat-Shamir challenge. */
  digest(): Uint8Array {
    return sha256Concat(
      utf8ToBytes("params"),
      bigintToBytes(this.p, 32),
      this.g1.toBytes(),
      this.h1.toBytes(),
      this.g2.toBytes(),
    );
  }
}

/**
 * Fixed-curve parameters; h1 is hashed from the tag so its discrete
 * log relative to g1 is unknown to everyone.
 */
export function setup(securityTag = "v1"): PublicParams {
  const h1 = hashToG1(bytesConcat(utf8ToBytes("h1-gen"), utf8ToBytes(securityTag)));
  return new PublicParams(ORDER, G1Point.generator(), h1, G2Point.generator());
}

/**
 * Deterministic try-and-increment hashing onto G1.
 *
 * The candidate x is hash(data ‖ counter); the principal square root
 * (exponent (P+1)/4) fixes y deterministically.  G1 has cofactor 1,
 * so no clearing step is needed.
 */
export function hashToG1(data: Uint8Array): G1Point {
  if (data.length === 0) throw new Error("empty input");
  for (let counter = 0; counter < 65536; counter++) {
    const candidate = sha256Concat(data, bigintToBytes(BigInt(counter), 4));
    const x = bn254.mod(bytesToBigint(candidate), bn254.P);
    const y = bn254.fpSqrt(bn254.mod(x * x * x + 3n, bn254.P));
    if (y !== null) return new G1Point([x, y]);
  }
  throw new Error("try-and-increment exhausted");
}

/** e(a, b) for a in G1, b in G2. */
export function pairing(a: G1Point, b: G2Point): GTElement {
  return new GTElement(bn254.pairing(a.pt, b.pt));
}

export interface Rng {
  read(n: number): Uint8Array;
}

/** Platform cryptographic entropy (WebCrypto getRandomValues). */
export class SystemRng implements Rng {
  read(n: number): Uint8Array {
    const out = new Uint8Array(n);
    // getRandomValues caps each request at 65536 bytes.
    for (let off = 0; off < n; off += 65536) {
      globalThis.crypto.getRandomValues(out.subarray(off, Math.min(off + 65536, n)));
    }
    return out;
  }
}

/** SHA-256 counter stream; reproducible across implementations. */
export class SeededRng implements Rng {
  private key: Uint8Array;
  private counter = 0n;
  private buf: Uint8Array = new Uint8Array(0);

  constructor(seed: string | Uint8Array) {
    const seedBytes = typeof seed === "string" ? utf8ToBytes(seed) : seed;
    this.key = sha256Concat(seedBytes);
  }

  read(n: number): Uint8Array {
    while (this.buf.length < n) {
      const block = sha256Concat(this.key, bigintToBytes(this.counter, 8));
      this.counter += 1n;
      this.buf = bytesConcat(this.buf, block);
    }
    const out = this.buf.slice(0, n);
    this.buf = this.buf.slice(n);
    return out;
  }
}

/** Uniform in [1, ORDER-1]; zero is excluded (degenerate keys/blinders). */
export function randomScalar(rng: Rng): bigint {
  return bn254.mod(bytesToBigint(rng.read(64)), ORDER - 1n) + 1n;
}

/** System entropy, unless a test seed pins a deterministic stream. */
export function defaultRng(seed?: string | null): Rng {
  if (seed) return new SeededRng(seed);
  return new SystemRng();
}
