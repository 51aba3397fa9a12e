/**
 * Device signatures: ECDSA over the same pairing curve's G1 group.
 *
 * The curve has prime order and cofactor 1, so textbook ECDSA applies
 * directly.  Nonces are derived deterministically (HMAC-SHA256 chain in
 * the RFC 6979 construction) so a device never risks nonce reuse and
 * signatures reproduce bit-for-bit across implementations.
 */

import { R, invMod, mod } from "./bn254.js";
import { bigintToBytes, bytesConcat, bytesToBigint } from "./bytesutil.js";
import { G1Point, randomScalar, type Rng } from "./groups.js";
import { hmacSha256, sha256 } from "./sha256.js";

const N = R;
const NBYTES = 32;
const N_BITS = BigInt(N.toString(2).length);

/** Leftmost min(8*len, 254) bits of data as an integer. */
function bits2int(data: Uint8Array): bigint {
  let x = bytesToBigint(data);
  const excess = 8n * BigInt(data.length) - N_BITS;
  if (excess > 0n) x >>= excess;
  return x;
}

function hashToInt(message: Uint8Array): bigint {
  return bits2int(sha256(message));
}

/** Returns the private scalar and public key bytes. */
export function keygen(rng: Rng): { priv: bigint; pub: Uint8Array } {
  const priv = randomScalar(rng);
  const pub = G1Point.generator().mul(priv).toBytes();
  return { priv, pub };
}

/** Deterministic nonce candidates for key priv and digest value z. */
function* nonceStream(priv: bigint, z: bigint): Generator<bigint> {
  const holder = mod(z, N);
  let vee: Uint8Array = new Uint8Array(32).fill(0x01);
  let kay: Uint8Array = new Uint8Array(32);
  const seed = bytesConcat(bigintToBytes(priv, NBYTES), bigintToBytes(holder, NBYTES));
  kay = hmacSha256(kay, bytesConcat(vee, Uint8Array.of(0x00), seed));
  vee = hmacSha256(kay, vee);
  kay = hmacSha256(kay, bytesConcat(vee, Uint8Array.of(0x01), seed));
  vee = hmacSha256(kay, vee);
  while (true) {
    vee = hmacSha256(kay, vee);
    yield bits2int(vee);
    kay = hmacSha256(kay, bytesConcat(vee, Uint8Array.of(0x00)));
    vee = hmacSha256(kay, vee);
  }
}

/** ECDSA signature r ‖ s (64 bytes) over SHA-256 of the message. */
export function sign(priv: bigint, message: Uint8Array): Uint8Array {
  const z = hashToInt(message);
  const g = G1Point.generator();
  for (const k of nonceStream(priv, z)) {
    if (k < 1n || k >= N) continue;
    const point = g.mul(k);
    const r = mod((point.pt as readonly [bigint, bigint])[0], N);
    if (r === 0n) continue;
    const s = mod(invMod(k, N) * (z + r * priv), N);
    if (s === 0n) continue;
    return bytesConcat(bigintToBytes(r, NBYTES), bigintToBytes(s, NBYTES));
  }
  throw new Error("unreachable");
}

/** True iff signature is valid for message under the public key. */
export function verify(pubBytes: Uint8Array, message: Uint8Array, signature: Uint8Array): boolean {
  let pub: G1Point;
  try {
    pub = G1Point.fromBytes(pubBytes);
  } catch {
    return false;
  }
  if (pub.isIdentity() || signature.length !== 2 * NBYTES) return false;
  const r = bytesToBigint(signature.subarray(0, NBYTES));
  const s = bytesToBigint(signature.subarray(NBYTES));
  if (!(r >= 1n && r < N && s >= 1n && s < N)) return false;
  const z = hashToInt(message);
  const w = invMod(s, N);
  const point = G1Point.generator().mul(mod(z * w, N)).add(pub.mul(mod(r * w, N)));
  if (point.isIdentity()) return false;
  return mod((point.pt as readonly [bigint, bigint])[0], N) === r;
}
