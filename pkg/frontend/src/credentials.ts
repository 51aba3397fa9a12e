/**
 * Threshold blind credentials, client side: request preparation, partial
 * verification, unblinding, share aggregation, randomized show, and
 * verification.  (Dealer key generation and the authorities' signing
 * operation live server-side only.)
 *
 * The credential on a private attribute m is the pair (h, h^(x+y*m))
 * written additively as (h, (x + y*m)*h).  Authorities hold Shamir
 * shares (x_i, y_i); any t partial credentials recombine via Lagrange
 * weights in the exponent.  A show randomizes the credential and binds
 * it to one petition through the tag zeta = m*hash_to_g1(petition_id),
 * which is stable per (credential, petition) and unlinkable across
 * petitions.
 */

import { invMod, mod } from "./bn254.js";
import { bytesConcat, utf8ToBytes } from "./bytesutil.js";
import * as devicesig from "./devicesig.js";
import {
  G1Point,
  G2Point,
  ORDER,
  PublicParams,
  hashToG1,
  pairing,
  randomScalar,
  type Rng,
} from "./groups.js";
import * as nizk from "./nizk.js";
import { packFields, unpackFields } from "./wire.js";

export interface AuthorityVerifyKey {
  index: number;
  g2: G2Point;
  alpha: G2Point;
  beta: G2Point;
}

export interface AggregatedVerifyKey {
  g2: G2Point;
  alpha: G2Point;
  beta: G2Point;
  subset: readonly number[];
}

export class Credential {
  constructor(readonly h: G1Point, readonly s: G1Point) {}

  toBytes(): Uint8Array {
    return bytesConcat(this.h.toBytes(), this.s.toBytes());
  }

  static fromBytes(data: Uint8Array): Credential {
    if (data.length !== 130) throw new Error("bad credential length");
    return new Credential(
      G1Point.fromBytes(data.subarray(0, 65)),
      G1Point.fromBytes(data.subarray(65)),
    );
  }
}

export class CredentialRequest {
  constructor(
    readonly gamma: G1Point,
    readonly cM: G1Point,
    readonly cipher: readonly [G1Point, G1Point], // ElGamal encryption of m*h under gamma
    readonly proof: nizk.IssuanceProof,
    readonly pkClient: Uint8Array,
    readonly requestSig: Uint8Array,
  ) {}

  /** The bytes the device key signs: everything except the signature. */
  signedBody(): Uint8Array {
    return packFields(
      this.gamma.toBytes(),
      this.cM.toBytes(),
      this.cipher[0].toBytes(),
      this.cipher[1].toBytes(),
      this.pkClient,
      this.proof.toBytes(),
    );
  }
}

export class BlindedPartial {
  constructor(
    readonly h: G1Point,
    readonly aTilde: G1Point,
    readonly bTilde: G1Point,
  ) {}

  toBytes(): Uint8Array {
    return bytesConcat(this.h.toBytes(), this.aTilde.toBytes(), this.bTilde.toBytes());
  }

  static fromBytes(data: Uint8Array): BlindedPartial {
    if (data.length !== 195) throw new Error("bad partial length");
    return new BlindedPartial(
      G1Point.fromBytes(data.subarray(0, 65)),
      G1Point.fromBytes(data.subarray(65, 130)),
      G1Point.fromBytes(data.subarray(130)),
    );
  }
}

export class ShowBundle {
  constructor(
    readonly kappa: G2Point,
    readonly nu: G1Point,
    readonly sigmaPrime: Credential,
    readonly proof: nizk.ShowProof,
    readonly zeta: G1Point,
  ) {}

  toBytes(): Uint8Array {
    return packFields(
      this.kappa.toBytes(),
      this.nu.toBytes(),
      this.sigmaPrime.toBytes(),
      this.proof.toBytes(),
      this.zeta.toBytes(),
    );
  }

  static fromBytes(data: Uint8Array): ShowBundle {
    const f = unpackFields(data, 5);
    return new ShowBundle(
      G2Point.fromBytes(f[0]),
      G1Point.fromBytes(f[1]),
      Credential.fromBytes(f[2]),
      nizk.ShowProof.fromBytes(f[3]),
      G1Point.fromBytes(f[4]),
    );
  }
}

/** Interpolation weights at zero for the given share indices. */
export function lagrangeCoefficients(indices: readonly number[]): bigint[] {
  if (new Set(indices).size !== indices.length) throw new Error("duplicate indices");
  if (indices.some((i) => i < 1)) throw new Error("indices must be >= 1");
  const coeffs: bigint[] = [];
  for (const i of indices) {
    let num = 1n;
    let den = 1n;
    for (const j of indices) {
      if (j !== i) {
        num = mod(num * BigInt(0 - j), ORDER);
        den = mod(den * BigInt(i - j), ORDER);
      }
    }
    coeffs.push(mod(num * invMod(den, ORDER), ORDER));
  }
  return coeffs;
}

/** Lagrange-weighted product of a t-subset of verification keys. */
export function aggKey(
  params: PublicParams, verifyKeys: readonly AuthorityVerifyKey[], t?: number,
): AggregatedVerifyKey {
  const indices = verifyKeys.map((vk) => vk.index);
  if (t !== undefined && verifyKeys.length !== t) {
    throw new Error(`need exactly ${t} keys, got ${verifyKeys.length}`);
  }
  const coeffs = lagrangeCoefficients(indices);
  let alpha = G2Point.identity();
  let beta = G2Point.identity();
  for (let i = 0; i < verifyKeys.length; i++) {
    alpha = alpha.add(verifyKeys[i].alpha.mul(coeffs[i]));
    beta = beta.add(verifyKeys[i].beta.mul(coeffs[i]));
  }
  return { g2: params.g2, alpha, beta, subset: indices };
}

/**
 * The base point h every party derives from the request alone.
 *
 * Hashing the device key in alongside the commitment ties the issued
 * credential to the requesting device.
 */
export function requestHashPoint(cM: G1Point, pkClient: Uint8Array): G1Point {
  return hashToG1(bytesConcat(cM.toBytes(), pkClient));
}

/**
 * Client side of issuance: returns the user decryption key d and the
 * signed request.  d may be supplied by callers that keep a long-lived
 * user key; otherwise a fresh one is drawn.
 */
export function prepareBlindSign(
  params: PublicParams, m: bigint,
  devicePriv: bigint, devicePub: Uint8Array,
  rng: Rng, d?: bigint,
): { d: bigint; request: CredentialRequest } {
  const dKey = d === undefined ? randomScalar(rng) : d;
  const gamma = params.g1.mul(dKey);
  const o = randomScalar(rng);
  const cM = params.g1.mul(m).add(params.h1.mul(o));
  const h = requestHashPoint(cM, devicePub);
  const k = randomScalar(rng);
  const cipher: readonly [G1Point, G1Point] =
    [params.g1.mul(k), gamma.mul(k).add(h.mul(m))];
  const proof = nizk.proveIssuance(params, dKey, m, o, k, gamma, cM, cipher, h,
                                   devicePub, rng);
  const unsigned = new CredentialRequest(gamma, cM, cipher, proof, devicePub,
                                         new Uint8Array(0));
  const sig = devicesig.sign(devicePriv, unsigned.signedBody());
  return {
    d: dKey,
    request: new CredentialRequest(gamma, cM, cipher, proof, devicePub, sig),
  };
}

/** Strips the ElGamal layer: s_i = b_tilde - d*a_tilde. */
export function unblind(partial: BlindedPartial, d: bigint): Credential {
  return new Credential(partial.h, partial.bTilde.sub(partial.aTilde.mul(d)));
}

/** Combines t unblinded shares [index, Credential] into one credential. */
export function aggCred(indexedPartials: readonly [number, Credential][]): Credential {
  const indices = indexedPartials.map(([i]) => i);
  const creds = indexedPartials.map(([, c]) => c);
  if (creds.some((c) => !c.h.eq(creds[0].h))) throw new Error("mismatched base points");
  const coeffs = lagrangeCoefficients(indices);
  let s = G1Point.identity();
  for (let i = 0; i < creds.length; i++) {
    s = s.add(creds[i].s.mul(coeffs[i]));
  }
  return new Credential(creds[0].h, s);
}

/**
 * Pairing identity for one authority's share; used by clients to spot
 * a corrupt partial before aggregation.
 */
export function verifyPartial(
  params: PublicParams, vk: AuthorityVerifyKey, m: bigint, credential: Credential,
): boolean {
  return (
    !credential.h.isIdentity()
    && pairing(credential.h, vk.alpha.add(vk.beta.mul(m)))
      .eq(pairing(credential.s, params.g2))
  );
}

/** Randomized show of the credential bound to one petition. */
export function proveCred(
  params: PublicParams, aggVk: AggregatedVerifyKey, m: bigint,
  credential: Credential, petitionId: string, rng: Rng,
): ShowBundle {
  const rPrime = randomScalar(rng);
  const hPrime = credential.h.mul(rPrime);
  const sPrime = credential.s.mul(rPrime);
  const r = randomScalar(rng);
  const kappa = aggVk.alpha.add(aggVk.beta.mul(m)).add(params.g2.mul(r));
  const nu = hPrime.mul(r);
  const basis = hashToG1(utf8ToBytes(petitionId));
  const zeta = basis.mul(m);
  const proof = nizk.proveShow(params, aggVk, m, r, kappa, nu, zeta,
                               hPrime, sPrime, petitionId, basis, rng);
  return new ShowBundle(kappa, nu, new Credential(hPrime, sPrime), proof, zeta);
}

/**
 * Proof check, non-degeneracy check, then the pairing equation
 * e(h', kappa) = e(s' + nu, g2).
 */
export function verifyCred(
  params: PublicParams, aggVk: AggregatedVerifyKey,
  bundle: ShowBundle, petitionId: string,
): boolean {
  const hPrime = bundle.sigmaPrime.h;
  const sPrime = bundle.sigmaPrime.s;
  if (hPrime.isIdentity()) return false;
  const basis = hashToG1(utf8ToBytes(petitionId));
  if (!nizk.verifyShow(params, aggVk, bundle.kappa, bundle.nu, bundle.zeta,
                       hPrime, sPrime, petitionId, basis, bundle.proof)) {
    return false;
  }
  return pairing(hPrime, bundle.kappa).eq(pairing(sPrime.add(bundle.nu), params.g2));
}
