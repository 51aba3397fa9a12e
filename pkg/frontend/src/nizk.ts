/**
 * Fiat-Shamir sigma proofs for the four statements the system needs:
 * credential issuance, credential show, binary ballot, and knowledge of
 * a decryption key.
 *
 * Every challenge is SHA-256 over a per-proof-kind ASCII tag, the group
 * parameter digest, and the length-prefixed serialization of the full
 * statement plus all commitments, reduced mod the group order.
 * Verifiers recompute commitments from the responses, so proofs carry
 * only scalars — except the ballot proof, whose disjunctive transcript
 * keeps both branches' commitments.
 */

import { mod } from "./bn254.js";
import { bigintToBytes, bytesToBigint, utf8ToBytes } from "./bytesutil.js";
import {
  G1Point,
  G2Point,
  ORDER,
  PublicParams,
  randomScalar,
  scalarFromBytes,
  scalarToBytes,
  type Rng,
} from "./groups.js";
import { sha256 } from "./sha256.js";
import { packFields, unpackFields } from "./wire.js";

const TAG_ISSUE = utf8ToBytes("zkpetition/proof/issue/v1");
const TAG_SHOW = utf8ToBytes("zkpetition/proof/show/v1");
const TAG_BALLOT = utf8ToBytes("zkpetition/proof/ballot/v1");
const TAG_KEY = utf8ToBytes("zkpetition/proof/key/v1");

function challenge(tag: Uint8Array, params: PublicParams, ...parts: Uint8Array[]): bigint {
  const pieces: Uint8Array[] = [tag, params.digest()];
  for (const part of parts) {
    pieces.push(bigintToBytes(BigInt(part.length), 4));
    pieces.push(part);
  }
  let total = 0;
  for (const p of pieces) total += p.length;
  const buf = new Uint8Array(total);
  let off = 0;
  for (const p of pieces) {
    buf.set(p, off);
    off += p.length;
  }
  return mod(bytesToBigint(sha256(buf)), ORDER);
}

/** Any verification key carrying the (alpha, beta) pair. */
export interface VerifyKeyLike {
  alpha: G2Point;
  beta: G2Point;
}

// ---------------------------------------------------------------------------
// Issuance proof: knowledge of (d, m, o, k) with
//   gamma = d*g1,  c_m = m*g1 + o*h1,  cipher = (k*g1, k*gamma + m*h)
// bound to the requesting device key.
// ---------------------------------------------------------------------------

export class IssuanceProof {
  constructor(
    readonly challenge: bigint,
    readonly rD: bigint,
    readonly rM: bigint,
    readonly rO: bigint,
    readonly rK: bigint,
  ) {}

  toBytes(): Uint8Array {
    return packFields(
      ...[this.challenge, this.rD, this.rM, this.rO, this.rK].map(scalarToBytes),
    );
  }

  static fromBytes(data: Uint8Array): IssuanceProof {
    const [c, rD, rM, rO, rK] = unpackFields(data, 5).map(scalarFromBytes);
    return new IssuanceProof(c, rD, rM, rO, rK);
  }
}

export function proveIssuance(
  params: PublicParams,
  d: bigint, m: bigint, o: bigint, k: bigint,
  gamma: G1Point, cM: G1Point, cipher: readonly [G1Point, G1Point],
  h: G1Point, pkClient: Uint8Array, rng: Rng,
): IssuanceProof {
  const [a, b] = cipher;
  const wd = randomScalar(rng);
  const wm = randomScalar(rng);
  const wo = randomScalar(rng);
  const wk = randomScalar(rng);
  const cg = params.g1.mul(wd);
  const cc = params.g1.mul(wm).add(params.h1.mul(wo));
  const ca = params.g1.mul(wk);
  const cb = gamma.mul(wk).add(h.mul(wm));
  const chal = challenge(
    TAG_ISSUE, params,
    gamma.toBytes(), cM.toBytes(), a.toBytes(), b.toBytes(),
    h.toBytes(), pkClient,
    cg.toBytes(), cc.toBytes(), ca.toBytes(), cb.toBytes(),
  );
  return new IssuanceProof(
    chal,
    mod(wd - chal * d, ORDER),
    mod(wm - chal * m, ORDER),
    mod(wo - chal * o, ORDER),
    mod(wk - chal * k, ORDER),
  );
}

export function verifyIssuance(
  params: PublicParams,
  gamma: G1Point, cM: G1Point, cipher: readonly [G1Point, G1Point],
  h: G1Point, pkClient: Uint8Array, proof: IssuanceProof,
): boolean {
  const [a, b] = cipher;
  const chal = proof.challenge;
  const cg = params.g1.mul(proof.rD).add(gamma.mul(chal));
  const cc = params.g1.mul(proof.rM).add(params.h1.mul(proof.rO)).add(cM.mul(chal));
  const ca = params.g1.mul(proof.rK).add(a.mul(chal));
  const cb = gamma.mul(proof.rK).add(h.mul(proof.rM)).add(b.mul(chal));
  const expected = challenge(
    TAG_ISSUE, params,
    gamma.toBytes(), cM.toBytes(), a.toBytes(), b.toBytes(),
    h.toBytes(), pkClient,
    cg.toBytes(), cc.toBytes(), ca.toBytes(), cb.toBytes(),
  );
  return expected === chal;
}

// ---------------------------------------------------------------------------
// Show proof: knowledge of (m, r) with
//   kappa = alpha + m*beta + r*g2,  nu = r*h',  zeta = m*basis
// bound to sigma' and the petition id.
// ---------------------------------------------------------------------------

export class ShowProof {
  constructor(
    readonly challenge: bigint,
    readonly rM: bigint,
    readonly rR: bigint,
  ) {}

  toBytes(): Uint8Array {
    return packFields(...[this.challenge, this.rM, this.rR].map(scalarToBytes));
  }

  static fromBytes(data: Uint8Array): ShowProof {
    const [c, rM, rR] = unpackFields(data, 3).map(scalarFromBytes);
    return new ShowProof(c, rM, rR);
  }
}

function showChallenge(
  params: PublicParams, vk: VerifyKeyLike,
  kappa: G2Point, nu: G1Point, zeta: G1Point,
  hPrime: G1Point, sPrime: G1Point,
  petitionId: string, basis: G1Point,
  commitments: readonly [G2Point, G1Point, G1Point],
): bigint {
  return challenge(
    TAG_SHOW, params,
    vk.alpha.toBytes(), vk.beta.toBytes(),
    kappa.toBytes(), nu.toBytes(), zeta.toBytes(),
    hPrime.toBytes(), sPrime.toBytes(),
    utf8ToBytes(petitionId), basis.toBytes(),
    ...commitments.map((c) => c.toBytes()),
  );
}

export function proveShow(
  params: PublicParams, vk: VerifyKeyLike,
  m: bigint, r: bigint,
  kappa: G2Point, nu: G1Point, zeta: G1Point,
  hPrime: G1Point, sPrime: G1Point,
  petitionId: string, basis: G1Point, rng: Rng,
): ShowProof {
  const wm = randomScalar(rng);
  const wr = randomScalar(rng);
  const ck = vk.beta.mul(wm).add(params.g2.mul(wr));
  const cn = hPrime.mul(wr);
  const cz = basis.mul(wm);
  const chal = showChallenge(params, vk, kappa, nu, zeta, hPrime, sPrime,
                             petitionId, basis, [ck, cn, cz]);
  return new ShowProof(chal, mod(wm - chal * m, ORDER), mod(wr - chal * r, ORDER));
}

export function verifyShow(
  params: PublicParams, vk: VerifyKeyLike,
  kappa: G2Point, nu: G1Point, zeta: G1Point,
  hPrime: G1Point, sPrime: G1Point,
  petitionId: string, basis: G1Point, proof: ShowProof,
): boolean {
  const chal = proof.challenge;
  const ck = vk.beta.mul(proof.rM).add(params.g2.mul(proof.rR))
    .add(kappa.sub(vk.alpha).mul(chal));
  const cn = hPrime.mul(proof.rR).add(nu.mul(chal));
  const cz = basis.mul(proof.rM).add(zeta.mul(chal));
  const expected = showChallenge(params, vk, kappa, nu, zeta, hPrime, sPrime,
                                 petitionId, basis, [ck, cn, cz]);
  return expected === chal;
}

// ---------------------------------------------------------------------------
// Ballot proof: disjunctive Chaum-Pedersen transcript showing the
// ciphertext (a, b) = (k*g1, k*gamma_agg + v*h) encrypts v = 0 or v = 1,
// without revealing which.  One branch is honest, the other simulated;
// the challenge shares must sum to the Fiat-Shamir challenge.
// ---------------------------------------------------------------------------

export class BallotProof {
  constructor(
    readonly A0: G1Point,
    readonly B0: G1Point,
    readonly c0: bigint,
    readonly r0: bigint,
    readonly A1: G1Point,
    readonly B1: G1Point,
    readonly c1: bigint,
    readonly r1: bigint,
  ) {}

  toBytes(): Uint8Array {
    return packFields(
      this.A0.toBytes(), this.B0.toBytes(),
      scalarToBytes(this.c0), scalarToBytes(this.r0),
      this.A1.toBytes(), this.B1.toBytes(),
      scalarToBytes(this.c1), scalarToBytes(this.r1),
    );
  }

  static fromBytes(data: Uint8Array): BallotProof {
    const f = unpackFields(data, 8);
    return new BallotProof(
      G1Point.fromBytes(f[0]), G1Point.fromBytes(f[1]),
      scalarFromBytes(f[2]), scalarFromBytes(f[3]),
      G1Point.fromBytes(f[4]), G1Point.fromBytes(f[5]),
      scalarFromBytes(f[6]), scalarFromBytes(f[7]),
    );
  }
}

function ballotChallenge(
  params: PublicParams, gammaAgg: G1Point, h: G1Point,
  a: G1Point, b: G1Point,
  commitments: readonly [G1Point, G1Point, G1Point, G1Point],
): bigint {
  return challenge(
    TAG_BALLOT, params,
    gammaAgg.toBytes(), h.toBytes(), a.toBytes(), b.toBytes(),
    ...commitments.map((c) => c.toBytes()),
  );
}

export function proveBallot(
  params: PublicParams, gammaAgg: G1Point, h: G1Point,
  v: number, k: bigint, cipher: readonly [G1Point, G1Point], rng: Rng,
): BallotProof {
  if (v !== 0 && v !== 1) throw new Error("vote must be 0 or 1");
  const [a, b] = cipher;
  const other = BigInt(1 - v);
  // simulate the branch we cannot prove
  const cOther = randomScalar(rng);
  const rOther = randomScalar(rng);
  const simA = params.g1.mul(rOther).add(a.mul(cOther));
  const simB = gammaAgg.mul(rOther).add(b.sub(h.mul(other)).mul(cOther));
  // honest commitment for the real branch
  const w = randomScalar(rng);
  const ownA = params.g1.mul(w);
  const ownB = gammaAgg.mul(w);
  const comms: readonly [G1Point, G1Point, G1Point, G1Point] =
    v === 0 ? [ownA, ownB, simA, simB] : [simA, simB, ownA, ownB];
  const chal = ballotChallenge(params, gammaAgg, h, a, b, comms);
  const cOwn = mod(chal - cOther, ORDER);
  const rOwn = mod(w - cOwn * k, ORDER);
  if (v === 0) {
    return new BallotProof(comms[0], comms[1], cOwn, rOwn,
                           comms[2], comms[3], cOther, rOther);
  }
  return new BallotProof(comms[0], comms[1], cOther, rOther,
                         comms[2], comms[3], cOwn, rOwn);
}

export function verifyBallot(
  params: PublicParams, gammaAgg: G1Point, h: G1Point,
  cipher: readonly [G1Point, G1Point], proof: BallotProof,
): boolean {
  const [a, b] = cipher;
  const comms: readonly [G1Point, G1Point, G1Point, G1Point] =
    [proof.A0, proof.B0, proof.A1, proof.B1];
  const chal = ballotChallenge(params, gammaAgg, h, a, b, comms);
  if (mod(proof.c0 + proof.c1, ORDER) !== chal) return false;
  if (!params.g1.mul(proof.r0).add(a.mul(proof.c0)).eq(proof.A0)) return false;
  if (!gammaAgg.mul(proof.r0).add(b.mul(proof.c0)).eq(proof.B0)) return false;
  if (!params.g1.mul(proof.r1).add(a.mul(proof.c1)).eq(proof.A1)) return false;
  if (!gammaAgg.mul(proof.r1).add(b.sub(h).mul(proof.c1)).eq(proof.B1)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Key-possession proof: Schnorr proof of d with gamma = d*g1, domain
// separated by the signer identity so proofs cannot be replayed.
// ---------------------------------------------------------------------------

export class KeyProof {
  constructor(readonly challenge: bigint, readonly rD: bigint) {}

  toBytes(): Uint8Array {
    return packFields(scalarToBytes(this.challenge), scalarToBytes(this.rD));
  }

  static fromBytes(data: Uint8Array): KeyProof {
    const [c, rD] = unpackFields(data, 2).map(scalarFromBytes);
    return new KeyProof(c, rD);
  }
}

export function proveKey(
  params: PublicParams, d: bigint, gamma: G1Point, signerId: string, rng: Rng,
): KeyProof {
  const w = randomScalar(rng);
  const commitment = params.g1.mul(w);
  const chal = challenge(TAG_KEY, params, gamma.toBytes(), utf8ToBytes(signerId),
                         commitment.toBytes());
  return new KeyProof(chal, mod(w - chal * d, ORDER));
}

export function verifyKey(
  params: PublicParams, gamma: G1Point, signerId: string, proof: KeyProof,
): boolean {
  const commitment = params.g1.mul(proof.rD).add(gamma.mul(proof.challenge));
  const expected = challenge(TAG_KEY, params, gamma.toBytes(), utf8ToBytes(signerId),
                             commitment.toBytes());
  return expected === proof.challenge;
}
