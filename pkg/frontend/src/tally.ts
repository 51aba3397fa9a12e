/**
 * Vote encryption, client side: ElGamal key aggregation with rogue-key
 * defense and exponential ElGamal ballot encryption.  (Homomorphic
 * folding, chained decryption and discrete-log recovery run on the
 * petition owner's side only.)
 *
 * A vote v is encrypted as (k*g1, k*gamma_agg + v*h) where h is the
 * petition's base point; the servers fold accepted ciphertexts so the
 * exponent sums the votes.
 */

import { bytesConcat } from "./bytesutil.js";
import { G1Point, PublicParams, randomScalar, type Rng } from "./groups.js";
import * as nizk from "./nizk.js";

/** Key aggregation refused; .identity names the offending key. */
export class RogueKey extends Error {
  constructor(readonly identity: string) {
    super(`invalid key-possession proof for ${JSON.stringify(identity)}`);
  }
}

export interface AggregatedElGamalKey {
  gammaAgg: G1Point;
  contributors: readonly string[];
}

export class VoteCiphertext {
  constructor(
    readonly a: G1Point,
    readonly b: G1Point,
    readonly h: G1Point, // petition base point the plaintext exponent lives over
  ) {}

  toBytes(): Uint8Array {
    return bytesConcat(this.a.toBytes(), this.b.toBytes());
  }
}

/**
 * keys: [gamma, pok, identity]; every proof must verify, which is what
 * stops a rogue gamma_fake = gamma_eve - sum(gamma_i) from being
 * slipped into the product.
 */
export function aggregateKeys(
  params: PublicParams,
  keys: readonly [G1Point, nizk.KeyProof, string][],
): AggregatedElGamalKey {
  let gammaAgg = G1Point.identity();
  const contributors: string[] = [];
  for (const [gamma, pok, identity] of keys) {
    if (!nizk.verifyKey(params, gamma, identity, pok)) {
      throw new RogueKey(identity);
    }
    gammaAgg = gammaAgg.add(gamma);
    contributors.push(identity);
  }
  return { gammaAgg, contributors };
}

/**
 * The vote-inverse ciphertext is a deterministic function of the vote
 * ciphertext: (-a, h - b) encrypts 1 - v.  Verifiers recompute it
 * rather than trusting (or proof-checking) a second ciphertext.
 */
export function deriveInverse(cipher: VoteCiphertext): VoteCiphertext {
  return new VoteCiphertext(cipher.a.neg(), cipher.h.sub(cipher.b), cipher.h);
}

/** Returns enc, enc_not and the ballot proof for v in {0, 1}. */
export function encryptVote(
  params: PublicParams, gammaAgg: G1Point, h: G1Point, v: number, rng: Rng,
): { enc: VoteCiphertext; encNot: VoteCiphertext; proof: nizk.BallotProof } {
  if (v !== 0 && v !== 1) throw new Error("vote must be 0 or 1");
  const k = randomScalar(rng);
  const a = params.g1.mul(k);
  const b = gammaAgg.mul(k).add(h.mul(BigInt(v)));
  const enc = new VoteCiphertext(a, b, h);
  const proof = nizk.proveBallot(params, gammaAgg, h, v, k, [a, b], rng);
  return { enc, encNot: deriveInverse(enc), proof };
}
