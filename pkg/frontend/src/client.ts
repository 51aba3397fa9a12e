/**
 * Voter-side protocol client: state (de)serialization in the same JSON
 * schema the command-line tool stores, credential issuance against the
 * authorities, vote construction, and result queries.  All network I/O
 * goes through an injectable fetch so tests can intercept the exact
 * wire traffic.
 */

import * as credentials from "./credentials.js";
import * as devicesig from "./devicesig.js";
import * as tally from "./tally.js";
import {
  G1Point,
  G2Point,
  PublicParams,
  hashToG1,
  randomScalar,
  scalarFromBytes,
  scalarToBytes,
  type Rng,
} from "./groups.js";
import { KeyProof } from "./nizk.js";
import { utf8ToBytes } from "./bytesutil.js";
import { b64, unb64 } from "./wire.js";

/** Local protocol failure, optionally carrying per-authority detail. */
export class ClientError extends Error {
  constructor(message: string, readonly failures: readonly string[] = []) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (input, init) => globalThis.fetch(input, init);

export interface ClientState {
  m: bigint;
  d: bigint;
  devicePriv: bigint;
  devicePub: Uint8Array;
  credential: credentials.Credential | null;
  authorities: string[];
  threshold: number | null;
  securityTag: string;
}

export function newState(rng: Rng, securityTag = "v1"): ClientState {
  const { priv, pub } = devicesig.keygen(rng);
  return {
    m: randomScalar(rng),
    d: randomScalar(rng),
    devicePriv: priv,
    devicePub: pub,
    credential: null,
    authorities: [],
    threshold: null,
    securityTag,
  };
}

/** Same on-disk schema as the command-line tool's state file. */
export function stateToJson(state: ClientState): Record<string, unknown> {
  return {
    m: b64(scalarToBytes(state.m)),
    d: b64(scalarToBytes(state.d)),
    device_priv: b64(scalarToBytes(state.devicePriv)),
    device_pub: b64(state.devicePub),
    credential: state.credential === null ? null : b64(state.credential.toBytes()),
    authorities: state.authorities,
    threshold: state.threshold,
    security_tag: state.securityTag,
  };
}

export function stateFromJson(data: Record<string, unknown>): ClientState {
  return {
    m: scalarFromBytes(unb64(data.m)),
    d: scalarFromBytes(unb64(data.d)),
    devicePriv: scalarFromBytes(unb64(data.device_priv)),
    devicePub: unb64(data.device_pub),
    credential: data.credential === null || data.credential === undefined
      ? null
      : credentials.Credential.fromBytes(unb64(data.credential)),
    authorities: (data.authorities as string[]) ?? [],
    threshold: (data.threshold as number | null) ?? null,
    securityTag: (data.security_tag as string) ?? "v1",
  };
}

// -- authority directory -----------------------------------------------------

export interface DirectoryRecord {
  index: number;
  identity: string;
  g2: string;
  alpha: string;
  beta: string;
  gamma: string;
  gamma_proof: string;
  url: string;
}

export interface DirectoryFetchResult {
  directory: DirectoryRecord[];
  failures: string[];
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

/**
 * GET /keys from every authority.  Unreachable authorities land in
 * `failures` instead of aborting, so callers can decide how many
 * respondents they need (issuance tolerates n - t missing; voting
 * needs all of them for the n-of-n tally key).
 */
export async function fetchAuthorityDirectory(
  urls: readonly string[],
  opts: { fetchFn?: FetchLike; retries?: number; delayMs?: number } = {},
): Promise<DirectoryFetchResult> {
  const fetchFn = opts.fetchFn ?? defaultFetch;
  const retries = opts.retries ?? 1;
  const delayMs = opts.delayMs ?? 0;
  const directory: DirectoryRecord[] = [];
  const failures: string[] = [];
  await Promise.all(urls.map(async (url) => {
    for (let attempt = 0; attempt < retries; attempt++) {
      try {
        const resp = await fetchFn(`${url}/keys`);
        if (resp.status === 200) {
          const record = await resp.json();
          record.url = url;
          directory.push(record);
          return;
        }
      } catch {
        // retry below
      }
      if (delayMs > 0) await sleep(delayMs);
    }
    failures.push(`authority at ${url} unreachable`);
  }));
  directory.sort((a, b) => a.index - b.index);
  return { directory, failures };
}

export function directoryVerifyKeys(
  directory: readonly DirectoryRecord[],
): credentials.AuthorityVerifyKey[] {
  return directory.map((record) => ({
    index: record.index,
    g2: G2Point.fromBytes(unb64(record.g2)),
    alpha: G2Point.fromBytes(unb64(record.alpha)),
    beta: G2Point.fromBytes(unb64(record.beta)),
  }));
}

/**
 * Aggregated credential key (lowest threshold indices) and n-of-n
 * ElGamal key; every key-possession proof is verified on the way.
 */
export function aggregateDirectory(
  params: PublicParams,
  directory: readonly DirectoryRecord[],
  threshold: number,
): { aggVk: credentials.AggregatedVerifyKey; gammaAgg: tally.AggregatedElGamalKey } {
  const verifyKeys = directoryVerifyKeys(directory)
    .sort((a, b) => a.index - b.index);
  const elgamalKeys: [G1Point, KeyProof, string][] = directory.map((record) => [
    G1Point.fromBytes(unb64(record.gamma)),
    KeyProof.fromBytes(unb64(record.gamma_proof)),
    record.identity,
  ]);
  const aggVk = credentials.aggKey(params, verifyKeys.slice(0, threshold), threshold);
  const gammaAgg = tally.aggregateKeys(params, elgamalKeys);
  return { aggVk, gammaAgg };
}

// -- issuance -----------------------------------------------------------------

/**
 * The issuance message: commitment, device key, encrypted attribute,
 * user ElGamal key, device signature, and the issuance proof.
 */
export function credentialRequestJson(
  request: credentials.CredentialRequest,
): Record<string, string> {
  const [a, b] = request.cipher;
  const encSk = new Uint8Array(130);
  encSk.set(a.toBytes(), 0);
  encSk.set(b.toBytes(), 65);
  return {
    pk_cred_bytes: b64(request.cM.toBytes()),
    pk_client_bytes: b64(request.pkClient),
    enc_sk_bytes: b64(encSk),
    gamma_bytes: b64(request.gamma.toBytes()),
    requestSig: b64(request.requestSig),
    proof: b64(request.proof.toBytes()),
  };
}

async function postJson(
  fetchFn: FetchLike, url: string, payload: unknown,
): Promise<{ status: number; body: Record<string, unknown> }> {
  const resp = await fetchFn(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  return { status: resp.status, body: await resp.json() };
}

/**
 * Blind issuance against every reachable authority; aggregates the
 * first `threshold` partials by index and self-verifies the result.
 * Succeeds as long as `threshold` authorities answer — the aggregated
 * credential is the same point no matter which subset contributed.
 */
export async function requestCredential(
  params: PublicParams,
  state: ClientState,
  rng: Rng,
  opts: { fetchFn?: FetchLike } = {},
): Promise<ClientState> {
  const fetchFn = opts.fetchFn ?? defaultFetch;
  const threshold = state.threshold;
  if (state.authorities.length === 0 || threshold === null) {
    throw new ClientError("no authority directory configured");
  }
  const { directory, failures } = await fetchAuthorityDirectory(
    state.authorities, { fetchFn },
  );
  if (directory.length < threshold) {
    throw new ClientError(
      `only ${directory.length} of ${threshold} required authorities reachable`,
      failures,
    );
  }
  const vkByIndex = new Map(
    directoryVerifyKeys(directory).map((vk) => [vk.index, vk]),
  );

  const { d, request } = credentials.prepareBlindSign(
    params, state.m, state.devicePriv, state.devicePub, rng, state.d,
  );
  const payload = credentialRequestJson(request);

  const indexed: [number, credentials.Credential][] = [];
  await Promise.all(directory.map(async (record) => {
    try {
      const { status, body } = await postJson(fetchFn, `${record.url}/sign`, payload);
      if (status !== 200) {
        throw new ClientError(`${record.url} refused: ${body.error ?? status}`);
      }
      const partial = credentials.BlindedPartial.fromBytes(unb64(body.partial));
      const share = credentials.unblind(partial, d);
      const vk = vkByIndex.get(body.index as number);
      if (vk === undefined || !credentials.verifyPartial(params, vk, state.m, share)) {
        throw new ClientError(`${record.url} returned an invalid share`);
      }
      indexed.push([body.index as number, share]);
    } catch (exc) {
      failures.push(String(exc instanceof Error ? exc.message : exc));
    }
  }));

  if (indexed.length < threshold) {
    throw new ClientError(
      `only ${indexed.length} of ${threshold} required shares issued`,
      failures,
    );
  }
  indexed.sort((a, b) => a[0] - b[0]);
  const credential = credentials.aggCred(indexed.slice(0, threshold));

  const { aggVk } = aggregateDirectory(params, directory, threshold);
  const probe = credentials.proveCred(params, aggVk, state.m, credential,
                                      "credential-self-check", rng);
  if (!credentials.verifyCred(params, aggVk, probe, "credential-self-check")) {
    throw new ClientError("aggregated credential failed self-verification");
  }
  return { ...state, credential };
}

// -- voting -------------------------------------------------------------------

/** Assembles the five-field vote message for one petition. */
export function buildVoteSubmission(
  params: PublicParams,
  state: ClientState,
  aggVk: credentials.AggregatedVerifyKey,
  gammaAgg: tally.AggregatedElGamalKey,
  petitionId: string,
  vote: number,
  rng: Rng,
): Record<string, string> {
  if (state.credential === null) {
    throw new ClientError("no credential in state; run issuance first");
  }
  const bundle = credentials.proveCred(params, aggVk, state.m, state.credential,
                                       petitionId, rng);
  const basis = hashToG1(utf8ToBytes(petitionId));
  const { enc, encNot, proof } = tally.encryptVote(params, gammaAgg.gammaAgg,
                                                   basis, vote, rng);
  const votes = new Uint8Array(260);
  votes.set(enc.a.toBytes(), 0);
  votes.set(enc.b.toBytes(), 65);
  votes.set(encNot.a.toBytes(), 130);
  votes.set(encNot.b.toBytes(), 195);
  return {
    MPCP: b64(bundle.toBytes()),
    MPVP: b64(proof.toBytes()),
    petitionID: petitionId,
    signature: b64(bundle.sigmaPrime.toBytes()),
    votes: b64(votes),
  };
}

/**
 * Builds and submits a vote; returns the server's JSON verdict.  The
 * whole directory must answer: the ballot is encrypted to the n-of-n
 * aggregate of every authority's tally key.
 */
export async function castVote(
  params: PublicParams,
  state: ClientState,
  ownerUrl: string,
  petitionId: string,
  vote: number,
  rng: Rng,
  opts: { fetchFn?: FetchLike } = {},
): Promise<{ status: number; body: Record<string, unknown> }> {
  const fetchFn = opts.fetchFn ?? defaultFetch;
  if (state.threshold === null) {
    throw new ClientError("no authority directory configured");
  }
  const { directory, failures } = await fetchAuthorityDirectory(
    state.authorities, { fetchFn },
  );
  if (failures.length > 0) {
    throw new ClientError("authorities unreachable", failures);
  }
  const { aggVk, gammaAgg } = aggregateDirectory(params, directory, state.threshold);
  const submission = buildVoteSubmission(params, state, aggVk, gammaAgg,
                                         petitionId, vote, rng);
  return postJson(fetchFn, `${ownerUrl}/petitions/${petitionId}/vote`, submission);
}

export async function getResult(
  ownerUrl: string,
  petitionId: string,
  opts: { fetchFn?: FetchLike } = {},
): Promise<{ status: number; body: Record<string, unknown> }> {
  const fetchFn = opts.fetchFn ?? defaultFetch;
  const resp = await fetchFn(`${ownerUrl}/petitions/${petitionId}/result`);
  return { status: resp.status, body: await resp.json() };
}
