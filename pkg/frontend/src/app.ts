/**
 * The voter single-page app: a small state machine over the protocol
 * client.  Phases move needs-keys → needs-credential → ready →
 * voted/showing-result; the "Sign Credential" button becomes
 * "Randomize Credential" once a credential is held.
 *
 * All actions run on one serialized queue (buttons stay disabled while
 * an action is in flight), authority requests inside an action fire
 * concurrently, and every action draws from a fresh RNG: the platform
 * cryptographic RNG normally, or a deterministic stream when a test
 * seed is supplied.
 */

import * as client from "./client.js";
import { Credential } from "./credentials.js";
import { bytesToHex } from "./bytesutil.js";
import { defaultRng, randomScalar, setup, type PublicParams } from "./groups.js";
import { AppStorage, type AppConfig } from "./storage.js";

export interface AppOptions {
  /** Deterministic test seed; omit for the platform cryptographic RNG. */
  seed?: string | null;
  /** Storage backend; defaults to window.localStorage. */
  storage?: Storage;
  /** Storage namespace, so several voters can share one origin in tests. */
  namespace?: string;
  /** Network override for tests; defaults to fetch. */
  fetchFn?: client.FetchLike;
}

export interface AppHandle {
  /** Resolves once every queued action has finished. */
  whenIdle(): Promise<void>;
}

type Phase = "needs-keys" | "needs-credential" | "ready" | "voted" | "showing-result";

const TEMPLATE = `
<h1>Petition voting</h1>
<p class="seed-warning" data-testid="seed-warning" hidden>
  Deterministic test seed active — every key and nonce is predictable.
  Never use this mode for a real vote.
</p>
<p data-testid="banner" data-kind="none" hidden></p>
<section>
  <h2>Network</h2>
  <label>Authorities (comma-separated)
    <input data-testid="authorities" size="60">
  </label>
  <label>Threshold
    <input data-testid="threshold" type="number" min="1" size="4">
  </label>
  <label>Petition owner
    <input data-testid="owner" size="30">
  </label>
  <button data-testid="save-config">Save Configuration</button>
</section>
<section>
  <h2>Identity</h2>
  <button data-testid="generate-keys">Generate Keys</button>
  <span data-testid="device-key"></span>
</section>
<section>
  <h2>Credential</h2>
  <button data-testid="credential-button">Sign Credential</button>
  <ul data-testid="issue-failures"></ul>
</section>
<section>
  <h2>Vote</h2>
  <label>Petition
    <input data-testid="petition" size="30">
  </label>
  <button data-testid="vote-yes" title="vote yes">👍</button>
  <button data-testid="vote-no" title="vote no">👎</button>
  <button data-testid="check-result">Check Result</button>
  <p data-testid="vote-status"></p>
  <p data-testid="result" data-color="none"></p>
</section>
`;

export function mountApp(root: HTMLElement, opts: AppOptions = {}): AppHandle {
  const storage = new AppStorage(
    opts.storage ?? window.localStorage,
    opts.namespace,
  );
  const fetchFn = opts.fetchFn
    ?? ((input: string, init?: RequestInit) => window.fetch(input, init));
  const freshRng = () => defaultRng(opts.seed);

  root.innerHTML = TEMPLATE;
  root.classList.add("petition-app");
  const el = <T extends HTMLElement>(id: string): T => {
    const found = root.querySelector<T>(`[data-testid="${id}"]`);
    if (!found) throw new Error(`missing element ${id}`);
    return found;
  };
  const banner = el<HTMLParagraphElement>("banner");
  const seedWarning = el<HTMLParagraphElement>("seed-warning");
  const authoritiesInput = el<HTMLInputElement>("authorities");
  const thresholdInput = el<HTMLInputElement>("threshold");
  const ownerInput = el<HTMLInputElement>("owner");
  const saveConfigBtn = el<HTMLButtonElement>("save-config");
  const generateBtn = el<HTMLButtonElement>("generate-keys");
  const deviceKey = el<HTMLSpanElement>("device-key");
  const credentialBtn = el<HTMLButtonElement>("credential-button");
  const failuresList = el<HTMLUListElement>("issue-failures");
  const petitionInput = el<HTMLInputElement>("petition");
  const voteYesBtn = el<HTMLButtonElement>("vote-yes");
  const voteNoBtn = el<HTMLButtonElement>("vote-no");
  const checkBtn = el<HTMLButtonElement>("check-result");
  const voteStatus = el<HTMLParagraphElement>("vote-status");
  const resultLine = el<HTMLParagraphElement>("result");
  const buttons = [saveConfigBtn, generateBtn, credentialBtn,
                   voteYesBtn, voteNoBtn, checkBtn];

  seedWarning.hidden = !opts.seed;

  let state = storage.loadState();
  let config: AppConfig = storage.loadConfig()
    ?? { authorities: [], threshold: null, ownerUrl: "" };
  let phase: Phase = state === null
    ? "needs-keys"
    : state.credential === null ? "needs-credential" : "ready";

  const paramsFor = (tag: string): PublicParams => setup(tag);

  function showBanner(kind: "error" | "info", text: string): void {
    banner.dataset.kind = kind;
    banner.textContent = text;
    banner.hidden = false;
  }

  function clearBanner(): void {
    banner.dataset.kind = "none";
    banner.textContent = "";
    banner.hidden = true;
  }

  function showFailures(failures: readonly string[]): void {
    failuresList.replaceChildren(...failures.map((failure) => {
      const item = document.createElement("li");
      item.textContent = failure;
      return item;
    }));
  }

  function render(): void {
    root.dataset.phase = phase;
    authoritiesInput.value = config.authorities.join(",");
    thresholdInput.value = config.threshold === null ? "" : String(config.threshold);
    ownerInput.value = config.ownerUrl;
    deviceKey.textContent = state === null
      ? ""
      : `device key ${bytesToHex(state.devicePub).slice(0, 16)}…`;
    credentialBtn.textContent = state?.credential
      ? "Randomize Credential"
      : "Sign Credential";
    credentialBtn.disabled = state === null;
    voteYesBtn.disabled = voteNoBtn.disabled = !state?.credential;
  }

  // One serialized queue: a click while an action runs is queued, not
  // interleaved, and the buttons are disabled meanwhile.
  let queue: Promise<void> = Promise.resolve();
  function enqueue(action: () => Promise<void> | void): void {
    queue = queue.then(async () => {
      for (const b of buttons) b.disabled = true;
      try {
        await action();
      } catch (exc) {
        const detail = exc instanceof client.ClientError && exc.failures.length > 0
          ? `: ${exc.failures.join("; ")}`
          : "";
        showBanner("error", (exc instanceof Error ? exc.message : String(exc)) + detail);
      } finally {
        for (const b of buttons) b.disabled = false;
        render();
      }
    });
  }

  function currentConfigState(): client.ClientState {
    if (state === null) throw new client.ClientError("generate keys first");
    return { ...state, authorities: config.authorities, threshold: config.threshold };
  }

  saveConfigBtn.addEventListener("click", () => enqueue(() => {
    clearBanner();
    const authorities = authoritiesInput.value
      .split(",").map((s) => s.trim()).filter((s) => s.length > 0);
    const threshold = parseInt(thresholdInput.value, 10);
    if (authorities.length === 0) {
      throw new client.ClientError("at least one authority URL is required");
    }
    if (!Number.isFinite(threshold) || threshold < 1 || threshold > authorities.length) {
      throw new client.ClientError("threshold must be between 1 and the authority count");
    }
    config = { authorities, threshold, ownerUrl: ownerInput.value.trim() };
    storage.saveConfig(config);
    if (state !== null) {
      state = { ...state, authorities, threshold };
      storage.saveState(state);
    }
    showBanner("info", "configuration saved");
  }));

  generateBtn.addEventListener("click", () => enqueue(() => {
    clearBanner();
    state = {
      ...client.newState(freshRng()),
      authorities: config.authorities,
      threshold: config.threshold,
    };
    storage.saveState(state);
    phase = "needs-credential";
    voteStatus.textContent = "";
    resultLine.textContent = "";
    resultLine.dataset.color = "none";
    showFailures([]);
    showBanner("info", "device and attribute keys generated");
  }));

  credentialBtn.addEventListener("click", () => enqueue(async () => {
    clearBanner();
    showFailures([]);
    if (state?.credential) {
      // unlinkable refresh: scaling both halves keeps the credential
      // valid for the same hidden attribute
      const rPrime = randomScalar(freshRng());
      state = {
        ...state,
        credential: new Credential(
          state.credential.h.mul(rPrime),
          state.credential.s.mul(rPrime),
        ),
      };
      storage.saveState(state);
      showBanner("info", "credential randomized");
      return;
    }
    const working = currentConfigState();
    const params = paramsFor(working.securityTag);
    try {
      state = await client.requestCredential(params, working, freshRng(), { fetchFn });
      storage.saveState(state);
      phase = "ready";
      showBanner("info", "credential issued and verified");
    } catch (exc) {
      if (exc instanceof client.ClientError) {
        showFailures(exc.failures);
      }
      throw exc; // phase unchanged: still needs-credential
    }
  }));

  function castVote(choice: 0 | 1): void {
    enqueue(async () => {
      clearBanner();
      const petitionId = petitionInput.value.trim();
      if (petitionId === "") {
        throw new client.ClientError("enter a petition id");
      }
      const working = currentConfigState();
      if (working.credential === null) {
        throw new client.ClientError("sign a credential first");
      }
      const params = paramsFor(working.securityTag);
      const { status, body } = await client.castVote(
        params, working, config.ownerUrl, petitionId, choice, freshRng(), { fetchFn },
      );
      if (status === 200 && body.status === "accepted") {
        phase = "voted";
        root.dataset.votedPetition = petitionId;
        root.dataset.votedChoice = choice === 1 ? "yes" : "no";
        voteStatus.textContent = `voted ${choice === 1 ? "👍" : "👎"} on ${petitionId}`;
        showBanner("info", "vote accepted");
      } else if (body.error === "double_vote") {
        showBanner("error", `already voted on ${petitionId}`);
      } else {
        showBanner("error", `vote rejected: ${body.error ?? status}`);
      }
    });
  }

  voteYesBtn.addEventListener("click", () => castVote(1));
  voteNoBtn.addEventListener("click", () => castVote(0));

  checkBtn.addEventListener("click", () => enqueue(async () => {
    clearBanner();
    const petitionId = petitionInput.value.trim();
    if (petitionId === "") {
      throw new client.ClientError("enter a petition id");
    }
    const { status, body } = await client.getResult(config.ownerUrl, petitionId,
                                                    { fetchFn });
    if (status === 200 && body.status === "finished") {
      const yes = body.yes as number;
      const no = body.no as number;
      phase = "showing-result";
      resultLine.textContent = `${yes} – ${no}`;
      // pass = strictly more yes than no; a tie fails and renders red
      resultLine.dataset.color = yes > no ? "green" : "red";
    } else if (status === 200 && body.status === "pending") {
      phase = "showing-result";
      resultLine.textContent = "not yet ended";
      resultLine.dataset.color = "pending";
    } else {
      resultLine.textContent = "";
      resultLine.dataset.color = "none";
      showBanner("error", `result unavailable: ${body.error ?? status}`);
    }
  }));

  render();
  return {
    whenIdle: () => queue,
  };
}
