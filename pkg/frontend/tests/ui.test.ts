// @vitest-environment happy-dom

/**
 * End-to-end: drives the mounted single-page app in a simulated
 * browser against live authority and owner nodes spawned from the
 * reference command-line tool.  Covers the whole voter journey —
 * credential issuance (including authority outages), voting, the
 * double-vote banner, pending and final results with the green/red
 * rule — and, because the deployment and the first voter reuse the
 * recorded deterministic seed, byte-level wire equality between what
 * the browser sends and what the command-line client sent.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import nodeConsole from "node:console";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { mountApp, type AppHandle } from "../src/app.js";
import { type FetchLike } from "../src/client.js";
import { unb64 } from "../src/wire.js";
import { canonical, canonicalText } from "./support.js";

// import.meta.url carries the simulated browser origin here, so the
// fixture is addressed relative to the project root instead.
const flow = JSON.parse(
  readFileSync(join(process.cwd(), "tests", "fixtures", "flow.json"), "utf8"),
);

// The deployment is seeded with the recorded seed, so the dealer hands
// the authorities the exact keys in the fixture and the first voter's
// messages must reproduce the recorded bytes.
const SEED: string = flow.seed;
const P1: string = flow.petitionId;
const P2 = "second-petition";
const PYTHON = "python3";
const CLI_MODULE = ["-m", "zkpetition.cli"];
const env = { ...process.env, PETITION_TEST_SEED: SEED };
const utf8 = new TextDecoder();

let workdir = "";
let ownerUrl = "";
let ownerProc: ChildProcess | null = null;
const authUrls: string[] = [];
const authConfigs: string[] = [];
const authProcs: (ChildProcess | null)[] = [];
const nodeLogs: string[] = [];

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.once("error", reject);
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      srv.close(() => resolve(address.port));
    });
  });
}

function runCli(args: string[]): string {
  const proc = spawnSync(PYTHON, [...CLI_MODULE, ...args], { env, encoding: "utf8" });
  if (proc.status !== 0) {
    throw new Error(`cli ${args.join(" ")} failed rc=${proc.status}: ${proc.stderr}`);
  }
  return proc.stdout;
}

function startNode(args: string[], label: string): ChildProcess {
  const proc = spawn(PYTHON, [...CLI_MODULE, ...args], {
    env,
    stdio: ["ignore", "ignore", "pipe"],
  });
  proc.stderr?.on("data", (chunk: Buffer) => {
    nodeLogs.push(`[${label}] ${chunk.toString()}`);
  });
  return proc;
}

async function waitHealthy(url: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const resp = await window.fetch(`${url}/healthz`);
      if (resp.status === 200) return;
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  throw new Error(`${url} never became healthy\n${nodeLogs.slice(-5).join("")}`);
}

async function waitGone(url: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      await window.fetch(`${url}/healthz`);
    } catch {
      return;
    }
    await sleep(50);
  }
  throw new Error(`${url} still answering after shutdown`);
}

function startAuthority(i: number): void {
  authProcs[i] = startNode(["authority", "serve", "--config", authConfigs[i]],
                           `auth${i + 1}`);
}

async function killAuthority(i: number): Promise<void> {
  authProcs[i]?.kill("SIGTERM");
  authProcs[i] = null;
  await waitGone(authUrls[i]);
}

// -- page driver ---------------------------------------------------------------

interface VoterPage {
  readonly root: HTMLElement;
  readonly app: AppHandle;
  el<T extends HTMLElement = HTMLElement>(id: string): T;
  click(id: string): Promise<void>;
  set(id: string, value: string): void;
  phase(): string;
  banner(): { kind: string; text: string };
}

function mountVoter(namespace: string, seed: string | null,
                    fetchFn?: FetchLike): VoterPage {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = mountApp(root, { seed, namespace, fetchFn });
  const el = <T extends HTMLElement = HTMLElement>(id: string): T => {
    const found = root.querySelector<T>(`[data-testid="${id}"]`);
    if (!found) throw new Error(`missing element ${id}`);
    return found;
  };
  return {
    root,
    app,
    el,
    async click(id) {
      el<HTMLButtonElement>(id).click();
      await app.whenIdle();
    },
    set(id, value) {
      el<HTMLInputElement>(id).value = value;
    },
    phase: () => root.dataset.phase ?? "",
    banner: () => {
      const b = el<HTMLParagraphElement>("banner");
      return { kind: b.dataset.kind ?? "", text: b.textContent ?? "" };
    },
  };
}

async function configure(v: VoterPage): Promise<void> {
  v.set("authorities", authUrls.join(","));
  v.set("threshold", "2");
  v.set("owner", ownerUrl);
  await v.click("save-config");
  expect(v.banner()).toEqual({ kind: "info", text: "configuration saved" });
}

// Records every request the first voter's page makes, so its bodies
// can be compared with the command-line client's recorded bytes.
interface RecordedRequest {
  method: string;
  url: string;
  body: string | null;
}
const recorded: RecordedRequest[] = [];
const recordingFetch: FetchLike = (input, init) => {
  recorded.push({
    method: init?.method ?? "GET",
    url: input,
    body: typeof init?.body === "string" ? init.body : null,
  });
  return window.fetch(input, init);
};

// -- deployment ----------------------------------------------------------------

// The simulated browser logs every failed fetch to the console it saw
// at startup — the plain process console, not the runner's wrapper.
// The outage and rejection tests below fail requests on purpose, so
// silence exactly that noise and let everything else through.
const rawConsoleError = nodeConsole.error.bind(nodeConsole);
nodeConsole.error = (...args: unknown[]) => {
  const expected = args.some((arg) =>
    (arg instanceof Error && arg.message.includes("ECONNREFUSED"))
    || (typeof arg === "string" && /^(GET|POST) http:\/\/127\.0\.0\.1:\d+\/.* \d{3} /.test(arg)));
  if (!expected) rawConsoleError(...args);
};

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "webui-e2e-"));
  const keysDir = join(workdir, "keys");
  runCli(["dealer", "--threshold", "2", "--authorities", "3", "--out", keysDir]);

  for (let i = 1; i <= 3; i++) {
    const port = await freePort();
    const configPath = join(workdir, `auth${i}.json`);
    writeFileSync(configPath, JSON.stringify({
      listen: `127.0.0.1:${port}`,
      signing_key: join(keysDir, `authority-${i}.key.json`),
      data_dir: join(workdir, `auth${i}-data`),
    }));
    authConfigs.push(configPath);
    authUrls.push(`http://127.0.0.1:${port}`);
    authProcs.push(null);
    startAuthority(i - 1);
  }
  await Promise.all(authUrls.map(waitHealthy));

  const ownerPort = await freePort();
  const ownerConfig = join(workdir, "owner.json");
  writeFileSync(ownerConfig, JSON.stringify({
    listen: `127.0.0.1:${ownerPort}`,
    authorities: authUrls,
    threshold: 2,
    data_dir: join(workdir, "owner-data"),
  }));
  ownerUrl = `http://127.0.0.1:${ownerPort}`;
  ownerProc = startNode(["owner", "serve", "--config", ownerConfig], "owner");
  await waitHealthy(ownerUrl);

  runCli(["create-petition", "--owner", ownerUrl, "--petition", P1]);
  runCli(["create-petition", "--owner", ownerUrl, "--petition", P2]);
});

afterAll(() => {
  nodeConsole.error = rawConsoleError;
  for (const proc of [...authProcs, ownerProc]) {
    proc?.kill("SIGTERM");
  }
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

// -- the journey ---------------------------------------------------------------

describe("browser voter journey against live nodes", () => {
  let voterA: VoterPage;
  let voterB: VoterPage;
  let voterD: VoterPage;

  it("the seeded deployment serves the recorded authority directory", async () => {
    for (let i = 0; i < authUrls.length; i++) {
      const resp = await window.fetch(`${authUrls[i]}/keys`);
      expect(resp.status).toBe(200);
      expect(canonical(await resp.json())).toBe(canonical(flow.directory[i]));
    }
  });

  it("walks needs-keys → needs-credential → ready and swaps the button label",
     async () => {
    voterA = mountVoter("voter-a", SEED, recordingFetch);
    expect(voterA.phase()).toBe("needs-keys");
    expect(voterA.el<HTMLParagraphElement>("seed-warning").hidden).toBe(false);
    expect(voterA.el<HTMLButtonElement>("credential-button").disabled).toBe(true);
    expect(voterA.el<HTMLButtonElement>("vote-yes").disabled).toBe(true);

    await configure(voterA);
    await voterA.click("generate-keys");
    expect(voterA.phase()).toBe("needs-credential");
    expect(voterA.el("device-key").textContent).toMatch(/^device key [0-9a-f]{16}…$/u);

    expect(voterA.el("credential-button").textContent).toBe("Sign Credential");
    await voterA.click("credential-button");
    expect(voterA.phase()).toBe("ready");
    expect(voterA.banner())
      .toEqual({ kind: "info", text: "credential issued and verified" });
    expect(voterA.el("credential-button").textContent).toBe("Randomize Credential");
    expect(voterA.el("issue-failures").querySelectorAll("li").length).toBe(0);
    expect(voterA.el<HTMLButtonElement>("vote-yes").disabled).toBe(false);
  });

  it("sends the same issuance bytes as the command-line client", () => {
    const bodies = recorded.filter((r) => r.url.endsWith("/sign") && r.body !== null);
    expect(bodies.length).toBe(3);
    const reference = canonicalText(utf8.decode(unb64(flow.signRequestBody)));
    for (const body of bodies) {
      expect(canonicalText(body.body!)).toBe(reference);
    }
  });

  it("keeps the session across a reload", () => {
    voterA.root.remove();
    voterA = mountVoter("voter-a", SEED, recordingFetch);
    expect(voterA.phase()).toBe("ready");
    expect(voterA.el("credential-button").textContent).toBe("Randomize Credential");
    expect(voterA.el<HTMLInputElement>("authorities").value).toBe(authUrls.join(","));
    expect(voterA.el<HTMLInputElement>("threshold").value).toBe("2");
    expect(voterA.el<HTMLInputElement>("owner").value).toBe(ownerUrl);
    expect(voterA.el("device-key").textContent).not.toBe("");
  });

  it("accepts the first vote and announces it", async () => {
    voterA.set("petition", P1);
    await voterA.click("vote-yes");
    expect(voterA.phase()).toBe("voted");
    expect(voterA.root.dataset.votedPetition).toBe(P1);
    expect(voterA.root.dataset.votedChoice).toBe("yes");
    expect(voterA.el("vote-status").textContent).toBe(`voted 👍 on ${P1}`);
    expect(voterA.banner()).toEqual({ kind: "info", text: "vote accepted" });
  });

  it("sends the same vote bytes as the command-line client", () => {
    const votes = recorded.filter(
      (r) => r.url === `${ownerUrl}/petitions/${P1}/vote` && r.body !== null,
    );
    expect(votes.length).toBe(1);
    const reference = canonicalText(utf8.decode(unb64(flow.voteRequestBody)));
    expect(canonicalText(votes[0].body!)).toBe(reference);
  });

  it("never puts a secret scalar into a network payload", () => {
    const raw = window.localStorage.getItem("voter-a/state");
    expect(raw).not.toBeNull();
    const stored = JSON.parse(raw!);
    const secrets: string[] = [stored.m, stored.d, stored.device_priv];
    const bodies = recorded.filter((r) => r.body !== null).map((r) => r.body!);
    expect(bodies.length).toBeGreaterThan(0);
    for (const secret of secrets) {
      expect(secret.length).toBeGreaterThan(40); // base64 of a full scalar
      for (const body of bodies) {
        expect(body).not.toContain(secret);
      }
    }
  });

  it("shows the double-vote banner on a repeat vote", async () => {
    await voterA.click("vote-yes");
    expect(voterA.banner()).toEqual({ kind: "error", text: `already voted on ${P1}` });
    expect(voterA.el("vote-status").textContent).toBe(`voted 👍 on ${P1}`);
  });

  it("randomizes the credential without resetting the double-spend tag",
     async () => {
    const before = JSON.parse(window.localStorage.getItem("voter-a/state")!);
    await voterA.click("credential-button");
    expect(voterA.banner()).toEqual({ kind: "info", text: "credential randomized" });
    const after = JSON.parse(window.localStorage.getItem("voter-a/state")!);
    expect(after.credential).not.toBe(before.credential);

    // the per-petition tag depends only on the attribute, so the
    // refreshed credential is still caught on the same petition
    voterA.set("petition", P1);
    await voterA.click("vote-yes");
    expect(voterA.banner()).toEqual({ kind: "error", text: `already voted on ${P1}` });
  });

  it("votes with the refreshed credential on a different petition", async () => {
    voterA.set("petition", P2);
    await voterA.click("vote-yes");
    expect(voterA.phase()).toBe("voted");
    expect(voterA.root.dataset.votedPetition).toBe(P2);
    expect(voterA.el("vote-status").textContent).toBe(`voted 👍 on ${P2}`);
  });

  it("rejects an empty petition id locally", async () => {
    const requestsBefore = recorded.length;
    voterA.set("petition", "");
    await voterA.click("vote-yes");
    expect(voterA.banner()).toEqual({ kind: "error", text: "enter a petition id" });
    expect(recorded.length).toBe(requestsBefore);
  });

  it("reports a pending result while the petition is open", async () => {
    voterA.set("petition", P1);
    await voterA.click("check-result");
    const result = voterA.el<HTMLParagraphElement>("result");
    expect(result.textContent).toBe("not yet ended");
    expect(result.dataset.color).toBe("pending");
    expect(voterA.phase()).toBe("showing-result");
  });

  it("shows a banner for an unknown petition id", async () => {
    voterA.set("petition", "no-such-petition");
    await voterA.click("check-result");
    expect(voterA.banner().kind).toBe("error");
    expect(voterA.banner().text).toContain("result unavailable: unknown_petition");
    expect(voterA.el<HTMLParagraphElement>("result").dataset.color).toBe("none");
  });

  it("lets a second voter enroll and vote no", async () => {
    voterB = mountVoter("voter-b", "voter-b-seed");
    await configure(voterB);
    await voterB.click("generate-keys");
    await voterB.click("credential-button");
    expect(voterB.phase()).toBe("ready");
    voterB.set("petition", P2);
    await voterB.click("vote-no");
    expect(voterB.phase()).toBe("voted");
    expect(voterB.el("vote-status").textContent).toBe(`voted 👎 on ${P2}`);
  });

  it("still issues a credential when one authority is down", async () => {
    await killAuthority(2);
    voterD = mountVoter("voter-d", "voter-d-seed");
    await configure(voterD);
    await voterD.click("generate-keys");
    await voterD.click("credential-button");
    expect(voterD.phase()).toBe("ready");
    expect(voterD.banner())
      .toEqual({ kind: "info", text: "credential issued and verified" });
  });

  it("stays in needs-credential below the threshold, listing the failures",
     async () => {
    await killAuthority(1);
    const voterE = mountVoter("voter-e", "voter-e-seed");
    await configure(voterE);
    await voterE.click("generate-keys");
    await voterE.click("credential-button");
    expect(voterE.phase()).toBe("needs-credential");
    expect(voterE.banner().kind).toBe("error");
    expect(voterE.banner().text).toContain("only 1 of 2 required authorities reachable");
    const items = Array.from(
      voterE.el("issue-failures").querySelectorAll("li"),
    );
    expect(items.length).toBe(2);
    for (const item of items) {
      expect(item.textContent).toContain("unreachable");
    }
    const stored = JSON.parse(window.localStorage.getItem("voter-e/state")!);
    expect(stored.credential).toBeNull();
  });

  it("shows an error banner and changes nothing when all authorities are down",
     async () => {
    await killAuthority(0);
    const voterF = mountVoter("voter-f", "voter-f-seed");
    await configure(voterF);
    await voterF.click("generate-keys");
    const before = window.localStorage.getItem("voter-f/state");
    await voterF.click("credential-button");
    expect(voterF.phase()).toBe("needs-credential");
    expect(voterF.banner().kind).toBe("error");
    expect(voterF.banner().text).toContain("only 0 of 2 required authorities reachable");
    expect(voterF.el("issue-failures").querySelectorAll("li").length).toBe(3);
    expect(window.localStorage.getItem("voter-f/state")).toBe(before);
  });

  it("needs the whole directory to vote, and recovers once it returns",
     async () => {
    voterD.set("petition", P1);
    await voterD.click("vote-yes");
    expect(voterD.banner().kind).toBe("error");
    expect(voterD.banner().text).toContain("authorities unreachable");
    expect(voterD.phase()).toBe("ready");

    for (let i = 0; i < authUrls.length; i++) {
      if (authProcs[i] === null) startAuthority(i);
    }
    await Promise.all(authUrls.map(waitHealthy));

    await voterD.click("vote-yes");
    expect(voterD.phase()).toBe("voted");
    expect(voterD.el("vote-status").textContent).toBe(`voted 👍 on ${P1}`);
  });

  it("renders a won petition green", async () => {
    const out = runCli(["close-petition", "--owner", ownerUrl, "--petition", P1]);
    expect(out).toContain("yes 2 – no 0");
    voterA.set("petition", P1);
    await voterA.click("check-result");
    const result = voterA.el<HTMLParagraphElement>("result");
    expect(result.textContent).toBe("2 – 0");
    expect(result.dataset.color).toBe("green");
  });

  it("renders a tie red", async () => {
    const out = runCli(["close-petition", "--owner", ownerUrl, "--petition", P2]);
    expect(out).toContain("yes 1 – no 1");
    voterA.set("petition", P2);
    await voterA.click("check-result");
    const result = voterA.el<HTMLParagraphElement>("result");
    expect(result.textContent).toBe("1 – 1");
    expect(result.dataset.color).toBe("red");
  });

  it("warns about the deterministic seed only when one is supplied", () => {
    expect(voterA.el<HTMLParagraphElement>("seed-warning").hidden).toBe(false);
    const plain = mountVoter("voter-plain", null);
    expect(plain.el<HTMLParagraphElement>("seed-warning").hidden).toBe(true);
    plain.root.remove();
  });
});
