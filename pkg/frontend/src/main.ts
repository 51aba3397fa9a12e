/**
 * Browser entry point: mounts the app into #app.  A `seed` query
 * parameter pins the deterministic test RNG (the analog of the node
 * processes' test-seed environment variable); without it all
 * randomness comes from the platform cryptographic RNG.
 */

import { mountApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");
mountApp(root, { seed: new URLSearchParams(window.location.search).get("seed") });
