import { defineConfig } from "vitest/config";

// Tests default to the node environment; the browser-flow suite opts
// into happy-dom per-file.  Timeouts are generous because the pairing
// arithmetic is pure bigint math and the end-to-end suite drives real
// HTTP nodes.
export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 300_000,
    hookTimeout: 300_000,
  },
});
