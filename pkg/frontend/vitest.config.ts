import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    testTimeout: 60_000,
    hookTimeout: 120_000,
    // the live suite drives one shared backend; keep files sequential
    fileParallelism: false,
  },
});
