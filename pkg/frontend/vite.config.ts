import { defineConfig } from "vitest/config";

// Dev server proxies /api to a locally running review service
// (afforge serve or afforge mock-serve on the default port).
export default defineConfig({
  server: {
    port: 5173,
    proxy: {
      "/api": { target: "http://127.0.0.1:8787", changeOrigin: true },
    },
  },
  build: {
    outDir: "dist",
    sourcemap: true,
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
