/// <reference types="vitest" />
import { defineConfig } from 'vite';

export default defineConfig({
  test: {
    environment: 'jsdom',
    hookTimeout: 240_000,
    testTimeout: 240_000,
    fileParallelism: false,
  },
});
