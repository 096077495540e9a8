import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { DesignReport } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture(name: string): DesignReport {
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as DesignReport;
}

export interface PendingRequest {
  url: string;
  body: unknown;
  resolve: (resp: { status: number; payload: unknown }) => void;
}

/** fetch stand-in whose responses resolve only when the test says so. */
export function controllableFetch(): {
  fetchImpl: (url: string, init?: RequestInit) => Promise<Response>;
  pending: PendingRequest[];
} {
  const pending: PendingRequest[] = [];
  const fetchImpl = (url: string, init?: RequestInit): Promise<Response> =>
    new Promise((outer) => {
      pending.push({
        url,
        body: init?.body ? JSON.parse(init.body as string) : null,
        resolve: ({ status, payload }) => {
          outer(
            new Response(JSON.stringify(payload), {
              status,
              headers: { "content-type": "application/json" },
            }),
          );
        },
      });
    });
  return { fetchImpl, pending };
}
