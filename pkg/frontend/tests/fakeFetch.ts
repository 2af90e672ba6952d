/**
 * Fixture-replaying fetch: routes (method, path) to recorded service
 * responses so the contract tests exercise the real payload shapes.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8"));
}

export interface Route {
  method: string;
  path: string | RegExp;
  /** fixture name, literal body, or handler returning [status, body] */
  reply: string | object | ((body: any) => [number, unknown]);
}

export interface CallLog {
  method: string;
  path: string;
  body: unknown;
}

export function fakeFetch(routes: Route[], calls: CallLog[] = []): FetchLike {
  return async (url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path, body });
    for (const route of routes) {
      const matches = route.method === method &&
        (typeof route.path === "string" ? route.path === path : route.path.test(path));
      if (!matches) {
        continue;
      }
      let status = 200;
      let payload: unknown;
      if (typeof route.reply === "function") {
        [status, payload] = route.reply(body);
      } else if (typeof route.reply === "string") {
        payload = fixture(route.reply);
      } else {
        payload = route.reply;
      }
      return new Response(JSON.stringify(payload), {
        status,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(JSON.stringify({ code: "not_found", message: `no route ${method} ${path}`, detail: "" }),
                        { status: 404 });
  };
}
