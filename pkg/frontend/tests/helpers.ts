/** Shared test plumbing: recorded service responses and a scripted fetch. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import type { FetchLike } from '../src/api';

const here = dirname(fileURLToPath(import.meta.url));

export function recorded<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, 'recorded', `${name}.json`), 'utf8')) as T;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

export interface RecordedCall {
  url: string;
  init?: RequestInit;
}

/**
 * A fetch stub driven by a route table. Each handler receives the call and
 * returns the payload to serve; calls are logged for request-count
 * assertions.
 */
export function scriptedFetch(
  routes: Record<string, (call: RecordedCall) => unknown | Promise<unknown>>,
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const call = { url, init };
    calls.push(call);
    const path = new URL(url, 'http://localhost').pathname;
    const handler = routes[path];
    if (!handler) throw new Error(`unrouted request: ${url}`);
    return jsonResponse(await handler(call));
  };
  return { fetchFn, calls };
}

/** A promise whose resolution the test controls. */
export function deferred<T>(): { promise: Promise<T>; resolve: (value: T) => void } {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}
