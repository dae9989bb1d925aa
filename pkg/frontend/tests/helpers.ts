/**
 * Shared test plumbing: a DOM sandbox, a fake fetch that replays recorded
 * service exchanges, and the traceability walker used by the contract
 * suite to pin every displayed number to a recorded response field.
 */

import { readFileSync } from 'node:fs';
import { Window } from 'happy-dom';
import { expect } from 'vitest';
import type { FetchLike } from '../src/api.js';

export interface RecordedExchange {
  name: string;
  request: { method: string; path: string; payload?: unknown };
  response: { status: number; body: unknown };
}

export interface Recorded {
  exchanges: RecordedExchange[];
}

export const loadFixtures = (): Recorded =>
  JSON.parse(readFileSync(new URL('./fixtures/recorded.json', import.meta.url), 'utf8'));

/** JSON with recursively sorted object keys, for request comparison. */
export const stable = (value: unknown): string => {
  if (Array.isArray(value)) return `[${value.map(stable).join(',')}]`;
  if (value && typeof value === 'object') {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stable(v)}`);
    return `{${entries.join(',')}}`;
  }
  return JSON.stringify(value);
};

/** Fetch stand-in that serves only the recorded exchanges, verbatim. */
export const recordedFetch = (recorded: Recorded): FetchLike => {
  return async (url, init) => {
    const method = init?.method ?? 'GET';
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const payload = init?.body ? JSON.parse(String(init.body)) : undefined;
    const hit = recorded.exchanges.find(
      (e) =>
        e.request.method === method &&
        e.request.path === path &&
        stable(e.request.payload) === stable(payload),
    );
    if (!hit) {
      throw new Error(`no recorded exchange for ${method} ${path} ${stable(payload)}`);
    }
    return new Response(JSON.stringify(hit.response.body), {
      status: hit.response.status,
      headers: { 'content-type': 'application/json' },
    });
  };
};

/** Every number appearing anywhere in the recorded response bodies. */
export const recordedNumbers = (recorded: Recorded): Set<string> => {
  const seen = new Set<string>();
  const walk = (value: unknown): void => {
    if (typeof value === 'number') seen.add(String(value));
    else if (Array.isArray(value)) value.forEach(walk);
    else if (value && typeof value === 'object') Object.values(value).forEach(walk);
  };
  for (const exchange of recorded.exchanges) walk(exchange.response.body);
  return seen;
};

/**
 * The no-computation invariant: each displayed number carries its raw
 * service value in the title attribute, the raw value appears verbatim
 * in some recorded response, and the visible text is just that value
 * rendered to two decimals.
 */
export const assertTraceable = (root: HTMLElement, allowed: Set<string>): number => {
  const cells = root.querySelectorAll<HTMLElement>('.num');
  for (const cell of cells) {
    const raw = cell.getAttribute('title');
    expect(raw, 'numeric cell is missing its raw value').toBeTruthy();
    expect(allowed.has(raw!), `displayed number ${raw} not found in any response`).toBe(true);
    const value = Number(raw);
    const sign = cell.classList.contains('num-signed') && value >= 0 ? '+' : '';
    expect(cell.textContent).toBe(sign + value.toFixed(2));
  }
  return cells.length;
};

export const makeDom = (): { document: Document; root: HTMLElement } => {
  const window = new Window();
  const document = window.document as unknown as Document;
  const root = document.createElement('div');
  document.body.appendChild(root);
  return { document, root };
};

export const bloomText = (root: HTMLElement): string => {
  const cell = root.querySelector<HTMLElement>('[data-role="bloom"] .num');
  return cell?.textContent ?? '';
};

export const errorBox = (root: HTMLElement): HTMLElement | null =>
  root.querySelector<HTMLElement>('[data-role="error"]');

export const waitUntil = async (
  check: () => Promise<boolean> | boolean,
  timeoutMs: number,
  stepMs = 200,
): Promise<void> => {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      if (await check()) return;
    } catch {
      // keep polling until the deadline
    }
    if (Date.now() > deadline) throw new Error('condition not met in time');
    await new Promise((r) => setTimeout(r, stepMs));
  }
};
