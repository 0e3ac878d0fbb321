import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api';
import { ExplorerStore } from '../src/state';
import type { BaselineResponse, ExploreResponse } from '../src/types';
import { deferred, recorded, scriptedFetch } from './helpers';

const exploreDefault = recorded<ExploreResponse>('explore_default');
const exploreAlpha1 = recorded<ExploreResponse>('explore_alpha1');
const baselinePair = recorded<BaselineResponse>('baseline_q5582_q9871');
const baselineMissing = recorded<BaselineResponse>('baseline_disconnected');

function makeStore(
  routes: Parameters<typeof scriptedFetch>[0] = { '/explore': () => exploreDefault },
) {
  const { fetchFn, calls } = scriptedFetch(routes);
  const api = new ApiClient('http://localhost:8000', fetchFn);
  const store = new ExplorerStore(api);
  return { store, calls };
}

describe('alpha slider', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('a drag across many values issues exactly one request', async () => {
    const { store, calls } = makeStore();
    for (const alpha of [0.51, 0.55, 0.6, 0.72, 0.9]) store.setAlpha(alpha);
    expect(calls.length).toBe(0); // still inside the debounce window
    await vi.runAllTimersAsync();
    expect(calls.length).toBe(1);
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body.alpha).toBeCloseTo(0.9, 10);
    expect(store.state.results.length).toBe(exploreDefault.results.length);
  });

  it('an unchanged alpha issues no request', async () => {
    const { store, calls } = makeStore();
    store.setAlpha(0.5); // the initial value
    await vi.runAllTimersAsync();
    expect(calls.length).toBe(0);
  });

  it('alpha is quantized to the slider step', async () => {
    const { store } = makeStore();
    store.setAlpha(0.70000000004);
    expect(store.state.alpha).toBeCloseTo(0.7, 12);
    await vi.runAllTimersAsync();
  });
});

describe('response ordering', () => {
  it('displays exactly the order the service returned', async () => {
    const { store } = makeStore({ '/explore': () => exploreAlpha1 });
    await store.explore();
    const shown = store.visibleResults();
    expect(shown.map((r) => [r.entity1, r.entity2, r.relationship_type])).toEqual(
      exploreAlpha1.results.map((r) => [r.entity1, r.entity2, r.relationship_type]),
    );
    const scores = shown.map((r) => r.breakdown.score);
    expect([...scores].sort((a, b) => b - a)).toEqual(scores);
  });

  it('a stale response never overwrites a newer one', async () => {
    const slow = deferred<ExploreResponse>();
    const fast = deferred<ExploreResponse>();
    let call = 0;
    const { store } = makeStore({
      '/explore': () => (call++ === 0 ? slow.promise : fast.promise),
    });
    const first = store.explore();
    const second = store.explore();
    fast.resolve(exploreAlpha1);
    await second;
    expect(store.state.results).toEqual(exploreAlpha1.results);
    slow.resolve(exploreDefault); // the old request finally lands
    await first;
    expect(store.state.results).toEqual(exploreAlpha1.results);
    expect(store.state.requestInFlight).toBe(false);
  });

  it('a failed request keeps the previous result list and surfaces the error', async () => {
    let fail = false;
    const { store } = makeStore({
      '/explore': () => {
        if (fail) throw new Error('boom');
        return exploreDefault;
      },
    });
    await store.explore();
    expect(store.state.results.length).toBeGreaterThan(0);
    fail = true;
    await store.explore();
    expect(store.state.results).toEqual(exploreDefault.results);
    expect(store.state.error).toMatch(/unreachable|boom/);
  });
});

describe('facets', () => {
  it('toggling a type facet filters without a new request', async () => {
    const { store, calls } = makeStore();
    await store.explore();
    const before = calls.length;
    store.toggleTypeFacet('born_in');
    expect(calls.length).toBe(before);
    const visible = store.visibleResults();
    expect(visible.length).toBeGreaterThan(0);
    expect(visible.every((r) => r.relationship_type === 'born_in')).toBe(true);
  });

  it('clearing facets restores the full last result list', async () => {
    const { store } = makeStore();
    await store.explore();
    store.toggleTypeFacet('born_in');
    store.setScoreRange(0.9, null);
    store.clearFacets();
    expect(store.visibleResults()).toEqual(exploreDefault.results);
  });

  it('a score range narrows to the matching band', async () => {
    const { store } = makeStore();
    await store.explore();
    const scores = exploreDefault.results.map((r) => r.breakdown.score);
    const mid = scores[Math.floor(scores.length / 2)];
    store.setScoreRange(mid, null);
    expect(store.visibleResults().every((r) => r.breakdown.score >= mid)).toBe(true);
    store.setScoreRange(null, mid);
    expect(store.visibleResults().every((r) => r.breakdown.score <= mid)).toBe(true);
  });

  it('a facet with zero matches yields an empty list, not an error', async () => {
    const { store } = makeStore();
    await store.explore();
    store.toggleTypeFacet('no_such_type');
    expect(store.visibleResults()).toEqual([]);
    expect(store.state.error).toBeNull();
  });
});

describe('baseline comparison', () => {
  it('fetches the path verbalization for a connected pair', async () => {
    const { store } = makeStore({
      '/explore': () => exploreDefault,
      '/baseline': () => baselinePair,
    });
    await store.explore();
    const result = await store.fetchBaseline(store.state.results[0]);
    expect(result.found).toBe(true);
    expect(result.explanation).toContain('--[');
  });

  it('reports a missing path for a disconnected pair', async () => {
    const { store } = makeStore({
      '/explore': () => exploreDefault,
      '/baseline': () => baselineMissing,
    });
    await store.explore();
    const result = await store.fetchBaseline(store.state.results[0]);
    expect(result).toEqual({ found: false, explanation: null });
  });
});

describe('url state', () => {
  it('round-trips through the query string', () => {
    const { fetchFn } = scriptedFetch({});
    const api = new ApiClient('http://localhost:8000', fetchFn);
    const store = ExplorerStore.fromUrlQuery(
      api,
      'alpha=0.75&k=5&types=born_in,works_in&smin=0.2&e1=http://x/a',
    );
    expect(store.state.alpha).toBe(0.75);
    expect(store.state.k).toBe(5);
    expect(store.state.facetTypes).toEqual(['born_in', 'works_in']);
    expect(store.state.scoreMin).toBe(0.2);
    expect(store.state.entity1).toBe('http://x/a');
    const rebuilt = ExplorerStore.fromUrlQuery(api, store.toUrlQuery());
    expect(rebuilt.state.alpha).toBe(store.state.alpha);
    expect(rebuilt.state.facetTypes).toEqual(store.state.facetTypes);
    expect(rebuilt.state.scoreMin).toBe(store.state.scoreMin);
  });
});
