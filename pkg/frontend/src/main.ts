/**
 * Browser entry point: wires the store to the DOM. Layout is a facet
 * rail, a results column, and a detail panel; every state change is
 * mirrored into the URL query string.
 */

import { ApiClient } from './api';
import { ExplorerStore } from './state';
import { renderDetail, renderError, renderFacetRail, renderResults } from './view';

const SEARCH_DEBOUNCE_MS = 250;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function mount(baseUrl: string): ExplorerStore {
  const api = new ApiClient(baseUrl);
  const store = ExplorerStore.fromUrlQuery(api, window.location.search);

  const alphaInput = byId<HTMLInputElement>('alpha');
  const kInput = byId<HTMLInputElement>('k');
  const searchInput = byId<HTMLInputElement>('entity-search');
  const searchResults = byId<HTMLElement>('entity-results');
  const facetRail = byId<HTMLElement>('facets');
  const resultsPane = byId<HTMLElement>('results');
  const detailPane = byId<HTMLElement>('detail');
  const errorPane = byId<HTMLElement>('errors');

  alphaInput.value = String(store.state.alpha);
  kInput.value = String(store.state.k);
  alphaInput.addEventListener('input', () => store.setAlpha(Number(alphaInput.value)));
  kInput.addEventListener('change', () => store.setK(Number(kInput.value)));

  let searchTimer: number | null = null;
  searchInput.addEventListener('input', () => {
    if (searchTimer !== null) window.clearTimeout(searchTimer);
    const q = searchInput.value.trim();
    if (!q) {
      searchResults.innerHTML = '';
      return;
    }
    searchTimer = window.setTimeout(async () => {
      try {
        const hits = await api.entities(q);
        searchResults.innerHTML = hits
          .map((h) => `<li data-id="${h.id}">${h.label}</li>`)
          .join('');
      } catch (err) {
        errorPane.innerHTML = renderError(String(err));
      }
    }, SEARCH_DEBOUNCE_MS);
  });
  searchResults.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('li');
    if (target?.dataset.id) store.pinEntities(target.dataset.id, null);
  });

  facetRail.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('li');
    if (target?.dataset.type) store.toggleTypeFacet(target.dataset.type);
  });

  resultsPane.addEventListener('click', async (event) => {
    const target = (event.target as HTMLElement).closest('li');
    if (!target?.dataset.index) return;
    const index = Number(target.dataset.index);
    store.select(index);
    const item = store.visibleResults()[index];
    if (!item) return;
    let baseline = null;
    try {
      baseline = await store.fetchBaseline(item);
    } catch {
      baseline = { found: false, explanation: null };
    }
    detailPane.innerHTML = renderDetail(item, baseline);
  });

  store.subscribe((state) => {
    errorPane.innerHTML = renderError(state.error);
    resultsPane.innerHTML = renderResults(store.visibleResults(), state.selected);
    const query = store.toUrlQuery();
    const url = query ? `${window.location.pathname}?${query}` : window.location.pathname;
    window.history.replaceState(null, '', url);
  });

  void api
    .facets()
    .then((counts) => {
      facetRail.innerHTML = renderFacetRail(counts, store.state.facetTypes);
    })
    .catch((err) => {
      errorPane.innerHTML = renderError(String(err));
    });
  void store.explore();
  return store;
}

if (typeof document !== 'undefined' && document.getElementById('results')) {
  mount(window.location.origin);
}
