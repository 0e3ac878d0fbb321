/**
 * Pure HTML renderers. No state lives here and nothing is fetched; the
 * functions turn API payloads into markup strings, which keeps them
 * trivially testable and guarantees the UI never reorders or rescores
 * what the service returned.
 */

import type { BaselineResponse, FacetCounts, ResultItem } from './types';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

/** SR and CR contributions to the final score, as bar widths in percent. */
export function contributionWidths(item: ResultItem): { sr: number; cr: number } {
  const { sr, cr, alpha } = item.breakdown;
  return {
    sr: Math.round(alpha * sr * 100),
    cr: Math.round((1 - alpha) * Math.max(0, cr) * 100),
  };
}

export function renderResults(items: ResultItem[], selected: number | null): string {
  if (!items.length) {
    return '<p class="empty-state">No connections match the current facets.</p>';
  }
  const rows = items.map((item, i) => {
    const widths = contributionWidths(item);
    const cls = i === selected ? 'result selected' : 'result';
    return [
      `<li class="${cls}" data-index="${i}">`,
      `<span class="score">${item.breakdown.score.toFixed(4)}</span>`,
      `<span class="type">${escapeHtml(item.relationship_type)}</span>`,
      `<span class="pair">${escapeHtml(item.entity1_label)} &harr; ${escapeHtml(item.entity2_label)}</span>`,
      `<span class="bar"><span class="bar-sr" style="width:${widths.sr}%"></span>` +
        `<span class="bar-cr" style="width:${widths.cr}%"></span></span>`,
      '</li>',
    ].join('');
  });
  return `<ol class="results">${rows.join('')}</ol>`;
}

export function renderDetail(item: ResultItem, baseline: BaselineResponse | null): string {
  const b = item.breakdown;
  const metadata = Object.entries(item.metadata)
    .map(([key, value]) => `<dt>${escapeHtml(key)}</dt><dd>${escapeHtml(value)}</dd>`)
    .join('');
  let baselineBlock = '';
  if (baseline !== null) {
    baselineBlock = baseline.found
      ? `<p class="baseline">${escapeHtml(baseline.explanation ?? '')}</p>`
      : '<p class="baseline baseline-missing">No path connects this pair in the graph.</p>';
  }
  return [
    '<section class="detail">',
    `<h2>${escapeHtml(item.entity1_label)} &harr; ${escapeHtml(item.entity2_label)}</h2>`,
    `<p class="explanation">${escapeHtml(item.explanation)}</p>`,
    '<table class="breakdown"><tbody>',
    `<tr><th>SR</th><td>${b.sr.toFixed(4)}</td></tr>`,
    `<tr><th>CR</th><td>${b.cr.toFixed(4)}</td></tr>`,
    `<tr><th>&alpha;</th><td>${b.alpha.toFixed(2)}</td></tr>`,
    `<tr><th>score</th><td>${b.score.toFixed(4)}</td></tr>`,
    '</tbody></table>',
    metadata ? `<dl class="metadata">${metadata}</dl>` : '',
    baselineBlock,
    '</section>',
  ].join('');
}

export function renderFacetRail(counts: FacetCounts, active: string[]): string {
  const entries = Object.entries(counts).sort(([a], [b]) => a.localeCompare(b));
  const rows = entries.map(([type, count]) => {
    const cls = active.includes(type) ? 'facet active' : 'facet';
    return (
      `<li class="${cls}" data-type="${escapeHtml(type)}">` +
      `${escapeHtml(type)} <span class="count">${count}</span></li>`
    );
  });
  return `<ul class="facet-rail">${rows.join('')}</ul>`;
}

export function renderError(message: string | null): string {
  if (message === null) return '';
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}
