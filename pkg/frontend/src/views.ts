// DOM builders for the four views: case queue, case detail with the label
// form, explanation bars, and the what-if panel. Pure functions of state;
// all interactivity is wired in app.ts.

import type { Attribution, CaseSummary, GlobalImportanceEntry, LabelRecord } from './types';

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

export function renderQueue(
  cases: CaseSummary[],
  labeled: Set<string>,
  activeIndex: number,
  onSelect: (index: number) => void,
): HTMLElement {
  const list = el('ul', { class: 'queue', 'data-testid': 'case-queue' });
  cases.forEach((c, i) => {
    const item = el('li', {
      class: `queue-item tier-${c.tier}${i === activeIndex ? ' active' : ''}`,
      'data-testid': `queue-item-${c.case_id}`,
    });
    item.append(
      el('span', { class: 'case-id' }, [c.case_id]),
      el('span', { class: 'tier-badge' }, [c.tier]),
      el('span', { class: 'labeled-mark', 'data-testid': `labeled-${c.case_id}` }, [
        labeled.has(c.case_id) ? '✓' : '',
      ]),
    );
    item.addEventListener('click', () => onSelect(i));
    list.append(item);
  });
  return list;
}

export function renderFieldsTable(fields: Record<string, number>): HTMLElement {
  const table = el('table', { class: 'case-fields', 'data-testid': 'case-fields' });
  for (const [name, value] of Object.entries(fields)) {
    table.append(
      el('tr', {}, [
        el('th', {}, [name]),
        el('td', { 'data-testid': `field-${name}` }, [String(value)]),
      ]),
    );
  }
  return table;
}

export function renderPrediction(
  probability: number,
  decision: 0 | 1,
  threshold: number,
  model: string,
): HTMLElement {
  const badgeText = decision === 1 ? 'surgery recommended' : 'surgery not recommended';
  return el('div', { class: 'prediction', 'data-testid': 'prediction' }, [
    el('span', { 'data-testid': 'probability' }, [probability.toFixed(4)]),
    el('span', { class: `decision-badge decision-${decision}`, 'data-testid': 'decision-badge' }, [
      badgeText,
    ]),
    el('span', { 'data-testid': 'threshold' }, [`threshold ${threshold.toFixed(2)}`]),
    el('span', { class: 'model-name' }, [model]),
  ]);
}

export function renderLabelForm(
  onSubmit: (call: 0 | 1, confidence: number) => void,
): HTMLElement {
  const form = el('div', { class: 'label-form', 'data-testid': 'label-form' });
  const likert = el('select', { 'data-testid': 'confidence' });
  const captions = ['not at all confident', 'slightly', 'moderate', 'confident', 'very confident'];
  for (let i = 1; i <= 5; i++) {
    likert.append(el('option', { value: String(i) }, [`${i} - ${captions[i - 1]}`]));
  }
  likert.value = '3';
  const success = el('button', { 'data-testid': 'call-success' }, ['surgical success']);
  const failure = el('button', { 'data-testid': 'call-failure' }, ['surgical failure']);
  success.addEventListener('click', () => onSubmit(1, Number(likert.value)));
  failure.addEventListener('click', () => onSubmit(0, Number(likert.value)));
  form.append(success, failure, likert);
  return form;
}

export function renderHistory(history: LabelRecord[]): HTMLElement {
  const wrap = el('div', { class: 'history', 'data-testid': 'history' });
  wrap.append(el('h4', {}, [`history (${history.length})`]));
  const list = el('ol', { 'data-testid': 'history-list' });
  history.forEach((entry, i) => {
    const isLatest = i === history.length - 1;
    list.append(
      el('li', { class: isLatest ? 'latest' : '', 'data-testid': `history-entry-${entry.revision}` }, [
        `rev ${entry.revision}: ${entry.call === 1 ? 'surgical success' : 'surgical failure'}` +
          ` (confidence ${entry.confidence})${isLatest ? ' ← latest' : ''}`,
      ]),
    );
  });
  wrap.append(list);
  return wrap;
}

function bar(width: number, cls: string): HTMLElement {
  const node = el('div', { class: `bar ${cls}` });
  node.style.width = `${Math.min(Math.abs(width) * 100, 100).toFixed(1)}%`;
  return node;
}

export function renderGlobalImportance(entries: GlobalImportanceEntry[], top = 10): HTMLElement {
  const wrap = el('div', { class: 'global-importance', 'data-testid': 'global-importance' });
  wrap.append(el('h4', {}, ['global importance (balanced-accuracy drop)']));
  const scale = Math.max(...entries.map((e) => Math.abs(e.mean_drop)), 1e-9);
  entries.slice(0, top).forEach((entry) => {
    wrap.append(
      el('div', { class: 'bar-row', 'data-testid': `global-${entry.feature}` }, [
        el('span', { class: 'bar-label' }, [entry.feature]),
        bar(entry.mean_drop / scale, 'importance'),
        el('span', { class: 'bar-value' }, [entry.mean_drop.toFixed(4)]),
      ]),
    );
  });
  return wrap;
}

export function renderAttributions(attributions: Attribution[], top = 10): HTMLElement {
  // per-feature signed strips: the simplified beeswarm
  const wrap = el('div', { class: 'attributions', 'data-testid': 'attributions' });
  wrap.append(el('h4', {}, ['local attributions']));
  const scale = Math.max(...attributions.map((a) => Math.abs(a.phi)), 1e-9);
  attributions.slice(0, top).forEach((entry, rank) => {
    wrap.append(
      el('div', { class: 'bar-row', 'data-testid': `attribution-rank-${rank}` }, [
        el('span', { class: 'bar-label', 'data-testid': `attribution-feature-${rank}` }, [
          entry.feature,
        ]),
        bar(entry.phi / scale, entry.phi >= 0 ? 'positive' : 'negative'),
        el('span', { class: 'bar-value', 'data-testid': `attribution-phi-${rank}` }, [
          entry.phi.toFixed(4),
        ]),
      ]),
    );
  });
  return wrap;
}
