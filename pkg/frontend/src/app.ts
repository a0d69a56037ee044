// Application shell: wires the service client to the four views.
//
// Two rules hold everywhere: the client never computes a probability,
// decision, or attribution itself (every displayed number is copied from a
// service response), and label state only changes after the service
// acknowledges a submission.

import { ApiClient, ApiError } from './api';
import type { CaseSummary, ExplainResponse, LabelRecord, WhatIfResponse } from './types';
import {
  el,
  renderAttributions,
  renderFieldsTable,
  renderGlobalImportance,
  renderHistory,
  renderLabelForm,
  renderPrediction,
  renderQueue,
} from './views';

export interface AppOptions {
  debounceMs?: number;
}

export class App {
  readonly api: ApiClient;
  private root: HTMLElement;
  private debounceMs: number;

  rater = '';
  guidance = '';
  cases: CaseSummary[] = [];
  labeled = new Set<string>();
  cursor = 0;
  history: LabelRecord[] = [];
  threshold = 0.5;
  overrides: Record<string, number> = {};
  lastWhatIf: WhatIfResponse | null = null;
  lastExplain: ExplainResponse | null = null;
  fieldErrors: Record<string, string> = {};
  serviceMessage = '';

  private whatIfTimer: ReturnType<typeof setTimeout> | null = null;
  private inflight: Promise<unknown>[] = [];

  constructor(root: HTMLElement, api: ApiClient, options: AppOptions = {}) {
    this.root = root;
    this.api = api;
    this.debounceMs = options.debounceMs ?? 150;
  }

  private track<T>(p: Promise<T>): Promise<T> {
    this.inflight.push(p);
    p.finally(() => {
      this.inflight = this.inflight.filter((other) => other !== p);
    });
    return p;
  }

  /** Settles once every in-flight request (and any it spawned) is done. */
  async whenIdle(): Promise<void> {
    while (this.inflight.length > 0) {
      await Promise.allSettled([...this.inflight]);
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
  }

  currentCase(): CaseSummary | null {
    return this.cases[this.cursor] ?? null;
  }

  mergedValues(): Record<string, number> {
    const current = this.currentCase();
    return current ? { ...current.fields, ...this.overrides } : {};
  }

  // ----- flows ---------------------------------------------------------------

  async connect(rater: string, token: string): Promise<void> {
    this.rater = rater;
    this.api.setToken(token);
    const [cases, session, mine] = await Promise.all([
      this.track(this.api.cases()),
      this.track(this.api.session(rater)),
      this.track(this.api.labels()),
    ]);
    this.cases = cases.cases;
    this.guidance = cases.guidance;
    this.labeled = new Set(mine.labels.map((l) => l.case_id ?? ''));
    this.cursor = Math.min(Math.max(session.cursor, 0), Math.max(this.cases.length - 1, 0));
    await this.openCase(this.cursor, { persistCursor: false });
  }

  async openCase(index: number, opts: { persistCursor?: boolean } = {}): Promise<void> {
    this.cursor = index;
    this.overrides = {};
    this.fieldErrors = {};
    this.serviceMessage = '';
    this.lastWhatIf = null;
    this.lastExplain = null;
    const current = this.currentCase();
    if (!current) {
      this.render();
      return;
    }
    if (opts.persistCursor !== false) {
      await this.track(this.api.saveSession(this.rater, index));
    }
    const [whatIf, explain, labels] = await Promise.all([
      this.track(this.api.whatIf(current.fields, {}, this.threshold)),
      this.track(this.api.explain(current.fields)),
      this.track(this.api.labels(current.case_id)),
    ]);
    this.lastWhatIf = whatIf;
    this.lastExplain = explain;
    this.history = labels.history ?? [];
    this.render();
  }

  async submitLabel(call: 0 | 1, confidence: number): Promise<void> {
    const current = this.currentCase();
    if (!current) return;
    const isRevision = this.labeled.has(current.case_id);
    try {
      await this.track(this.api.submitLabel(current.case_id, call, confidence));
    } catch (error) {
      this.serviceMessage = error instanceof ApiError ? error.message : String(error);
      this.render();
      return;
    }
    // only after the service acknowledged: refresh history, then advance
    const labels = await this.track(this.api.labels(current.case_id));
    this.history = labels.history ?? [];
    this.labeled.add(current.case_id);
    if (isRevision) {
      // revising an earlier call: stay here so the updated history is visible
      this.render();
      return;
    }
    const next = this.nextUnlabeledIndex();
    if (next !== null && next !== this.cursor) {
      await this.openCase(next);
    } else {
      await this.track(this.api.saveSession(this.rater, this.cursor));
      this.render();
    }
  }

  nextUnlabeledIndex(): number | null {
    for (let step = 1; step <= this.cases.length; step++) {
      const i = (this.cursor + step) % this.cases.length;
      if (!this.labeled.has(this.cases[i].case_id)) return i;
    }
    return null;
  }

  editField(name: string, raw: string): void {
    const current = this.currentCase();
    if (!current) return;
    const parsed = Number(raw);
    if (raw.trim() === '' || Number.isNaN(parsed)) {
      // flagged locally, nothing is sent
      this.fieldErrors[name] = 'not a number';
      this.render();
      return;
    }
    delete this.fieldErrors[name];
    if (parsed === current.fields[name]) {
      delete this.overrides[name];
    } else {
      this.overrides[name] = parsed;
    }
    this.scheduleWhatIf();
  }

  clearEdits(): void {
    this.overrides = {};
    this.fieldErrors = {};
    this.scheduleWhatIf();
  }

  setThreshold(value: number): void {
    this.threshold = value;
    this.scheduleWhatIf();
  }

  private scheduleWhatIf(): void {
    if (this.whatIfTimer !== null) clearTimeout(this.whatIfTimer);
    if (this.debounceMs === 0) {
      void this.track(this.refreshWhatIf());
      return;
    }
    this.whatIfTimer = setTimeout(() => {
      void this.track(this.refreshWhatIf());
    }, this.debounceMs);
  }

  private async refreshWhatIf(): Promise<void> {
    const current = this.currentCase();
    if (!current) return;
    try {
      this.lastWhatIf = await this.api.whatIf(current.fields, this.overrides, this.threshold);
      this.lastExplain = await this.api.explain(this.mergedValues());
      this.serviceMessage = '';
    } catch (error) {
      if (error instanceof ApiError && error.body.violations) {
        this.serviceMessage = error.body.violations.join('; ');
      } else {
        this.serviceMessage = error instanceof ApiError ? error.message : String(error);
      }
    }
    this.render();
  }

  // ----- rendering --------------------------------------------------------------

  render(): void {
    this.root.replaceChildren();
    const current = this.currentCase();
    const layout = el('div', { class: 'layout' });

    const queuePanel = el('section', { class: 'panel queue-panel' }, [
      el('h3', {}, [`cases (${this.cases.length})`]),
    ]);
    queuePanel.append(
      renderQueue(this.cases, this.labeled, this.cursor, (i) => void this.openCase(i)),
    );
    layout.append(queuePanel);

    const detail = el('section', { class: 'panel detail-panel' });
    if (this.guidance) {
      detail.append(el('p', { class: 'guidance', 'data-testid': 'guidance' }, [this.guidance]));
    }
    if (current && this.lastWhatIf) {
      detail.append(el('h3', { 'data-testid': 'case-title' }, [
        `${current.case_id} (${current.tier})`,
      ]));
      detail.append(renderFieldsTable(current.fields));
      const shown = this.lastWhatIf;
      detail.append(
        renderPrediction(
          shown.modified_probability,
          shown.modified_decision,
          shown.threshold,
          shown.model,
        ),
      );
      detail.append(renderLabelForm((call, conf) => void this.submitLabel(call, conf)));
      detail.append(renderHistory(this.history));
    }
    if (this.serviceMessage) {
      detail.append(el('p', { class: 'service-error', 'data-testid': 'service-error' }, [
        this.serviceMessage,
      ]));
    }
    layout.append(detail);

    const explainPanel = el('section', { class: 'panel explain-panel' });
    if (this.lastExplain) {
      explainPanel.append(renderGlobalImportance(this.lastExplain.global_importance));
      explainPanel.append(renderAttributions(this.lastExplain.attributions));
    }
    layout.append(explainPanel);

    layout.append(this.renderWhatIfPanel());
    this.root.append(layout);
  }

  private renderWhatIfPanel(): HTMLElement {
    const panel = el('section', { class: 'panel whatif-panel', 'data-testid': 'whatif-panel' });
    const current = this.currentCase();
    if (!current) return panel;
    panel.append(el('h3', {}, ['what-if']));

    const slider = el('input', {
      type: 'range', min: '0.01', max: '0.99', step: '0.01',
      value: String(this.threshold), 'data-testid': 'threshold-slider',
    });
    slider.addEventListener('input', () => this.setThreshold(Number(slider.value)));
    panel.append(
      el('label', {}, ['decision threshold ', slider,
        el('span', { 'data-testid': 'threshold-value' }, [this.threshold.toFixed(2)])]),
    );

    const editors = el('div', { class: 'field-editors' });
    for (const [name, baseValue] of Object.entries(current.fields)) {
      const input = el('input', {
        type: 'text',
        value: String(this.overrides[name] ?? baseValue),
        'data-testid': `editor-${name}`,
      });
      input.addEventListener('change', () => this.editField(name, input.value));
      const row = el('div', { class: 'editor-row' }, [
        el('span', { class: 'editor-label' }, [name]), input,
      ]);
      if (this.fieldErrors[name]) {
        row.append(el('span', { class: 'field-error', 'data-testid': `error-${name}` }, [
          this.fieldErrors[name],
        ]));
      }
      editors.append(row);
    }
    panel.append(editors);

    const reset = el('button', { 'data-testid': 'clear-edits' }, ['clear edits']);
    reset.addEventListener('click', () => this.clearEdits());
    panel.append(reset);

    if (this.lastWhatIf) {
      const w = this.lastWhatIf;
      panel.append(
        el('div', { class: 'whatif-readout' }, [
          el('span', { 'data-testid': 'baseline-probability' }, [
            w.baseline_probability.toFixed(4),
          ]),
          el('span', { 'data-testid': 'modified-probability' }, [
            w.modified_probability.toFixed(4),
          ]),
          el('span', {
            class: `decision-badge decision-${w.modified_decision}`,
            'data-testid': 'whatif-badge',
          }, [w.modified_decision === 1 ? 'surgery recommended' : 'surgery not recommended']),
          el('span', { 'data-testid': 'flip-flag' }, [w.flipped ? 'flipped' : 'unchanged']),
        ]),
      );
    }
    return panel;
  }
}
