import { ApiClient, RequestError } from './api.js';
import { buildSegments, segmentsToHtml, spansFromSelection } from './highlight.js';
import {
  renderConceptsPane, renderEndModelPane, renderLabelingPane,
  renderLabelingStatsPane, renderSelectedPane, renderSuggestedPane,
} from './panes.js';
import type {
  Candidate, ConceptInfo, DocumentPayload, SpanInput, Statistics,
} from './types.js';

interface AppState {
  projectId: string | null;
  labelNames: string[];
  doc: DocumentPayload | null;
  selected: Set<number>;
  spanConcepts: Map<number, string>;  // span start token -> concept name
  candidates: Candidate[];
  suggestionToken: string | null;
  concepts: ConceptInfo[];
  stats: Statistics | null;
  training: boolean;
  error: string | null;
}

const state: AppState = {
  projectId: null,
  labelNames: ['negative', 'positive'],
  doc: null,
  selected: new Set(),
  spanConcepts: new Map(),
  candidates: [],
  suggestionToken: null,
  concepts: [],
  stats: null,
  training: false,
  error: null,
};

const api = new ApiClient('');

function documentHtml(): string {
  if (!state.doc) return '';
  const order = state.concepts.map((c) => c.name);
  const hints = Object.fromEntries(state.concepts.map((c) => [c.name, c.color_hint]));
  return segmentsToHtml(buildSegments(state.doc, state.selected, order, hints));
}

function render(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const spanCount = spansFromSelection(state.selected).length;
  root.innerHTML = `
    ${state.error ? `<div class="error-bar">${state.error}</div>` : ''}
    <div class="grid">
      ${renderLabelingPane(documentHtml(), state.doc?.uid ?? null, state.labelNames, spanCount)}
      ${renderConceptsPane(state.concepts)}
      ${renderSuggestedPane(state.candidates, state.suggestionToken)}
      ${renderLabelingStatsPane(state.stats?.lf_stats ?? [], state.stats?.model_stats ?? null)}
      ${renderEndModelPane(state.stats?.end_metrics ?? null, state.training)}
      ${renderSelectedPane([])}
    </div>`;
  void refreshSelectedPane();
  wire(root);
}

async function refreshSelectedPane(): Promise<void> {
  if (!state.projectId) return;
  const { functions } = await api.listFunctions(state.projectId);
  const pane = document.getElementById('selected');
  if (pane) pane.outerHTML = renderSelectedPane(functions);
  document.querySelectorAll('.rm-fn').forEach((btn) =>
    btn.addEventListener('click', () => void removeFunction((btn as HTMLElement).dataset.rule!)));
}

function wire(root: HTMLElement): void {
  root.querySelectorAll('.tok').forEach((el) => {
    el.addEventListener('click', () => {
      const idx = Number((el as HTMLElement).dataset.token);
      if (state.selected.has(idx)) state.selected.delete(idx);
      else state.selected.add(idx);
      render();
    });
  });
  root.querySelectorAll('.label-btn').forEach((btn) =>
    btn.addEventListener('click', () =>
      void submitLabel(Number((btn as HTMLElement).dataset.label))));
  root.querySelector('#skip-btn')?.addEventListener('click', () => void loadNext());
  root.querySelector('#accept-btn')?.addEventListener('click', () => void acceptChecked());
  root.querySelector('#train-btn')?.addEventListener('click', () => void train());
  root.querySelector('#new-concept')?.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const input = (ev.target as HTMLFormElement).elements.namedItem('name') as HTMLInputElement;
    if (input.value.trim()) void createConcept(input.value.trim());
  });
  root.querySelectorAll('.add-element').forEach((form) =>
    form.addEventListener('submit', (ev) => {
      ev.preventDefault();
      const f = ev.target as HTMLFormElement;
      const input = f.elements.namedItem('pattern') as HTMLInputElement;
      if (input.value.trim()) void addElement(f.dataset.concept!, input.value.trim());
    }));
  root.querySelectorAll('.del-concept').forEach((btn) =>
    btn.addEventListener('click', () =>
      void deleteConcept((btn as HTMLElement).dataset.concept!)));
}

async function guard<T>(op: () => Promise<T>): Promise<T | undefined> {
  try {
    state.error = null;
    return await op();
  } catch (err) {
    if (err instanceof RequestError && err.isStaleToken) {
      state.candidates = [];
      state.suggestionToken = null;
      state.error = 'Suggestions were stale; please re-label.';
    } else {
      state.error = err instanceof Error ? err.message : String(err);
    }
    render();
    return undefined;
  }
}

async function loadNext(): Promise<void> {
  await guard(async () => {
    state.doc = await api.nextDocument(state.projectId!);
    state.selected.clear();
    state.spanConcepts.clear();
    render();
  });
}

async function refreshDocument(): Promise<void> {
  if (!state.doc) return;
  state.doc = await api.document(state.projectId!, state.doc.uid);
}

async function refreshStats(): Promise<void> {
  state.stats = await api.statistics(state.projectId!);
}

async function submitLabel(label: number): Promise<void> {
  await guard(async () => {
    const ranges = spansFromSelection(state.selected);
    const spans: SpanInput[] = ranges.map(([start, end], i) => ({
      id: `s${i + 1}`,
      start_token: start,
      end_token: end,
      concept: state.spanConcepts.get(start) ?? null,
    }));
    const resp = await api.submitInteraction(state.projectId!, {
      doc_uid: state.doc!.uid, spans, label,
    });
    state.candidates = resp.candidates;
    state.suggestionToken = resp.suggestion_token;
    render();
  });
}

async function acceptChecked(): Promise<void> {
  const ids = [...document.querySelectorAll('.cand-check')]
    .filter((el) => (el as HTMLInputElement).checked)
    .map((el) => (el as HTMLInputElement).value);
  if (!ids.length || !state.suggestionToken) return;
  await guard(async () => {
    await api.acceptFunctions(state.projectId!, state.suggestionToken!, ids);
    state.candidates = [];
    state.suggestionToken = null;
    await refreshStats();
    await loadNext();
  });
}

async function removeFunction(ruleId: string): Promise<void> {
  await guard(async () => {
    await api.removeFunction(state.projectId!, ruleId);
    await refreshStats();
    render();
  });
}

async function createConcept(name: string): Promise<void> {
  await guard(async () => {
    await api.createConcept(state.projectId!, name);
    state.concepts = (await api.listConcepts(state.projectId!)).concepts;
    render();
  });
}

async function deleteConcept(name: string): Promise<void> {
  await guard(async () => {
    await api.deleteConcept(state.projectId!, name);
    state.concepts = (await api.listConcepts(state.projectId!)).concepts;
    await refreshDocument();
    render();
  });
}

async function addElement(name: string, pattern: string): Promise<void> {
  await guard(async () => {
    await api.addElement(state.projectId!, name, 'token', pattern);
    state.concepts = (await api.listConcepts(state.projectId!)).concepts;
    // re-fetch the open document so new matches highlight immediately
    await refreshDocument();
    await refreshStats();
    render();
  });
}

async function train(): Promise<void> {
  state.training = true;
  render();
  await guard(async () => {
    await api.train(state.projectId!);
    await refreshStats();
  });
  state.training = false;
  render();
}

async function boot(): Promise<void> {
  await guard(async () => {
    const { project_id } = await api.createProject({
      name: 'session',
      files: { unlabeled: 'train.jsonl', dev: 'dev.jsonl', test: 'test.jsonl' },
      n_classes: 2,
      label_names: state.labelNames,
    });
    state.projectId = project_id;
    await loadNext();
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void boot();
}
