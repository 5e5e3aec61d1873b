import type {
  Candidate, ConceptInfo, EndMetrics, FunctionInfo, LfStats, ModelStats,
} from './types.js';
import { PALETTE } from './highlight.js';

const esc = (s: string) => s.replace(/&/g, '&amp;').replace(/</g, '&lt;')
  .replace(/>/g, '&gt;').replace(/"/g, '&quot;');

const pct = (x: number | null | undefined) =>
  x === null || x === undefined ? '–' : `${(x * 100).toFixed(1)}%`;

function delta(d: number | undefined): string {
  if (d === undefined || d === 0) return '';
  const sign = d > 0 ? '+' : '';
  const cls = d > 0 ? 'delta up' : 'delta down';
  return ` <span class="${cls}">(${sign}${(d * 100).toFixed(1)})</span>`;
}

export function renderLabelingPane(
  documentHtml: string,
  uid: string | null,
  labelNames: string[],
  spanCount: number,
): string {
  const buttons = labelNames.map((name, i) =>
    `<button class="label-btn" data-label="${i}" ${spanCount ? '' : 'disabled'}>` +
    `${esc(name.toUpperCase())}</button>`).join(' ');
  return `
    <section class="pane" id="labeling">
      <h3>Label <span class="muted">${uid ? esc(uid) : ''}</span></h3>
      <div class="doc-text">${documentHtml || '<span class="muted">loading…</span>'}</div>
      <div class="label-row">
        ${buttons}
        <button id="skip-btn">Skip</button>
        <span id="label-hint" class="muted">${spanCount ? `${spanCount} span(s) selected` : 'select at least one token'}</span>
      </div>
    </section>`;
}

export function renderConceptsPane(concepts: ConceptInfo[]): string {
  const rows = concepts.map((c) => `
    <div class="concept-row">
      <span class="swatch" style="background:${PALETTE[c.color_hint % PALETTE.length]}"></span>
      <strong>${esc(c.name)}</strong>
      <span class="elements">${c.elements.map((e) => esc(e.pattern)).join(', ') || '<em>empty</em>'}</span>
      <form class="add-element" data-concept="${esc(c.name)}">
        <input name="pattern" placeholder="add token…" size="10" />
      </form>
      <button class="del-concept" data-concept="${esc(c.name)}">×</button>
    </div>`).join('');
  return `
    <section class="pane" id="concepts">
      <h3>Concepts</h3>
      ${rows || '<div class="muted">none yet</div>'}
      <form id="new-concept"><input name="name" placeholder="new concept…" size="14" /></form>
    </section>`;
}

export function renderSuggestedPane(candidates: Candidate[], token: string | null): string {
  const rows = candidates.map((c) => `
    <label class="cand-row">
      <input type="checkbox" class="cand-check" value="${c.rule_id}" />
      <code>${esc(c.rendering)}</code>
      <span class="muted">G=${c.score}${c.dev_stats
        ? `, dev cov ${pct(c.dev_stats.coverage)}, acc ${pct(c.dev_stats.accuracy)}` : ''}</span>
    </label>`).join('');
  return `
    <section class="pane" id="suggested">
      <h3>Suggested functions</h3>
      ${rows || '<div class="muted">label a document to get suggestions</div>'}
      ${candidates.length
        ? `<button id="accept-btn" data-token="${token ?? ''}">Accept selected</button>` : ''}
    </section>`;
}

export function renderLabelingStatsPane(lf: LfStats[], model: ModelStats | null): string {
  const rows = lf.map((s) => `
    <tr>
      <td class="id">${s.rule_id.slice(0, 8)}</td>
      <td class="num">${pct(s.coverage)}</td>
      <td class="num">${pct(s.overlap)}</td>
      <td class="num">${pct(s.conflict)}</td>
      <td class="num">${pct(s.dev_accuracy)}</td>
    </tr>`).join('');
  const modelRow = model ? `
    <div class="model-line">
      model: acc ${pct(model.accuracy)}${delta(model.deltas.accuracy)}
      · f1 ${pct(model.f1)}${delta(model.deltas.f1)}
      · cov ${pct(model.coverage)}${delta(model.deltas.coverage)}
    </div>` : '<div class="muted">no label model yet</div>';
  return `
    <section class="pane" id="labeling-stats">
      <h3>Labeling statistics</h3>
      ${lf.length ? `<table class="table">
        <thead><tr><th>fn</th><th>cov</th><th>ovl</th><th>cft</th><th>dev acc</th></tr></thead>
        <tbody>${rows}</tbody></table>` : ''}
      ${modelRow}
    </section>`;
}

export function renderEndModelPane(metrics: EndMetrics | null, busy: boolean): string {
  const body = metrics && metrics.f1 !== undefined ? `
    <div>test acc ${pct(metrics.accuracy)} · p ${pct(metrics.precision)}
      · r ${pct(metrics.recall)} · f1 ${pct(metrics.f1)}</div>
    <div class="muted">trained on ${metrics.n_train_covered} covered documents</div>`
    : '<div class="muted">not trained yet</div>';
  return `
    <section class="pane" id="end-model">
      <h3>End model</h3>
      ${body}
      <button id="train-btn" ${busy ? 'disabled' : ''}>${busy ? 'training…' : 'Train'}</button>
    </section>`;
}

export function renderSelectedPane(functions: FunctionInfo[]): string {
  const rows = functions.map((f) => `
    <tr>
      <td><code>${esc(f.rendering)}</code></td>
      <td><button class="rm-fn" data-rule="${f.rule_id}">remove</button></td>
    </tr>`).join('');
  return `
    <section class="pane" id="selected">
      <h3>Selected functions (${functions.length})</h3>
      ${functions.length
        ? `<table class="table"><tbody>${rows}</tbody></table>`
        : '<div class="muted">none accepted yet</div>'}
    </section>`;
}
