import type { DocumentPayload } from './types.js';

/** 12-color palette; concepts pick by color_hint (creation order), matching
 * the service's hints. */
export const PALETTE = [
  '#ffd54f', '#81d4fa', '#a5d6a7', '#f48fb1', '#ce93d8', '#ffab91',
  '#80cbc4', '#e6ee9c', '#90caf9', '#ffcc80', '#b0bec5', '#c5e1a5',
];

export interface Segment {
  text: string;
  tokenIndex: number | null;   // null for inter-token gaps
  selected: boolean;
  concept: string | null;
  color: string | null;
  entity: string | null;
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** One segment per token plus one per gap, covering the full text. The first
 * matching concept (creation order) wins when matches overlap. */
export function buildSegments(
  doc: DocumentPayload,
  selected: ReadonlySet<number>,
  conceptOrder: readonly string[],
  colorHints: Readonly<Record<string, number>> = {},
): Segment[] {
  const conceptOf = new Array<string | null>(doc.tokens.length).fill(null);
  for (const name of conceptOrder) {
    for (const [start, end] of doc.concept_matches[name] ?? []) {
      for (let i = start; i < end; i++) {
        if (conceptOf[i] === null) conceptOf[i] = name;
      }
    }
  }
  const entityOf = new Array<string | null>(doc.tokens.length).fill(null);
  for (const e of doc.entities) {
    for (let i = e.start_token; i < e.end_token; i++) entityOf[i] = e.type;
  }

  const segments: Segment[] = [];
  let cursor = 0;
  const gap = (upTo: number) => {
    if (upTo > cursor) {
      segments.push({ text: doc.text.slice(cursor, upTo), tokenIndex: null,
        selected: false, concept: null, color: null, entity: null });
    }
  };
  for (const tok of doc.tokens) {
    gap(tok.start);
    const concept = conceptOf[tok.index];
    const hint = concept !== null ? colorHints[concept] : undefined;
    segments.push({
      text: doc.text.slice(tok.start, tok.end),
      tokenIndex: tok.index,
      selected: selected.has(tok.index),
      concept,
      color: concept !== null ? PALETTE[(hint ?? conceptOrder.indexOf(concept)) % PALETTE.length] : null,
      entity: entityOf[tok.index],
    });
    cursor = tok.end;
  }
  gap(doc.text.length);
  return segments;
}

export function segmentsToHtml(segments: Segment[]): string {
  return segments.map((s) => {
    if (s.tokenIndex === null) return escapeHtml(s.text);
    const classes = ['tok'];
    if (s.selected) classes.push('sel');
    if (s.entity) classes.push('ent');
    const style = s.color && !s.selected ? ` style="background:${s.color}"` : '';
    const title = s.concept ?? s.entity ?? '';
    return `<span class="${classes.join(' ')}" data-token="${s.tokenIndex}"` +
      `${style}${title ? ` title="${escapeHtml(title)}"` : ''}>` +
      `${escapeHtml(s.text)}</span>`;
  }).join('');
}

/** Contiguous runs of selected token indices become half-open span ranges. */
export function spansFromSelection(selected: ReadonlySet<number>): [number, number][] {
  const sorted = [...selected].sort((a, b) => a - b);
  const spans: [number, number][] = [];
  for (const idx of sorted) {
    const last = spans[spans.length - 1];
    if (last && idx === last[1]) last[1] = idx + 1;
    else spans.push([idx, idx + 1]);
  }
  return spans;
}
