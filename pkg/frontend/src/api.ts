import type {
  Candidate, ConceptInfo, DocumentPayload, EndMetrics, FunctionInfo,
  InteractionResponse, LfStats, ModelStats, SpanInput, Statistics,
} from './types.js';

export class RequestError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }

  get isStaleToken(): boolean {
    return this.status === 409 && this.code === 'stale_token';
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the documented HTTP endpoints; nothing else. */
export class ApiClient {
  constructor(
    private readonly base: string = '',
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.base + path, init);
    const data = await resp.json();
    if (!resp.ok) {
      throw new RequestError(resp.status, data.code ?? 'unknown', data.message ?? resp.statusText);
    }
    return data as T;
  }

  createProject(body: {
    name: string;
    files: Record<string, string>;
    n_classes?: number;
    label_names?: string[];
    sampler_seed?: number;
  }): Promise<{ project_id: string }> {
    return this.request('POST', '/projects', body);
  }

  nextDocument(projectId: string): Promise<DocumentPayload> {
    return this.request('GET', `/projects/${projectId}/next`);
  }

  document(projectId: string, uid: string): Promise<DocumentPayload> {
    return this.request('GET', `/projects/${projectId}/documents/${encodeURIComponent(uid)}`);
  }

  submitInteraction(projectId: string, body: {
    doc_uid: string;
    spans: SpanInput[];
    links?: { a: string; b: string; directed?: boolean }[];
    label: number;
  }): Promise<InteractionResponse> {
    return this.request('POST', `/projects/${projectId}/interactions`, body);
  }

  acceptFunctions(projectId: string, token: string, ruleIds: string[]):
      Promise<{ lf_stats: LfStats[]; model_stats: ModelStats | null }> {
    return this.request('POST', `/projects/${projectId}/functions`,
      { suggestion_token: token, rule_ids: ruleIds });
  }

  removeFunction(projectId: string, ruleId: string):
      Promise<{ lf_stats: LfStats[]; model_stats: ModelStats | null }> {
    return this.request('DELETE', `/projects/${projectId}/functions/${ruleId}`);
  }

  listFunctions(projectId: string): Promise<{ functions: FunctionInfo[] }> {
    return this.request('GET', `/projects/${projectId}/functions`);
  }

  statistics(projectId: string): Promise<Statistics> {
    return this.request('GET', `/projects/${projectId}/statistics`);
  }

  listConcepts(projectId: string): Promise<{ concepts: ConceptInfo[] }> {
    return this.request('GET', `/projects/${projectId}/concepts`);
  }

  createConcept(projectId: string, name: string): Promise<{ ok: boolean }> {
    return this.request('POST', `/projects/${projectId}/concepts`, { name });
  }

  deleteConcept(projectId: string, name: string): Promise<{ ok: boolean }> {
    return this.request('DELETE', `/projects/${projectId}/concepts/${encodeURIComponent(name)}`);
  }

  addElement(projectId: string, name: string, kind: string, pattern: string):
      Promise<{ ok: boolean }> {
    return this.request('POST',
      `/projects/${projectId}/concepts/${encodeURIComponent(name)}/elements`,
      { kind, pattern });
  }

  train(projectId: string, body: Record<string, unknown> = {}): Promise<EndMetrics> {
    return this.request('POST', `/projects/${projectId}/train`, body);
  }
}

export type { Candidate };
