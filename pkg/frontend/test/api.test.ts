import { describe, expect, it } from 'vitest';

import { ApiClient, RequestError } from '../src/api.js';

interface Call { url: string; init?: RequestInit }

function fakeFetch(status: number, body: unknown, calls: Call[]) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: String(status),
      json: async () => body,
    } as Response;
  };
}

describe('ApiClient', () => {
  it('posts interactions to the documented path', async () => {
    const calls: Call[] = [];
    const api = new ApiClient('http://x', fakeFetch(200, { suggestion_token: 't', candidates: [] }, calls));
    await api.submitInteraction('p1', {
      doc_uid: 'u1',
      spans: [{ id: 's1', start_token: 0, end_token: 1 }],
      label: 1,
    });
    expect(calls[0].url).toBe('http://x/projects/p1/interactions');
    expect(calls[0].init?.method).toBe('POST');
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body.spans[0]).toEqual({ id: 's1', start_token: 0, end_token: 1 });
  });

  it('encodes names in concept routes', async () => {
    const calls: Call[] = [];
    const api = new ApiClient('', fakeFetch(200, { ok: true }, calls));
    await api.addElement('p1', 'a b', 'token', 'x');
    expect(calls[0].url).toBe('/projects/p1/concepts/a%20b/elements');
  });

  it('GET requests carry no body', async () => {
    const calls: Call[] = [];
    const api = new ApiClient('', fakeFetch(200, { functions: [] }, calls));
    await api.listFunctions('p1');
    expect(calls[0].init?.body).toBeUndefined();
  });

  it('raises RequestError with the server error code', async () => {
    const api = new ApiClient('', fakeFetch(400, { code: 'project_error', message: 'nope' }, []));
    await expect(api.nextDocument('p1')).rejects.toMatchObject({
      status: 400, code: 'project_error', message: 'nope',
    });
  });

  it('flags 409 stale-token responses', async () => {
    const api = new ApiClient('', fakeFetch(409, { code: 'stale_token', message: 'old' }, []));
    try {
      await api.acceptFunctions('p1', 'tok', ['r1']);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(RequestError);
      expect((err as RequestError).isStaleToken).toBe(true);
    }
  });
});
