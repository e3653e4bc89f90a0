import assert from 'node:assert/strict';
import { test } from 'node:test';

import { ApiClient, ApiError } from '../src/api.js';
import { pollJob } from '../src/jobs.js';
import { fixture } from './helpers.js';

type Call = { url: string; init?: RequestInit };

function mockFetch(responses: Array<{ status: number; body: unknown }>) {
  const calls: Call[] = [];
  let i = 0;
  const fn = (async (url: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    const r = responses[Math.min(i, responses.length - 1)];
    i += 1;
    return {
      ok: r.status >= 200 && r.status < 300,
      status: r.status,
      json: async () => r.body,
    } as Response;
  }) as typeof fetch;
  return { fn, calls };
}

test('getDesign hits /api/design', async () => {
  const { fn, calls } = mockFetch([{ status: 200, body: fixture('design.json') }]);
  const client = new ApiClient('http://x', fn);
  const res = await client.getDesign();
  assert.equal(calls[0].url, 'http://x/api/design');
  assert.equal(res.revision, 0);
});

test('postEdits carries the revision for optimistic concurrency', async () => {
  const { fn, calls } = mockFetch([{ status: 200, body: fixture('design_after_edit.json') }]);
  const client = new ApiClient('', fn);
  await client.postEdits(0, [{ action: 'delete', building_id: 'x' }]);
  const sent = JSON.parse(String(calls[0].init?.body));
  assert.equal(sent.revision, 0);
  assert.equal(sent.edits.length, 1);
});

test('stale revision surfaces as a typed conflict error', async () => {
  const { fn } = mockFetch([{ status: 409, body: fixture('stale_conflict.json') }]);
  const client = new ApiClient('', fn);
  await assert.rejects(
    () => client.postEdits(0, []),
    (err: unknown) => err instanceof ApiError && err.code === 'stale-revision' && err.status === 409,
  );
});

test('pollJob resolves once the job is done', async () => {
  const done = fixture('job_done.json');
  const { fn, calls } = mockFetch([
    { status: 200, body: { job_id: 'job-1', status: 'queued', result: null, error: null } },
    { status: 200, body: { job_id: 'job-1', status: 'running', result: null, error: null } },
    { status: 200, body: done },
  ]);
  const client = new ApiClient('', fn);
  const job = await pollJob(client, 'job-1', { intervalMs: 1 });
  assert.equal(job.status, 'done');
  assert.ok(job.result!.plan.predicted_inequality < job.result!.soft_inequality_before);
  assert.equal(calls.length, 3);
});

test('pollJob rejects on failure with the server message', async () => {
  const { fn } = mockFetch([
    { status: 200, body: { job_id: 'j', status: 'failed', result: null,
                           error: { code: 'domain-error', message: 'no residential capacity' } } },
  ]);
  const client = new ApiClient('', fn);
  await assert.rejects(() => pollJob(client, 'j', { intervalMs: 1 }), /no residential capacity/);
});
