// Poll a recommendation job until it reaches a terminal state.

import type { ApiClient } from './api.js';
import type { Job } from './types.js';

export async function pollJob(
  client: ApiClient,
  jobId: string,
  options?: { intervalMs?: number; timeoutMs?: number; onTick?: (job: Job) => void },
): Promise<Job> {
  const intervalMs = options?.intervalMs ?? 1000;
  const timeoutMs = options?.timeoutMs ?? 300_000;
  const startedAt = Date.now();
  while (true) {
    const job = await client.job(jobId);
    options?.onTick?.(job);
    if (job.status === 'done') return job;
    if (job.status === 'failed') {
      throw new Error(job.error?.message ?? 'recommendation job failed');
    }
    if (Date.now() - startedAt > timeoutMs) {
      throw new Error(`job ${jobId} still ${job.status} after ${timeoutMs} ms`);
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
