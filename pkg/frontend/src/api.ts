// Thin typed client over fetch. Mutations echo the revision they were
// made against; a 409 surfaces as ApiError with code "stale-revision" so
// the caller can reload and retry.

import type {
  ApiErrorBody,
  BuildingDetail,
  ConstraintsBody,
  DesignResponse,
  EditBody,
  HeatmapResponse,
  IndicatorsResponse,
  Job,
  SimulateResponse,
  TimelineEntry,
} from './types.js';

export class ApiError extends Error {
  code: string;
  status: number;
  details: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message || `HTTP ${status}`);
    this.code = body.code || 'error';
    this.status = status;
    this.details = body.details || {};
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = '', readonly fetchFn: typeof fetch = fetch) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    const body = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, body as ApiErrorBody);
    }
    return body as T;
  }

  getDesign(): Promise<DesignResponse> {
    return this.request('/api/design');
  }

  postEdits(revision: number, edits: EditBody[]): Promise<DesignResponse> {
    return this.request('/api/design/edits', {
      method: 'POST',
      body: JSON.stringify({ revision, edits }),
    });
  }

  simulate(seed = 0): Promise<SimulateResponse> {
    return this.request('/api/simulate', { method: 'POST', body: JSON.stringify({ seed }) });
  }

  indicators(): Promise<IndicatorsResponse> {
    return this.request('/api/indicators');
  }

  heatmap(seed = 0): Promise<HeatmapResponse> {
    return this.request(`/api/benefits/heatmap?seed=${seed}`);
  }

  buildingDetail(id: string, seed = 0): Promise<BuildingDetail> {
    return this.request(`/api/buildings/${encodeURIComponent(id)}/detail?seed=${seed}`);
  }

  submitRecommend(constraints: ConstraintsBody, seed = 0): Promise<{ job_id: string; status: string }> {
    return this.request('/api/recommend', {
      method: 'POST',
      body: JSON.stringify({ constraints, seed }),
    });
  }

  job(jobId: string): Promise<Job> {
    return this.request(`/api/jobs/${encodeURIComponent(jobId)}`);
  }

  saveTimeline(label: string): Promise<{ iteration: TimelineEntry }> {
    return this.request('/api/timeline/save', { method: 'POST', body: JSON.stringify({ label }) });
  }

  timeline(): Promise<{ iterations: TimelineEntry[] }> {
    return this.request('/api/timeline');
  }

  timelineRevision(revision: number): Promise<{ iteration: TimelineEntry; design: DesignResponse['design'] }> {
    return this.request(`/api/timeline/${revision}`);
  }
}
