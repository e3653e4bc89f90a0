// Thin typed client over fetch. Mutations echo the revision they were
// made against; a 409 surfaces as ApiError with code "stale-revision" so
// the caller can reload and retry.
export class ApiError extends Error {
    constructor(status, body) {
        super(body.message || `HTTP ${status}`);
        this.code = body.code || 'error';
        this.status = status;
        this.details = body.details || {};
    }
}
export class ApiClient {
    constructor(baseUrl = '', fetchFn = fetch) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        const res = await this.fetchFn(`${this.baseUrl}${path}`, {
            headers: { 'Content-Type': 'application/json' },
            ...init,
        });
        const body = await res.json();
        if (!res.ok) {
            throw new ApiError(res.status, body);
        }
        return body;
    }
    getDesign() {
        return this.request('/api/design');
    }
    postEdits(revision, edits) {
        return this.request('/api/design/edits', {
            method: 'POST',
            body: JSON.stringify({ revision, edits }),
        });
    }
    simulate(seed = 0) {
        return this.request('/api/simulate', { method: 'POST', body: JSON.stringify({ seed }) });
    }
    indicators() {
        return this.request('/api/indicators');
    }
    heatmap(seed = 0) {
        return this.request(`/api/benefits/heatmap?seed=${seed}`);
    }
    buildingDetail(id, seed = 0) {
        return this.request(`/api/buildings/${encodeURIComponent(id)}/detail?seed=${seed}`);
    }
    submitRecommend(constraints, seed = 0) {
        return this.request('/api/recommend', {
            method: 'POST',
            body: JSON.stringify({ constraints, seed }),
        });
    }
    job(jobId) {
        return this.request(`/api/jobs/${encodeURIComponent(jobId)}`);
    }
    saveTimeline(label) {
        return this.request('/api/timeline/save', { method: 'POST', body: JSON.stringify({ label }) });
    }
    timeline() {
        return this.request('/api/timeline');
    }
    timelineRevision(revision) {
        return this.request(`/api/timeline/${revision}`);
    }
}
