// Dashboard bootstrap: wires the API client into the map, indicator
// panels, edit and recommendation forms, and the design timeline. All
// numbers shown come from service responses.

import { ApiClient, ApiError } from './api.js';
import { attributionChart, benefitChart, inequalityChart, preferenceChart, sparkline } from './charts.js';
import { fmtArea, fmtDelta, fmtNumber, scaledInequality } from './format.js';
import { constraintsFromInputs, directionRowsHtml } from './forms.js';
import { pollJob } from './jobs.js';
import { mapSvg, type BuildingFilter } from './map.js';
import type {
  DesignDoc,
  GroupDirection,
  HeatmapResponse,
  IndicatorsResponse,
  RecommendationResult,
  SimulateResponse,
  TimelineEntry,
} from './types.js';

const client = new ApiClient('');

type State = {
  design: DesignDoc | null;
  revision: number;
  indicators: IndicatorsResponse | null;
  sim: SimulateResponse | null;
  heatmap: HeatmapResponse | null;
  heatmapOn: boolean;
  filter: BuildingFilter | null;
  selectedId: string | null;
  seed: number;
};

const state: State = {
  design: null,
  revision: 0,
  indicators: null,
  sim: null,
  heatmap: null,
  heatmapOn: false,
  filter: null,
  selectedId: null,
  seed: 0,
};

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el as T;
};

function setStatus(message: string, isError = false) {
  const el = $('#status');
  el.textContent = message;
  el.className = isError ? 'status error' : 'status';
}

async function loadDesign() {
  const res = await client.getDesign();
  state.design = res.design;
  state.revision = res.revision;
  state.indicators = await client.indicators();
}

async function calculateBenefits() {
  setStatus('simulating resident allocation…');
  state.sim = await client.simulate(state.seed);
  state.heatmap = await client.heatmap(state.seed);
  renderAll();
  setStatus(`simulated revision ${state.revision} with seed ${state.seed}`);
}

function renderHeader() {
  $('#revision').textContent = `revision ${state.revision}`;
  const iq = state.sim?.result.inequality ?? null;
  $('#inequality-indicator').textContent = iq
    ? scaledInequality(iq.total, iq.display_scale)
    : '–';
  $('#mean-benefit-indicator').textContent = fmtNumber(state.sim?.result.group_stats?.global_mean ?? null);
  $('#allocated-indicator').textContent = String(state.sim?.result.allocated ?? '–');
}

function renderMap() {
  if (!state.design) return;
  $('#map').innerHTML = mapSvg(state.design, {
    heatmap: state.heatmapOn ? state.heatmap : null,
    filter: state.filter,
    selectedId: state.selectedId,
  });
  document.querySelectorAll<SVGPolygonElement>('#map polygon.building').forEach((poly) => {
    poly.addEventListener('click', () => void selectBuilding(poly.dataset.id ?? null));
  });
}

function renderIndicators() {
  const ind = state.indicators;
  if (!ind) return;
  const rows = Object.entries(ind.floor_areas)
    .sort()
    .map(([f, a]) => `<tr><td>${f}</td><td class="num">${fmtArea(a)}</td></tr>`)
    .join('');
  $('#planning-indicators').innerHTML =
    `<table><tbody>${rows}</tbody></table>` +
    `<p class="small">site ${fmtArea(ind.site_area)} · capacity ${ind.total_capacity} residents · ` +
    `population ${ind.residents}</p>`;
  const prefs = Object.entries(ind.population)
    .sort()
    .map(
      ([tid, t]) =>
        `<div class="pref-cell"><span class="small">${t.count}× ${tid}</span>` +
        preferenceChart(t.name, t.mean_preferences) +
        `</div>`,
    )
    .join('');
  $('#population-indicators').innerHTML = prefs;
}

function renderCharts() {
  const sim = state.sim;
  if (!sim || !sim.result.group_stats || !sim.result.inequality) {
    $('#benefit-chart').innerHTML = '<p class="small">run a simulation to see benefits</p>';
    $('#inequality-chart').innerHTML = '';
    return;
  }
  $('#benefit-chart').innerHTML = benefitChart(sim.result.group_stats);
  $('#inequality-chart').innerHTML = inequalityChart(sim.result.inequality);
}

async function selectBuilding(id: string | null) {
  state.selectedId = id;
  renderMap();
  if (!id) {
    $('#detail-panel').innerHTML = '';
    return;
  }
  const d = await client.buildingDetail(id, state.seed);
  const accRows = Object.entries(d.accessibility)
    .sort()
    .map(([f, v]) => `<tr><td>${f}</td><td class="num">${fmtNumber(v)}</td></tr>`)
    .join('');
  const utilRows = Object.entries(d.utility_per_type)
    .sort()
    .map(([t, v]) => `<tr><td>${t}</td><td class="num">${fmtNumber(v)}</td></tr>`)
    .join('');
  const areas = Object.entries(d.floor_areas)
    .sort()
    .map(([f, a]) => `${f} ${fmtArea(a)}`)
    .join(', ');
  $('#detail-panel').innerHTML =
    `<h3>${d.id} <span class="small">(${d.block_id})</span></h3>` +
    `<p class="small">${d.floors} floors · ${areas || 'no floor areas'} · capacity ${d.capacity}</p>` +
    `<p class="small">occupants ${d.occupants} · mean benefit ${fmtNumber(d.mean_benefit)}</p>` +
    `<div class="cols"><div><h4>accessibility</h4><table><tbody>${accRows}</tbody></table></div>` +
    `<div><h4>utility by type</h4><table><tbody>${utilRows}</tbody></table></div></div>`;
}

function renderAll() {
  renderHeader();
  renderMap();
  renderIndicators();
  renderCharts();
}

// -- edit flow ---------------------------------------------------------------

function editFromForm(): Record<string, unknown> {
  const action = ($('#edit-action') as HTMLSelectElement).value;
  const id = ($('#edit-id') as HTMLInputElement).value.trim();
  if (action === 'delete') return { action, building_id: id };
  const floors = parseInt(($('#edit-floors') as HTMLInputElement).value || '1', 10);
  const areasRaw = ($('#edit-areas') as HTMLInputElement).value.trim();
  const floor_areas: Record<string, number> = {};
  if (areasRaw) {
    for (const part of areasRaw.split(',')) {
      const [k, v] = part.split(':').map((s) => s.trim());
      if (k && v !== undefined) floor_areas[k] = parseFloat(v);
    }
  }
  if (action === 'modify') {
    const changes: Record<string, unknown> = { floors };
    if (Object.keys(floor_areas).length) changes.floor_areas = floor_areas;
    return { action, building_id: id, changes };
  }
  const block = ($('#edit-block') as HTMLInputElement).value.trim();
  const x = parseFloat(($('#edit-x') as HTMLInputElement).value || '0');
  const y = parseFloat(($('#edit-y') as HTMLInputElement).value || '0');
  const w = parseFloat(($('#edit-w') as HTMLInputElement).value || '30');
  const h = parseFloat(($('#edit-h') as HTMLInputElement).value || '30');
  return {
    action: 'add',
    building: {
      id,
      block_id: block,
      footprint: [[x, y], [x + w, y], [x + w, y + h], [x, y + h]],
      floors,
      floor_areas,
    },
  };
}

async function submitEdit(ev: Event) {
  ev.preventDefault();
  try {
    const res = await client.postEdits(state.revision, [editFromForm() as never]);
    state.design = res.design;
    state.revision = res.revision;
    state.indicators = await client.indicators();
    renderAll();
    setStatus(`edit applied, now at revision ${state.revision}; press "Calculate Benefits" to resimulate`);
  } catch (err) {
    if (err instanceof ApiError && err.code === 'stale-revision') {
      await loadDesign();
      renderAll();
      setStatus('design changed underneath you; state reloaded, please retry the edit', true);
    } else if (err instanceof ApiError) {
      setStatus(`${err.code}: ${err.message}`, true);
    } else {
      setStatus(String(err), true);
    }
  }
}

// -- recommendation flow -------------------------------------------------------

function directionsFromForm(): Record<string, GroupDirection> {
  const out: Record<string, GroupDirection> = {};
  document.querySelectorAll<HTMLSelectElement>('#direction-rows select').forEach((sel) => {
    out[sel.dataset.type ?? ''] = sel.value as GroupDirection;
  });
  return out;
}

function renderDirectionRows() {
  if (state.indicators) $('#direction-rows').innerHTML = directionRowsHtml(state.indicators);
}

function renderRecommendation(rec: RecommendationResult) {
  const plan = rec.plan;
  if (plan.no_improvement || rec.blocks_ranked.length === 0) {
    $('#recommendation-panel').innerHTML = '<p>no feasible improvement under these constraints</p>';
    return;
  }
  const tables = rec.blocks_ranked
    .map((b) => {
      const rows = Object.entries(plan.deltas[b] ?? {})
        .sort()
        .map(([f, d]) => `<tr><td>${f}</td><td class="num">${fmtDelta(d)}</td></tr>`)
        .join('');
      return `<details class="block-edit" data-block="${b}"><summary>${b}</summary><table><tbody>${rows}</tbody></table></details>`;
    })
    .join('');
  const before = rec.simulated_inequality_before;
  const after = rec.simulated_inequality_after;
  $('#recommendation-panel').innerHTML =
    `<h4>recommended blocks (by attribution)</h4>` +
    attributionChart(rec.attribution.per_block, rec.blocks_ranked) +
    tables +
    `<p class="small">expected inequality ×1000: soft ${fmtNumber(1000 * plan.predicted_inequality, 2)} · ` +
    `simulated ${after !== null ? fmtNumber(1000 * after, 2) : '–'} (from ` +
    `${before !== null ? fmtNumber(1000 * before, 2) : '–'}) · attribution ${rec.attribution.method}</p>` +
    `<p class="small">edit the blocks as suggested, then press "Calculate Benefits" to verify</p>`;
}

async function submitRecommend(ev: Event) {
  ev.preventDefault();
  const budgetPct = parseFloat(($('#rec-budget') as HTMLInputElement).value || '10');
  const height = parseFloat(($('#rec-height') as HTMLInputElement).value || '2');
  const constraints = constraintsFromInputs(budgetPct, height, directionsFromForm());
  setStatus('recommendation job submitted…');
  $('#recommendation-panel').innerHTML = '<p class="small">optimizing…</p>';
  try {
    const { job_id } = await client.submitRecommend(constraints, state.seed);
    const job = await pollJob(client, job_id, {
      onTick: (j) => setStatus(`job ${job_id}: ${j.status}`),
    });
    renderRecommendation(job.result as RecommendationResult);
    setStatus(`job ${job_id} finished`);
  } catch (err) {
    setStatus(String(err), true);
    $('#recommendation-panel').innerHTML = '';
  }
}

// -- timeline flow -------------------------------------------------------------

async function refreshTimeline() {
  try {
    const { iterations } = await client.timeline();
    renderTimeline(iterations);
  } catch {
    $('#timeline-strip').innerHTML = '<p class="small">timeline unavailable (no data dir)</p>';
  }
}

function renderTimeline(iterations: TimelineEntry[]) {
  const values = iterations.map((e) => e.indicators.total_inequality);
  const chips = iterations
    .map(
      (e) =>
        `<button class="chip" data-revision="${e.revision}">#${e.revision} ${e.label || ''} ` +
        `<span class="small">iq ${e.indicators.total_inequality !== null ? (1000 * e.indicators.total_inequality).toFixed(1) : '–'}</span></button>`,
    )
    .join('');
  $('#timeline-strip').innerHTML = sparkline(values) + `<div class="chips">${chips}</div>`;
  document.querySelectorAll<HTMLButtonElement>('#timeline-strip .chip').forEach((chip) => {
    chip.addEventListener('click', () => void openComparison(parseInt(chip.dataset.revision ?? '0', 10)));
  });
}

async function openComparison(revision: number) {
  const { iteration, design } = await client.timelineRevision(revision);
  const panel = $('#compare-panel');
  panel.hidden = false;
  $('#compare-title').textContent =
    `revision ${iteration.revision} (${iteration.label || 'unlabeled'}) — read-only comparison`;
  $('#compare-map').innerHTML = mapSvg(design, { width: 420, height: 300 });
  const ind = iteration.indicators;
  $('#compare-stats').innerHTML =
    `<p>inequality ×1000: ${ind.total_inequality !== null ? (1000 * ind.total_inequality).toFixed(2) : '–'} · ` +
    `mean benefit ${fmtNumber(ind.mean_benefit)}</p>` +
    Object.entries(ind.per_group_mean)
      .sort()
      .map(([g, v]) => `<span class="small">${g}: ${fmtNumber(v)}</span>`)
      .join(' · ');
}

async function saveToTimeline() {
  const label = ($('#timeline-label') as HTMLInputElement).value.trim();
  try {
    await client.saveTimeline(label);
    await refreshTimeline();
    setStatus(`saved revision ${state.revision} to the timeline`);
  } catch (err) {
    setStatus(String(err), true);
  }
}

// -- filter controls -----------------------------------------------------------

function applyFilter(ev: Event) {
  ev.preventDefault();
  const occRaw = ($('#filter-occupancy') as HTMLInputElement).value;
  const benRaw = ($('#filter-benefit') as HTMLInputElement).value;
  state.filter = occRaw || benRaw
    ? {
        ...(occRaw ? { minOccupancy: parseFloat(occRaw) } : {}),
        ...(benRaw ? { minMeanBenefit: parseFloat(benRaw) } : {}),
      }
    : null;
  renderMap();
}

function bootstrap() {
  $('#edit-form').addEventListener('submit', (ev) => void submitEdit(ev));
  $('#recommend-form').addEventListener('submit', (ev) => void submitRecommend(ev));
  $('#filter-form').addEventListener('submit', applyFilter);
  $('#calc-benefits').addEventListener('click', () => void calculateBenefits());
  $('#save-timeline').addEventListener('click', () => void saveToTimeline());
  $('#heatmap-toggle').addEventListener('change', (ev) => {
    state.heatmapOn = (ev.target as HTMLInputElement).checked;
    renderMap();
  });
  $('#seed-input').addEventListener('change', (ev) => {
    state.seed = parseInt((ev.target as HTMLInputElement).value || '0', 10);
  });
  $('#compare-close').addEventListener('click', () => {
    ($('#compare-panel') as HTMLElement).hidden = true;
  });
  void (async () => {
    try {
      await loadDesign();
      renderDirectionRows();
      renderAll();
      await refreshTimeline();
      setStatus('design loaded; press "Calculate Benefits" to run the first simulation');
    } catch (err) {
      setStatus(`could not reach the fairplan service: ${String(err)}`, true);
    }
  })();
}

document.addEventListener('DOMContentLoaded', bootstrap);
