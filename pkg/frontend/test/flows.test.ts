// Contract checks for the edit -> simulate refresh and the timeline
// comparison flow, driven entirely by recorded fixtures.

import assert from 'node:assert/strict';
import { test } from 'node:test';

import { benefitChart, inequalityChart, sparkline } from '../src/charts.js';
import { mapSvg } from '../src/map.js';
import type { DesignResponse, Job, SimulateResponse, TimelineEntry } from '../src/types.js';
import { attrValues, fixture } from './helpers.js';

test('edit flow: a design edit bumps the revision and changes the simulated indicators', () => {
  const before = fixture<SimulateResponse>('simulate.json');
  const afterDesign = fixture<DesignResponse>('design_after_edit.json');
  const after = fixture<SimulateResponse>('simulate_after_edit.json');
  assert.equal(before.revision, 0);
  assert.equal(afterDesign.revision, 1);
  assert.equal(after.revision, 1);
  assert.notEqual(before.result.inequality!.total, after.result.inequality!.total);
  // the refreshed panels carry the new payload numbers verbatim
  const svg = inequalityChart(after.result.inequality!);
  assert.equal(Number(attrValues(svg, 'ineq-total', 'data-total')[0]), after.result.inequality!.total);
  const bars = benefitChart(after.result.group_stats!);
  assert.equal(
    Number(attrValues(bars, 'global-mean', 'data-mean')[0]),
    after.result.group_stats!.global_mean,
  );
});

test('recommendation payload is renderable and self-consistent', () => {
  const job = fixture<Job>('job_done.json');
  const rec = job.result!;
  assert.equal(job.status, 'done');
  assert.ok(rec.blocks_ranked.length > 0);
  for (const b of rec.blocks_ranked) {
    assert.ok(rec.plan.deltas[b], `ranked block ${b} has a delta table`);
  }
  assert.ok(rec.plan.predicted_inequality < rec.soft_inequality_before);
  assert.ok(rec.simulated_inequality_after! < rec.simulated_inequality_before!);
});

test('timeline comparison: entries render as sparkline and revisions open read-only', () => {
  const { iterations } = fixture<{ iterations: TimelineEntry[] }>('timeline.json');
  assert.equal(iterations.length, 2);
  assert.deepEqual(iterations.map((e) => e.revision), [0, 1]);
  const spark = sparkline(iterations.map((e) => e.indicators.total_inequality));
  assert.match(spark, /data-n="2"/);
  const rev1 = fixture<{ iteration: TimelineEntry; design: DesignResponse['design'] }>('timeline_rev1.json');
  assert.equal(rev1.iteration.label, 'more culture');
  const svg = mapSvg(rev1.design, { width: 420, height: 300 });
  assert.equal(attrValues(svg, 'building', 'data-id').length, rev1.design.features.length);
  // the edited building carries the new floor count in the compare view
  const edited = rev1.design.features.find((f) => f.id === 'cult-1')!;
  assert.equal(edited.properties.floors, 4);
});
