import assert from 'node:assert/strict';
import { test } from 'node:test';
import { benefitColor, functionColor, heatmapScale } from '../src/color.js';
import { mapSvg, passesFilter } from '../src/map.js';
import { attrValues, fixture } from './helpers.js';
const design = fixture('design.json').design;
const heatmap = fixture('heatmap.json');
test('base map renders one polygon per building, colored by dominant type', () => {
    const svg = mapSvg(design);
    const ids = attrValues(svg, 'building', 'data-id');
    assert.equal(ids.length, design.features.length);
    const byId = new Map(design.features.map((f) => [f.id, f]));
    const fills = attrValues(svg, 'building', 'fill');
    const dominants = attrValues(svg, 'building', 'data-dominant');
    ids.forEach((id, i) => {
        assert.ok(byId.has(id));
        assert.equal(fills[i], functionColor(dominants[i]));
    });
});
test('heatmap overlay: fills equal the color scale applied to payload relatives', () => {
    const svg = mapSvg(design, { heatmap });
    const scale = heatmapScale(heatmap.buildings.map((e) => e.relative_benefit));
    const byId = new Map(heatmap.buildings.map((e) => [e.id, e]));
    const ids = attrValues(svg, 'building', 'data-id');
    const fills = attrValues(svg, 'building', 'fill');
    ids.forEach((id, i) => {
        const entry = byId.get(id);
        assert.equal(fills[i], benefitColor(entry?.relative_benefit ?? null, scale), `fill for ${id}`);
    });
});
test('occupancy markers appear only for occupied buildings and scale with occupancy', () => {
    const svg = mapSvg(design, { heatmap });
    const markerIds = attrValues(svg, 'occupancy-marker', 'data-id');
    const occupied = heatmap.buildings.filter((e) => e.occupancy > 0).map((e) => e.id);
    assert.deepEqual(markerIds.sort(), [...occupied].sort());
    const radii = attrValues(svg, 'occupancy-marker', 'r').map(Number);
    const occs = attrValues(svg, 'occupancy-marker', 'data-occupancy').map(Number);
    for (let i = 1; i < radii.length; i++) {
        if (occs[i] > occs[i - 1])
            assert.ok(radii[i] >= radii[i - 1]);
    }
});
test('impossible filter highlights nothing', () => {
    const svg = mapSvg(design, { heatmap, filter: { minOccupancy: 10000 } });
    assert.equal(attrValues(svg, 'building highlighted', 'data-id').length, 0);
    assert.ok(!svg.includes('highlighted'));
});
test('filter highlights exactly the matching buildings in cyan', () => {
    const filter = { minOccupancy: 25, minMeanBenefit: 60 };
    const svg = mapSvg(design, { heatmap, filter });
    const expected = heatmap.buildings
        .filter((e) => passesFilter(filter, e.occupancy, e.mean_benefit))
        .map((e) => e.id)
        .sort();
    assert.ok(expected.length > 0, 'fixture should have at least one match');
    const got = attrValues(svg, 'building highlighted', 'data-id').sort();
    assert.deepEqual(got, expected);
    assert.match(svg, /stroke="#00e5ff"/);
});
test('no filter means no highlight', () => {
    assert.equal(passesFilter(null, 50, 100), false);
    assert.equal(passesFilter({}, 50, 100), false);
});
test('selected building gets the selection outline', () => {
    const svg = mapSvg(design, { selectedId: 'res-a1' });
    const m = svg.match(/<polygon[^>]*data-id="res-a1"[^>]*>/);
    assert.ok(m && m[0].includes('stroke="#ff9800"'));
});
