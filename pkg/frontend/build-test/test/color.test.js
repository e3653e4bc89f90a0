import assert from 'node:assert/strict';
import { test } from 'node:test';
import { benefitColor, dominantType, heatmapScale } from '../src/color.js';
import { fixture } from './helpers.js';
test('mean benefit renders white', () => {
    assert.equal(benefitColor(0, 10), '#ffffff');
    assert.equal(benefitColor(null, 10), '#ffffff');
});
test('above mean is green, below mean is red', () => {
    const above = benefitColor(5, 10);
    const below = benefitColor(-5, 10);
    const [rA, gA] = [parseInt(above.slice(1, 3), 16), parseInt(above.slice(3, 5), 16)];
    const [rB, gB] = [parseInt(below.slice(1, 3), 16), parseInt(below.slice(3, 5), 16)];
    assert.ok(gA > rA, `expected green-ish, got ${above}`);
    assert.ok(rB > gB, `expected red-ish, got ${below}`);
});
test('farther from the mean is darker', () => {
    const lum = (hex) => parseInt(hex.slice(1, 3), 16) + parseInt(hex.slice(3, 5), 16) + parseInt(hex.slice(5, 7), 16);
    assert.ok(lum(benefitColor(2, 10)) > lum(benefitColor(8, 10)));
    assert.ok(lum(benefitColor(-2, 10)) > lum(benefitColor(-8, 10)));
    // saturates at the scale
    assert.equal(benefitColor(10, 10), benefitColor(25, 10));
});
test('heatmap colors match the frozen snapshot of the recorded fixture', () => {
    const heatmap = fixture('heatmap.json');
    const snap = fixture('heatmap_colors.snap.json');
    const scale = heatmapScale(heatmap.buildings.map((e) => e.relative_benefit));
    assert.ok(Math.abs(scale - snap.scale) < 1e-6);
    for (const entry of heatmap.buildings) {
        assert.equal(benefitColor(entry.relative_benefit, scale), snap[entry.id], `color mismatch for ${entry.id}`);
    }
});
test('dominant type picks the largest floor area', () => {
    assert.equal(dominantType({ Residential: 900, Commercial: 400 }), 'Residential');
    assert.equal(dominantType({ Office: 1800, Commercial: 2000 }), 'Commercial');
});
