import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

// compiled location is build-test/test/, fixtures stay in test/fixtures/
const here = dirname(fileURLToPath(import.meta.url));
const fixturesDir = join(here, '..', '..', 'test', 'fixtures');

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(fixturesDir, name), 'utf8')) as T;
}

export function attrValues(svg: string, className: string, attr: string): string[] {
  const out: string[] = [];
  const tagRe = new RegExp(`<[a-z]+ class="${className}[^"]*"[^>]*>`, 'g');
  for (const m of svg.match(tagRe) ?? []) {
    const a = m.match(new RegExp(`${attr}="([^"]*)"`));
    if (a) out.push(a[1]);
  }
  return out;
}
