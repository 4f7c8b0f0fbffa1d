/**
 * Contract tests against the graph pipeline: extractor output must load
 * through its ingest stage with zero skips and through its embedding file
 * reader. Skipped when the pipeline CLI is not on PATH.
 */

import { spawnSync } from 'node:child_process';
import fs from 'node:fs';
import os from 'node:os';
import path from 'node:path';

import { describe, expect, it } from 'vitest';

import { embeddingFile } from '../src/embed.js';
import { extractTuples, tuplesToJsonl } from '../src/extract.js';

const REVIEWS = [
  { review_id: 'r1', text: 'Gandalf recruits Bilbo. Bilbo is a burglar.', language: 'en' },
  { review_id: 'r2', text: 'The monster was created by Frankenstein.', language: 'en' },
  { review_id: 'r3', text: 'George travels with Lennie. Scout admires her father.', language: 'en' },
  { review_id: 'r4', text: "Curley's wife flirts with Lennie.", language: 'en' },
];

function pipelineAvailable(): boolean {
  return spawnSync('actantgraph', ['--version'], { encoding: 'utf-8' }).status === 0;
}

const available = pipelineAvailable();

describe.skipIf(!available)('pipeline contract', () => {
  it('tuple output ingests with zero skips', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'extractor-'));
    const tuplesPath = path.join(dir, 'tuples.jsonl');
    const indexPath = path.join(dir, 'index.json');
    const { tuples } = extractTuples(REVIEWS);
    expect(tuples.length).toBeGreaterThan(5);
    fs.writeFileSync(tuplesPath, tuplesToJsonl(tuples), 'utf-8');

    const result = spawnSync(
      'actantgraph',
      ['ingest', '--tuples', tuplesPath, '--min-count', '1', '--out', indexPath],
      { encoding: 'utf-8' },
    );
    expect(result.status).toBe(0);
    expect(result.stdout).toContain('0 lines skipped');
    const index = JSON.parse(fs.readFileSync(indexPath, 'utf-8'));
    expect(index.format_version).toBe(1);
    expect(Object.keys(index.vocabulary).length).toBeGreaterThan(5);
  });

  it('embedding export loads through the pipeline gateway', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'extractor-'));
    const embPath = path.join(dir, 'emb.jsonl');
    fs.writeFileSync(embPath, embeddingFile(['created', 'made', 'runs away']), 'utf-8');
    const probe = [
      'from actantgraph.embeddings import FileEmbeddingGateway',
      `g = FileEmbeddingGateway(${JSON.stringify(embPath)})`,
      "v = g.get_vectors(['created', 'made', 'runs away'])",
      'print(g.dim, len(v))',
    ].join('; ');
    const result = spawnSync('python3', ['-c', probe], { encoding: 'utf-8' });
    expect(result.status).toBe(0);
    expect(result.stdout.trim()).toBe('64 3');
  });
});

describe('tuple file format', () => {
  it('every line is a complete json record', () => {
    const { tuples } = extractTuples(REVIEWS);
    const lines = tuplesToJsonl(tuples).trim().split('\n');
    for (const line of lines) {
      const record = JSON.parse(line);
      for (const field of [
        'review_id',
        'sentence_id',
        'arg1',
        'arg1_head',
        'rel',
        'rel_head',
        'arg2',
        'arg2_head',
        'pattern',
      ]) {
        expect(record).toHaveProperty(field);
      }
      expect(typeof record.sentence_id).toBe('number');
    }
  });
});
