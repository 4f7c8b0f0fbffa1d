#!/usr/bin/env node
/**
 * Command-line front end: extract | embed-export | embed-serve.
 */

import fs from 'node:fs';
import process from 'node:process';

import { extractTuples, tuplesToJsonl } from './extract.js';
import { embeddingFile, type Pooling } from './embed.js';
import { serveEmbeddings } from './server.js';
import type { ReviewDocument } from './types.js';

const USAGE = `usage:
  review-extractor extract --reviews <jsonl> --out <tuples.jsonl> [--resolve-pronouns]
  review-extractor embed-export --phrases <txt> --out <emb.jsonl> [--pooling mean|head-token]
  review-extractor embed-serve --port <n> [--pooling mean|head-token]`;

function parseFlags(argv: string[]): Map<string, string | boolean> {
  const flags = new Map<string, string | boolean>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith('--')) {
      usageError(`unexpected argument: ${arg}`);
    }
    const name = arg.slice(2);
    const next = argv[i + 1];
    if (next === undefined || next.startsWith('--')) {
      flags.set(name, true);
    } else {
      flags.set(name, next);
      i += 1;
    }
  }
  return flags;
}

function usageError(message: string): never {
  console.error(`error: ${message}\n${USAGE}`);
  process.exit(2);
}

function requireString(flags: Map<string, string | boolean>, name: string): string {
  const value = flags.get(name);
  if (typeof value !== 'string' || !value) usageError(`--${name} is required`);
  return value;
}

function readReviews(path: string): ReviewDocument[] {
  if (!fs.existsSync(path)) usageError(`--reviews: no such file: ${path}`);
  const docs: ReviewDocument[] = [];
  const lines = fs.readFileSync(path, 'utf-8').split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    try {
      const record = JSON.parse(line) as Partial<ReviewDocument>;
      docs.push({
        review_id: String(record.review_id ?? `line${i + 1}`),
        text: String(record.text ?? ''),
        language: record.language === undefined ? 'en' : String(record.language),
      });
    } catch {
      console.warn(`warning: ${path}:${i + 1}: skipping malformed review record`);
    }
  }
  return docs;
}

function poolingFrom(flags: Map<string, string | boolean>): Pooling {
  const value = flags.get('pooling');
  if (value === undefined || value === 'mean') return 'mean';
  if (value === 'head-token') return 'head-token';
  usageError(`--pooling must be "mean" or "head-token", got ${String(value)}`);
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  if (!command || command === '--help' || command === '-h') {
    console.log(USAGE);
    process.exit(command ? 0 : 2);
  }
  const flags = parseFlags(rest);

  if (command === 'extract') {
    const reviewsPath = requireString(flags, 'reviews');
    const outPath = requireString(flags, 'out');
    const docs = readReviews(reviewsPath);
    const { tuples, stats } = extractTuples(docs, {
      resolvePronouns: flags.get('resolve-pronouns') === true,
    });
    fs.writeFileSync(outPath, tuplesToJsonl(tuples), 'utf-8');
    console.log(
      `extract: ${stats.tuples} tuples from ${stats.documents} documents ` +
        `(${stats.documentsSkipped} documents skipped, ` +
        `${stats.sentencesFailed} sentences failed) -> ${outPath}`,
    );
    return;
  }

  if (command === 'embed-export') {
    const phrasesPath = requireString(flags, 'phrases');
    const outPath = requireString(flags, 'out');
    if (!fs.existsSync(phrasesPath)) usageError(`--phrases: no such file: ${phrasesPath}`);
    const phrases = fs
      .readFileSync(phrasesPath, 'utf-8')
      .split('\n')
      .map((line) => line.trim())
      .filter(Boolean);
    if (phrases.length === 0) usageError('--phrases file contains no phrases');
    fs.writeFileSync(outPath, embeddingFile(phrases, { pooling: poolingFrom(flags) }), 'utf-8');
    console.log(`embed-export: ${new Set(phrases).size} phrases -> ${outPath}`);
    return;
  }

  if (command === 'embed-serve') {
    const port = Number(requireString(flags, 'port'));
    if (!Number.isInteger(port) || port < 0 || port > 65535) {
      usageError(`--port must be an integer in [0, 65535]`);
    }
    serveEmbeddings(port, poolingFrom(flags));
    return;
  }

  usageError(`unknown command: ${command}`);
}

main();
