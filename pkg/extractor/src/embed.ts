/**
 * Deterministic phrase embeddings from lexical features.
 *
 * Each word vector combines the basis directions of its semantic families
 * (create-like words share one direction, destroy-like another, ...) with a
 * character-trigram component that keeps unknown words distinct but stable.
 * No model weights are involved, so the same phrase always embeds to the
 * same vector on every platform, which is what the contract tests and the
 * downstream cache assume.
 */

import { lemmatize, VERB_STEMS } from './lexicon.js';

export const EMBEDDING_DIM = 64;
const NGRAM_WEIGHT = 0.35;
const MAX_PHRASE_TOKENS = 16;

const FAMILIES: Record<string, string[]> = {
  make: ['create', 'construct', 'make', 'assemble', 'build', 'form', 'craft', 'invent'],
  destroy: ['destroy', 'kill', 'slay', 'ruin', 'demolish', 'wreck', 'assault'],
  deny: ['deny', 'reject', 'refuse', 'disown'],
  dislike: ['hate', 'disgust', 'blame', 'resent', 'loathe', 'despise', 'envy'],
  regret: ['regret', 'lament', 'mourn'],
  abandon: ['abandon', 'desert', 'leave', 'forsake', 'flee', 'run'],
  love: ['love', 'adore', 'cherish', 'admire'],
  fear: ['fear', 'dread', 'terrify', 'frighten'],
  help: ['help', 'rescue', 'save', 'protect', 'guard', 'shelter', 'aid'],
  speak: ['converse', 'talk', 'speak', 'tell', 'say', 'chat', 'discuss', 'warn', 'advise', 'counsel'],
  teach: ['teach', 'guide', 'train', 'mentor', 'instruct'],
  deceive: ['trick', 'deceive', 'fool', 'betray', 'cheat'],
  take: ['steal', 'rob', 'take', 'plunder', 'seize', 'capture', 'grab'],
  chase: ['chase', 'pursue', 'hunt', 'follow', 'track'],
  rule: ['rule', 'command', 'order', 'govern', 'reign', 'control'],
  serve: ['serve', 'obey', 'honor', 'entertain'],
  move: ['travel', 'journey', 'go', 'walk', 'ride', 'wander'],
  find: ['find', 'discover', 'locate', 'uncover'],
  write: ['write', 'describe', 'portray', 'depict', 'narrate'],
  see: ['see', 'watch', 'observe', 'witness'],
  strike: ['attack', 'strike', 'battle', 'fight', 'duel'],
  mock: ['mock', 'taunt', 'insult', 'ridicule'],
  praise: ['praise', 'flatter', 'compliment', 'applaud'],
  meet: ['meet', 'visit', 'greet', 'join', 'accompany'],
};

const FAMILY_OF: Map<string, string> = new Map();
for (const [family, members] of Object.entries(FAMILIES)) {
  for (const member of members) FAMILY_OF.set(member, family);
}

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function normalize(vector: Float64Array): Float64Array {
  let norm = 0;
  for (const x of vector) norm += x * x;
  norm = Math.sqrt(norm);
  if (norm === 0) {
    vector[0] = 1;
    return vector;
  }
  for (let i = 0; i < vector.length; i++) vector[i] /= norm;
  return vector;
}

const basisCache = new Map<string, Float64Array>();

/** Unit direction derived from a name; gaussian components, then normalized. */
function basisVector(name: string): Float64Array {
  const cached = basisCache.get(name);
  if (cached) return cached;
  const random = mulberry32(fnv1a(`basis:${name}`));
  const vector = new Float64Array(EMBEDDING_DIM);
  for (let i = 0; i < EMBEDDING_DIM; i += 2) {
    const u = Math.max(random(), 1e-12);
    const v = random();
    const radius = Math.sqrt(-2 * Math.log(u));
    vector[i] = radius * Math.cos(2 * Math.PI * v);
    if (i + 1 < EMBEDDING_DIM) vector[i + 1] = radius * Math.sin(2 * Math.PI * v);
  }
  normalize(vector);
  basisCache.set(name, vector);
  return vector;
}

function ngramVector(word: string): Float64Array {
  const padded = `^${word}$`;
  const vector = new Float64Array(EMBEDDING_DIM);
  for (let i = 0; i + 3 <= padded.length; i++) {
    const gram = padded.slice(i, i + 3);
    const hash = fnv1a(`gram:${gram}`);
    const slot = hash % EMBEDDING_DIM;
    const sign = (hash >>> 16) & 1 ? 1 : -1;
    vector[slot] += sign;
  }
  return normalize(vector);
}

/** Embed a single lowercased word. */
export function wordVector(word: string): Float64Array {
  const lemma = lemmatize(word);
  const vector = new Float64Array(EMBEDDING_DIM);
  const family = FAMILY_OF.get(lemma);
  if (family) {
    const base = basisVector(family);
    for (let i = 0; i < EMBEDDING_DIM; i++) vector[i] += base[i];
  } else {
    // unknown words lean on their own lemma direction instead of a family
    const base = basisVector(`lemma:${lemma}`);
    for (let i = 0; i < EMBEDDING_DIM; i++) vector[i] += base[i];
  }
  const grams = ngramVector(word);
  for (let i = 0; i < EMBEDDING_DIM; i++) vector[i] += NGRAM_WEIGHT * grams[i];
  return normalize(vector);
}

export type Pooling = 'mean' | 'head-token';

const STOP_TOKENS = new Set(['the', 'a', 'an', 'to', 'of', 'in', 'is', 'was', 'are', 'were']);

function headToken(tokens: string[]): string {
  for (const token of tokens) {
    if (VERB_STEMS.has(lemmatize(token))) return token;
  }
  for (const token of tokens) {
    if (!STOP_TOKENS.has(token)) return token;
  }
  return tokens[0];
}

export interface EmbedOptions {
  pooling?: Pooling;
  onWarning?: (message: string) => void;
}

/** Embed a phrase with the chosen pooling; over-length input is truncated. */
export function phraseVector(phrase: string, options: EmbedOptions = {}): Float64Array {
  const pooling = options.pooling ?? 'mean';
  let tokens = phrase.toLowerCase().split(/\s+/).filter(Boolean);
  if (tokens.length === 0) tokens = ['empty'];
  if (tokens.length > MAX_PHRASE_TOKENS) {
    (options.onWarning ?? console.warn)(
      `phrase truncated to ${MAX_PHRASE_TOKENS} tokens: "${phrase.slice(0, 40)}..."`,
    );
    tokens = tokens.slice(0, MAX_PHRASE_TOKENS);
  }
  if (pooling === 'head-token') {
    return wordVector(headToken(tokens));
  }
  const mean = new Float64Array(EMBEDDING_DIM);
  for (const token of tokens) {
    const vector = wordVector(token);
    for (let i = 0; i < EMBEDDING_DIM; i++) mean[i] += vector[i];
  }
  for (let i = 0; i < EMBEDDING_DIM; i++) mean[i] /= tokens.length;
  return normalize(mean);
}

export function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / Math.sqrt(na * nb);
}

/**
 * Render the embedding exchange file: a dim header line followed by one
 * record per distinct phrase, sorted for reproducible bytes.
 */
export function embeddingFile(phrases: string[], options: EmbedOptions = {}): string {
  const distinct = [...new Set(phrases.map((p) => p.trim()).filter(Boolean))].sort();
  const lines = [JSON.stringify({ dim: EMBEDDING_DIM, format_version: 1 })];
  for (const phrase of distinct) {
    const vector = [...phraseVector(phrase, options)];
    lines.push(JSON.stringify({ text: phrase, vector }));
  }
  return lines.join('\n') + '\n';
}
