/** Tokenization, sentence splitting and part-of-speech tagging. */

import {
  ADVERBS,
  AUXILIARIES,
  CONJUNCTIONS,
  DETERMINERS,
  NOUN_STEMS,
  PREPOSITIONS,
  PRONOUNS,
  isVerbForm,
  lemmatize,
} from './lexicon.js';
import type { PosTag, Token } from './types.js';

const ABBREVIATIONS = new Set(['mr.', 'mrs.', 'ms.', 'dr.', 'st.', 'e.g.', 'i.e.', 'vs.']);

/** Split review text into sentences on terminal punctuation. */
export function splitSentences(text: string): string[] {
  const normalized = text.replace(/\s+/g, ' ').trim();
  if (!normalized) return [];
  const sentences: string[] = [];
  let current = '';
  const words = normalized.split(' ');
  for (const word of words) {
    current = current ? `${current} ${word}` : word;
    if (/[.!?]+["')\]]?$/.test(word) && !ABBREVIATIONS.has(word.toLowerCase())) {
      sentences.push(current);
      current = '';
    }
  }
  if (current) sentences.push(current);
  return sentences;
}

const TOKEN_RE = /[A-Za-z]+(?:-[A-Za-z]+)*|'s|[0-9]+|[.,!?;:()"']/g;

/** Tokenize one sentence, splitting possessive 's into its own token. */
export function tokenize(sentence: string): string[] {
  const spaced = sentence.replace(/([A-Za-z])'s\b/g, "$1 's");
  return spaced.match(TOKEN_RE) ?? [];
}

function tagOne(surface: string, lower: string, position: number): PosTag {
  if (/^[.,!?;:()"']$/.test(lower)) return 'PUNCT';
  if (lower === "'s") return 'POS';
  if (/^[0-9]+$/.test(lower)) return 'NUM';
  if (DETERMINERS.has(lower)) return 'DET';
  if (AUXILIARIES.has(lower)) return 'AUX';
  if (PREPOSITIONS.has(lower)) return 'PREP';
  if (PRONOUNS.has(lower)) return 'PRON';
  if (CONJUNCTIONS.has(lower)) return 'CONJ';
  if (ADVERBS.has(lower) || (lower.endsWith('ly') && lower.length > 4)) return 'ADV';
  if (isVerbForm(lower)) return 'VERB';
  if (NOUN_STEMS.has(lower) || NOUN_STEMS.has(lemmatize(lower))) return 'NOUN';
  if (position > 0 && /^[A-Z]/.test(surface)) return 'PROPN';
  return 'NOUN';
}

/** Tag a token sequence; a couple of context repairs follow the lexicon pass. */
export function tag(tokens: string[]): Token[] {
  const tagged: Token[] = tokens.map((surface, position) => {
    const lower = surface.toLowerCase();
    const posTag = tagOne(surface, lower, position);
    return {
      surface,
      text: lower,
      tag: posTag,
      lemma: posTag === 'VERB' || posTag === 'NOUN' || posTag === 'PROPN' ? lemmatize(lower) : lower,
    };
  });
  for (let i = 0; i < tagged.length; i++) {
    const token = tagged[i];
    const previous = tagged[i - 1];
    // a verb-shaped word directly after a determiner is a noun ("the find")
    if (token.tag === 'VERB' && previous && (previous.tag === 'DET' || previous.tag === 'POS')) {
      token.tag = 'NOUN';
    }
    // sentence-initial capitalized unknown noun before a verb is a name
    if (
      i === 0 &&
      token.tag === 'NOUN' &&
      /^[A-Z]/.test(token.surface) &&
      !NOUN_STEMS.has(token.text)
    ) {
      token.tag = 'PROPN';
    }
  }
  return tagged;
}
