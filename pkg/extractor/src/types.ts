/** Shared data shapes for the extraction pipeline. */

/** One review document as read from the reviews JSONL file. */
export interface ReviewDocument {
  review_id: string;
  text: string;
  language?: string;
}

/** Extraction pattern that produced a tuple. */
export type Pattern = 'SVO' | 'SVP' | 'APPOS' | 'SVCOP' | 'SRL';

/**
 * One subject-relation-object instance in the exchange format the
 * downstream pipeline ingests. Phrases are lowercased, heads lemmatized.
 */
export interface RelationTuple {
  review_id: string;
  sentence_id: number;
  arg1: string;
  arg1_head: string;
  rel: string;
  rel_head: string;
  arg2: string;
  arg2_head: string;
  pattern: Pattern;
}

export interface ExtractionStats {
  documents: number;
  documentsSkipped: number;
  sentences: number;
  sentencesFailed: number;
  tuples: number;
}

export type PosTag =
  | 'DET'
  | 'ADJ'
  | 'NOUN'
  | 'PROPN'
  | 'VERB'
  | 'AUX'
  | 'PREP'
  | 'PRON'
  | 'ADV'
  | 'CONJ'
  | 'POS'
  | 'PUNCT'
  | 'NUM'
  | 'OTHER';

export interface Token {
  /** original surface form */
  surface: string;
  /** lowercased form used in output */
  text: string;
  tag: PosTag;
  /** lemma for open-class words, lowercased surface otherwise */
  lemma: string;
}
