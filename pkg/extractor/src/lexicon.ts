/**
 * Word lists and a rule-based lemmatizer.
 *
 * The part-of-speech layer only needs to be good enough to drive the
 * syntactic extraction patterns over informal review prose; anything
 * outside the lists falls back to noun, which is the safe default for
 * argument heads.
 */

export const DETERMINERS = new Set([
  'a', 'an', 'the', 'this', 'that', 'these', 'those', 'his', 'her', 'its',
  'their', 'my', 'our', 'your', 'some', 'any', 'every', 'each', 'no', 'both',
]);

export const PREPOSITIONS = new Set([
  'in', 'of', 'by', 'from', 'about', 'with', 'to', 'for', 'on', 'at', 'into',
  'through', 'against', 'after', 'before', 'between', 'during', 'under',
  'over', 'toward', 'towards', 'without', 'near', 'across',
]);

export const AUXILIARIES = new Set([
  'is', 'are', 'was', 'were', 'be', 'been', 'being', 'am',
  'has', 'have', 'had', 'having',
  'do', 'does', 'did',
  'will', 'would', 'shall', 'should', 'can', 'could', 'may', 'might', 'must',
]);

export const BE_FORMS = new Set(['is', 'are', 'was', 'were', 'be', 'been', 'being', 'am']);

export const PRONOUNS = new Set([
  'he', 'she', 'it', 'they', 'him', 'them', 'i', 'we', 'you', 'me', 'us',
  'who', 'whom', 'himself', 'herself', 'itself', 'themselves',
]);

export const SUBJECT_PRONOUNS = new Set(['he', 'she', 'it', 'they', 'i', 'we', 'you']);

export const CONJUNCTIONS = new Set(['and', 'but', 'or', 'nor', 'so', 'yet', 'while', 'because', 'although', 'when', 'then']);

export const ADVERBS = new Set([
  'not', 'never', 'very', 'really', 'also', 'just', 'still', 'always',
  'often', 'finally', 'eventually', 'later', 'soon', 'quickly', 'slowly',
  'secretly', 'reluctantly', 'bravely', 'deeply', 'truly', 'almost',
]);

/** Base forms of verbs the patterns recognize. */
export const VERB_STEMS = new Set([
  'recruit', 'find', 'create', 'make', 'construct', 'assemble', 'build',
  'form', 'craft', 'destroy', 'kill', 'slay', 'ruin', 'demolish', 'wreck',
  'deny', 'reject', 'refuse', 'disown', 'hate', 'disgust', 'blame', 'resent',
  'loathe', 'despise', 'envy', 'regret', 'lament', 'mourn', 'abandon',
  'desert', 'leave', 'forsake', 'flee', 'run', 'love', 'adore', 'cherish',
  'admire', 'fear', 'dread', 'terrify', 'frighten', 'help', 'rescue', 'save',
  'protect', 'guard', 'shelter', 'aid', 'converse', 'talk', 'speak', 'tell',
  'say', 'chat', 'discuss', 'warn', 'advise', 'counsel', 'teach', 'guide',
  'train', 'mentor', 'instruct', 'trick', 'deceive', 'fool', 'betray',
  'cheat', 'steal', 'rob', 'take', 'plunder', 'seize', 'capture', 'grab',
  'chase', 'pursue', 'hunt', 'follow', 'track', 'rule', 'command', 'order',
  'govern', 'reign', 'control', 'serve', 'obey', 'honor', 'entertain',
  'travel', 'journey', 'go', 'walk', 'ride', 'wander', 'discover', 'locate',
  'uncover', 'write', 'describe', 'portray', 'depict', 'narrate', 'see',
  'watch', 'observe', 'witness', 'attack', 'strike', 'battle', 'fight',
  'duel', 'assault', 'mock', 'taunt', 'insult', 'ridicule', 'praise',
  'flatter', 'compliment', 'applaud', 'meet', 'visit', 'greet', 'marry',
  'live', 'die', 'want', 'wish', 'think', 'know', 'read', 'review',
  'recommend', 'enjoy', 'accompany', 'join', 'lead', 'bring', 'carry',
  'keep', 'give', 'send', 'show', 'feature', 'curse', 'imagine', 'invent',
  'defend', 'accuse', 'shoot', 'convict', 'testify', 'reclaim', 'recover',
  'punish', 'forgive', 'avenge', 'kidnap', 'imprison', 'free', 'release',
  'escape', 'confront', 'challenge', 'bury', 'burn', 'banish', 'summon',
  'awaken', 'transform', 'destroy', 'flirt', 'care', 'worry', 'dream',
]);

/** Nouns that should never be mistaken for verbs by the suffix rules. */
export const NOUN_STEMS = new Set([
  'book', 'novel', 'story', 'tale', 'character', 'hobbit', 'burglar',
  'dragon', 'wizard', 'ring', 'monster', 'creature', 'creator', 'doctor',
  'scientist', 'author', 'writer', 'film', 'movie', 'scene', 'friend',
  'brother', 'sister', 'father', 'mother', 'man', 'woman', 'boy', 'girl',
  'king', 'queen', 'knight', 'princess', 'prince', 'dwarf', 'elf', 'troll',
  'giant', 'witch', 'thief', 'bard', 'cave', 'mountain', 'forest', 'shire',
  'journey', 'adventure', 'quest', 'reader', 'reviewer', 'chapter', 'ending',
  'plot', 'wife', 'husband', 'son', 'daughter', 'aunt', 'uncle', 'master',
  'servant', 'hero', 'villain', 'companion', 'company', 'treasure', 'sword',
  'people', 'child', 'children', 'reviews', 'classic', 'masterpiece',
]);

const IRREGULAR_LEMMAS: Record<string, string> = {
  found: 'find', made: 'make', wrote: 'write', written: 'write', met: 'meet',
  took: 'take', taken: 'take', gave: 'give', given: 'give', kept: 'keep',
  ran: 'run', slew: 'slay', slain: 'slay', fled: 'flee', told: 'tell',
  said: 'say', saw: 'see', seen: 'see', went: 'go', gone: 'go', left: 'leave',
  stole: 'steal', stolen: 'steal', fought: 'fight', led: 'lead',
  brought: 'bring', sent: 'send', showed: 'show', shown: 'show',
  knew: 'know', known: 'know', thought: 'think', died: 'die', lived: 'live',
  is: 'be', are: 'be', was: 'be', were: 'be', been: 'be', being: 'be', am: 'be',
  has: 'have', had: 'have', having: 'have', does: 'do', did: 'do',
  men: 'man', women: 'woman', wives: 'wife', children: 'child',
  thieves: 'thief', elves: 'elf', dwarves: 'dwarf', people: 'people',
};

function tryStems(word: string, candidates: string[], known: Set<string>): string | null {
  for (const candidate of candidates) {
    if (candidate.length >= 2 && known.has(candidate)) return candidate;
  }
  return null;
}

/** Lemmatize a lowercased token with irregulars first, then suffix rules. */
export function lemmatize(word: string): string {
  if (IRREGULAR_LEMMAS[word]) return IRREGULAR_LEMMAS[word];
  const known = new Set([...VERB_STEMS, ...NOUN_STEMS]);
  if (known.has(word)) return word;

  if (word.endsWith('ies') && word.length > 4) {
    const stem = word.slice(0, -3) + 'y';
    if (known.has(stem)) return stem;
  }
  if (word.endsWith('ied') && word.length > 4) {
    const stem = word.slice(0, -3) + 'y';
    if (known.has(stem)) return stem;
  }
  if (word.endsWith('ing') && word.length > 4) {
    const hit = tryStems(
      word,
      [word.slice(0, -3), word.slice(0, -3) + 'e', word.slice(0, -4)],
      known,
    );
    if (hit) return hit;
  }
  if (word.endsWith('ed') && word.length > 3) {
    const hit = tryStems(
      word,
      [word.slice(0, -1), word.slice(0, -2), word.slice(0, -3)],
      known,
    );
    if (hit) return hit;
  }
  if (word.endsWith('es') && word.length > 3) {
    const hit = tryStems(word, [word.slice(0, -2), word.slice(0, -1)], known);
    if (hit) return hit;
  }
  if (word.endsWith('s') && word.length > 2) {
    const stem = word.slice(0, -1);
    if (known.has(stem)) return stem;
  }
  // unknown words pass through: mention grouping downstream unifies
  // surface variants, and stripping would mangle names like "atticus"
  return word;
}

/** True when the lowercased token inflects from a known verb stem. */
export function isVerbForm(word: string): boolean {
  if (AUXILIARIES.has(word)) return false;
  const lemma = lemmatize(word);
  return VERB_STEMS.has(lemma) && !NOUN_STEMS.has(word);
}

/** Past participle test used by the passive-voice frame. */
export function isParticiple(word: string): boolean {
  const lemma = lemmatize(word);
  if (!VERB_STEMS.has(lemma)) return false;
  if (word === lemma) return false;
  return word.endsWith('ed') || word.endsWith('en') || IRREGULAR_LEMMAS[word] !== undefined;
}
