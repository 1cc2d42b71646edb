"""Vocabularies, character n-gram extraction, and shared embedding tables.

Word vectors and character n-gram vectors have the same width d; a token's
representation is the concatenation of its word vector and the average of its
unique, in-vocabulary character n-gram vectors (2d total). Word lookup is
lowercased by default; n-grams are case-sensitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNK = "<unk>"

# model-time n-gram orders; pre-training additionally uses unigrams
MODEL_NGRAM_ORDERS = (2, 3, 4)
PRETRAIN_NGRAM_ORDERS = (1, 2, 3, 4)

BEGIN_MARK = "#B#"
END_MARK = "#E#"


class VocabError(Exception):
    pass


def extract_char_ngrams(word, n_values):
    """Unique boundary-marked character n-grams, first-occurrence order.

    Unigrams are unmarked. For n >= 2 the word is padded with begin/end
    symbols that each occupy one window position, so
    extract_char_ngrams("Cat", {1,2,3}) yields
    {C, a, t, #B#C, Ca, at, t#E#, #B#Ca, Cat, at#E#}.
    """
    if not word:
        raise VocabError("cannot extract n-grams of an empty word")
    seen = {}
    symbols = [BEGIN_MARK] + list(word) + [END_MARK]
    for n in sorted(n_values):
        if n == 1:
            for ch in word:
                seen.setdefault(ch, None)
            continue
        for i in range(len(symbols) - n + 1):
            seen.setdefault("".join(symbols[i:i + n]), None)
    return list(seen)


@dataclass
class Vocabulary:
    """Word and character n-gram index maps with training-set frequencies."""

    word_to_id: dict = field(default_factory=dict)
    ngram_to_id: dict = field(default_factory=dict)
    word_freq: dict = field(default_factory=dict)
    ngram_orders: tuple = MODEL_NGRAM_ORDERS
    lowercase_words: bool = True

    def __post_init__(self):
        if UNK not in self.word_to_id:
            self.word_to_id = {UNK: 0, **{w: i + 1 for w, i in
                                          self.word_to_id.items()}}

    @property
    def unk_id(self):
        return self.word_to_id[UNK]

    @property
    def n_words(self):
        return len(self.word_to_id)

    @property
    def n_ngrams(self):
        return len(self.ngram_to_id)

    def word_key(self, word):
        return word.lower() if self.lowercase_words else word

    def word_id(self, word):
        return self.word_to_id.get(self.word_key(word), self.unk_id)

    def frequency(self, word):
        return self.word_freq.get(self.word_key(word), 0)

    def ngram_ids(self, word):
        """Ids of the word's unique known n-grams; unknown ones are dropped."""
        out = []
        for gram in extract_char_ngrams(word, self.ngram_orders):
            gid = self.ngram_to_id.get(gram)
            if gid is not None:
                out.append(gid)
        return out

    @classmethod
    def build(cls, sentences, ngram_orders=MODEL_NGRAM_ORDERS,
              lowercase_words=True):
        """Build from an iterable of token sequences (all training data)."""
        words = {}
        freq = {}
        ngrams = {}
        for tokens in sentences:
            for tok in tokens:
                key = tok.lower() if lowercase_words else tok
                if key not in words:
                    words[key] = len(words)  # shifted past UNK in __post_init__
                freq[key] = freq.get(key, 0) + 1
                for gram in extract_char_ngrams(tok, ngram_orders):
                    if gram not in ngrams:
                        ngrams[gram] = len(ngrams)
        vocab = cls(word_to_id=words, ngram_to_id=ngrams, word_freq=freq,
                    ngram_orders=tuple(ngram_orders),
                    lowercase_words=lowercase_words)
        return vocab


@dataclass
class EmbeddingTable:
    """Word and n-gram vectors of a common width d (theta_e)."""

    word_vectors: np.ndarray
    ngram_vectors: np.ndarray

    @property
    def dim(self):
        return self.word_vectors.shape[1]


def char_word_embedding(word, vocabulary, table):
    """Average of the unique known n-gram vectors; zero when none are known."""
    ids = vocabulary.ngram_ids(word)
    if not ids:
        return np.zeros(table.dim)
    return table.ngram_vectors[ids].mean(axis=0)


def apply_word_dropout(word_frequency, alpha, rng):
    """True when the word vector should be replaced by the UNK vector."""
    if word_frequency < 1:
        raise VocabError("word-dropout needs a training frequency >= 1")
    return rng.random() < alpha / (alpha + word_frequency)


def word_representation(word, vocabulary, table, train_mode=False, rng=None,
                        alpha=0.25):
    """Concatenated [word vector; averaged char n-gram vector], width 2d."""
    wid = vocabulary.word_id(word)
    if train_mode and wid != vocabulary.unk_id:
        if apply_word_dropout(vocabulary.frequency(word), alpha, rng):
            wid = vocabulary.unk_id
    return np.concatenate([table.word_vectors[wid],
                           char_word_embedding(word, vocabulary, table)])


# -- embedding text file -----------------------------------------------------
# line 1: "count dim"; then one line per entry: token, then dim floats.

def save_embeddings(path, tokens, vectors):
    vectors = np.asarray(vectors, dtype=np.float64)
    if len(tokens) != vectors.shape[0]:
        raise VocabError("token count does not match vector count")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{vectors.shape[0]} {vectors.shape[1]}\n")
        for tok, vec in zip(tokens, vectors):
            fh.write(tok + " " + " ".join(f"{v:.17g}" for v in vec) + "\n")


def load_embeddings(path):
    """Returns (tokens, vectors). Raises on malformed lines, naming the line."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VocabError(f"{path}:1: bad header, want 'count dim'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise VocabError(f"{path}:1: non-integer header") from None
        tokens = []
        vectors = np.empty((count, dim))
        lineno = 1
        for row in range(count):
            line = fh.readline()
            lineno += 1
            if not line:
                raise VocabError(
                    f"{path}:{lineno}: expected {count} entries, got {row}")
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise VocabError(
                    f"{path}:{lineno}: expected {dim} values, "
                    f"got {len(parts) - 1}")
            tokens.append(parts[0])
            try:
                vectors[row] = [float(p) for p in parts[1:]]
            except ValueError:
                raise VocabError(f"{path}:{lineno}: bad float") from None
        extra = fh.readline()
        if extra.strip():
            raise VocabError(
                f"{path}:{lineno + 1}: more entries than the header declares")
    return tokens, vectors
