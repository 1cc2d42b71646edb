"""Character n-grams, vocabulary maps, word dropout, embedding file I/O."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jmt.vocab import (UNK, EmbeddingTable, VocabError, Vocabulary,
                       apply_word_dropout, char_word_embedding,
                       extract_char_ngrams, load_embeddings, save_embeddings,
                       word_representation)


def test_cat_ngram_set():
    got = set(extract_char_ngrams("Cat", {1, 2, 3}))
    want = {"C", "a", "t", "#B#C", "Ca", "at", "t#E#",
            "#B#Ca", "Cat", "at#E#"}
    assert got == want


def test_ngrams_case_sensitive_and_unique():
    assert "C" in extract_char_ngrams("CCc", {1})
    assert extract_char_ngrams("aaa", {1}) == ["a"]
    # duplicates collapse, first occurrence order
    assert extract_char_ngrams("aa", {2}) == ["#B#a", "aa", "a#E#"]


def test_ngrams_short_word():
    # single char: the n=3 window is [#B#, a, #E#]
    assert extract_char_ngrams("a", {3}) == ["#B#a#E#"]
    assert extract_char_ngrams("a", {2}) == ["#B#a", "a#E#"]


def test_ngrams_empty_word_raises():
    with pytest.raises(VocabError):
        extract_char_ngrams("", {2})


def test_vocabulary_build_and_lookup():
    vocab = Vocabulary.build([["The", "cat"], ["the", "Dog"]])
    assert vocab.word_to_id[UNK] == 0
    assert vocab.word_id("THE") == vocab.word_id("the")
    assert vocab.word_id("unseen") == vocab.unk_id
    assert vocab.frequency("The") == 2
    assert vocab.n_words == 4  # unk, the, cat, dog
    # n-grams are case-sensitive: "The" and "the" give different grams
    assert vocab.ngram_ids("The") != vocab.ngram_ids("the")


def test_unknown_ngrams_dropped():
    vocab = Vocabulary.build([["ab"]])
    assert vocab.ngram_ids("zz") == []


def test_char_word_embedding_mean_and_zero():
    vocab = Vocabulary.build([["ab"]], ngram_orders=(2,))
    # grams of "ab": #B#a, ab, b#E#
    table = EmbeddingTable(word_vectors=np.zeros((vocab.n_words, 2)),
                           ngram_vectors=np.arange(6.0).reshape(3, 2))
    emb = char_word_embedding("ab", vocab, table)
    assert np.allclose(emb, np.mean(np.arange(6.0).reshape(3, 2), axis=0))
    assert np.allclose(char_word_embedding("qq", vocab, table), 0.0)


def test_word_dropout_probability():
    rng = np.random.default_rng(0)
    alpha, freq = 0.25, 3
    hits = sum(apply_word_dropout(freq, alpha, rng) for _ in range(200000))
    assert abs(hits / 200000 - alpha / (alpha + freq)) < 0.005


def test_word_dropout_needs_frequency():
    with pytest.raises(VocabError):
        apply_word_dropout(0, 0.25, np.random.default_rng(0))


def test_word_representation_width():
    vocab = Vocabulary.build([["ab", "cd"]])
    table = EmbeddingTable(
        word_vectors=np.random.default_rng(0).random((vocab.n_words, 4)),
        ngram_vectors=np.random.default_rng(1).random((vocab.n_ngrams, 4)))
    rep = word_representation("ab", vocab, table)
    assert rep.shape == (8,)
    assert np.allclose(rep[:4], table.word_vectors[vocab.word_id("ab")])


def test_embedding_roundtrip(tmp_path):
    path = tmp_path / "emb.txt"
    tokens = ["alpha", "beta", "#B#ga"]
    vectors = np.random.default_rng(3).standard_normal((3, 5))
    save_embeddings(path, tokens, vectors)
    got_tokens, got_vectors = load_embeddings(path)
    assert got_tokens == tokens
    assert np.array_equal(got_vectors, vectors)  # %.17g is lossless


def test_embedding_errors_name_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 3\na 1.0 2.0 3.0\nb 1.0 2.0\n")
    with pytest.raises(VocabError, match=":3"):
        load_embeddings(path)
    path.write_text("nonsense\n")
    with pytest.raises(VocabError, match=":1"):
        load_embeddings(path)
    path.write_text("1 2\na 1.0 2.0\nextra 1.0 2.0\n")
    with pytest.raises(VocabError, match="more entries"):
        load_embeddings(path)


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet=st.characters(min_codepoint=33, max_codepoint=126),
               min_size=1, max_size=12),
       st.sets(st.integers(1, 4), min_size=1))
def test_ngram_count_property(word, orders):
    grams = extract_char_ngrams(word, orders)
    assert len(grams) == len(set(grams))
    # upper bound: one window per position per order
    bound = sum(len(word) + 3 - n if n > 1 else len(word) for n in orders)
    assert 0 < len(grams) <= bound
