"""Dataset parsing, metric aggregation, and the binary model archive."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import depparse, semantic, taggers

ARCHIVE_MAGIC = b"JMT1"
ARCHIVE_VERSION = 1

MISSING = "_"


class DataError(Exception):
    pass


@dataclass
class Token:
    form: str
    pos: str | None = None
    chunk: str | None = None
    head: int | None = None  # 1-based, 0 = ROOT
    deprel: str | None = None


@dataclass
class AnnotatedSentence:
    tokens: list

    def __len__(self):
        return len(self.tokens)

    @property
    def forms(self):
        return [t.form for t in self.tokens]


@dataclass
class SentencePair:
    pair_id: str
    premise: list
    hypothesis: list
    relatedness: float | None = None
    entailment: str | None = None


# -- token TSV ---------------------------------------------------------------
# FORM  POS  CHUNK  HEAD  DEPREL, "_" for absent columns, blank line between
# sentences.

def parse_token_file(path):
    sentences = []
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if tokens:
                    sentences.append(_finish_sentence(tokens, path, lineno))
                    tokens = []
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise DataError(
                    f"{path}:{lineno}: expected 5 columns, got {len(cols)}")
            form, pos, chunk, head, deprel = cols
            if head != MISSING:
                try:
                    head = int(head)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: non-integer HEAD {cols[3]!r}"
                    ) from None
            tokens.append((lineno, Token(
                form=form,
                pos=None if pos == MISSING else pos,
                chunk=None if chunk == MISSING else chunk,
                head=None if head == MISSING else head,
                deprel=None if deprel == MISSING else deprel)))
    if tokens:
        sentences.append(_finish_sentence(tokens, path, lineno))
    return sentences


def _finish_sentence(rows, path, lineno):
    length = len(rows)
    for row_line, tok in rows:
        if tok.head is not None and not 0 <= tok.head <= length:
            raise DataError(
                f"{path}:{row_line}: HEAD {tok.head} out of range "
                f"for a {length}-token sentence")
    return AnnotatedSentence(tokens=[tok for _, tok in rows])


def write_token_file(path, sentences):
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            for tok in sent.tokens:
                cols = [tok.form,
                        tok.pos if tok.pos is not None else MISSING,
                        tok.chunk if tok.chunk is not None else MISSING,
                        str(tok.head) if tok.head is not None else MISSING,
                        tok.deprel if tok.deprel is not None else MISSING]
                fh.write("\t".join(cols) + "\n")
            fh.write("\n")


# -- pair TSV ----------------------------------------------------------------
# id  premise-text  hypothesis-text  score|_  label|_

def parse_pair_file(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise DataError(
                    f"{path}:{lineno}: expected 5 columns, got {len(cols)}")
            pid, premise, hypothesis, score, label = cols
            rel = None
            if score != MISSING:
                try:
                    rel = float(score)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: bad score {score!r}") from None
                if not 1.0 <= rel <= 5.0:
                    raise DataError(
                        f"{path}:{lineno}: score {rel} outside [1, 5]")
            ent = None
            if label != MISSING:
                if label not in semantic.ENTAILMENT_CLASSES:
                    raise DataError(
                        f"{path}:{lineno}: unknown entailment label "
                        f"{label!r}")
                ent = label
            if rel is None and ent is None:
                raise DataError(
                    f"{path}:{lineno}: pair needs a score or a label")
            pairs.append(SentencePair(pair_id=pid, premise=premise.split(),
                                      hypothesis=hypothesis.split(),
                                      relatedness=rel, entailment=ent))
    return pairs


def write_pair_file(path, pairs):
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            score = f"{p.relatedness:g}" if p.relatedness is not None \
                else MISSING
            label = p.entailment if p.entailment is not None else MISSING
            fh.write("\t".join([p.pair_id, " ".join(p.premise),
                                " ".join(p.hypothesis), score, label]) + "\n")


# -- evaluation --------------------------------------------------------------

def evaluate(dataset, predictions, task):
    """Aggregate metrics for one task; returns a {name: value} report."""
    if len(dataset) != len(predictions):
        raise DataError(
            f"evaluate: {len(dataset)} gold items vs "
            f"{len(predictions)} predictions")
    if task == "pos":
        hits = total = 0
        for sent, pred in zip(dataset, predictions):
            _check_len(sent, pred)
            for tok, tag in zip(sent.tokens, pred):
                total += 1
                hits += tok.pos == tag
        return {"pos_accuracy": hits / total}
    if task == "chunk":
        hits = total = 0
        gold_spans, pred_spans = [], []
        for sent, pred in zip(dataset, predictions):
            _check_len(sent, pred)
            gold_tags = [t.chunk for t in sent.tokens]
            for g, p in zip(gold_tags, pred):
                total += 1
                hits += g == p
            gold_spans.append(taggers.tags_to_spans(gold_tags))
            pred_spans.append(taggers.tags_to_spans(pred))
        precision, recall, f1 = taggers.chunk_f1(gold_spans, pred_spans)
        return {"chunk_accuracy": hits / total, "chunk_precision": precision,
                "chunk_recall": recall, "chunk_f1": f1}
    if task == "dep":
        gold_heads, gold_labels, pred_heads, pred_labels, gold_pos = \
            [], [], [], [], []
        for sent, result in zip(dataset, predictions):
            _check_len(sent, result.heads)
            gold_heads.extend(t.head for t in sent.tokens)
            gold_labels.extend(t.deprel for t in sent.tokens)
            gold_pos.extend(t.pos for t in sent.tokens)
            pred_heads.extend(result.heads)
            pred_labels.extend(result.labels)
        uas, las = depparse.attachment_scores(
            gold_heads, gold_labels, pred_heads, pred_labels, gold_pos)
        return {"uas": uas, "las": las}
    if task == "rel":
        errors = [(pair.relatedness - score) ** 2
                  for pair, score in zip(dataset, predictions)
                  if pair.relatedness is not None]
        if not errors:
            raise DataError("no pairs with relatedness scores")
        return {"relatedness_mse": float(np.mean(errors))}
    if task == "ent":
        scored = [(pair.entailment == label)
                  for pair, label in zip(dataset, predictions)
                  if pair.entailment is not None]
        if not scored:
            raise DataError("no pairs with entailment labels")
        return {"entailment_accuracy": float(np.mean(scored))}
    raise DataError(f"unknown task {task!r}")


def _check_len(sent, pred):
    if len(sent.tokens) != len(pred):
        raise DataError("evaluate: sentence/prediction length mismatch")


# -- binary model archive ----------------------------------------------------
# magic "JMT1", version u32 LE, length-prefixed UTF-8 key=value config block,
# then per tensor: length-prefixed name, rank u32, dims u32*, float64 LE data.

def save_archive(path, config_items, tensors):
    """config_items: ordered (key, value-str) pairs; tensors: ordered dict."""
    with open(path, "wb") as fh:
        fh.write(ARCHIVE_MAGIC)
        fh.write(struct.pack("<I", ARCHIVE_VERSION))
        block = "\n".join(f"{k}={v}" for k, v in config_items).encode("utf-8")
        fh.write(struct.pack("<I", len(block)))
        fh.write(block)
        for name, arr in tensors.items():
            # note: ascontiguousarray would promote 0-d arrays to 1-d
            arr = np.asarray(arr, dtype="<f8", order="C")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def load_archive(path):
    """Returns (config key->str dict, name->ndarray dict)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != ARCHIVE_MAGIC:
        raise DataError(f"{path}: bad magic, not a model archive")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != ARCHIVE_VERSION:
        raise DataError(f"{path}: unsupported archive version {version}")
    off = 8
    (block_len,) = struct.unpack_from("<I", blob, off)
    off += 4
    block = blob[off:off + block_len].decode("utf-8")
    off += block_len
    config = {}
    for line in block.splitlines():
        key, _, value = line.partition("=")
        config[key] = value
    tensors = {}
    while off < len(blob):
        name = "?"
        try:
            (name_len,) = struct.unpack_from("<I", blob, off)
            off += 4
            name = blob[off:off + name_len].decode("utf-8")
            off += name_len
            (rank,) = struct.unpack_from("<I", blob, off)
            off += 4
            dims = struct.unpack_from(f"<{rank}I", blob, off)
            off += 4 * rank
            count = int(np.prod(dims)) if rank else 1
            data = np.frombuffer(blob, dtype="<f8", count=count, offset=off)
            off += 8 * count
        except (struct.error, ValueError):
            raise DataError(
                f"{path}: truncated archive while reading tensor "
                f"{name!r}") from None
        tensors[name] = data.reshape(dims).copy()
    return config, tensors
