"""Command-line entry point: embedding pre-training, joint training,
evaluation, and prediction.

Configuration can come from a key=value file (--config); explicit flags win
over file values. All subcommands are deterministic given --seed. Exit codes:
0 success, 2 usage error (bad flags, missing files, task/dataset mismatch),
1 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import data as data_io
from . import synthetic
from .data import DataError
from .model import Model, ModelConfig, ModelError, parse_task_set
from .skipgram import SkipgramConfig, SkipgramError, train_skipgram
from .trainer import TrainConfig, TrainError, Trainer, evaluate_model
from .vocab import (MODEL_NGRAM_ORDERS, PRETRAIN_NGRAM_ORDERS, VocabError,
                    Vocabulary, load_embeddings, save_embeddings)

log = logging.getLogger("jmt")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO,
               "debug": logging.DEBUG}


class UsageError(Exception):
    pass


def _check_file(path, what):
    if path is not None and not os.path.isfile(path):
        raise UsageError(f"{what} file not found: {path}")
    return path


def _build_parser():
    subparsers = {}
    top = argparse.ArgumentParser(prog="jmt")
    sub = top.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("pretrain-embeddings",
                         help="train word or char n-gram vectors on a corpus")
    pre.add_argument("--corpus", required=True)
    pre.add_argument("--output", required=True)
    pre.add_argument("--mode", choices=("word", "char_ngram"),
                     default="word")
    pre.add_argument("--dim", type=int, default=100)
    pre.add_argument("--window", type=int, default=1)
    pre.add_argument("--negatives", type=int, default=15)
    pre.add_argument("--subsample", type=float, default=1e-5)
    pre.add_argument("--epochs", type=int, default=1)
    pre.add_argument("--lr", type=float, default=0.05)
    pre.add_argument("--seed", type=int, default=0)
    pre.add_argument("--keep-case", action="store_true",
                     help="word mode: do not lowercase the corpus")

    tr = sub.add_parser("train", help="train a joint model")
    tr.add_argument("--config", help="key=value file; flags override it")
    tr.add_argument("--train-pos")
    tr.add_argument("--train-chunk")
    tr.add_argument("--train-dep")
    tr.add_argument("--train-pairs")
    tr.add_argument("--dev-pos")
    tr.add_argument("--dev-chunk")
    tr.add_argument("--dev-dep")
    tr.add_argument("--dev-pairs")
    tr.add_argument("--word-emb")
    tr.add_argument("--char-emb")
    tr.add_argument("--tasks", default="all",
                    help="'all', letters like 'abc', or comma list of names")
    tr.add_argument("--epochs", type=int, default=100)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--no-shortcut", action="store_true")
    tr.add_argument("--no-label-embeddings", action="store_true")
    tr.add_argument("--no-vertical", action="store_true")
    tr.add_argument("--word-dim", type=int, default=100)
    tr.add_argument("--hidden-dim", type=int, default=100)
    tr.add_argument("--label-dim", type=int, default=100)
    tr.add_argument("--relu-hidden", type=int, default=100)
    tr.add_argument("--maxout-hidden", type=int, default=100)
    tr.add_argument("--select-metric", default=None,
                    help="dev metric for model selection (default: first "
                    "metric of the first dev task)")
    tr.add_argument("--synthetic", action="store_true",
                    help="train on the bundled synthetic corpus")
    tr.add_argument("--model", required=True, help="output archive path")

    for name, task_flag in (("eval", True), ("tag", False), ("parse", False),
                            ("pair", False)):
        p = sub.add_parser(name)
        p.add_argument("--model", required=True)
        p.add_argument("--data", required=True)
        if task_flag:
            p.add_argument("--task", required=True,
                           choices=("pos", "chunk", "dep", "rel", "ent"))
        subparsers[name] = p
    subparsers["pretrain-embeddings"] = pre
    subparsers["train"] = tr
    return top, subparsers


def _apply_config_file(args, parser_defaults):
    """Fill args from the config file for flags left at their defaults."""
    values = {}
    with open(args.config, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(
                    f"{args.config}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    for key, raw in values.items():
        if not hasattr(args, key):
            raise UsageError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key) != parser_defaults.get(key):
            continue  # an explicit flag wins
        default = parser_defaults.get(key)
        if isinstance(default, bool):
            value = raw.lower() in ("1", "true", "yes")
        elif isinstance(default, int):
            value = int(raw)
        elif isinstance(default, float):
            value = float(raw)
        else:
            value = raw
        setattr(args, key, value)
    return args


def _cmd_pretrain(args):
    _check_file(args.corpus, "corpus")
    with open(args.corpus, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if args.mode == "word" and not args.keep_case:
        tokens = [t.lower() for t in tokens]
    config = SkipgramConfig(
        dim=args.dim, window=args.window, negatives=args.negatives,
        subsample=args.subsample, epochs=args.epochs, lr=args.lr,
        mode=args.mode, ngram_orders=PRETRAIN_NGRAM_ORDERS, seed=args.seed)
    entries, vectors = train_skipgram(tokens, config)
    save_embeddings(args.output, entries, vectors)
    log.info("wrote %d vectors of width %d to %s",
             len(entries), args.dim, args.output)
    return 0


_TASK_DATA_FLAG = {"pos": "train_pos", "chunk": "train_chunk",
                   "dep": "train_dep", "rel": "train_pairs",
                   "ent": "train_pairs"}


def _load_datasets(args, prefix):
    """{task: dataset} from the --{prefix}-* flags that were given."""
    out = {}
    pairs = None
    for task, attr in _TASK_DATA_FLAG.items():
        path = getattr(args, attr.replace("train", prefix))
        if path is None:
            continue
        _check_file(path, f"{prefix} {task}")
        if task in ("rel", "ent"):
            if pairs is None:
                pairs = data_io.parse_pair_file(path)
            out[task] = pairs
        else:
            out[task] = data_io.parse_token_file(path)
    return out


def _cmd_train(args):
    if args.synthetic:
        sents = synthetic.sentences()
        pair_data = synthetic.pairs()
        datasets = {"pos": sents, "chunk": sents, "dep": sents,
                    "rel": pair_data, "ent": pair_data}
    else:
        if (args.train_chunk is not None
                and args.train_chunk == args.train_dep):
            log.warning("the same file is used for chunk and dep training; "
                        "evaluation on it may be optimistic")
        datasets = _load_datasets(args, "train")

    try:
        tasks = parse_task_set(args.tasks)
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    for task in tasks:
        if task not in datasets:
            raise UsageError(
                f"task {task!r} is active but --{_TASK_DATA_FLAG[task].replace('_', '-')} was not given")
    datasets = {t: d for t, d in datasets.items() if t in tasks}

    token_sets = [d for t, d in datasets.items()
                  if t in ("pos", "chunk", "dep")]
    all_token_sents = [s for ds in token_sets for s in ds]
    corpora = [s.forms for ds in token_sets for s in ds]
    for t in ("rel", "ent"):
        if t in datasets:
            for p in datasets[t]:
                corpora.append(p.premise)
                corpora.append(p.hypothesis)
            break
    if not corpora:
        raise UsageError("no training data given")
    vocab = Vocabulary.build(corpora, ngram_orders=MODEL_NGRAM_ORDERS)

    pos_labels, chunk_labels, dep_labels = synthetic.collect_labels(
        all_token_sents)
    config = ModelConfig(
        word_dim=args.word_dim, hidden_dim=args.hidden_dim,
        label_dim=args.label_dim, relu_hidden=args.relu_hidden,
        maxout_hidden=args.maxout_hidden, tasks=tasks,
        use_shortcut=not args.no_shortcut,
        use_label_embeddings=not args.no_label_embeddings,
        use_vertical=not args.no_vertical,
        pos_labels=pos_labels, chunk_labels=chunk_labels,
        dep_labels=dep_labels)

    word_init = char_init = None
    if args.word_emb:
        _check_file(args.word_emb, "word embedding")
        word_init = load_embeddings(args.word_emb)
    if args.char_emb:
        _check_file(args.char_emb, "char embedding")
        char_init = load_embeddings(args.char_emb)

    model = Model(config, vocab, seed=args.seed, word_init=word_init,
                  char_init=char_init)
    train_config = TrainConfig(epochs=args.epochs, seed=args.seed)
    trainer = Trainer(model, datasets, train_config)

    dev_datasets = _load_datasets(args, "dev")
    dev_datasets = {t: d for t, d in dev_datasets.items() if t in tasks}
    select_metric = args.select_metric
    if dev_datasets and select_metric is None:
        first = next(iter(dev_datasets))
        sample = evaluate_model(model, dev_datasets[first][:1], first)
        select_metric = next(iter(sample))
    trainer.train(dev_datasets=dev_datasets or None,
                  select_metric=select_metric)
    model.save(args.model)
    log.info("saved model archive to %s", args.model)
    return 0


def _load_eval_data(model, path, task):
    _check_file(path, "data")
    if task in ("rel", "ent"):
        data = data_io.parse_pair_file(path)
    else:
        data = data_io.parse_token_file(path)
    if task not in model.tasks:
        raise UsageError(
            f"task {task!r} is not active in this model "
            f"(active: {', '.join(model.tasks)})")
    return data


def _cmd_eval(args):
    model = Model.load(args.model)
    data = _load_eval_data(model, args.data, args.task)
    report = evaluate_model(model, data, args.task)
    for key, value in report.items():
        print(f"{key}={value:.6g}")
    return 0


def _cmd_tag(args):
    model = Model.load(args.model)
    _check_file(args.data, "data")
    if not any(t in model.tasks for t in ("pos", "chunk")):
        raise UsageError("model has no tagging task active")
    out = []
    for sent in data_io.parse_token_file(args.data):
        pred = model.predict_sentence(sent.forms)
        tokens = [data_io.Token(
            form=form,
            pos=pred.get("pos", [None] * len(sent))[i],
            chunk=pred.get("chunk", [None] * len(sent))[i])
            for i, form in enumerate(sent.forms)]
        out.append(data_io.AnnotatedSentence(tokens))
    _write_tokens_stdout(out)
    return 0


def _cmd_parse(args):
    model = Model.load(args.model)
    _check_file(args.data, "data")
    if "dep" not in model.tasks:
        raise UsageError("model has no dependency task active")
    out = []
    for sent in data_io.parse_token_file(args.data):
        pred = model.predict_sentence(sent.forms)
        result = pred["dep"]
        tokens = [data_io.Token(form=form, head=result.heads[i],
                                deprel=result.labels[i])
                  for i, form in enumerate(sent.forms)]
        out.append(data_io.AnnotatedSentence(tokens))
    _write_tokens_stdout(out)
    return 0


def _write_tokens_stdout(sentences):
    for sent in sentences:
        for tok in sent.tokens:
            cols = [tok.form,
                    tok.pos if tok.pos is not None else data_io.MISSING,
                    tok.chunk if tok.chunk is not None else data_io.MISSING,
                    str(tok.head) if tok.head is not None else data_io.MISSING,
                    tok.deprel if tok.deprel is not None else data_io.MISSING]
            print("\t".join(cols))
        print()


def _cmd_pair(args):
    model = Model.load(args.model)
    _check_file(args.data, "data")
    if not any(t in model.tasks for t in ("rel", "ent")):
        raise UsageError("model has no sentence-pair task active")
    for pair in data_io.parse_pair_file(args.data):
        pred = model.predict_pair(pair.premise, pair.hypothesis)
        score = (f"{pred['score']:.6g}" if "score" in pred
                 else data_io.MISSING)
        label = pred.get("label", data_io.MISSING)
        print("\t".join([pair.pair_id, score, label]))
    return 0


_COMMANDS = {"pretrain-embeddings": _cmd_pretrain, "train": _cmd_train,
             "eval": _cmd_eval, "tag": _cmd_tag, "parse": _cmd_parse,
             "pair": _cmd_pair}


def run(argv=None):
    level = os.environ.get("JMT_LOG_LEVEL", "info").lower()
    if level not in _LOG_LEVELS:
        print(f"jmt: bad JMT_LOG_LEVEL {level!r}, want error/info/debug",
              file=sys.stderr)
        return 2
    logging.basicConfig(level=_LOG_LEVELS[level],
                        format="%(levelname)s %(message)s", force=True)
    parser, subparsers = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "config", None):
            _check_file(args.config, "config")
            defaults = {a.dest: a.default
                        for a in subparsers[args.command]._actions}
            _apply_config_file(args, defaults)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"jmt: {exc}", file=sys.stderr)
        return 2
    except (DataError, ModelError, TrainError, VocabError, SkipgramError,
            OSError) as exc:
        print(f"jmt: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
