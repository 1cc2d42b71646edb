"""The joint many-task model: parameters, wiring, and graph construction.

Five tasks live at successively deeper bi-LSTM layers in the fixed order
pos -> chunk -> dep -> rel -> ent. Any subset can be active; each active
layer consumes the nearest lower active layer. All parameters are named
float64 arrays in a flat registry, grouped by owning task for the L2 and
successive-regularization terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import depparse, encoder, semantic, taggers
from .data import DataError, save_archive, load_archive
from .graph import Graph
from .semantic import ENTAILMENT_CLASSES, RELATEDNESS_BINS
from .vocab import Vocabulary, apply_word_dropout

TASK_ORDER = ("pos", "chunk", "dep", "rel", "ent")
TASK_LETTER = {"a": "pos", "b": "chunk", "c": "dep", "d": "rel", "e": "ent"}
TAGGING_TASKS = ("pos", "chunk")


class ModelError(Exception):
    pass


def parse_task_set(spec):
    """'all', letter string like 'abc'/'de', or comma list of task names."""
    if spec == "all":
        names = set(TASK_ORDER)
    elif all(ch in TASK_LETTER for ch in spec):
        names = {TASK_LETTER[ch] for ch in spec}
    else:
        names = set(spec.split(","))
        unknown = names - set(TASK_ORDER)
        if unknown:
            raise ModelError(f"unknown tasks: {sorted(unknown)}")
    if not names:
        raise ModelError("active task set is empty")
    return tuple(t for t in TASK_ORDER if t in names)


@dataclass
class ModelConfig:
    word_dim: int = 100
    hidden_dim: int = 100
    label_dim: int = 100
    relu_hidden: int = 100
    maxout_hidden: int = 100
    maxout_k: int = 4
    tasks: tuple = TASK_ORDER
    use_shortcut: bool = True
    use_label_embeddings: bool = True
    use_vertical: bool = True
    lowercase_words: bool = True
    word_dropout_alpha: float = 0.25
    dropout_input_lower: float = 0.4   # x_t / label feed, pos..dep layers
    dropout_input_upper: float = 0.2   # x_t / label feed, rel and ent layers
    dropout_vertical: float = 0.2
    dropout_cls: float = 0.2           # pos, chunk, dep, ent classifiers
    dropout_cls_rel: float = 0.4
    pos_labels: tuple = ()
    chunk_labels: tuple = ()
    dep_labels: tuple = ()

    def __post_init__(self):
        self.tasks = tuple(t for t in TASK_ORDER if t in self.tasks)
        if not self.tasks:
            raise ModelError("active task set is empty")

    @property
    def wiring(self):
        return encoder.LayerWiring(self.use_shortcut,
                                   self.use_label_embeddings,
                                   self.use_vertical)


_CONFIG_FIELDS = [  # (name, to-str, from-str)
    ("word_dim", str, int), ("hidden_dim", str, int),
    ("label_dim", str, int), ("relu_hidden", str, int),
    ("maxout_hidden", str, int), ("maxout_k", str, int),
    ("tasks", ",".join, lambda s: tuple(s.split(","))),
    ("use_shortcut", str, lambda s: s == "True"),
    ("use_label_embeddings", str, lambda s: s == "True"),
    ("use_vertical", str, lambda s: s == "True"),
    ("lowercase_words", str, lambda s: s == "True"),
    ("word_dropout_alpha", repr, float),
    ("dropout_input_lower", repr, float), ("dropout_input_upper", repr, float),
    ("dropout_vertical", repr, float), ("dropout_cls", repr, float),
    ("dropout_cls_rel", repr, float),
    ("pos_labels", " ".join, lambda s: tuple(s.split()) if s else ()),
    ("chunk_labels", " ".join, lambda s: tuple(s.split()) if s else ()),
    ("dep_labels", " ".join, lambda s: tuple(s.split()) if s else ()),
]


@dataclass
class ParamInfo:
    shape: tuple
    init: str          # uniform | zero | one | labelemb
    kind: str          # emb | lstm_W | lstm_b | cls_W | cls_b | labelemb
                       # | match_W | root_r
    task: str          # owning task, or "emb"


class Model:
    def __init__(self, config, vocab, seed=0, word_init=None, char_init=None):
        self.config = config
        self.vocab = vocab
        self.spec = {}
        self.params = {}
        self._build_spec()
        self._init_params(np.random.default_rng(seed), word_init, char_init)

    # -- wiring ------------------------------------------------------------
    @property
    def tasks(self):
        return self.config.tasks

    def depth(self, task):
        return self.tasks.index(task) + 1

    def task_labels(self, task):
        return {"pos": self.config.pos_labels,
                "chunk": self.config.chunk_labels,
                "dep": self.config.dep_labels}[task]

    def _layer_widths(self):
        """Composed non-recurrent input width per active layer."""
        cfg = self.config
        x_width = 2 * cfg.word_dim
        widths = []
        tagging_below = 0
        for i, task in enumerate(self.tasks):
            label_width = cfg.label_dim if tagging_below else 0
            widths.append(encoder.compose_width(
                is_lowest=(i == 0), x_width=x_width,
                lower_width=2 * cfg.hidden_dim, label_width=label_width,
                wiring=cfg.wiring))
            if task in TAGGING_TASKS:
                tagging_below += 1
        return widths

    # -- parameter registry --------------------------------------------------
    def _build_spec(self):
        cfg = self.config
        d, h = cfg.word_dim, cfg.hidden_dim
        rh, m, k, dl = (cfg.relu_hidden, cfg.maxout_hidden, cfg.maxout_k,
                        cfg.label_dim)

        def add(name, shape, init, kind, task):
            self.spec[name] = ParamInfo(tuple(shape), init, kind, task)

        add("emb.word", (self.vocab.n_words, d), "uniform", "emb", "emb")
        add("emb.char", (max(self.vocab.n_ngrams, 1), d), "uniform", "emb",
            "emb")
        for layer, (task, gw) in enumerate(zip(self.tasks,
                                               self._layer_widths()), 1):
            for direction in ("f", "b"):
                for gate in encoder.GATES:
                    add(f"lstm{layer}.{direction}.W_{gate}", (h, h + gw),
                        "uniform", "lstm_W", task)
                    add(f"lstm{layer}.{direction}.b_{gate}", (h,),
                        "one" if gate == "f" else "zero", "lstm_b", task)
        for task in TAGGING_TASKS:
            if task not in self.tasks:
                continue
            n_labels = len(self.task_labels(task))
            add(f"{task}.hidden.W", (2 * h, rh), "uniform", "cls_W", task)
            add(f"{task}.hidden.b", (rh,), "zero", "cls_b", task)
            add(f"{task}.out.W", (rh, n_labels), "zero", "cls_W", task)
            add(f"{task}.out.b", (n_labels,), "zero", "cls_b", task)
            add(f"{task}.labelemb", (n_labels, dl), "labelemb", "labelemb",
                task)
        if "dep" in self.tasks:
            n_labels = len(self.config.dep_labels)
            add("dep.Wd", (2 * h, 2 * h), "zero", "match_W", "dep")
            add("dep.r", (2 * h,), "zero", "root_r", "dep")
            add("dep.hidden.W", (4 * h, rh), "uniform", "cls_W", "dep")
            add("dep.hidden.b", (rh,), "zero", "cls_b", "dep")
            add("dep.out.W", (rh, n_labels), "zero", "cls_W", "dep")
            add("dep.out.b", (n_labels,), "zero", "cls_b", "dep")
        if "rel" in self.tasks:
            add("rel.maxout.W", (k * m, 4 * h), "uniform", "cls_W", "rel")
            add("rel.maxout.b", (k * m,), "zero", "cls_b", "rel")
            add("rel.out.W", (RELATEDNESS_BINS, m), "zero", "cls_W", "rel")
            add("rel.out.b", (RELATEDNESS_BINS,), "zero", "cls_b", "rel")
            add("rel.labelemb", (RELATEDNESS_BINS, dl), "labelemb",
                "labelemb", "rel")
        if "ent" in self.tasks:
            in_width = 4 * h + (dl if "rel" in self.tasks else 0)
            add("ent.maxout1.W", (k * m, in_width), "uniform", "cls_W", "ent")
            add("ent.maxout1.b", (k * m,), "zero", "cls_b", "ent")
            for i in (2, 3):
                add(f"ent.maxout{i}.W", (k * m, m), "uniform", "cls_W", "ent")
                add(f"ent.maxout{i}.b", (k * m,), "zero", "cls_b", "ent")
            add("ent.out.W", (len(ENTAILMENT_CLASSES), m), "zero", "cls_W",
                "ent")
            add("ent.out.b", (len(ENTAILMENT_CLASSES),), "zero", "cls_b",
                "ent")

    def _init_params(self, rng, word_init, char_init):
        for name, info in self.spec.items():
            if info.init == "zero":
                value = np.zeros(info.shape)
            elif info.init == "one":
                value = np.ones(info.shape)
            else:
                rows, cols = (info.shape if len(info.shape) == 2
                              else (info.shape[0], 1))
                bound = np.sqrt(6.0 / (rows + cols))
                value = rng.uniform(-bound, bound, info.shape)
            self.params[name] = value
        if word_init is not None:
            self._overlay("emb.word", word_init,
                          lambda w: self.vocab.word_to_id.get(
                              self.vocab.word_key(w)))
        if char_init is not None:
            self._overlay("emb.char", char_init, self.vocab.ngram_to_id.get)

    def _overlay(self, name, pretrained, lookup):
        tokens, vectors = pretrained
        table = self.params[name]
        if vectors.shape[1] != table.shape[1]:
            raise ModelError(
                f"pretrained width {vectors.shape[1]} != {table.shape[1]}")
        for tok, vec in zip(tokens, vectors):
            idx = lookup(tok)
            if idx is not None:
                table[idx] = vec

    # -- regularization groups ----------------------------------------------
    def involved_params(self, task):
        """Names of every parameter the task's forward pass can touch."""
        d = self.depth(task)
        out = []
        for name, info in self.spec.items():
            if info.task == "emb":
                out.append(name)
            elif info.kind == "labelemb":
                if self.depth(info.task) < d:
                    out.append(name)
            elif self.depth(info.task) <= d:
                out.append(name)
        return out

    def l2_terms(self, task, lambda_lstm, lambda_cls):
        """(name, coefficient) pairs for the task's L2 penalty."""
        d = self.depth(task)
        out = []
        for name, info in self.spec.items():
            if info.task == "emb" or self.depth(info.task) > d:
                continue
            if info.kind == "lstm_W":
                out.append((name, lambda_lstm))
            elif info.kind in ("cls_W", "match_W"):
                out.append((name, lambda_cls))
        return out

    def successive_terms(self, task, delta_default, delta_lower_cls):
        """(name, coefficient) pairs for the anchor of `task`.

        The anchor set is the previous active task's parameters (the
        embedding set alone for the first task); classifier parameters of
        the lower-level tasks get the larger coefficient.
        """
        idx = self.tasks.index(task)
        if idx == 0:
            names = [n for n, i in self.spec.items() if i.task == "emb"]
        else:
            names = self.involved_params(self.tasks[idx - 1])
        out = []
        for name in names:
            info = self.spec[name]
            lower_cls = (info.kind in ("cls_W", "cls_b")
                         and info.task != "emb"
                         and self.depth(info.task) < self.depth(task))
            out.append((name, delta_lower_cls if lower_cls else delta_default))
        return out

    # -- graph construction ---------------------------------------------------
    def param_leaves(self, graph):
        return {name: graph.parameter(value, name)
                for name, value in self.params.items()}

    def _word_ids(self, forms, train_mode, rng):
        ids = []
        for form in forms:
            wid = self.vocab.word_id(form)
            if train_mode and rng is not None and wid != self.vocab.unk_id:
                if apply_word_dropout(max(self.vocab.frequency(form), 1),
                                      self.config.word_dropout_alpha, rng):
                    wid = self.vocab.unk_id
            ids.append(wid)
        return ids

    def _word_matrix(self, graph, leaves, forms, train_mode, rng):
        """[L, 2d] node: word vectors next to averaged char n-gram vectors."""
        ids = self._word_ids(forms, train_mode, rng)
        word_part = graph.slice(leaves["emb.word"], rows=ids)
        char_rows = []
        for form in forms:
            gids = self.vocab.ngram_ids(form)
            if gids:
                gathered = graph.slice(leaves["emb.char"], rows=gids)
                mean = graph.scalar_scale(
                    graph.matmul(graph.constant(np.ones((1, len(gids)))),
                                 gathered),
                    factor=1.0 / len(gids))
                char_rows.append(mean)
            else:
                char_rows.append(
                    graph.constant(np.zeros((1, self.config.word_dim))))
        char_part = (char_rows[0] if len(char_rows) == 1
                     else graph.concat(*char_rows, axis=0))
        return graph.concat(word_part, char_part, axis=1)

    def _seed(self, rng):
        return int(rng.integers(2 ** 62)) if rng is not None else 0

    def encode_sentence(self, graph, leaves, forms, max_depth, train_mode,
                        rng):
        """Run layers 1..max_depth; returns {"h": [nodes], "prob": {task}}."""
        cfg = self.config
        x = self._word_matrix(graph, leaves, forms, train_mode, rng)
        h_nodes = []
        probs = {}
        label_feeds = []  # weighted label embedding nodes of lower taggers
        for i, task in enumerate(self.tasks[:max_depth]):
            layer = i + 1
            in_rate = (cfg.dropout_input_lower if task in
                       ("pos", "chunk", "dep") else cfg.dropout_input_upper)
            x_in = x
            feed = None
            if label_feeds:
                feed = label_feeds[0]
                for extra in label_feeds[1:]:
                    feed = graph.add(feed, extra)
            if train_mode:
                if in_rate > 0.0:
                    x_in = graph.dropout(x, rate=in_rate,
                                         seed=self._seed(rng))
                    if feed is not None:
                        feed = graph.dropout(feed, rate=in_rate,
                                             seed=self._seed(rng))
            lower = h_nodes[-1] if h_nodes else None
            if (lower is not None and train_mode
                    and cfg.dropout_vertical > 0.0):
                lower = graph.dropout(lower, rate=cfg.dropout_vertical,
                                      seed=self._seed(rng))
            g_node = encoder.compose_input(
                graph, is_lowest=(i == 0), x=x_in, lower_h=lower,
                label_feed=feed, wiring=cfg.wiring)
            h = encoder.bilstm_nodes(
                graph, g_node,
                {f"{w}_{g}": leaves[f"lstm{layer}.f.{w}_{g}"]
                 for w in ("W", "b") for g in encoder.GATES},
                {f"{w}_{g}": leaves[f"lstm{layer}.b.{w}_{g}"]
                 for w in ("W", "b") for g in encoder.GATES})
            h_nodes.append(h)
            if task in TAGGING_TASKS:
                prob = taggers.classifier_nodes(
                    graph, h, leaves, task,
                    dropout_rate=cfg.dropout_cls if train_mode else 0.0,
                    dropout_seed=self._seed(rng))
                probs[task] = prob
                label_feeds.append(
                    graph.matmul(prob, leaves[f"{task}.labelemb"]))
        return {"h": h_nodes, "prob": probs}

    def dep_nodes(self, graph, leaves, h3, gold_heads=None, train_mode=False,
                  rng=None):
        """Head distribution and, when gold heads are given, label probs."""
        L = h3.shape[0]
        if train_mode and self.config.dropout_cls > 0.0:
            h3 = graph.dropout(h3, rate=self.config.dropout_cls,
                               seed=self._seed(rng))
        aug = graph.concat(h3, leaves["dep.r"], axis=0)
        scores = graph.add(
            graph.matmul(graph.matmul(h3, leaves["dep.Wd"]), aug,
                         transpose_b=True),
            graph.constant(depparse.self_mask_constant(L)))
        head_prob = graph.softmax(scores)
        label_prob = None
        if gold_heads is not None:
            rows = [L if h == depparse.ROOT else h - 1 for h in gold_heads]
            feats = graph.concat(h3, graph.slice(aug, rows=rows), axis=1)
            label_prob = taggers.classifier_nodes(graph, feats, leaves, "dep")
        return head_prob, label_prob, aug

    def pair_nodes(self, graph, leaves, premise, hypothesis, task, train_mode,
                   rng):
        """Relatedness (and for task='ent' entailment) prob nodes of a pair."""
        cfg = self.config
        depth = self.depth(task)
        enc_p = self.encode_sentence(graph, leaves, premise, depth,
                                     train_mode, rng)
        enc_h = self.encode_sentence(graph, leaves, hypothesis, depth,
                                     train_mode, rng)
        out = {}
        if "rel" in self.tasks:
            lr = self.depth("rel") - 1
            pool_p = graph.row_max_pool(enc_p["h"][lr])
            pool_h = graph.row_max_pool(enc_h["h"][lr])
            d1 = semantic.pair_feature_nodes(graph, pool_p, pool_h,
                                             signed=False)
            out["rel"] = semantic.relatedness_nodes(
                graph, d1, leaves, cfg.maxout_k,
                dropout_rate=cfg.dropout_cls_rel if train_mode else 0.0,
                dropout_seed=self._seed(rng))
        if task == "ent":
            le = self.depth("ent") - 1
            pool_p = graph.row_max_pool(enc_p["h"][le])
            pool_h = graph.row_max_pool(enc_h["h"][le])
            d2 = semantic.pair_feature_nodes(graph, pool_p, pool_h,
                                             signed=True)
            out["ent"] = self._entailment_head(
                graph, leaves, d2, out.get("rel"), train_mode, rng)
        return out

    def _entailment_head(self, graph, leaves, d2, rel_prob, train_mode, rng):
        cfg = self.config
        rate = cfg.dropout_cls if train_mode else 0.0
        if rel_prob is not None:
            return semantic.entailment_nodes(
                graph, d2, rel_prob, leaves, cfg.maxout_k,
                dropout_rate=rate, dropout_seed=self._seed(rng))
        # no relatedness layer: classify from d2 alone
        if rate > 0.0:
            d2 = graph.dropout(d2, rate=rate, seed=self._seed(rng))
        x = d2
        for i in (1, 2, 3):
            x = semantic.maxout_layer_nodes(graph, x, leaves,
                                            f"ent.maxout{i}", cfg.maxout_k)
        logits = graph.add(graph.matmul(leaves["ent.out.W"], x),
                           leaves["ent.out.b"])
        return graph.softmax(logits)

    # -- task losses -----------------------------------------------------------
    def build_task_loss(self, graph, task, batch, snapshots=None,
                        train_mode=True, rng=None, lambda_lstm=1e-6,
                        lambda_cls=1e-5, delta_default=1e-3,
                        delta_lower_cls=1e-2, leaves=None):
        """Data term + L2 + successive penalty as a scalar loss node."""
        if leaves is None:
            leaves = self.param_leaves(graph)
        terms = []
        if task in TAGGING_TASKS:
            label_index = {lab: i for i, lab in
                           enumerate(self.task_labels(task))}
            for sent in batch:
                enc = self.encode_sentence(graph, leaves, sent.forms,
                                           self.depth(task), train_mode, rng)
                gold = [label_index[getattr(tok, task)]
                        for tok in sent.tokens]
                terms.append(graph.cross_entropy(enc["prob"][task],
                                                 targets=gold))
        elif task == "dep":
            label_index = {lab: i for i, lab in
                           enumerate(self.config.dep_labels)}
            for sent in batch:
                enc = self.encode_sentence(graph, leaves, sent.forms,
                                           self.depth("dep"), train_mode, rng)
                heads = [tok.head for tok in sent.tokens]
                L = len(sent.tokens)
                head_targets = [L if h == depparse.ROOT else h - 1
                                for h in heads]
                head_prob, label_prob, _ = self.dep_nodes(
                    graph, leaves, enc["h"][self.depth("dep") - 1],
                    gold_heads=heads, train_mode=train_mode, rng=rng)
                terms.append(graph.cross_entropy(head_prob,
                                                 targets=head_targets))
                terms.append(graph.cross_entropy(
                    label_prob,
                    targets=[label_index[tok.deprel] for tok in sent.tokens]))
        elif task == "rel":
            for pair in batch:
                out = self.pair_nodes(graph, leaves, pair.premise,
                                      pair.hypothesis, "rel", train_mode, rng)
                target = semantic.gold_score_distribution(pair.relatedness)
                terms.append(graph.kl_divergence(out["rel"], target=target))
        elif task == "ent":
            class_index = {c: i for i, c in enumerate(ENTAILMENT_CLASSES)}
            for pair in batch:
                out = self.pair_nodes(graph, leaves, pair.premise,
                                      pair.hypothesis, "ent", train_mode, rng)
                terms.append(graph.cross_entropy(
                    out["ent"], targets=class_index[pair.entailment]))
        else:
            raise ModelError(f"unknown task {task!r}")
        for name, coeff in self.l2_terms(task, lambda_lstm, lambda_cls):
            terms.append(graph.scalar_scale(graph.sum_squares(leaves[name]),
                                            factor=coeff))
        if snapshots is not None:
            anchor = snapshots.get(task)
            if anchor is None:
                raise ModelError(f"missing snapshot for task {task!r}")
            for name, delta in self.successive_terms(task, delta_default,
                                                     delta_lower_cls):
                diff = graph.subtract(leaves[name],
                                      graph.constant(anchor[name]))
                terms.append(graph.scalar_scale(graph.sum_squares(diff),
                                                factor=delta))
        loss = terms[0]
        for term in terms[1:]:
            loss = graph.add(loss, term)
        return loss, leaves

    # -- inference ---------------------------------------------------------------
    def predict_sentence(self, forms):
        """Tags, chunk tags, and a well-formed parse for the active tasks."""
        graph = Graph(train_mode=False)
        leaves = self.param_leaves(graph)
        enc = self.encode_sentence(graph, leaves, forms, len(self.tasks),
                                   False, None)
        want_dep = "dep" in self.tasks
        if want_dep:
            h3_node = enc["h"][self.depth("dep") - 1]
            head_prob, _, aug = self.dep_nodes(graph, leaves, h3_node)
        graph.forward()
        out = {}
        for task in TAGGING_TASKS:
            if task in enc["prob"]:
                labels = self.task_labels(task)
                out[task] = [labels[int(np.argmax(row))]
                             for row in enc["prob"][task].value]
        if want_dep:
            aug_val = aug.value
            h3 = h3_node.value
            L = len(forms)
            labels = self.config.dep_labels

            def label_fn(heads):
                rows = [L if h == depparse.ROOT else h - 1 for h in heads]
                feats = np.hstack([h3, aug_val[rows]])
                probs = taggers.classify_tokens(feats, self.params, "dep")
                return [labels[int(np.argmax(row))] for row in probs]

            out["dep"] = depparse.parse_sentence(head_prob.value, label_fn)
        return out

    def predict_pair(self, premise, hypothesis):
        graph = Graph(train_mode=False)
        leaves = self.param_leaves(graph)
        top = "ent" if "ent" in self.tasks else "rel"
        nodes = self.pair_nodes(graph, leaves, premise, hypothesis, top,
                                False, None)
        graph.forward()
        out = {}
        if "rel" in nodes:
            probs = nodes["rel"].value
            out["rel_probs"] = probs
            out["score"] = semantic.expected_score(probs)
        if "ent" in nodes:
            probs = nodes["ent"].value
            out["ent_probs"] = probs
            out["label"] = ENTAILMENT_CLASSES[int(np.argmax(probs))]
        return out

    # -- persistence ----------------------------------------------------------
    def save(self, path):
        items = []
        for name, to_str, _ in _CONFIG_FIELDS:
            items.append((name, to_str(getattr(self.config, name))))
        words = sorted(self.vocab.word_to_id, key=self.vocab.word_to_id.get)
        ngrams = sorted(self.vocab.ngram_to_id,
                        key=self.vocab.ngram_to_id.get)
        items.append(("vocab.words", " ".join(words[1:])))  # UNK implicit
        items.append(("vocab.ngrams", " ".join(ngrams)))
        items.append(("vocab.freqs", " ".join(
            str(self.vocab.word_freq.get(w, 0)) for w in words[1:])))
        items.append(("vocab.ngram_orders", " ".join(
            str(n) for n in self.vocab.ngram_orders)))
        save_archive(path, items, self.params)

    @classmethod
    def load(cls, path):
        raw, tensors = load_archive(path)
        kwargs = {}
        for name, _, from_str in _CONFIG_FIELDS:
            if name not in raw:
                raise DataError(f"{path}: archive missing config key {name}")
            kwargs[name] = from_str(raw[name])
        config = ModelConfig(**kwargs)
        words = raw["vocab.words"].split()
        freqs = [int(x) for x in raw["vocab.freqs"].split()]
        vocab = Vocabulary(
            word_to_id={w: i for i, w in enumerate(words)},
            ngram_to_id={g: i for i, g in
                         enumerate(raw["vocab.ngrams"].split())},
            word_freq=dict(zip(words, freqs)),
            ngram_orders=tuple(int(n) for n in
                               raw["vocab.ngram_orders"].split()),
            lowercase_words=config.lowercase_words)
        model = cls(config, vocab, seed=0)
        missing = sorted(set(model.spec) - set(tensors))
        if missing:
            raise DataError(f"{path}: archive missing tensors: {missing}")
        for name, info in model.spec.items():
            arr = tensors[name]
            if arr.shape != info.shape:
                raise DataError(
                    f"{path}: tensor {name} has shape {arr.shape}, "
                    f"expected {info.shape}")
            model.params[name] = arr
        return model
