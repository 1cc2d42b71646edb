"""Joint training loop: per-task objectives, clipping, schedule, snapshots.

Each epoch visits every active task in order (pos, chunk, dep, rel, ent),
runs mini-batch SGD on that task's full dataset, then snapshots the task's
parameters so the next task's successive-regularization term can anchor to
them. The first task anchors to the embedding parameters captured after the
final task of the previous epoch (the initial values at epoch 1).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import data as data_io

log = logging.getLogger("jmt")

TASK_DEPTH = {"pos": 1, "chunk": 2, "dep": 3, "rel": 4, "ent": 5}


class TrainError(Exception):
    pass


@dataclass
class TrainConfig:
    lambda_lstm: float = 1e-6
    lambda_cls: float = 1e-5
    delta_default: float = 1e-3
    delta_lower_cls: float = 1e-2
    epsilon: float = 1.0
    rho: float = 0.3
    batch_sizes: dict = field(default_factory=lambda: {
        "pos": 25, "chunk": 25, "dep": 15, "rel": 25, "ent": 25})
    epochs: int = 100
    seed: int = 0
    shuffle_tasks: bool = False  # task-order ablation


def clip_threshold(depth):
    """Growing per-task clipping value min(3.0, depth)."""
    return min(3.0, float(depth))


def learning_rate(epoch, epsilon=1.0, rho=0.3):
    """epsilon / (1 + rho * (k - 1)), shared by all tasks within an epoch."""
    if epoch < 1:
        raise TrainError("epochs are 1-based")
    return epsilon / (1.0 + rho * (epoch - 1))


def clip_gradients(grads, threshold):
    """Rescale the concatenated gradient to the threshold L2 norm; in place."""
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    norm = np.sqrt(total)
    if norm > threshold and norm > 0.0:
        scale = threshold / norm
        for g in grads.values():
            g *= scale
    return norm


class Trainer:
    def __init__(self, model, datasets, config=None):
        self.model = model
        self.datasets = datasets
        self.config = config or TrainConfig()
        self.rng = np.random.default_rng(self.config.seed)
        # anchors keyed by the consuming task, seeded from the initial params
        self.snapshots = {}
        for task in model.tasks:
            self._capture_snapshot(task)

    def _capture_snapshot(self, consumer):
        names = [name for name, _ in self.model.successive_terms(
            consumer, 0.0, 0.0)]
        self.snapshots[consumer] = {
            name: self.model.params[name].copy() for name in names}

    def _next_task(self, task):
        idx = self.model.tasks.index(task)
        return self.model.tasks[(idx + 1) % len(self.model.tasks)]

    def task_objective(self, task, batch, train_mode=True, rng=None):
        """Graph and scalar loss node for one mini-batch of one task."""
        from .graph import Graph
        cfg = self.config
        graph = Graph(train_mode=train_mode)
        loss, leaves = self.model.build_task_loss(
            graph, task, batch, snapshots=self.snapshots,
            train_mode=train_mode, rng=rng,
            lambda_lstm=cfg.lambda_lstm, lambda_cls=cfg.lambda_cls,
            delta_default=cfg.delta_default,
            delta_lower_cls=cfg.delta_lower_cls)
        return graph, loss, leaves

    def train_task(self, task, epoch, lr):
        data = self.datasets.get(task)
        if not data:
            raise TrainError(f"no training data for active task {task!r}")
        start = time.monotonic()
        order = self.rng.permutation(len(data))
        batch_size = self.config.batch_sizes.get(task, 25)
        threshold = clip_threshold(self.model.depth(task))
        total_loss = 0.0
        for lo in range(0, len(data), batch_size):
            batch = [data[i] for i in order[lo:lo + batch_size]]
            graph, loss, leaves = self.task_objective(task, batch,
                                                      rng=self.rng)
            graph.forward()
            graph.backward(loss)
            grads = {name: node.grad for name, node in leaves.items()
                     if node.grad is not None}
            clip_gradients(grads, threshold)
            for name, g in grads.items():
                self.model.params[name] -= lr * g
            total_loss += float(loss.value)
        mean_loss = total_loss / len(data)
        log.info("epoch=%d task=%s loss=%.6f lr=%.6f clip=%.1f time=%.2f",
                 epoch, task, mean_loss, lr, threshold,
                 time.monotonic() - start)
        return mean_loss

    def train_epoch(self, epoch):
        """One pass over every active task; returns {task: mean loss}."""
        lr = learning_rate(epoch, self.config.epsilon, self.config.rho)
        order = list(self.model.tasks)
        if self.config.shuffle_tasks:
            order = [order[i] for i in self.rng.permutation(len(order))]
        losses = {}
        for task in order:
            losses[task] = self.train_task(task, epoch, lr)
            self._capture_snapshot(self._next_task(task))
        return losses

    def train(self, epochs=None, dev_datasets=None, select_metric="uas"):
        """Full run; with dev data, keeps the params of the best dev epoch."""
        epochs = epochs if epochs is not None else self.config.epochs
        history = []
        best = None
        best_params = None
        for epoch in range(1, epochs + 1):
            history.append(self.train_epoch(epoch))
            if dev_datasets:
                score = self._dev_score(dev_datasets, select_metric)
                log.info("epoch=%d dev_%s=%.6f", epoch, select_metric, score)
                if best is None or score > best:
                    best = score
                    best_params = {k: v.copy()
                                   for k, v in self.model.params.items()}
        if best_params is not None:
            self.model.params.update(best_params)
        return history

    def _dev_score(self, dev_datasets, metric):
        for task, dataset in dev_datasets.items():
            report = evaluate_model(self.model, dataset, task)
            if metric in report:
                return report[metric]
        raise TrainError(f"metric {metric!r} not produced by any dev task")


# -- evaluation glue ----------------------------------------------------------

def predictions_for(model, dataset, task):
    if task in ("pos", "chunk"):
        return [model.predict_sentence(s.forms)[task] for s in dataset]
    if task == "dep":
        return [model.predict_sentence(s.forms)["dep"] for s in dataset]
    if task == "rel":
        return [model.predict_pair(p.premise, p.hypothesis)["score"]
                for p in dataset]
    if task == "ent":
        return [model.predict_pair(p.premise, p.hypothesis)["label"]
                for p in dataset]
    raise TrainError(f"unknown task {task!r}")


def evaluate_model(model, dataset, task):
    return data_io.evaluate(dataset, predictions_for(model, dataset, task),
                            task)
