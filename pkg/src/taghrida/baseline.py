"""Hashed-feature multinomial logistic regression.

A vocabulary-free text classifier sized for a laptop: character n-grams
and word unigrams are hashed into a fixed-width signed count vector, and
a dense weight matrix over that space is trained with minibatch
cross-entropy and Adam-style adaptive updates. Training is fully
deterministic under a fixed seed, and models serialize to a versioned
JSON container with bit-exact weights.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .metrics import EvalReport, confusion_matrix, evaluation_report

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureConfig:
    """Feature extraction parameters.

    Character n-grams in `char_ngram_range` (inclusive) are counted over
    the raw string, word unigrams over whitespace tokens; every feature
    is hashed into [0, hash_dim) with a seeded signed hash.
    """

    char_ngram_range: tuple[int, int] = (2, 5)
    include_word_unigrams: bool = True
    hash_dim: int = 2**18
    hash_seed: int = 0

    def __post_init__(self):
        lo, hi = self.char_ngram_range
        if not 1 <= lo <= hi <= 8:
            raise ValueError(f"char_ngram_range must satisfy 1 <= lo <= hi <= 8, got {lo, hi}")
        if self.hash_dim < 2**10 or self.hash_dim & (self.hash_dim - 1):
            raise ValueError(f"hash_dim must be a power of two >= 1024, got {self.hash_dim}")


@dataclass(frozen=True)
class HyperParams:
    """Training hyperparameters.

    `adam_epsilon`, `batch_size`, `max_seq_len` and `epochs` keep the
    conventional fine-tuning defaults (1e-8, 40, 256 characters, 10);
    the learning rate defaults to 0.05, which suits sparse hashed count
    features (transformer-scale rates in the 1e-5 range are far too
    small for this model family).
    """

    learning_rate: float = 0.05
    adam_epsilon: float = 1e-8
    batch_size: int = 40
    max_seq_len: int = 256
    epochs: int = 10
    l2_lambda: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        for name in ("learning_rate", "adam_epsilon", "batch_size", "max_seq_len", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class BaselineModel:
    """Trained classifier: dense weights over the hashed feature space."""

    labels: tuple[str, ...]
    weights: np.ndarray  # (n_labels, hash_dim)
    bias: np.ndarray  # (n_labels,)
    feature_config: FeatureConfig
    max_seq_len: int
    seed: int
    final_loss: float = float("nan")
    loss_history: tuple[float, ...] = ()  # mean loss per epoch

    def __post_init__(self):
        if not np.isfinite(self.weights).all() or not np.isfinite(self.bias).all():
            raise ValueError("model parameters must be finite")


def _hash_feature(feature: str, seed: int) -> tuple[int, int]:
    """Deterministic (bucket, sign) for one feature string."""
    digest = hashlib.blake2b(
        feature.encode("utf-8"), digest_size=9, key=seed.to_bytes(8, "little")
    ).digest()
    bucket = int.from_bytes(digest[:8], "little")
    sign = 1 if digest[8] & 1 else -1
    return bucket, sign


def featurize(text: str, cfg: FeatureConfig) -> dict[int, float]:
    """Signed hashed count vector for one text, as {bucket: value}."""
    mask = cfg.hash_dim - 1
    vec: dict[int, float] = {}
    lo, hi = cfg.char_ngram_range
    for n in range(lo, hi + 1):
        for i in range(len(text) - n + 1):
            bucket, sign = _hash_feature(f"c{n}:{text[i : i + n]}", cfg.hash_seed)
            idx = bucket & mask
            vec[idx] = vec.get(idx, 0.0) + sign
    if cfg.include_word_unigrams:
        for word in text.split():
            bucket, sign = _hash_feature(f"w:{word}", cfg.hash_seed)
            idx = bucket & mask
            vec[idx] = vec.get(idx, 0.0) + sign
    return {idx: value for idx, value in vec.items() if value != 0.0}


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _logits(weights: np.ndarray, bias: np.ndarray, features: Mapping[int, float]) -> np.ndarray:
    z = bias.copy()
    if features:
        idxs = np.fromiter(features.keys(), dtype=np.int64, count=len(features))
        vals = np.fromiter(features.values(), dtype=np.float64, count=len(features))
        z += weights[:, idxs] @ vals
    return z


def loss_and_gradient(
    model: BaselineModel,
    batch: Sequence[tuple[Mapping[int, float], str]],
    l2_lambda: float = 0.0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy over a (features, label) batch plus an
    L2 penalty of l2_lambda * ||W||^2 / 2, with its exact gradient.

    Returns (loss, grad_weights, grad_bias); the gradients match the
    parameter shapes. The bias column is not regularized.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    label_index = {label: i for i, label in enumerate(model.labels)}
    grad_w = np.zeros_like(model.weights)
    grad_b = np.zeros_like(model.bias)
    loss = 0.0
    inv_n = 1.0 / len(batch)
    for features, label in batch:
        if label not in label_index:
            raise ValueError(f"label {label!r} not in model labels {model.labels}")
        probs = _softmax(_logits(model.weights, model.bias, features))
        loss -= np.log(max(probs[label_index[label]], 1e-300)) * inv_n
        err = probs.copy()
        err[label_index[label]] -= 1.0
        err *= inv_n
        grad_b += err
        if features:
            idxs = np.fromiter(features.keys(), dtype=np.int64, count=len(features))
            vals = np.fromiter(features.values(), dtype=np.float64, count=len(features))
            np.add.at(grad_w, (slice(None), idxs), err[:, None] * vals[None, :])
    if l2_lambda:
        loss += 0.5 * l2_lambda * float((model.weights**2).sum())
        grad_w += l2_lambda * model.weights
    return float(loss), grad_w, grad_b


def train(
    train_set: Sequence[tuple[str, str]],
    hyper: HyperParams | None = None,
    cfg: FeatureConfig | None = None,
) -> BaselineModel:
    """Train on (text, label) pairs with shuffled minibatch Adam updates.

    Texts are truncated to `max_seq_len` characters before featurization.
    The label order is the sorted set of training labels. Identical
    (data, hyper, cfg) always produce bit-identical models.
    """
    hyper = hyper or HyperParams()
    cfg = cfg or FeatureConfig()
    if not train_set:
        raise ValueError("training set must be non-empty")
    labels = tuple(sorted({label for _, label in train_set}))
    if len(labels) < 2:
        raise ValueError(f"need at least 2 distinct labels, got {labels}")

    examples = [
        (featurize(text[: hyper.max_seq_len], cfg), label) for text, label in train_set
    ]
    n_classes = len(labels)
    weights = np.zeros((n_classes, cfg.hash_dim), dtype=np.float64)
    bias = np.zeros(n_classes, dtype=np.float64)
    m_w = np.zeros_like(weights)
    v_w = np.zeros_like(weights)
    m_b = np.zeros_like(bias)
    v_b = np.zeros_like(bias)

    model = BaselineModel(
        labels=labels,
        weights=weights,
        bias=bias,
        feature_config=cfg,
        max_seq_len=hyper.max_seq_len,
        seed=hyper.seed,
    )

    rng = np.random.default_rng(hyper.seed)
    step = 0
    history = []
    for _ in range(hyper.epochs):
        order = rng.permutation(len(examples))
        batch_losses = []
        for start in range(0, len(examples), hyper.batch_size):
            batch = [examples[i] for i in order[start : start + hyper.batch_size]]
            loss, grad_w, grad_b = loss_and_gradient(model, batch, hyper.l2_lambda)
            batch_losses.append(loss)
            step += 1
            bc1 = 1.0 - _ADAM_BETA1**step
            bc2 = 1.0 - _ADAM_BETA2**step
            for grad, param_m, param_v, param in (
                (grad_w, m_w, v_w, weights),
                (grad_b, m_b, v_b, bias),
            ):
                param_m *= _ADAM_BETA1
                param_m += (1.0 - _ADAM_BETA1) * grad
                param_v *= _ADAM_BETA2
                param_v += (1.0 - _ADAM_BETA2) * grad**2
                param -= hyper.learning_rate * (param_m / bc1) / (
                    np.sqrt(param_v / bc2) + hyper.adam_epsilon
                )
        history.append(float(np.mean(batch_losses)))
    model.loss_history = tuple(history)
    model.final_loss = history[-1]
    return model


def predict(model: BaselineModel, text: str) -> tuple[str, np.ndarray]:
    """Most probable label plus the full probability vector.

    Probabilities are renormalized to sum to exactly 1 within 1e-9;
    ties go to the earliest label in the model's label order.
    """
    features = featurize(text[: model.max_seq_len], model.feature_config)
    probs = _softmax(_logits(model.weights, model.bias, features))
    probs = probs / probs.sum()
    return model.labels[int(np.argmax(probs))], probs


def evaluate(
    model: BaselineModel, dev_set: Sequence[tuple[str, str]], task: str
) -> EvalReport:
    """Predict over labeled (text, gold) pairs and score for `task`."""
    from .dataset import TASK_LABELS

    gold = [label for _, label in dev_set]
    pred = [predict(model, text)[0] for text, _ in dev_set]
    matrix = confusion_matrix(gold, pred, TASK_LABELS[task])
    return evaluation_report(matrix, task)


def save_model(model: BaselineModel, path: str | Path) -> None:
    """Serialize to a versioned JSON container with bit-exact weights."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "labels": list(model.labels),
        "feature_config": {
            "char_ngram_range": list(model.feature_config.char_ngram_range),
            "include_word_unigrams": model.feature_config.include_word_unigrams,
            "hash_dim": model.feature_config.hash_dim,
            "hash_seed": model.feature_config.hash_seed,
        },
        "max_seq_len": model.max_seq_len,
        "seed": model.seed,
        "final_loss": model.final_loss,
        "loss_history": list(model.loss_history),
        "weights": _encode_array(model.weights),
        "bias": _encode_array(model.bias),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_model(path: str | Path) -> BaselineModel:
    """Load a model saved by `save_model`."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    fc = payload["feature_config"]
    cfg = FeatureConfig(
        char_ngram_range=tuple(fc["char_ngram_range"]),
        include_word_unigrams=fc["include_word_unigrams"],
        hash_dim=fc["hash_dim"],
        hash_seed=fc["hash_seed"],
    )
    return BaselineModel(
        labels=tuple(payload["labels"]),
        weights=_decode_array(payload["weights"]),
        bias=_decode_array(payload["bias"]),
        feature_config=cfg,
        max_seq_len=payload["max_seq_len"],
        seed=payload["seed"],
        final_loss=payload["final_loss"],
        loss_history=tuple(payload.get("loss_history", ())),
    )


def _encode_array(arr: np.ndarray) -> dict:
    return {
        "shape": list(arr.shape),
        "dtype": str(arr.dtype),
        "data": base64.b64encode(np.ascontiguousarray(arr).tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict) -> np.ndarray:
    data = base64.b64decode(obj["data"])
    return np.frombuffer(data, dtype=obj["dtype"]).reshape(obj["shape"]).copy()
