"""Baseline classifier tests: gradient correctness against central
finite differences, separable-set fitting, determinism, persistence."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import separable_examples
from taghrida import baseline
from taghrida.baseline import (
    BaselineModel,
    FeatureConfig,
    HyperParams,
    evaluate,
    featurize,
    load_model,
    loss_and_gradient,
    predict,
    save_model,
    train,
)

SMALL_CFG = FeatureConfig(hash_dim=2**10)


def tiny_model(n_classes=3, hash_dim=2**10, seed=0):
    rng = np.random.default_rng(seed)
    cfg = FeatureConfig(hash_dim=hash_dim)
    return BaselineModel(
        labels=tuple(f"C{i}" for i in range(n_classes)),
        weights=rng.normal(scale=0.5, size=(n_classes, hash_dim)),
        bias=rng.normal(scale=0.5, size=n_classes),
        feature_config=cfg,
        max_seq_len=256,
        seed=seed,
    )


# --- featurize ---------------------------------------------------------------


def test_featurize_empty():
    assert featurize("", SMALL_CFG) == {}


def test_featurize_single_char_is_one_unigram():
    vec = featurize("ا", SMALL_CFG)
    assert len(vec) == 1
    assert abs(next(iter(vec.values()))) == 1.0


def test_featurize_deterministic():
    text = "والكتاب جميل جدا 123"
    assert featurize(text, SMALL_CFG) == featurize(text, SMALL_CFG)


def test_featurize_seed_changes_buckets():
    a = featurize("كتاب", FeatureConfig(hash_dim=2**10, hash_seed=0))
    b = featurize("كتاب", FeatureConfig(hash_dim=2**10, hash_seed=1))
    assert a != b


def test_featurize_counts_accumulate():
    # the same bigram twice contributes |value| 2 in its bucket
    vec = featurize("aaa", FeatureConfig(char_ngram_range=(2, 2), include_word_unigrams=False))
    assert sorted(abs(v) for v in vec.values()) == [2.0]


def test_feature_config_validation():
    with pytest.raises(ValueError):
        FeatureConfig(char_ngram_range=(0, 3))
    with pytest.raises(ValueError):
        FeatureConfig(char_ngram_range=(4, 2))
    with pytest.raises(ValueError):
        FeatureConfig(hash_dim=1000)  # not a power of two
    with pytest.raises(ValueError):
        FeatureConfig(hash_dim=512)  # too small


def test_hyper_params_validation():
    with pytest.raises(ValueError):
        HyperParams(learning_rate=0)
    with pytest.raises(ValueError):
        HyperParams(epochs=-1)
    with pytest.raises(ValueError):
        HyperParams(l2_lambda=-0.1)
    assert HyperParams().adam_epsilon == 1e-8
    assert HyperParams().max_seq_len == 256
    assert HyperParams().epochs == 10
    assert HyperParams().batch_size == 40


# --- loss and gradient ---------------------------------------------------------


def test_loss_at_zero_weights_is_log_k():
    for k in (2, 3, 5):
        cfg = FeatureConfig(hash_dim=2**10)
        model = BaselineModel(
            labels=tuple(f"C{i}" for i in range(k)),
            weights=np.zeros((k, cfg.hash_dim)),
            bias=np.zeros(k),
            feature_config=cfg,
            max_seq_len=256,
            seed=0,
        )
        feats = featurize("نص تجريبي", cfg)
        loss, _, _ = loss_and_gradient(model, [(feats, "C0")])
        assert loss == pytest.approx(math.log(k), abs=1e-12)


def test_gradient_zero_weights_single_example():
    # at zero weights the gradient is (softmax - onehot) outer features
    cfg = FeatureConfig(hash_dim=2**10)
    model = BaselineModel(
        labels=("A", "B"),
        weights=np.zeros((2, cfg.hash_dim)),
        bias=np.zeros(2),
        feature_config=cfg,
        max_seq_len=256,
        seed=0,
    )
    feats = featurize("اب", cfg)
    _, grad_w, grad_b = loss_and_gradient(model, [(feats, "A")])
    err = np.array([0.5 - 1.0, 0.5])
    assert np.allclose(grad_b, err)
    for idx, val in feats.items():
        assert np.allclose(grad_w[:, idx], err * val)
    # bias-only gradient for an empty feature vector
    _, grad_w, grad_b = loss_and_gradient(model, [({}, "B")])
    assert np.allclose(grad_w, 0.0)
    assert np.allclose(grad_b, np.array([0.5, 0.5 - 1.0]))


def test_gradient_matches_finite_differences():
    """Central differences, h=1e-5, relative error <= 1e-4.

    The weight space is deliberately small (3 classes x 64 dims, 5
    random sparse examples) so every coordinate can be perturbed. The
    gradient math only sees raw feature dicts, so the batch is built
    directly instead of through featurize.
    """
    rng = np.random.default_rng(2024)
    n_classes, dim = 3, 2**6
    model = BaselineModel(
        labels=tuple(f"C{i}" for i in range(n_classes)),
        weights=rng.normal(scale=0.5, size=(n_classes, dim)),
        bias=rng.normal(scale=0.5, size=n_classes),
        feature_config=FeatureConfig(hash_dim=2**10),
        max_seq_len=256,
        seed=0,
    )
    batch = []
    for _ in range(5):
        nnz = rng.integers(1, 12)
        idxs = rng.choice(dim, size=nnz, replace=False)
        feats = {int(j): float(rng.integers(-3, 4) or 1) for j in idxs}
        batch.append((feats, model.labels[rng.integers(n_classes)]))
    l2 = 0.01
    h = 1e-5

    def loss_at(weights, bias):
        probe = BaselineModel(
            labels=model.labels,
            weights=weights,
            bias=bias,
            feature_config=model.feature_config,
            max_seq_len=256,
            seed=0,
        )
        return loss_and_gradient(probe, batch, l2)[0]

    _, grad_w, grad_b = loss_and_gradient(model, batch, l2)

    def check(analytic, numeric):
        denom = max(abs(analytic), abs(numeric), 1e-8)
        assert abs(analytic - numeric) / denom <= 1e-4, (analytic, numeric)

    for k in range(n_classes):
        for j in range(dim):
            w_plus = model.weights.copy()
            w_minus = model.weights.copy()
            w_plus[k, j] += h
            w_minus[k, j] -= h
            numeric = (loss_at(w_plus, model.bias) - loss_at(w_minus, model.bias)) / (2 * h)
            if abs(numeric) < 1e-10 and abs(grad_w[k, j]) < 1e-10:
                continue
            check(grad_w[k, j], numeric)
        b_plus = model.bias.copy()
        b_minus = model.bias.copy()
        b_plus[k] += h
        b_minus[k] -= h
        numeric = (loss_at(model.weights, b_plus) - loss_at(model.weights, b_minus)) / (2 * h)
        check(grad_b[k], numeric)


def test_loss_errors():
    model = tiny_model()
    with pytest.raises(ValueError):
        loss_and_gradient(model, [])
    with pytest.raises(ValueError):
        loss_and_gradient(model, [({}, "nope")])


# --- training ------------------------------------------------------------------


def test_train_fits_separable_set():
    examples = separable_examples()
    model = train(examples, HyperParams(epochs=10, batch_size=4, seed=0), SMALL_CFG)
    correct = sum(predict(model, text)[0] == label for text, label in examples)
    assert correct == len(examples)


def test_train_loss_trend_non_increasing():
    # trend measured on the data term alone (l2 off): the penalty is a
    # function of weight norm, not of fit, and drifts upward once the
    # separable set is solved
    examples = separable_examples()
    model = train(
        examples,
        HyperParams(epochs=8, batch_size=4, seed=3, l2_lambda=0.0),
        SMALL_CFG,
    )
    losses = model.loss_history
    assert len(losses) == 8
    # allow warmup noise over the first two epochs, monotone after
    for earlier, later in zip(losses[1:], losses[2:]):
        assert later <= earlier + 1e-9, losses


def test_train_deterministic_bitwise():
    examples = separable_examples()
    hyper = HyperParams(epochs=3, batch_size=4, seed=11)
    a = train(examples, hyper, SMALL_CFG)
    b = train(examples, hyper, SMALL_CFG)
    assert a.weights.tobytes() == b.weights.tobytes()
    assert a.bias.tobytes() == b.bias.tobytes()
    assert a.final_loss == b.final_loss
    c = train(examples, HyperParams(epochs=3, batch_size=4, seed=12), SMALL_CFG)
    assert a.weights.tobytes() != c.weights.tobytes()


def test_train_rejects_single_label():
    with pytest.raises(ValueError, match="labels"):
        train([("نص", "POS"), ("اخر", "POS")], HyperParams(epochs=1), SMALL_CFG)
    with pytest.raises(ValueError):
        train([], HyperParams(epochs=1), SMALL_CFG)


# --- prediction ------------------------------------------------------------------


def test_predict_probability_simplex():
    model = tiny_model(n_classes=4, hash_dim=2**10, seed=5)
    for text in ["كتاب", "خبر جميل جدا", "", "abc 123"]:
        _, probs = predict(model, text)
        assert (probs >= 0).all()
        assert abs(probs.sum() - 1.0) <= 1e-9


def test_predict_zero_weight_model_uniform_first_label():
    cfg = FeatureConfig(hash_dim=2**10)
    model = BaselineModel(
        labels=("A", "B", "C"),
        weights=np.zeros((3, cfg.hash_dim)),
        bias=np.zeros(3),
        feature_config=cfg,
        max_seq_len=256,
        seed=0,
    )
    label, probs = predict(model, "نص")
    assert label == "A"
    assert np.allclose(probs, 1 / 3)


def test_predict_argmax_scale_invariant():
    model = tiny_model(n_classes=3, hash_dim=2**10, seed=9)
    scaled = BaselineModel(
        labels=model.labels,
        weights=model.weights * 3.0,
        bias=model.bias * 3.0,
        feature_config=model.feature_config,
        max_seq_len=model.max_seq_len,
        seed=model.seed,
    )
    for text in ["كتاب جميل", "خبر", "xyz"]:
        assert predict(model, text)[0] == predict(scaled, text)[0]


def test_predict_truncates_to_max_seq_len():
    model = tiny_model(hash_dim=2**10)
    short = BaselineModel(
        labels=model.labels,
        weights=model.weights,
        bias=model.bias,
        feature_config=model.feature_config,
        max_seq_len=4,
        seed=0,
    )
    long_text = "ابجد" + "هوز" * 50
    full_label, full_probs = predict(short, long_text)
    cut_label, cut_probs = predict(short, long_text[:4])
    assert full_label == cut_label
    assert np.array_equal(full_probs, cut_probs)


# --- evaluate ---------------------------------------------------------------------


def test_evaluate_memorized_devset():
    examples = separable_examples()
    model = train(examples, HyperParams(epochs=10, batch_size=4, seed=0), SMALL_CFG)
    dev = [(t, l) for t, l in examples[:5]] + [(t, l) for t, l in examples[-5:]]
    # sentiment task needs all three labels; map POS/NEG straight through
    rep = evaluate(model, dev, "sentiment")
    assert rep.official == 1.0
    assert rep.task == "sentiment"


def test_evaluate_constant_predictor_zero_official():
    cfg = FeatureConfig(hash_dim=2**10)
    # bias forces FALSE for every input
    model = BaselineModel(
        labels=("FALSE", "TRUE"),
        weights=np.zeros((2, cfg.hash_dim)),
        bias=np.array([5.0, -5.0]),
        feature_config=cfg,
        max_seq_len=64,
        seed=0,
    )
    dev = [("نص اول", "FALSE"), ("نص ثان", "FALSE"), ("نص ثالث", "TRUE")]
    rep = evaluate(model, dev, "sarcasm")
    assert rep.official == 0.0
    assert rep.accuracy == pytest.approx(2 / 3)


# --- persistence -------------------------------------------------------------------


def test_save_load_roundtrip(tmp_path):
    examples = separable_examples()
    model = train(examples, HyperParams(epochs=2, batch_size=4, seed=1), SMALL_CFG)
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    assert back.labels == model.labels
    assert back.weights.tobytes() == model.weights.tobytes()
    assert back.bias.tobytes() == model.bias.tobytes()
    assert back.feature_config == model.feature_config
    assert back.max_seq_len == model.max_seq_len
    assert back.final_loss == model.final_loss
    assert back.loss_history == model.loss_history
    for text in ["قمر نجم اليوم", "صخر رمل غدا"]:
        assert predict(back, text)[0] == predict(model, text)[0]


def test_load_rejects_unknown_version(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"format_version": 99}', encoding="utf-8")
    with pytest.raises(ValueError, match="version"):
        load_model(path)
