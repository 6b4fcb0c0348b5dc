import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vigil.classify import (
    DEFAULT_CLASS_WEIGHTS,
    InferenceRecord,
    StubClassifier,
    argmax_label,
    motion_features,
    softmax,
    stub_classify,
    validate_scores,
    weighted_ce,
    weighted_ce_grad,
)
from vigil.errors import ValidationError
from vigil.ingest import VideoChunk
from vigil.labels import ClassLabel

from conftest import make_svf
from oracles import oracle_majority_code


# --- numerics ---------------------------------------------------------------


def test_weighted_ce_uniform_logits_normal():
    # weight 0.3 on Normal: loss = 0.3 * ln 4
    loss = weighted_ce([0.0, 0.0, 0.0, 0.0], ClassLabel.NORMAL, DEFAULT_CLASS_WEIGHTS)
    assert loss == pytest.approx(0.3 * math.log(4), abs=1e-9)


def test_weighted_ce_uniform_logits_falling():
    loss = weighted_ce([0.0, 0.0, 0.0, 0.0], ClassLabel.FALLING, DEFAULT_CLASS_WEIGHTS)
    assert loss == pytest.approx(math.log(4), abs=1e-9)


def test_weighted_ce_near_one_hot_limit():
    loss = weighted_ce([50.0, 0.0, 0.0, 0.0], ClassLabel.FALLING, DEFAULT_CLASS_WEIGHTS)
    assert loss < 1e-9


def test_weighted_ce_unit_weights_is_plain_ce():
    rng = np.random.default_rng(0)
    for _ in range(50):
        logits = rng.normal(0, 3, 4)
        label = int(rng.integers(0, 4))
        plain = -float(np.log(softmax(logits)[label]))
        assert weighted_ce(logits, label, (1.0, 1.0, 1.0, 1.0)) == pytest.approx(plain, rel=1e-12)


def test_grad_uniform_logits_falling():
    g = weighted_ce_grad([0.0, 0.0, 0.0, 0.0], ClassLabel.FALLING, DEFAULT_CLASS_WEIGHTS)
    assert np.allclose(g, [-0.75, 0.25, 0.25, 0.25], atol=1e-12)


def test_grad_zero_weight_is_zero():
    g = weighted_ce_grad([1.0, -2.0, 0.5, 3.0], ClassLabel.NORMAL, (1.0, 1.0, 1.0, 0.0))
    assert (g == 0).all()


def test_grad_matches_central_finite_differences():
    rng = np.random.default_rng(2024)
    h = 1e-5
    for _ in range(1000):
        logits = rng.normal(0.0, 2.0, 4)
        label = int(rng.integers(0, 4))
        analytic = weighted_ce_grad(logits, label, DEFAULT_CLASS_WEIGHTS)
        numeric = np.empty(4)
        for k in range(4):
            up, down = logits.copy(), logits.copy()
            up[k] += h
            down[k] -= h
            numeric[k] = (
                weighted_ce(up, label, DEFAULT_CLASS_WEIGHTS)
                - weighted_ce(down, label, DEFAULT_CLASS_WEIGHTS)
            ) / (2 * h)
        assert np.abs(analytic - numeric).max() < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=-1e4, max_value=1e4), min_size=4, max_size=4))
def test_softmax_stable_and_sums_to_one(logits):
    p = softmax(np.array(logits))
    assert np.all(np.isfinite(p))
    assert abs(p.sum() - 1.0) < 1e-9
    assert p.min() >= 0.0


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(min_value=-50, max_value=50), min_size=4, max_size=4),
    st.floats(min_value=-100, max_value=100),
)
def test_argmax_invariant_under_constant_shift(logits, shift):
    base = softmax(np.array(logits))
    shifted = softmax(np.array(logits) + shift)
    assert argmax_label(base) == argmax_label(shifted)


# --- score vector and record invariants --------------------------------------


def test_validate_scores_rejects_bad_sum():
    with pytest.raises(ValidationError, match="sum"):
        validate_scores([0.2, 0.2, 0.2, 0.2])


def test_validate_scores_rejects_out_of_range():
    with pytest.raises(ValidationError):
        validate_scores([1.2, -0.2, 0.0, 0.0])


def test_record_rejects_label_not_argmax():
    with pytest.raises(ValidationError, match="argmax"):
        InferenceRecord(
            chunk_id="c",
            label=ClassLabel.NORMAL,
            scores=(0.97, 0.01, 0.01, 0.01),
            model_id="m",
            latency_ms=1.0,
            created_ts=0,
        )


def test_argmax_tie_breaks_toward_lowest_index():
    assert argmax_label([0.25, 0.25, 0.25, 0.25]) == ClassLabel.FALLING
    assert argmax_label([0.1, 0.4, 0.4, 0.1]) == ClassLabel.STAGGERING


# --- stub classifier ----------------------------------------------------------


def test_stub_majority_normal():
    rec = stub_classify(make_svf(codes=(3,) * 300))
    assert rec.label == ClassLabel.NORMAL
    assert rec.scores[3] >= 0.97
    assert sum(rec.scores) == pytest.approx(1.0, abs=1e-9)


def test_stub_tie_goes_to_lowest_index():
    rec = stub_classify(make_svf(codes=(1,) * 150 + (3,) * 150))
    assert rec.label == ClassLabel.STAGGERING


def test_stub_mixed_majority():
    rec = stub_classify(make_svf(codes=(2,) * 200 + (3,) * 100))
    assert rec.label == ClassLabel.CHEST_PAIN


def test_stub_agrees_with_independent_oracle_on_random_fixtures():
    rng = np.random.default_rng(77)
    for trial in range(100):
        codes = tuple(int(c) for c in rng.integers(0, 4, size=int(rng.integers(1, 40))))
        data = make_svf(width=16, height=16, codes=codes, seed=trial)
        rec1 = stub_classify(data)
        rec2 = stub_classify(data)
        assert rec1.label == rec2.label == oracle_majority_code(data)
        assert rec1.scores == rec2.scores


def test_stub_classifier_contract():
    data = make_svf(codes=(0,) * 40)
    chunk = VideoChunk("cam1:0", "cam1", 0, 10.0, 40, "cam1/0.svf", False)
    rec = StubClassifier(clock=lambda: 123).classify_chunk(chunk, data)
    assert rec.chunk_id == "cam1:0"
    assert rec.label == ClassLabel.FALLING
    assert rec.model_id == "stub"
    assert rec.created_ts == 123
    assert rec.latency_ms >= 0.0


# --- motion features ----------------------------------------------------------


def test_static_clip_zero_motion():
    batch = np.repeat(
        np.random.default_rng(0).normal(size=(1, 3, 1, 16, 16)), 4, axis=2
    )
    feats = motion_features(batch)
    assert feats.shape == (32,)
    assert np.allclose(feats[:16], 0.0)


def test_constant_step_motion_is_step_size():
    a = np.zeros((1, 3, 1, 16, 16))
    b = a + 0.5
    batch = np.concatenate([a, b], axis=2)
    feats = motion_features(batch)
    assert np.allclose(feats[:16], 0.5)
    assert np.allclose(feats[16:], 0.25)  # mean of 0 and 0.5


def test_feature_length_is_32():
    batch = np.random.default_rng(1).normal(size=(1, 3, 5, 224, 224))
    assert motion_features(batch).shape == (32,)


def test_single_frame_rejected():
    batch = np.zeros((1, 3, 1, 16, 16))
    with pytest.raises(ValidationError, match="t >= 2"):
        motion_features(batch)
