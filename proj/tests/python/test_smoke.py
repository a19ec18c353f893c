import math
import pathlib

import numpy as np
import pytest

import elicit

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def test_worked_example_agreement():
    assert elicit.agreement_index([15, 3, 2]) == pytest.approx(0.595)
    assert round(elicit.agreement_rate([15, 3, 2]), 3) == 0.574
    assert elicit.agreement_rate_exact([15, 3, 2]) == (218, 380)
    scored = elicit.score_labels(["a"] * 15 + ["b"] * 3 + ["c"] * 2)
    assert scored["class_sizes"] == [15, 3, 2]


def test_speech_metrics():
    utterances = ["move left"] * 12 + ["left"] * 5 + ["move"] * 2 + ["sideways"]
    assert elicit.max_consensus(utterances) == 60.0
    assert elicit.consensus_distinct_ratio(utterances) == 75.0


def test_chance_agreement():
    chance = elicit.chance_agreement([["a"] * 10 + ["b"] * 10, ["a"] * 20])
    assert chance["p_e"] == pytest.approx(0.625)
    assert chance["pi"] == pytest.approx({"a": 0.75, "b": 0.25})


def test_dtw_and_consensus():
    a = np.array([[[0.0, 0.0, 0.0]], [[1.0, 2.0, 3.0]]])
    d = np.array([0.3, -1.2, 0.4])
    assert elicit.dtw_distance(a, a + d) == pytest.approx(2 * np.linalg.norm(d), abs=1e-12)
    rng = np.random.default_rng(1)
    trajs = [np.cumsum(rng.normal(0, 0.05, (15, 3, 3)), axis=0) for _ in range(5)]
    m = elicit.dissimilarity_matrix(trajs)
    assert m.shape == (5, 5)
    assert np.allclose(m, m.T)
    assert elicit.consensus_at(m, 0.0) == 0.0
    assert elicit.consensus_at(m, float(m.max())) == 100.0
    curve = elicit.sweep_tau(m)
    assert len(curve["tau"]) == 50
    assert all(x <= y for x, y in zip(curve["consensus"], curve["consensus"][1:]))


def test_preprocess_normalizes_height():
    frames = np.zeros((50, 2, 3))
    frames[:, 1, 1] = np.linspace(1.0, 2.0, 50)
    out = elicit.preprocess(frames, fps=50.0)
    assert out.shape == (25, 2, 3)
    assert out[:, :, 1].max() - out[:, :, 1].min() == pytest.approx(1.0)


def test_logistic_and_cluster():
    x = np.linspace(-2, 4, 50)
    y = 100 / (1 + np.exp(-2 * (x - 1)))
    fit = elicit.fit_logistic(x.tolist(), y.tolist())
    assert fit["converged"]
    assert fit["midpoint"] == pytest.approx(1.0, rel=1e-3)
    block = np.full((4, 4), 3.0)
    block[:3, :3] = 1.0
    np.fill_diagonal(block, 0.0)
    assert elicit.extract_cluster(block, 2.0)["members"] == [0, 1, 2]


def test_simulation():
    dist = elicit.simulate_null(participants=20, categories=4, draws=10000, seed=7)
    assert abs(dist["mean"] - 0.25) < 0.01
    q10 = elicit.simulate_null(participants=20, categories=10, draws=10000, seed=7)
    assert elicit.p_value(0.30, q10["samples"].tolist()) < 0.05


def test_tlx_and_likert():
    cats = ["mental", "physical", "temporal", "performance", "effort", "frustration"]
    pairs = [(a, b, a) for i, a in enumerate(cats) for b in cats[i + 1:]]
    score = elicit.score_tlx({c: 20 for c in cats}, pairs)
    assert score["overall"] == 100.0
    q = elicit.summarize_likert([[1], [5]])[0]
    assert q["sd"] == pytest.approx(math.sqrt(8))
    with pytest.raises(ValueError):
        elicit.score_tlx({c: 20 for c in cats}, pairs[:-1])


def test_bundle_report_is_deterministic():
    manifest = FIXTURES / "full_study" / "manifest.json"
    assert elicit.validate(manifest)
    a = elicit.report(manifest, seed=3, draws=500)
    b = elicit.report(manifest, seed=3, draws=500)
    assert a == b
    assert list(a["sections"]) == [
        "summary", "agreement", "chance_agreement", "consensus_set",
        "speech", "dissimilarity", "simulation", "survey",
    ]


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        elicit.agreement_rate([1])
    with pytest.raises(ValueError):
        elicit.validate(FIXTURES / "does_not_exist.json")
