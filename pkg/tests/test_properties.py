"""Randomized invariant checks over generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from subanom.metrics import average_precision, precision_at_k, roc_auc
from subanom.regions import k_core, propose_regions
from subanom.scoring import normalize, pair_similarity
from conftest import build_graph

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=64)


@st.composite
def score_label_instances(draw):
    n = draw(st.integers(min_value=2, max_value=60))
    scores = np.array(draw(st.lists(finite, min_size=n, max_size=n)))
    positives = draw(st.integers(min_value=1, max_value=n - 1))
    labels = np.array([1] * positives + [0] * (n - positives), dtype=np.int8)
    perm = draw(st.permutations(range(n)))
    return scores, labels[list(perm)]


@st.composite
def small_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=20))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if pairs:
        edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    else:
        edges = []
    return build_graph(n, edges, attr_dim=2, seed=n)


@given(score_label_instances())
def test_auc_of_negated_scores_is_complement(instance):
    scores, labels = instance
    total = roc_auc(scores, labels) + roc_auc(-scores, labels)
    assert abs(total - 1.0) < 1e-12


@given(score_label_instances())
def test_metric_outputs_stay_in_unit_interval(instance):
    scores, labels = instance
    assert 0.0 <= roc_auc(scores, labels) <= 1.0
    assert 0.0 < average_precision(scores, labels) <= 1.0
    for k in (1, len(scores)):
        assert 0.0 <= precision_at_k(scores, labels, k) <= 1.0


@given(score_label_instances())
def test_perfect_separation_detected(instance):
    scores, labels = instance
    separated = labels.astype(np.float64)  # positives strictly above negatives
    assert roc_auc(separated, labels) == 1.0
    assert average_precision(separated, labels) == 1.0


@given(st.lists(finite, min_size=1, max_size=80))
def test_normalize_bounds_and_extremes(values):
    out = normalize(np.array(values))
    assert (out >= 0.0).all() and (out <= 1.0).all()
    if max(values) > min(values):
        assert out.min() == 0.0 and out.max() == 1.0
    else:
        assert not out.any()


@given(
    st.lists(finite, min_size=2, max_size=6),
    st.lists(finite, min_size=2, max_size=6),
)
def test_pair_similarity_is_bounded(a, b):
    size = min(len(a), len(b))
    s = pair_similarity(np.array(a[:size]), np.array(b[:size]))
    assert -1.0 - 1e-12 <= s <= 1.0 + 1e-12


@settings(max_examples=60)
@given(small_graphs())
def test_cores_nest_and_start_at_ceil_average_degree(graph):
    for k in range(4):
        assert set(k_core(graph, k + 1)) <= set(k_core(graph, k))
    schedule = propose_regions(graph)
    assert schedule.k_start == -(-2 * graph.m // graph.n)
