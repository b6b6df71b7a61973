import itertools

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from src.clustering import (
    ClrMatrix,
    calinski_harabasz,
    kmeans_fit,
    select_k,
    silhouette,
)
from src.clustering.kmeans import _update
from src.coda import clr
from src.errors import InvalidClusterCountError, InvalidCompositionError, UsageError
from src.pipeline.records import PART_COLUMNS
from src.pipeline.synthetic import synthetic_panel

from tests.conftest import random_parts

FOUR_POINTS = np.array([[5.0, -5.0], [5.1, -5.1], [-5.0, 5.0], [-5.2, 5.2]])


def _reference_silhouette(X, labels):
    n = X.shape[0]
    dist = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    widths = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        if own.sum() == 1:
            continue
        a = dist[i, own].sum() / (own.sum() - 1)
        b = min(dist[i, labels == other].mean() for other in set(labels.tolist()) - {labels[i]})
        widths[i] = (b - a) / max(a, b)
    return widths


def _reference_ch(X, labels):
    levels = sorted(set(labels.tolist()))
    n, k = X.shape[0], len(levels)
    grand = X.mean(axis=0)
    B = sum((labels == g).sum() * ((X[labels == g].mean(axis=0) - grand) ** 2).sum() for g in levels)
    W = sum(((X[labels == g] - X[labels == g].mean(axis=0)) ** 2).sum() for g in levels)
    return (B / (k - 1)) / (W / (n - k))


def _optimal_wcss(X, k):
    """Minimum WCSS over every partition of the rows into k non-empty clusters."""
    n = X.shape[0]
    labelings = np.array(list(itertools.product(range(k), repeat=n)))
    onehot = labelings[:, :, None] == np.arange(k)[None, None, :]
    counts = onehot.sum(axis=1)
    full = np.all(counts > 0, axis=1)
    onehot, counts = onehot[full], counts[full]
    sums = np.einsum("lnk,nd->lkd", onehot.astype(float), X)
    wcss = (X ** 2).sum() - ((sums ** 2).sum(axis=2) / counts).sum(axis=1)
    return float(wcss.min())


def _clr_rows(rng, n, D=4, scale=1.0):
    return ClrMatrix.from_parts(random_parts(rng, n, D=D, scale=scale))


def test_clr_matrix_rejects_rows_not_summing_to_zero():
    with pytest.raises(InvalidCompositionError):
        ClrMatrix(np.array([[1.0, 0.5], [0.0, 0.0]]))


def test_clr_matrix_is_read_only_copy():
    values = FOUR_POINTS.copy()
    m = ClrMatrix(values)
    assert values.flags.writeable
    assert not m.values.flags.writeable
    assert m.n == 4 and m.D == 2
    assert m.row_ids == (0, 1, 2, 3)


def test_four_point_example():
    model = kmeans_fit(ClrMatrix(FOUR_POINTS), 2, restarts=10, seed=1)
    assert model.assignments.tolist() == [1, 1, 2, 2]
    assert model.wcss == pytest.approx(0.05)
    assert model.sizes.tolist() == [2, 2]
    assert model.shares.tolist() == [0.5, 0.5]
    assert silhouette(ClrMatrix(FOUR_POINTS), model.assignments).average > 0.9


def test_kmeans_reaches_the_optimal_partition(rng):
    matches = 0
    trials = 0
    for k in (2, 3):
        for _ in range(50):
            m = _clr_rows(rng, 8)
            model = kmeans_fit(m, k, restarts=200, seed=trials)
            best = _optimal_wcss(m.values, k)
            assert model.wcss >= best - 1e-9
            matches += abs(model.wcss - best) <= 1e-9
            trials += 1
    assert matches >= 0.95 * trials


def test_kmeans_labels_by_first_appearance(rng):
    model = kmeans_fit(_clr_rows(rng, 40), 4, restarts=5, seed=3)
    labels = model.assignments
    assert labels[0] == 1
    _, first = np.unique(labels, return_index=True)
    assert labels[np.sort(first)].tolist() == [1, 2, 3, 4]
    assert model.clr_centroid_table()["cluster"].tolist() == [1, 2, 3, 4]


def test_kmeans_is_deterministic_across_workers(rng):
    m = _clr_rows(rng, 120)
    serial = kmeans_fit(m, 3, restarts=12, seed=42, workers=1)
    threaded = kmeans_fit(m, 3, restarts=12, seed=42, workers=4)
    assert np.array_equal(serial.assignments, threaded.assignments)
    assert serial.wcss == threaded.wcss
    assert serial.best_restart == threaded.best_restart
    again = kmeans_fit(m, 3, restarts=12, seed=42)
    assert np.array_equal(again.centroids, serial.centroids)


def test_kmeans_ignores_row_scale(rng):
    parts = random_parts(rng, 60, D=5)
    base = kmeans_fit(ClrMatrix.from_parts(parts), 3, restarts=8, seed=5)
    scaled = kmeans_fit(ClrMatrix.from_parts(parts * 1000.0), 3, restarts=8, seed=5)
    assert np.array_equal(base.assignments, scaled.assignments)


def test_kmeans_errors(rng):
    m = _clr_rows(rng, 5)
    with pytest.raises(InvalidClusterCountError):
        kmeans_fit(m, 1, restarts=1, seed=0)
    with pytest.raises(InvalidClusterCountError):
        kmeans_fit(m, 6, restarts=1, seed=0)
    with pytest.raises(UsageError):
        kmeans_fit(m, 2, restarts=0, seed=0)
    with pytest.raises(UsageError):
        kmeans_fit(m, 2, restarts=1, seed=-1)


@pytest.mark.parametrize("seed", range(5))
def test_duplicate_rows_still_fill_every_cluster(seed):
    rows = ClrMatrix(FOUR_POINTS[[0, 0, 2]])
    model = kmeans_fit(rows, 3, restarts=2, seed=seed)
    assert model.sizes.tolist() == [1, 1, 1]
    assert model.wcss == pytest.approx(0.0, abs=1e-20)
    assert model.assignments.tolist() == [1, 2, 3]
    assert model.converged


def test_identical_rows_split_into_k_clusters():
    same = ClrMatrix(np.repeat(FOUR_POINTS[:1], 4, axis=0))
    model = kmeans_fit(same, 2, restarts=3, seed=0)
    assert sorted(model.sizes.tolist()) == [1, 3]
    assert model.wcss == pytest.approx(0.0, abs=1e-20)


def test_k_equal_to_n_puts_every_row_alone(rng):
    m = _clr_rows(rng, 5)
    model = kmeans_fit(m, 5, restarts=3, seed=0)
    assert sorted(model.sizes.tolist()) == [1] * 5
    assert model.wcss == pytest.approx(0.0, abs=1e-20)
    assert silhouette(m, model.assignments).average == 0.0
    ch = calinski_harabasz(m, model.assignments)
    assert ch.degenerate and ch.value == float("inf")


def test_update_reseeds_empty_cluster():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0], [50.0, 0.0]])
    centroids, labels = _update(X, np.array([0, 0, 0, 1]), 3)
    assert labels.tolist() == [0, 0, 2, 1]
    assert centroids.tolist() == [[0.5, 0.0], [50.0, 0.0], [10.0, 0.0]]


def test_centroid_compositions_round_trip(rng):
    m = _clr_rows(rng, 30, D=6)
    model = kmeans_fit(m, 3, restarts=4, seed=9)
    for comp, row in zip(model.centroid_compositions(), model.centroids):
        assert sum(comp.parts) == pytest.approx(1.0)
        assert clr(comp).to_array() == pytest.approx(row - row.mean(), abs=1e-10)


def test_silhouette_matches_reference(rng):
    for trial in range(100):
        m = _clr_rows(rng, 15)
        k = 2 + trial % 3
        labels = np.concatenate([np.arange(k), rng.integers(0, k, size=15 - k)]) + 1
        result = silhouette(m, labels)
        expected = _reference_silhouette(m.values, labels)
        assert np.allclose(result.widths, expected, atol=1e-9, rtol=0)
        assert result.average == pytest.approx(expected.mean(), abs=1e-9)


def test_silhouette_singleton_and_single_cluster():
    m = ClrMatrix(FOUR_POINTS[:3])
    widths = silhouette(m, [1, 1, 2]).widths
    assert widths[2] == 0.0
    with pytest.raises(InvalidClusterCountError):
        silhouette(m, [1, 1, 1])


def test_calinski_harabasz_matches_reference(rng):
    for trial in range(100):
        m = _clr_rows(rng, 20)
        k = 2 + trial % 4
        labels = np.concatenate([np.arange(k), rng.integers(0, k, size=20 - k)]) + 1
        result = calinski_harabasz(m, labels)
        assert not result.degenerate
        assert result.value == pytest.approx(_reference_ch(m.values, labels), rel=1e-9)
        total = ((m.values - m.values.mean(axis=0)) ** 2).sum()
        assert result.between + result.within == pytest.approx(total, rel=1e-12)


def test_calinski_harabasz_separated_beats_random(rng):
    m = ClrMatrix(FOUR_POINTS)
    good = calinski_harabasz(m, [1, 1, 2, 2]).value
    bad = calinski_harabasz(m, [1, 2, 1, 2]).value
    assert good > bad


def test_calinski_harabasz_zero_within():
    m = ClrMatrix(np.repeat(FOUR_POINTS[[0, 2]], 2, axis=0))
    result = calinski_harabasz(m, [1, 1, 2, 2])
    assert result.degenerate
    assert result.value == float("inf")


def test_indices_ignore_label_permutation(rng):
    m = _clr_rows(rng, 25)
    labels = np.concatenate([[1, 2, 3], rng.integers(1, 4, size=22)])
    permuted = np.array([3, 1, 2])[labels - 1]
    assert silhouette(m, permuted).average == pytest.approx(silhouette(m, labels).average, abs=1e-12)
    assert calinski_harabasz(m, permuted).value == pytest.approx(calinski_harabasz(m, labels).value, rel=1e-12)


def test_select_k_recovers_synthetic_clusters():
    panel = synthetic_panel(firms=100, seed=11, clusters=3)
    m = ClrMatrix.from_parts(panel.frame[list(PART_COLUMNS)].to_numpy(dtype=float))
    report = select_k(m, 2, 6, restarts=10, seed=7)
    assert report.recommended == {"silhouette": 3, "calinski_harabasz": 3}
    assert report.agreement
    model = report.models[report.best()]
    assert adjusted_rand_score(panel.truth, model.assignments) >= 0.99
    assert [row.k for row in report.rows] == [2, 3, 4, 5, 6]


def test_select_k_wcss_decreases_with_k():
    panel = synthetic_panel(firms=60, seed=2, clusters=4)
    m = ClrMatrix.from_parts(panel.frame[list(PART_COLUMNS)].to_numpy(dtype=float))
    report = select_k(m, 2, 6, restarts=20, seed=1)
    wcss = [row.wcss for row in report.rows]
    assert all(a >= b for a, b in zip(wcss, wcss[1:]))


def test_select_k_single_candidate(rng):
    m = _clr_rows(rng, 12)
    report = select_k(m, 3, 3, restarts=2, seed=0)
    assert len(report.rows) == 1
    assert report.best("silhouette") == report.best("calinski_harabasz") == 3
    assert report.to_records()[0]["k"] == 3


def test_select_k_range_errors(rng):
    m = _clr_rows(rng, 6)
    with pytest.raises(InvalidClusterCountError):
        select_k(m, 1, 3, restarts=1, seed=0)
    with pytest.raises(InvalidClusterCountError):
        select_k(m, 2, 6, restarts=1, seed=0)
    with pytest.raises(InvalidClusterCountError):
        select_k(m, 4, 3, restarts=1, seed=0)
    report = select_k(m, 2, 3, restarts=1, seed=0)
    with pytest.raises(InvalidClusterCountError):
        report.best("davies_bouldin")
