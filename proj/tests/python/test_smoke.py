"""Smoke tests for the python bindings: shapes, determinism, and agreement
with scikit-learn on the validity metrics. Runnable directly or via pytest."""

import numpy as np

import speclhs


def corner_blobs(k=4, per=40, d=3, seed=0, sigma=0.35):
    rng = np.random.default_rng(seed)
    corners = np.array(
        [[8.0 * ((i >> b) & 1) for b in range(d)] for i in range(k)]
    )
    points = np.vstack(
        [corners[i] + sigma * rng.standard_normal((per, d)) for i in range(k)]
    )
    labels = np.repeat(np.arange(k), per)
    return points, labels


def adjusted_rand(a, b):
    from sklearn.metrics import adjusted_rand_score

    return adjusted_rand_score(a, b)


def test_cluster_recovers_blobs():
    points, truth = corner_blobs()
    model = speclhs.cluster(points, 4, seed=11)
    assert model.k == 4
    assert len(model.labels) == len(points)
    assert min(model.cluster_sizes()) > 0
    assert adjusted_rand(truth, model.labels) == 1.0
    again = speclhs.cluster(points, 4, seed=11)
    assert list(again.labels) == list(model.labels)


def test_select_k_finds_four():
    points, _ = corner_blobs()
    report = speclhs.select_k(points, 2, 6, seed=5)
    assert report.k_values == [2, 3, 4, 5, 6]
    assert report.best_k == 4


def test_validity_metrics_match_sklearn():
    from sklearn.metrics import calinski_harabasz_score, silhouette_score

    points, truth = corner_blobs(k=3, per=30, seed=2)
    ours_sil = speclhs.silhouette_score(points, truth)
    ours_ch = speclhs.calinski_harabasz_score(points, truth)
    assert abs(ours_sil - silhouette_score(points, truth)) < 1e-9
    assert abs(ours_ch - calinski_harabasz_score(points, truth)) < 1e-9


def test_clhs_design():
    rng = np.random.default_rng(3)
    values = rng.uniform(0.0, 1.0, size=(200, 3))
    design = speclhs.clhs(values, 8, seed=7)
    assert len(design.selected) == 8
    assert sorted(set(design.selected)) == list(design.selected)
    assert design.objective == speclhs.clhs_objective(values, 8, design.selected)
    best = [t.best for t in design.trace]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))


def test_spectral_clhs_covers_every_cluster():
    points, truth = corner_blobs()
    design = speclhs.spectral_clhs(points, truth, 8, seed=9)
    assert sum(design.allocation) == 8
    assert len(design.selected) == 8
    counts = np.zeros(4, dtype=int)
    for idx in design.selected:
        counts[truth[idx]] += 1
    assert (counts == np.array(design.allocation)).all()
    assert counts.min() >= 1


def test_allocate():
    assert speclhs.allocate([1300, 500, 200], 10) == [7, 2, 1]
    try:
        speclhs.allocate([2, 2], 10)
    except speclhs.SpeclhsError:
        pass
    else:
        raise AssertionError("infeasible budget should raise")


def test_quantile_strata():
    edges = speclhs.quantile_strata(np.array([[1.0], [2.0], [3.0], [4.0]]), 2)
    assert np.allclose(edges, [[1.0, 2.5, 4.0]])


def test_pca():
    points, _ = corner_blobs(k=4, per=50, d=3, seed=4)
    proj = speclhs.pca(points, 2)
    assert proj.scores.shape == (200, 2)
    assert proj.components.shape == (3, 2)
    ratios = proj.explained_variance_ratio
    assert ratios[0] >= ratios[1] >= 0.0
    assert sum(ratios) <= 1.0 + 1e-12
    gram = proj.components.T @ proj.components
    assert np.allclose(gram, np.eye(2), atol=1e-9)
    centered = points - points.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    var = sv**2 / sv.dot(sv)
    assert np.allclose(ratios, var[:2], atol=1e-9)


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
