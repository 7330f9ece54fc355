import numpy as np
import pytest

from disperse3d.geometry import (
    Metric,
    Segment3,
    distance,
    distance_point_segment,
    metric_direction,
    metric_length,
    project_onto_plane,
    random_unit_direction,
    random_unit_directions,
    segment_distance,
)

ALL_METRICS = [Metric.EUCLIDEAN, Metric.CHEBYSHEV, Metric.MANHATTAN]


# ----------------------------------------------------------------------
# distance
# ----------------------------------------------------------------------

def test_distance_examples():
    assert distance(Metric.EUCLIDEAN, (0, 0, 0), (1, 1, 1)) == pytest.approx(np.sqrt(3))
    assert distance(Metric.CHEBYSHEV, (0, 0, 0), (1, 0.5, 0.2)) == 1.0
    assert distance(Metric.MANHATTAN, (0, 0, 0), (1, 1, 1)) == 3.0


def test_distance_rejects_nonfinite():
    with pytest.raises(ValueError):
        distance(Metric.EUCLIDEAN, (np.nan, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        distance(Metric.EUCLIDEAN, (0, 0, 0), (np.inf, 0, 0))


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_metric_axioms_on_random_triples(metric):
    rng = np.random.default_rng(101)
    a, b, c = rng.uniform(-5, 5, size=(3, 10_000, 3))
    dab = metric_length(metric, a - b)
    dba = metric_length(metric, b - a)
    dac = metric_length(metric, a - c)
    dbc = metric_length(metric, b - c)
    assert np.all(dab >= 0)
    np.testing.assert_allclose(dab, dba, rtol=0, atol=0)
    # triangle inequality
    assert np.all(dac <= dab + dbc + 1e-12)
    # identity of indiscernibles
    assert np.all(metric_length(metric, np.zeros((5, 3))) == 0)
    assert np.all(dab[np.any(a != b, axis=1)] > 0)


def test_metric_from_name():
    assert Metric.from_name("Euclidean") is Metric.EUCLIDEAN
    with pytest.raises(ValueError):
        Metric.from_name("hamming")


# ----------------------------------------------------------------------
# segments
# ----------------------------------------------------------------------

def test_segment_rejects_degenerate():
    with pytest.raises(ValueError):
        Segment3((1, 2, 3), (1, 2, 3))


def test_point_segment_euclidean_examples():
    seg = Segment3((0, 0, 0), (1, 0, 0))
    d, foot = distance_point_segment(Metric.EUCLIDEAN, (0.5, 1, 0), seg)
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(foot, [0.5, 0, 0], atol=1e-12)
    d, foot = distance_point_segment(Metric.EUCLIDEAN, (2, 0, 0), seg)
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(foot, [1, 0, 0], atol=1e-12)


def test_point_segment_chebyshev_frozen_oracle():
    # expected value computed by a dense scan over a million parameter steps;
    # the minimum is attained on a whole sub-interval, so check the returned
    # foot is *a* minimizer on the segment rather than one specific point
    seg = Segment3((0, 0, 0), (1, 0, 0))
    p = np.array([0.5, 0.3, 0.3])
    d, foot = distance_point_segment(Metric.CHEBYSHEV, p, seg)
    assert d == pytest.approx(0.3, abs=1e-9)

    ts = np.linspace(0.0, 1.0, 1_000_001)
    pts = np.outer(ts, seg.vector) + seg.a
    scan = np.max(np.abs(pts - p), axis=1).min()
    assert d == pytest.approx(scan, abs=1e-9)
    assert 0.0 <= foot[0] <= 1.0 and foot[1] == 0.0 and foot[2] == 0.0
    assert np.max(np.abs(p - foot)) == pytest.approx(d, abs=1e-9)


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_point_segment_below_endpoint_distances(metric):
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, p = rng.uniform(-2, 2, size=(3, 3))
        if np.max(np.abs(b - a)) < 1e-9:
            continue
        seg = Segment3(a, b)
        d, _ = distance_point_segment(metric, p, seg)
        assert d <= distance(metric, p, a) + 1e-9
        assert d <= distance(metric, p, b) + 1e-9


def test_golden_section_matches_euclidean_closed_form():
    rng = np.random.default_rng(13)
    pts = rng.uniform(-2, 2, size=(300, 3))
    starts = rng.uniform(-2, 2, size=(300, 3))
    vecs = rng.uniform(-2, 2, size=(300, 3))
    vecs[np.max(np.abs(vecs), axis=1) < 1e-6] = [1.0, 0, 0]
    d_closed, _ = segment_distance(Metric.EUCLIDEAN, pts, starts, vecs)

    # run the golden-section path on the same Euclidean objective
    import disperse3d.geometry as geo

    def f(t):
        return geo.metric_length(Metric.EUCLIDEAN, pts - (starts + t[..., None] * vecs))

    lo = np.zeros(300)
    hi = np.ones(300)
    x1 = hi - geo._INVPHI * (hi - lo)
    x2 = lo + geo._INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(geo._GOLDEN_ITERS):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        width = hi - lo
        q = np.where(left, hi - geo._INVPHI * width, lo + geo._INVPHI * width)
        fq = f(q)
        x1, f1, x2, f2 = (np.where(left, q, x2), np.where(left, fq, f2),
                          np.where(left, x1, q), np.where(left, f1, fq))
    d_golden = np.minimum(f1, f2)
    np.testing.assert_allclose(d_golden, d_closed, atol=1e-9)


# ----------------------------------------------------------------------
# plane projection
# ----------------------------------------------------------------------

def test_project_onto_plane_examples():
    h = project_onto_plane((0.5, 0.5, 0.5), (0, 0, 0), (0, 0, 1))
    np.testing.assert_allclose(h, [0.5, 0.5, 0], atol=1e-12)
    # a point already on the plane projects to itself
    h2 = project_onto_plane(h, (0, 0, 0), (0, 0, 1))
    np.testing.assert_allclose(h2, h, atol=1e-12)
    # crossbar top plane of the H-shaped box
    h3 = project_onto_plane((1.5, 0.5, 2.5), (0, 0, 2), (0, 0, 1))
    np.testing.assert_allclose(h3, [1.5, 0.5, 2], atol=1e-12)


def test_project_onto_plane_zero_normal_rejected():
    with pytest.raises(ValueError):
        project_onto_plane((1, 1, 1), (0, 0, 0), (0, 0, 0))


def test_projection_is_idempotent_and_minimizing():
    rng = np.random.default_rng(3)
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    q = rng.uniform(-1, 1, size=3)
    p = rng.uniform(-2, 2, size=3)
    h = project_onto_plane(p, q, n)
    assert abs(np.dot(h - q, n)) < 1e-12
    np.testing.assert_allclose(project_onto_plane(h, q, n), h, atol=1e-12)
    # no sampled plane point is closer than the orthogonal foot
    u = np.cross(n, [1.0, 0.0, 0.0])
    if np.linalg.norm(u) < 1e-6:
        u = np.cross(n, [0.0, 1.0, 0.0])
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    coef = rng.uniform(-3, 3, size=(10_000, 2))
    samples = q + coef[:, :1] * u + coef[:, 1:] * v
    best = np.min(np.linalg.norm(samples - p, axis=1))
    assert np.linalg.norm(p - h) <= best + 1e-12


# ----------------------------------------------------------------------
# random directions
# ----------------------------------------------------------------------

def test_random_direction_deterministic_under_seed():
    a = random_unit_direction(np.random.default_rng(42))
    b = random_unit_direction(np.random.default_rng(42))
    np.testing.assert_array_equal(a, b)


def test_random_directions_unit_norm_and_centered():
    rng = np.random.default_rng(5)
    dirs = random_unit_directions(rng, 100_000)
    norms = np.linalg.norm(dirs, axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-12)
    assert np.linalg.norm(dirs.mean(axis=0)) < 0.02


# ----------------------------------------------------------------------
# subgradients
# ----------------------------------------------------------------------

def test_metric_direction_deterministic_at_kinks():
    # coincident points give the zero vector
    for metric in ALL_METRICS:
        np.testing.assert_array_equal(metric_direction(metric, np.zeros(3)), np.zeros(3))
    # Chebyshev tie picks the lowest index
    g = metric_direction(Metric.CHEBYSHEV, np.array([1.0, -1.0, 0.5]))
    np.testing.assert_array_equal(g, [1.0, 0.0, 0.0])
