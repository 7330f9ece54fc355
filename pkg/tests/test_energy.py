import numpy as np
import pytest

from disperse3d.container import builtin_container
from disperse3d.energy import (
    boundary_penalty,
    energy_gradient,
    pair_penalty,
    point_energy,
    sumt_gradient,
    sumt_objective,
    total_energy,
    vacancy_energy,
)
from disperse3d.geometry import Metric
from disperse3d.oracle import feasibility_margins
from disperse3d.solver import feasible_radius

EUC = Metric.EUCLIDEAN
ALL_METRICS = [Metric.EUCLIDEAN, Metric.CHEBYSHEV, Metric.MANHATTAN]


@pytest.fixture(scope="module")
def cube():
    return builtin_container("unit_cube")


@pytest.fixture(scope="module")
def tetra():
    return builtin_container("unit_tetrahedron")


def rng():
    return np.random.default_rng(0)


# ----------------------------------------------------------------------
# pair penalty
# ----------------------------------------------------------------------

def test_pair_penalty_examples():
    assert pair_penalty(EUC, (0, 0, 0), (0.5, 0, 0), 0.25) == 0.0
    assert pair_penalty(EUC, (0, 0, 0), (0.3, 0, 0), 0.25) == pytest.approx(0.2)


def test_pair_penalty_zero_beyond_twice_radius():
    rs = np.random.default_rng(2)
    for _ in range(200):
        a, b = rs.uniform(-3, 3, size=(2, 3))
        d = np.linalg.norm(a - b)
        if d >= 0.5:
            assert pair_penalty(EUC, a, b, 0.25) == 0.0


# ----------------------------------------------------------------------
# boundary penalty
# ----------------------------------------------------------------------

def test_boundary_penalty_cube_center(cube):
    center = (0.5, 0.5, 0.5)
    assert boundary_penalty(cube, EUC, center, 0.4, rng()) == 0.0
    # at 0.6 only the six face feet are within reach: 6 * (0.6 - 0.5)^2
    assert boundary_penalty(cube, EUC, center, 0.6, rng()) == pytest.approx(0.06)


def test_boundary_penalty_outside_branch(cube):
    # nearest feature is the foot (1, 0.5, 0.5) at distance 0.5
    val = boundary_penalty(cube, EUC, (1.5, 0.5, 0.5), 0.2, rng())
    assert val == pytest.approx(0.2 + 2.0 * 0.25)


def test_boundary_penalty_brute_force_oracle(cube):
    # independent expected value: enumerate vertex / edge / face-foot
    # distances for an interior point and accumulate deficits directly
    rs = np.random.default_rng(5)
    for _ in range(50):
        c = rs.uniform(0.05, 0.95, size=3)
        d_radius = rs.uniform(0.05, 0.7)
        expect = 0.0
        for v in cube.vertices:
            expect += max(0.0, d_radius - np.linalg.norm(c - v)) ** 2
        for seg in cube.edges:
            t = np.clip(np.dot(c - seg.a, seg.vector) / np.dot(seg.vector, seg.vector), 0, 1)
            expect += max(0.0, d_radius - np.linalg.norm(c - (seg.a + t * seg.vector))) ** 2
        for k, (axis, level) in enumerate([(0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0),
                                           (2, 0.0), (2, 1.0)]):
            expect += max(0.0, d_radius - abs(c[axis] - level)) ** 2
        got = boundary_penalty(cube, EUC, c, d_radius, rng())
        assert got == pytest.approx(expect, abs=1e-12)


# ----------------------------------------------------------------------
# total energy
# ----------------------------------------------------------------------

def test_total_energy_feasible_pair(cube):
    x = np.array([[0.25, 0.5, 0.5], [0.75, 0.5, 0.5]])
    assert total_energy(cube, EUC, x, 0.25, rng()).total == 0.0


def test_total_energy_center_half_radius(cube):
    assert total_energy(cube, EUC, [[0.5, 0.5, 0.5]], 0.5, rng()).total == 0.0


def test_total_energy_coincident_points(cube):
    x = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
    br = total_energy(cube, EUC, x, 0.25, rng())
    assert br.dispersion_term == pytest.approx(0.25)
    assert br.total == pytest.approx(0.25)


def test_breakdown_consistency(cube):
    rs = np.random.default_rng(6)
    for _ in range(100):
        x = rs.uniform(-0.2, 1.2, size=(4, 3))
        br = total_energy(cube, EUC, x, 0.3, rng())
        assert br.total == pytest.approx(
            br.dispersion_term + sum(br.boundary_terms), abs=1e-12)
        assert br.total >= 0


def test_energy_monotone_in_radius(cube):
    rs = np.random.default_rng(8)
    for _ in range(50):
        x = rs.uniform(0, 1, size=(3, 3))
        d1 = rs.uniform(0.05, 0.4)
        d2 = d1 + rs.uniform(0.01, 0.3)
        e1 = total_energy(cube, EUC, x, d1, rng()).total
        e2 = total_energy(cube, EUC, x, d2, rng()).total
        assert e2 >= e1 - 1e-12


# ----------------------------------------------------------------------
# per-point and vacancy energies
# ----------------------------------------------------------------------

def test_point_energy_feasible_zero(cube):
    x = np.array([[0.25, 0.5, 0.5], [0.75, 0.5, 0.5]])
    for i in range(2):
        assert point_energy(cube, EUC, x, i, 0.25, rng()) == 0.0


def test_point_energy_coincident(cube):
    x = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
    for i in range(2):
        assert point_energy(cube, EUC, x, i, 0.25, rng()) == pytest.approx(0.25)


def test_point_energy_sum_double_counts_pairs(cube):
    rs = np.random.default_rng(9)
    x = rs.uniform(0, 1, size=(5, 3))
    br = total_energy(cube, EUC, x, 0.3, rng())
    total_points = sum(point_energy(cube, EUC, x, i, 0.3, rng()) for i in range(5))
    expected = 2.0 * br.dispersion_term + sum(br.boundary_terms)
    assert total_points == pytest.approx(expected, abs=1e-10)


def test_point_energy_index_errors(cube):
    with pytest.raises(IndexError):
        point_energy(cube, EUC, [[0.5, 0.5, 0.5]], 1, 0.3, rng())


def test_vacancy_energy_cases(cube):
    x = np.array([[0.25, 0.5, 0.5], [0.75, 0.5, 0.5]])
    # far from everything and deep inside
    assert vacancy_energy(cube, EUC, x, (0.5, 0.5, 0.9), 0.05, rng()) == 0.0
    # coincident with an existing point
    assert vacancy_energy(cube, EUC, x, (0.25, 0.5, 0.5), 0.25, rng()) >= 0.25
    # outside the container: at least the radius floor
    assert vacancy_energy(cube, EUC, x, (2.0, 0.5, 0.5), 0.25, rng()) >= 0.25


# ----------------------------------------------------------------------
# penalty objective
# ----------------------------------------------------------------------

def test_sumt_objective(cube):
    center = [[0.5, 0.5, 0.5]]
    assert sumt_objective(cube, EUC, center, 0.4, 10.0, rng()) == pytest.approx(-0.16)
    assert sumt_objective(cube, EUC, center, 0.6, 10.0, rng()) == pytest.approx(0.24)
    # penalty part scales linearly with mu
    e = total_energy(cube, EUC, center, 0.6, rng()).total
    phi1 = sumt_objective(cube, EUC, center, 0.6, 10.0, rng())
    phi2 = sumt_objective(cube, EUC, center, 0.6, 20.0, rng())
    assert phi2 - phi1 == pytest.approx(10.0 * e)


# ----------------------------------------------------------------------
# gradients
# ----------------------------------------------------------------------

def test_gradient_zero_on_feasible(cube):
    x = np.array([[0.25, 0.5, 0.5], [0.75, 0.5, 0.5]])
    g = energy_gradient(cube, EUC, x, 0.2, rng())
    assert np.all(g == 0.0)


def _smoothness_margin(container, metric, x, d_radius):
    """Distance of a configuration from the nearest gradient kink."""
    from disperse3d.container import active_footpoints
    from disperse3d.geometry import distance_point_segment, metric_length

    p = x.shape[0]
    margins = [np.inf]
    for i in range(p):
        for j in range(i + 1, p):
            delta = x[i] - x[j]
            margins.append(abs(metric_length(metric, delta) - 2.0 * d_radius))
            if metric is Metric.CHEBYSHEV:
                mags = np.sort(np.abs(delta))
                margins.append(mags[-1] - mags[-2])
            if metric is Metric.MANHATTAN:
                margins.append(np.min(np.abs(delta)))
    inside = container.classify_points(x, np.random.default_rng(0))
    for i in range(p):
        for v in container.vertices:
            delta = x[i] - v
            margins.append(abs(metric_length(metric, delta) - d_radius))
            if metric is Metric.CHEBYSHEV:
                mags = np.sort(np.abs(delta))
                margins.append(mags[-1] - mags[-2])
            if metric is Metric.MANHATTAN:
                margins.append(np.min(np.abs(delta)))
        for seg in container.edges:
            d, foot = distance_point_segment(metric, x[i], seg)
            margins.append(abs(d - d_radius))
            if d < d_radius:
                delta = x[i] - foot
                if metric is Metric.CHEBYSHEV:
                    mags = np.sort(np.abs(delta))
                    margins.append(mags[-1] - mags[-2])
                if metric is Metric.MANHATTAN:
                    margins.append(np.min(np.abs(delta)))
        aset = active_footpoints(container, x[i], bool(inside[i]))
        for fi, foot in aset.footpoints:
            d = metric_length(metric, x[i] - foot)
            margins.append(abs(d - d_radius))
            # distance of the foot from the polygon rim (activation switch)
            face = container.faces[fi]
            loop = container.vertices[list(face.vertex_loop)]
            for a, b in zip(loop, np.roll(loop, -1, axis=0)):
                v = b - a
                t = np.clip(np.dot(foot - a, v) / np.dot(v, v), 0, 1)
                margins.append(np.linalg.norm(foot - (a + t * v)))
    return min(margins)


def _fd_gradient(container, metric, x, d_radius, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.shape[0]):
        for k in range(3):
            xp = x.copy()
            xp[i, k] += h
            xm = x.copy()
            xm[i, k] -= h
            fp = total_energy(container, metric, xp, d_radius, rng()).total
            fm = total_energy(container, metric, xm, d_radius, rng()).total
            g[i, k] = (fp - fm) / (2 * h)
    return g


@pytest.mark.parametrize("metric", ALL_METRICS)
def test_gradient_matches_finite_differences(cube, metric):
    rs = np.random.default_rng(77)
    checked = 0
    while checked < 100:
        p = int(rs.integers(2, 5))
        x = rs.uniform(-0.1, 1.1, size=(p, 3))
        d_radius = rs.uniform(0.1, 0.45)
        e = total_energy(cube, metric, x, d_radius, rng()).total
        if e < 1e-10:
            continue  # flat region: nothing to compare
        if _smoothness_margin(cube, metric, x, d_radius) < 1e-4:
            continue  # too close to a kink for central differences
        ga = energy_gradient(cube, metric, x, d_radius, rng())
        gf = _fd_gradient(cube, metric, x, d_radius)
        scale = max(np.max(np.abs(gf)), 1e-8)
        assert np.max(np.abs(ga - gf)) / scale < 1e-5
        checked += 1


def test_sumt_gradient_radius_derivative(cube):
    rs = np.random.default_rng(42)
    for _ in range(20):
        x = rs.uniform(0.1, 0.9, size=(3, 3))
        d_radius = rs.uniform(0.15, 0.4)
        mu = 10.0
        _, dphi_dd = sumt_gradient(cube, EUC, x, d_radius, mu, rng())
        h = 1e-7
        fp = sumt_objective(cube, EUC, x, d_radius + h, mu, rng())
        fm = sumt_objective(cube, EUC, x, d_radius - h, mu, rng())
        fd = (fp - fm) / (2 * h)
        assert dphi_dd == pytest.approx(fd, rel=1e-4, abs=1e-4)


def test_coincident_points_have_zero_pair_direction(cube):
    # documented degenerate case: the tie returns a zero subgradient
    x = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
    g = energy_gradient(cube, EUC, x, 0.25, rng())
    assert np.all(g == 0.0)


# ----------------------------------------------------------------------
# zero-iff-feasible against the independent oracle
# ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["unit_cube", "unit_tetrahedron"])
def test_zero_energy_iff_brute_force_feasible(name):
    container = builtin_container(name)
    rs = np.random.default_rng(31)
    lo, hi = container.bounding_box
    checked = 0
    disagreements = 0
    while checked < 250:
        p = int(rs.integers(1, 5))
        x = rs.uniform(lo - 0.05, hi + 0.05, size=(p, 3))
        d_radius = float(rs.uniform(0.02, 0.45))
        report = feasibility_margins(container, EUC, x, d_radius, rng())
        margin = min(report.min_pair_margin, report.min_boundary_margin)
        if abs(margin) < 1e-6:
            continue  # borderline instances are ill-posed for a binary check
        feasible = report.feasible(0.0) if margin > 0 else False
        energy_zero = total_energy(container, EUC, x, d_radius, rng()).total <= 1e-12
        if feasible != energy_zero:
            disagreements += 1
        checked += 1
    assert disagreements == 0


def test_feasible_radius_matches_oracle_distance(cube):
    rs = np.random.default_rng(17)
    for _ in range(50):
        x = rs.uniform(0.1, 0.9, size=(3, 3))
        cap = feasible_radius(cube, EUC, x, rng())
        report = feasibility_margins(cube, EUC, x, cap, rng())
        assert min(report.min_pair_margin, report.min_boundary_margin) >= -1e-9
        assert total_energy(cube, EUC, x, cap, rng()).total == 0.0
