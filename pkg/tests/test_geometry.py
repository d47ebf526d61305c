"""Configuration-plane geometry: frames, reflections, fans."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triscatter import geometry as geo


def zero_sum_triples():
    comp = st.floats(-10.0, 10.0, allow_nan=False)
    return st.tuples(comp, comp).map(lambda ab: np.array([ab[0], ab[1], -ab[0] - ab[1]]))


def test_triple_validation():
    t = geo.triple(1.0, 1.0, -2.0)
    assert t.sum() == 0.0
    with pytest.raises(ValueError):
        geo.triple(1.0, 1.0, -1.0)


def test_inner_examples():
    a = geo.triple(1.0, -1.0, 0.0)
    assert geo.inner(a, a) == pytest.approx(4.0 / 3.0, rel=1e-15)
    b = geo.triple(1.0, 1.0, -2.0)
    assert geo.inner(a, b) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(zero_sum_triples())
def test_frame_consistency(x):
    n2 = geo.inner(x, x)
    for j in (1, 2, 3):
        xj, yj = geo.jacobi(x, j)
        assert xj * xj + yj * yj == pytest.approx(n2, rel=1e-12, abs=1e-12)


def test_jacobi_examples():
    xj, yj = geo.jacobi(geo.triple(1.0, -1.0, 0.0), 1)
    assert (xj, yj) == (1.0, pytest.approx(-1.0 / np.sqrt(3.0)))
    # Orientation: y_1 grows with x_2 along the screen line l_1.
    _, y_on_line = geo.jacobi(geo.triple(0.0, 2.0, -2.0), 1)
    assert y_on_line == pytest.approx(4.0 / np.sqrt(3.0))


def test_jacobi_inverse_example():
    q = geo.jacobi_inverse(1.0, np.sqrt(3.0), 1)
    assert np.allclose(q, [1.0, 1.0, -2.0], atol=1e-14)
    assert geo.inner(q, q) == pytest.approx(4.0, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(zero_sum_triples(), st.sampled_from([1, 2, 3]))
def test_jacobi_roundtrip(x, j):
    xj, yj = geo.jacobi(x, j)
    back = geo.jacobi_inverse(xj, yj, j)
    assert np.allclose(back, x, atol=1e-12 * (1.0 + np.max(np.abs(x))))


def test_reflect_examples():
    x = geo.triple(0.0, 3.0, -3.0)
    assert np.allclose(geo.reflect(x, 1), x)  # l_1 is the mirror line
    y = geo.triple(1.0, 2.0, -3.0)
    assert np.allclose(geo.reflect(y, 1), [-1.0, 3.0, -2.0])


@settings(max_examples=100, deadline=None)
@given(zero_sum_triples(), st.sampled_from([1, 2, 3]))
def test_reflect_is_involutive_isometry(x, j):
    r = geo.reflect(x, j)
    assert np.allclose(geo.reflect(r, j), x)
    assert geo.inner(r, r) == pytest.approx(geo.inner(x, x), rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(zero_sum_triples())
def test_group_composition_identities(x):
    # tau2 tau3 = tau3 tau1 = tau1 tau2 = the cycle x -> (x3, x1, x2).
    cyc = x[[2, 0, 1]]
    assert np.allclose(geo.reflect(geo.reflect(x, 3), 2), cyc)
    assert np.allclose(geo.reflect(geo.reflect(x, 1), 3), cyc)
    assert np.allclose(geo.reflect(geo.reflect(x, 2), 1), cyc)


def test_anomalous_rays_example():
    q = geo.triple(1.0, 1.0, -2.0)
    q23, q21 = geo.anomalous_rays(q)
    assert np.allclose(q23, [-2.0, 1.0, 1.0])
    assert np.allclose(q21, [1.0, -2.0, 1.0])
    assert geo.norm(q23) == pytest.approx(geo.norm(q), rel=1e-14)
    # Same vectors through double reflections (tau2 tau3 and tau2 tau1).
    assert np.allclose(geo.reflect(geo.reflect(q, 3), 2), q23)
    assert np.allclose(geo.reflect(geo.reflect(q, 1), 2), q21)
    # ... and via the equivalent composition tau3 tau1 = tau2 tau3.
    assert np.allclose(geo.reflect(geo.reflect(q, 1), 3), q23)


@pytest.mark.parametrize(
    "q",
    [geo.jacobi_inverse(1.0, np.sqrt(3.0), 1), geo.jacobi_inverse(np.sqrt(2.0), np.sqrt(2.0), 1)],
)
def test_fan_structure(q):
    fan = geo.build_fan(q)
    assert len(fan.ray_angles) == 6
    assert np.all(np.diff(fan.ray_angles) > 0)
    # Each sector carries exactly one oriented screen direction; all six appear.
    assert sorted(fan.sector_labels) == sorted(
        ["+l1", "-l1", "+l2", "-l2", "+l3", "-l3"]
    )
    # Windows sit strictly inside the fan: no other ray within delta_out.
    for c in fan.window_centers:
        gaps = np.abs((fan.ray_angles - c + np.pi) % (2.0 * np.pi) - np.pi)
        gaps = gaps[gaps > 1e-12]
        assert np.min(gaps) > fan.delta_out


def test_fan_antipodal_ray_is_fine():
    # For the control wavevector one reflected ray is exactly antipodal to q.
    fan = geo.build_fan(geo.triple(1.0, 1.0, -2.0))
    degs = np.sort(np.rad2deg(fan.ray_angles))
    assert np.allclose(degs, [-120.0, -60.0, 0.0, 60.0, 120.0, 180.0])


def test_degenerate_fan_on_screen():
    with pytest.raises(geo.DegenerateFanError):
        geo.build_fan(geo.triple(0.0, 1.0, -1.0))


def test_degenerate_fan_window_too_wide():
    q = geo.jacobi_inverse(np.sqrt(2.0), np.sqrt(2.0), 1)  # 30 deg minimum gap
    with pytest.raises(geo.DegenerateFanError):
        geo.build_fan(q, delta_in=np.deg2rad(20.0), delta_out=np.deg2rad(31.0))


def test_classify():
    q = geo.triple(1.0, 1.0, -2.0)
    fan = geo.build_fan(q)
    info = geo.classify(fan, geo.triple(0.0, 1.0, -1.0))  # along +l1
    assert info["label"] == "+l1"
    q23, _ = geo.anomalous_rays(q)
    info23 = geo.classify(fan, q23)
    assert info23["window"] in (0, 1)
    assert info23["offset"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        geo.classify(fan, geo.triple(0.0, 0.0, 0.0))


def test_classify_partition_of_unity():
    # The six sector indicators sum to one almost everywhere.
    q = geo.jacobi_inverse(np.sqrt(2.0), np.sqrt(2.0), 1)
    fan = geo.build_fan(q)
    rng = np.random.default_rng(5)
    angles = rng.uniform(-np.pi, np.pi, 500)
    secs = fan.sector_of(angles)
    assert np.all((secs >= 0) & (secs < 6))
    counts = np.bincount(secs, minlength=6)
    assert np.all(counts > 0)
