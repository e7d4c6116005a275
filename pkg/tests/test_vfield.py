"""Holomorphic vector field construction and its flows."""

import csv

import numpy as np
import pytest

from kelab import domains, hermgeo, potentials, vfield
from kelab.errors import CertificateError, FlowExitError
from kelab.field import PotentialField
from kelab.sampling import sample_interior


@pytest.fixture(scope="module")
def certified():
    p = potentials.rescaled_ball_potential(2, 3.0)
    potentials.certify_constant_length(p, samples=60, seed=0)
    return p


def test_vector_field_at_center(certified):
    v = vfield.vector_field(certified, np.zeros(2, complex))
    np.testing.assert_allclose(v.components, [1j, 0.0], atol=1e-14)
    assert v.norm == pytest.approx(1.0, abs=1e-14)


def test_vector_field_norm_law(certified):
    n, K = 2, 3.0
    rng = np.random.default_rng(2)
    for z in sample_interior(certified.domain, rng, 20):
        v = vfield.vector_field(certified, z)
        expected = np.exp(K * certified(z) / (n + 1)) * np.sqrt((n + 1) / K)
        assert v.norm == pytest.approx(expected, rel=1e-10)
        assert v.norm > 0


def test_vector_field_is_deterministic(certified):
    z = np.array([0.2 + 0.1j, -0.1 + 0.3j])
    v1 = vfield.vector_field(certified, z)
    v2 = vfield.vector_field(certified, z)
    np.testing.assert_array_equal(v1.components, v2.components)


def test_vector_field_requires_certificate():
    p = potentials.rescaled_ball_potential(2, 3.0)  # no certificate attached
    with pytest.raises(CertificateError):
        vfield.vector_field(p, np.zeros(2, complex))
    bad = domains.ke_potential(domains.ball(2), 3.0)
    potentials.certify_constant_length(bad, samples=30, seed=0)
    with pytest.raises(CertificateError):
        vfield.vector_field(bad, np.zeros(2, complex))


def test_dbar_defect_certified(certified):
    rng = np.random.default_rng(3)
    for z in sample_interior(certified.domain, rng, 100):
        defect = vfield.dbar_defect(certified, z)
        law = vfield.dbar_defect_closed_form(certified, z)
        assert defect <= 1e-8
        assert abs(defect - law) <= 1e-8


def test_dbar_defect_fd_path():
    """The nested-FD route stays within its looser 1e-3 budget."""
    base = potentials.rescaled_ball_potential(2, 3.0)
    fd_only = PotentialField(
        domain=base.domain, ricci_constant=3.0, parts=None,
        analytic_order=0, label="fd-copy", fn=base,
    )
    rng = np.random.default_rng(13)
    for z in sample_interior(base.domain, rng, 5, shrink=0.8):
        assert vfield.dbar_defect(fd_only, z) <= 1e-3


def test_dbar_defect_matches_brute_force():
    """The covariant formula reproduces finite differences of V itself."""
    p = domains.bergman_potential(domains.polydisc(2))  # non-constant length
    K, n = 1.0, 2
    z0 = np.array([0.3 + 0.2j, -0.1 + 0.45j])

    def v_components(z):
        fr = hermgeo.metric_from_potential(p, z, order=2)
        factor = np.exp(K * fr.jet.value() / (n + 1))
        return factor * fr.raise_index(fr.jet.holo_gradient())

    h = 1e-5
    T = np.zeros((n, n), complex)
    for b in range(n):
        zp, zm = z0.copy(), z0.copy()
        zp[b] += h
        zm[b] -= h
        dx = (v_components(zp) - v_components(zm)) / (2 * h)
        zp, zm = z0.copy(), z0.copy()
        zp[b] += 1j * h
        zm[b] -= 1j * h
        dy = (v_components(zp) - v_components(zm)) / (2 * h)
        T[:, b] = 0.5 * (dx + 1j * dy)
    frame = hermgeo.metric_from_potential(p, z0, order=2)
    brute = float(np.real(np.sum(frame.g * (T @ frame.g_inv @ T.conj().T))))
    assert vfield.dbar_defect(p, z0) == pytest.approx(brute, rel=1e-6)


def test_defining_potential_field_is_linear_and_holomorphic():
    """The ball's defining-function potential gives V^a = i z^a exactly.

    Its gradient length |z|^2 is not constant, yet the resulting field is
    the (holomorphic) dilation generator, so the true defect vanishes while
    the constant-length closed form evaluates to e^(2K phi/(n+1)) (|z|^2-1)^2
    -- the two agree only under the constant-length identity.
    """
    n, K = 2, 3.0
    p = domains.ke_potential(domains.ball(n), K)
    rng = np.random.default_rng(5)
    for z in sample_interior(p.domain, rng, 10):
        frame = hermgeo.metric_from_potential(p, z, order=2)
        factor = np.exp(K * frame.jet.value() / (n + 1))
        components = 1j * factor * frame.raise_index(frame.jet.holo_gradient())
        np.testing.assert_allclose(components, 1j * z, atol=1e-12)
        assert vfield.dbar_defect(p, z) <= 1e-10
    assert vfield.dbar_defect_closed_form(p, np.zeros(n, complex)) == \
        pytest.approx(1.0, abs=1e-14)


def test_level_set_tangency(certified):
    rng = np.random.default_rng(6)
    for z in sample_interior(certified.domain, rng, 10):
        assert vfield.level_set_tangency(certified, z) <= 1e-12
    assert vfield.level_set_tangency(certified, np.zeros(2, complex)) <= 1e-15
    # the cancellation needs no constancy of the gradient length
    p = domains.ke_potential(domains.ball(2), 3.0)
    assert vfield.level_set_tangency(p, np.array([0.3, 0.1j])) <= 1e-12


def test_flow_zero_time_is_identity(certified):
    z0 = np.array([0.2 + 0.1j, 0.05 - 0.3j])
    out = vfield.integrate_flow(certified, z0, 0.0)
    np.testing.assert_array_equal(out, z0)


def test_flow_conserves_potential(certified):
    z0 = np.zeros(2, complex)
    traj = vfield.flow_trajectory(certified, z0, 1.0, dt=1e-3,
                                  generator="re_w", record_every=100)
    assert np.max(np.abs(traj["values"] - certified(z0))) <= 1e-6


def test_flow_long_horizon_conservation(certified):
    z0 = np.array([0.1 + 0.05j, -0.2 + 0.1j])
    traj = vfield.flow_trajectory(certified, z0, 5.0, dt=1e-3,
                                  generator="re_w", record_every=500)
    assert np.max(np.abs(traj["values"] - certified(z0))) <= 1e-6


def test_flow_horizon_cap(certified):
    with pytest.raises(ValueError):
        vfield.integrate_flow(certified, np.zeros(2, complex), 20.0)


def test_flow_pullback_preserves_metric(certified):
    dev = vfield.pullback_metric_deviation(certified, np.zeros(2, complex), 0.5)
    assert dev <= 1e-4


def test_flow_reparametrization(certified):
    z0 = np.array([0.15 + 0.1j, -0.1 + 0.2j])
    assert vfield.reparametrization_deviation(certified, z0, 0.8) <= 1e-5


def test_flow_exit_detection():
    # an off-center rotation: W = i (z + 0.8), circles around -0.8 and
    # leaves the unit disc from z0 = 0.5
    p = PotentialField(
        domain=domains.ball(1), ricci_constant=2.0, parts=None,
        analytic_order=0, label="off-center",
        fn=lambda z: float(np.sum(np.abs(z) ** 2) + 2 * np.real(0.8 * z[0])),
    )
    with pytest.raises(FlowExitError) as err:
        vfield.integrate_flow(p, np.array([0.5 + 0j]), 3.0, dt=5e-3)
    assert 0 < err.value.time <= 3.0
    # starting outside fails immediately
    with pytest.raises(FlowExitError):
        vfield.integrate_flow(p, np.array([1.5 + 0j]), 1.0)


def test_trajectory_csv_round_trip(tmp_path, certified):
    traj = vfield.flow_trajectory(certified, np.zeros(2, complex), 0.2,
                                  dt=1e-3, generator="re_w", record_every=50)
    path = tmp_path / "traj.csv"
    vfield.trajectory_to_csv(traj, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "re_z1", "im_z1", "re_z2", "im_z2", "phi"]
    assert len(rows) - 1 == len(traj["times"])
    last = [float(x) for x in rows[-1]]
    assert last[0] == pytest.approx(0.2, abs=1e-12)
    assert last[5] == pytest.approx(traj["values"][-1], rel=1e-12)
