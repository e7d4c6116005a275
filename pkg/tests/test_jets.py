"""Derivative engine: finite-difference oracle vs closed forms."""

import numpy as np
import pytest

from kelab import domains, potentials
from kelab.errors import EvaluationError, UnsupportedOrderError
from kelab.field import PotentialField
from kelab.jets import analytic_jet, as_point, fd_jet
from kelab.sampling import sample_interior


def quadratic(z):
    return float(np.sum(np.abs(z) ** 2))


def test_fd_jet_quadratic_center():
    jet = fd_jet(quadratic, np.zeros(2, complex), 2)
    for a in range(2):
        for b in range(2):
            assert jet.d((a,), (b,)) == pytest.approx(1.0 if a == b else 0.0, abs=1e-9)
            assert abs(jet.d((a, b), ())) < 1e-9


def test_fd_jet_ball_log_first_derivative():
    # d/dz1 of -log(1-|z|^2) at (0.5, 0) is zbar1/(1-|z|^2) = 0.5/0.75
    def f(z):
        return -float(np.log(1.0 - np.sum(np.abs(z) ** 2)))

    jet = fd_jet(f, np.array([0.5, 0.0], dtype=complex), 1)
    assert jet.d((0,), ()) == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_fd_jet_constant_function():
    jet = fd_jet(lambda z: 4.25, np.array([0.1 + 0.2j]), 3)
    for (a, b), val in jet.derivs.items():
        if a or b:
            assert abs(val) < 1e-10


def test_fd_jet_rejects_bad_order_and_step():
    with pytest.raises(ValueError):
        fd_jet(quadratic, np.zeros(2, complex), 0)
    with pytest.raises(ValueError):
        fd_jet(quadratic, np.zeros(2, complex), 5)
    with pytest.raises(ValueError):
        fd_jet(quadratic, np.zeros(2, complex), 2, step=0.0)


def test_fd_jet_reports_bad_stencil_point():
    def f(z):
        v = 0.09 - abs(z[0]) ** 2
        if v <= 0:
            return float("nan")
        return -float(np.log(v))

    with pytest.raises(EvaluationError):
        fd_jet(f, np.array([0.29999 + 0.0j]), 2, step=1e-3)


def test_analytic_ball_gradient():
    p = domains.ke_potential(domains.ball(2), 3.0)  # phi_rho for n = 2
    jet = analytic_jet(p, np.array([0.3, 0.4], dtype=complex), 1)
    assert jet.d((0,), ()) == pytest.approx(0.3 / 0.75, abs=1e-14)
    assert jet.d((1,), ()) == pytest.approx(8.0 / 15.0, abs=1e-14)


def test_analytic_order_zero_is_value():
    p = potentials.rescaled_ball_potential(2, 3.0)
    z = np.array([0.2 + 0.1j, -0.3j])
    assert analytic_jet(p, z, 0).value() == pytest.approx(p(z), abs=0)


def test_type_i_metric_at_origin_is_exponent_times_identity():
    d = domains.type_i(2, 2)
    p = domains.bergman_potential(d)
    jet = analytic_jet(p, np.zeros(4, complex), 2)
    np.testing.assert_allclose(jet.mixed_hessian(), 4.0 * np.eye(4), atol=1e-14)


def test_unsupported_order_raises():
    p = domains.bergman_potential(domains.type_i(2, 2))  # closed form to 3
    with pytest.raises(UnsupportedOrderError):
        analytic_jet(p, np.zeros(4, complex), 4)


def _closed_form_potentials():
    return [
        domains.bergman_potential(domains.ball(2)),
        domains.bergman_potential(domains.ball(3)),
        domains.bergman_potential(domains.polydisc(2)),
        domains.bergman_potential(domains.type_i(2, 2)),
        domains.bergman_potential(domains.type_ii(3)),
        domains.bergman_potential(domains.type_iii(2)),
        domains.bergman_potential(domains.type_iv(3)),
        potentials.rescaled_ball_potential(2, 3.0),
        potentials.rescaled_ball_potential(3, 4.0),
        potentials.kai_ohsawa_potential(domains.polydisc(2)),
        potentials.quadratic_fixture(2),
    ]


@pytest.mark.parametrize("p", _closed_form_potentials(), ids=lambda p: p.label)
def test_oracle_agreement_low_orders(p):
    """Closed forms match the FD oracle to 1e-6 at orders <= 2.

    Points keep a small margin from the boundary (shrink 0.9): the
    truncation term of the default-step stencil grows with the sixth
    derivative, which blows up near the rim.
    """
    rng = np.random.default_rng(11)
    pts = sample_interior(p.domain, rng, 100, shrink=0.9)
    worst = 0.0
    for z in pts:
        ja = p.analytic_jet(z, 2)
        jf = fd_jet(p, z, 2)
        worst = max(worst, max(abs(ja.derivs[k] - jf.derivs[k]) for k in ja.derivs))
    assert worst <= 1e-6


@pytest.mark.parametrize("p", _closed_form_potentials(), ids=lambda p: p.label)
def test_oracle_agreement_high_orders(p):
    """Orders 3-4 agree to 1e-3 at moderate interior points."""
    rng = np.random.default_rng(12)
    pts = sample_interior(p.domain, rng, 20, shrink=0.55)
    worst = 0.0
    for z in pts:
        order = min(4, p.analytic_order)
        ja = p.analytic_jet(z, order)
        jf = fd_jet(p, z, order)
        worst = max(worst, max(abs(ja.derivs[k] - jf.derivs[k]) for k in ja.derivs))
    assert worst <= 1e-3


def test_conjugation_symmetry():
    p = domains.bergman_potential(domains.type_iii(2))
    rng = np.random.default_rng(4)
    for z in sample_interior(p.domain, rng, 10):
        assert p.analytic_jet(z, 3).conjugation_defect() == 0.0
        assert fd_jet(p, z, 2).conjugation_defect() <= 1e-10
    q = domains.bergman_potential(domains.type_iv(3))
    z = sample_interior(q.domain, np.random.default_rng(5), 1)[0]
    assert q.analytic_jet(z, 4).conjugation_defect() == 0.0


def test_linearity_of_analytic_jets():
    d = domains.ball(2)
    p1 = domains.bergman_potential(d)
    p2 = potentials.rescaled_ball_potential(2, 3.0)
    from kelab.field import combine

    c1, c2 = 0.7, -1.3
    combo = combine(d, np.nan, [(c1, p1), (c2, p2)], 4, "combo")
    z = np.array([0.25 + 0.05j, -0.3 + 0.2j])
    j1, j2, jc = p1.analytic_jet(z, 3), p2.analytic_jet(z, 3), combo.analytic_jet(z, 3)
    for key in jc.derivs:
        expected = c1 * j1.derivs[key] + c2 * j2.derivs[key]
        assert abs(jc.derivs[key] - expected) <= 1e-12


def test_multi_indices_stored_sorted():
    p = domains.bergman_potential(domains.ball(2))
    jet = p.analytic_jet(np.array([0.1, 0.2j]), 3)
    for a, b in jet.derivs:
        assert tuple(sorted(a)) == a
        assert tuple(sorted(b)) == b
    # accessors normalize the order
    assert jet.d((1, 0), ()) == jet.d((0, 1), ())


def test_as_point_validation():
    with pytest.raises(ValueError):
        as_point([])
    with pytest.raises(ValueError):
        as_point([np.nan + 0j])
    z = as_point([1, 2.0])
    assert z.dtype == complex and len(z) == 2


def test_jet_dispatch_above_analytic_order_uses_fd():
    p = domains.bergman_potential(domains.type_i(2, 2))  # closed form to 3
    z = np.array([0.2 + 0.1j, 0.05, -0.1j, 0.15 - 0.05j])
    jet = p.jet(z, 4)  # silently served by the FD oracle
    assert jet.order == 4
    ja = p.analytic_jet(z, 3)
    shared = max(abs(jet.derivs[k] - ja.derivs[k]) for k in ja.derivs)
    assert shared <= 1e-3


def test_fd_only_potential_falls_back():
    base = potentials.rescaled_ball_potential(2, 3.0)
    fd_only = PotentialField(
        domain=base.domain, ricci_constant=3.0, parts=None,
        analytic_order=0, label="fd-only", fn=base,
    )
    z = np.array([0.2 + 0.1j, 0.1 - 0.2j])
    ja = base.analytic_jet(z, 2)
    jf = fd_only.jet(z, 2)
    worst = max(abs(ja.derivs[k] - jf.derivs[k]) for k in ja.derivs)
    assert worst <= 1e-6
