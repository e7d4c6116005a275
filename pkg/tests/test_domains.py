"""Domain catalog: invariants, norms, membership, Cayley transform."""

import numpy as np
import pytest

from kelab import domains
from kelab.domains import (
    EXCEPTIONAL_INVARIANTS,
    ball,
    bergman_potential,
    cayley,
    cayley_inverse,
    from_json,
    generic_norm,
    halfplane_kernel,
    halfplane_product,
    ke_potential,
    polydisc,
    product,
    siegel_contains,
    siegel_log_kernel_on_polydisc_slice,
    siegel_pullback_slice_derivative,
    type_i,
    type_ii,
    type_iii,
    type_iv,
)
from kelab.errors import (
    MembershipError,
    SingularTransformError,
    UnsupportedDomainError,
    UnsupportedPointError,
)
from kelab import hermgeo
from kelab.sampling import sample_interior


@pytest.mark.parametrize("d,c,n,r", [
    (type_i(2, 2), 4.0, 4, 2),
    (type_i(2, 3), 5.0, 6, 2),
    (type_i(1, 4), 5.0, 4, 1),
    (type_ii(4), 6.0, 6, 2),
    (type_ii(5), 8.0, 10, 2),
    (type_iii(2), 3.0, 3, 2),
    (type_iii(3), 4.0, 6, 3),
    (type_iv(3), 3.0, 3, 2),
    (type_iv(5), 5.0, 5, 2),
    (ball(3), 4.0, 3, 1),
])
def test_invariant_table(d, c, n, r):
    rec = d.invariants()
    assert (rec.c, rec.n, rec.rank) == (c, n, r)


def test_exceptional_rows_have_strict_bound():
    for rec in EXCEPTIONAL_INVARIANTS:
        assert rec.rc > rec.n + 1
    assert EXCEPTIONAL_INVARIANTS[0].rc == 24.0
    assert EXCEPTIONAL_INVARIANTS[1].rc == 54.0


def test_ball_coincides_with_thin_type_i():
    for n in (1, 2, 3, 7):
        a, b = ball(n).invariants(), type_i(1, n).invariants()
        assert (a.c, a.n, a.rank) == (b.c, b.n, b.rank)


def test_size_restrictions():
    with pytest.raises(ValueError):
        type_ii(2)
    with pytest.raises(ValueError):
        type_iv(2)
    with pytest.raises(ValueError):
        type_i(3, 2)


def test_generic_norm_examples():
    assert generic_norm(ball(2), [0.6, 0.0]) == pytest.approx(0.64, abs=1e-15)
    # type IV with |z|^2 = 0.25 and |z.z| = 0.25
    z = np.array([0.5, 0.0, 0.0], dtype=complex)
    assert generic_norm(type_iv(3), z) == pytest.approx(0.5625, abs=1e-15)


@pytest.mark.parametrize("d", [
    ball(2), polydisc(3), type_i(2, 2), type_ii(3), type_iii(2), type_iv(3),
], ids=lambda d: d.label)
def test_norm_normalization_and_boundary(d):
    assert generic_norm(d, np.zeros(d.n, complex)) == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    for z in sample_interior(d, rng, 25):
        assert generic_norm(d, z) > 0
    # the norm decays along a ray approaching the boundary
    z0 = sample_interior(d, np.random.default_rng(3), 1, shrink=0.5)[0]
    radius = max(s for s in np.linspace(1.0, 3.0, 201) if d.contains(z0 * s))
    values = [generic_norm(d, z0 * (radius * f)) for f in (0.9, 0.99, 0.999)]
    assert values[0] > values[1] > values[2]


def test_membership_error_outside():
    with pytest.raises(MembershipError):
        generic_norm(ball(2), [1.2, 0.0])
    with pytest.raises(MembershipError):
        generic_norm(type_iv(3), [0.9, 0.9j, 0.0])


def test_membership_matches_norm_positivity():
    d = type_i(2, 2)
    rng = np.random.default_rng(8)
    hits = 0
    for _ in range(300):
        z = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        Z = domains.as_matrix(d, z)
        eigs = np.linalg.eigvalsh(np.eye(2) - Z @ Z.conj().T)
        inside = bool(eigs[0] > 0)
        assert d.contains(z) == inside
        if inside:
            hits += 1
            assert generic_norm(d, z) > 0
    assert hits > 10


def test_bergman_metric_at_origin():
    cases = [
        (type_i(2, 2), 4.0),
        (ball(2), 3.0),
        (ball(3), 4.0),
        (polydisc(2), 2.0),
    ]
    for d, expected in cases:
        p = bergman_potential(d)
        g = p.analytic_jet(np.zeros(d.n, complex), 2).mixed_hessian()
        np.testing.assert_allclose(g, expected * np.eye(d.n), atol=1e-14)


def test_ke_potential_rescaling():
    d = ball(2)
    # K = n+1 gives the defining-function potential with length law |z|^2
    p = ke_potential(d, 3.0)
    z = np.array([0.5 + 0.1j, -0.2 + 0.3j])
    frame = hermgeo.metric_from_potential(p, z)
    assert hermgeo.gradient_length_sq(p, frame) == pytest.approx(
        float(np.sum(np.abs(z) ** 2)), abs=1e-12
    )
    # K = K' is the identity transformation
    p1 = ke_potential(d, 1.0)
    p0 = bergman_potential(d)
    assert p1(z) == pytest.approx(p0(z), abs=1e-14)
    assert p1.ricci_constant == 1.0


def test_cayley_polydisc_center():
    d = polydisc(3)
    w = cayley(d, np.zeros(3, complex))
    np.testing.assert_allclose(w, -np.ones(3), atol=0)
    assert siegel_contains(d, w)


def test_cayley_round_trip():
    # inverse-forward on the half-plane side
    d = ball(1)
    w = np.array([-1.0 + 0.7j])
    z = cayley_inverse(d, w)
    assert d.contains(z)
    np.testing.assert_allclose(cayley(d, z), w, atol=1e-12)
    # forward-inverse at interior ball points
    d3 = ball(3)
    rng = np.random.default_rng(5)
    for z in sample_interior(d3, rng, 10):
        w = cayley(d3, z)
        assert siegel_contains(d3, w)
        np.testing.assert_allclose(cayley_inverse(d3, w), z, atol=1e-12)


def test_cayley_boundary_limit():
    d = polydisc(1)
    for radius in (0.9, 0.99, 0.999):
        w = cayley(d, np.array([radius + 0j]))
        assert w[0].real < 0
    assert abs(cayley(d, np.array([0.999 + 0j]))[0].real) < 1e-3


def test_cayley_singular_point():
    with pytest.raises(MembershipError):
        cayley(polydisc(1), np.array([-1.0 + 0j]))
    near = np.array([-1.0 + 1e-15j])
    with pytest.raises((SingularTransformError, MembershipError)):
        cayley(polydisc(1), near)
    with pytest.raises(UnsupportedDomainError):
        cayley(type_i(2, 2), np.zeros(4, complex))


def test_halfplane_kernel_values():
    assert halfplane_kernel(-1.0) == pytest.approx(0.5)
    assert halfplane_kernel(-0.5) == pytest.approx(2.0)
    assert halfplane_kernel(-1.0 + 5.0j) == pytest.approx(0.5)
    with pytest.raises(MembershipError):
        halfplane_kernel(0.5)
    with pytest.raises(MembershipError):
        halfplane_kernel(0.0)


def test_siegel_slice_kernel():
    disk = polydisc(1)
    val = siegel_log_kernel_on_polydisc_slice(disk, np.array([-1.0 + 0j]))
    assert val == pytest.approx(np.log(0.5), abs=1e-15)
    # additivity over equal slice factors
    d2 = polydisc(2)
    w = np.array([-0.7 + 0.2j, -0.7 + 0.2j])
    two = siegel_log_kernel_on_polydisc_slice(d2, w)
    one = siegel_log_kernel_on_polydisc_slice(disk, w[:1])
    assert two == pytest.approx(2 * one, abs=1e-14)


def test_siegel_slice_rejects_off_slice():
    d = ball(3)
    with pytest.raises(UnsupportedPointError):
        siegel_log_kernel_on_polydisc_slice(d, np.array([-1.0, 0.1, 0.0]))
    with pytest.raises(MembershipError):
        siegel_log_kernel_on_polydisc_slice(d, np.array([1.0, 0.0, 0.0]))


def test_siegel_slice_derivative_closed_form():
    for d in (ball(2), ball(3), polydisc(2)):
        for alpha in range(d.rank):
            val = siegel_pullback_slice_derivative(d, alpha)
            assert val == pytest.approx(d.c, abs=1e-14)


def test_product_invariants():
    d = product(ball(2), polydisc(2))
    assert d.n == 4
    assert d.rank == 3
    z = np.array([0.1 + 0.2j, 0.0, 0.3, -0.4j])
    expected = generic_norm(ball(2), z[:2]) * generic_norm(polydisc(2), z[2:])
    assert generic_norm(d, z) == pytest.approx(expected, abs=1e-15)


def test_serialization_round_trip():
    for d in (ball(3), polydisc(2), type_i(2, 3), type_ii(4), type_iii(2),
              type_iv(4), halfplane_product(2), product(ball(1), ball(2))):
        again = from_json(d.to_json())
        assert again.label == d.label
        assert (again.n, again.rank, again.c) == (d.n, d.rank, d.c)
    with pytest.raises(UnsupportedDomainError):
        from_json({"kind": "dodecahedron"})


def test_halfplane_product_potential_is_einstein():
    d = halfplane_product(2)
    p = bergman_potential(d)
    rng = np.random.default_rng(2)
    for w in sample_interior(d, rng, 3):
        assert hermgeo.einstein_residual(p, w) <= 1e-6


def test_product_kernel_potential_is_einstein():
    """Products of heterogeneous factors keep the Einstein normalization."""
    d = product(type_i(2, 2), ball(1))
    p = bergman_potential(d)
    rng = np.random.default_rng(7)
    for z in sample_interior(d, rng, 3, shrink=0.7):
        assert hermgeo.einstein_residual(p, z) <= 1e-6
