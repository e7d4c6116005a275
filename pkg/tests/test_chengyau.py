"""Radial Monge-Ampere solver: closed forms, shooting, boundary limits."""

import csv

import numpy as np
import pytest

from kelab import chengyau, domains, hermgeo, potentials
from kelab.errors import BracketingError, DegenerateMetricError, ResolutionError
from kelab.chengyau import (
    RadialPotential,
    ball_center_value,
    ball_closed_form,
    boundary_limit_estimate,
    closed_form_field,
    radial_gradient_length,
    radial_ode_residual,
    shoot,
)


def test_residual_vanishes_on_closed_form():
    for (n, K) in [(2, 3.0), (1, 2.0), (3, 4.0)]:
        rp = ball_closed_form(n, K)
        sel = rp.grid[2:-2:4000]
        worst = max(abs(radial_ode_residual(rp, t)) for t in sel)
        assert worst <= 1e-8


def test_residual_poincare_disc():
    # n=1, K=2: amplitude 1, center value 0, phi = -log(1-t)
    rp = ball_closed_form(1, 2.0)
    assert rp.phi[0] == pytest.approx(0.0, abs=1e-15)
    i = len(rp.grid) // 2
    assert abs(radial_ode_residual(rp, rp.grid[i])) <= 1e-8


def test_degenerate_radial_metric():
    rp = RadialPotential(n=2, K=3.0, grid=np.array([0.0, 0.1, 0.2, 0.3]),
                         phi=np.ones(4), dphi=np.zeros(4))
    with pytest.raises(DegenerateMetricError):
        radial_ode_residual(rp, 0.1)
    with pytest.raises(DegenerateMetricError):
        radial_gradient_length(rp, 0.1)


AGREEMENT_CASES = [(1, 1.0), (1, 2.0), (2, 3.0), (3, 4.0), (2, 1.0)]


@pytest.fixture(scope="module")
def solutions():
    return {(n, K): shoot(n, K) for (n, K) in AGREEMENT_CASES}


@pytest.mark.parametrize("n,K", AGREEMENT_CASES)
def test_shoot_recovers_ball_solution(n, K, solutions):
    sol = solutions[(n, K)]
    assert abs(sol.phi[0] - ball_center_value(n, K)) <= 1e-6
    exact = ball_closed_form(n, K, grid=sol.grid)
    assert np.max(np.abs(sol.phi - exact.phi)) <= 1e-5
    sel = sol.grid[2:-2:4000]
    assert max(abs(radial_ode_residual(sol, t)) for t in sel) <= 1e-8


def test_shoot_input_validation():
    with pytest.raises(ValueError):
        shoot(2, 3.0, tol=0.0)
    with pytest.raises(ValueError):
        shoot(0, 1.0)
    with pytest.raises(BracketingError):
        shoot(2, 3.0, phi0_bracket=(1.0, 3.0))  # both ends super-critical
    with pytest.raises(BracketingError):
        shoot(2, 3.0, phi0_bracket=(-3.0, -1.0))  # both ends sub-critical


def test_radial_gradient_length_examples():
    rp = ball_closed_form(2, 3.0)  # amplitude 1
    assert radial_gradient_length(rp, rp.grid[0]) == pytest.approx(0.0, abs=1e-12)
    i = int(np.searchsorted(rp.grid, 0.81))
    t = rp.grid[i]
    assert radial_gradient_length(rp, t) == pytest.approx(t, abs=1e-7)


def test_boundary_limit_closed_form():
    limit, gap = boundary_limit_estimate(ball_closed_form(2, 3.0))
    assert limit == pytest.approx(1.0, abs=1e-6)
    assert abs(gap) <= 1e-6


def test_boundary_limit_from_solver(solutions):
    limit, gap = boundary_limit_estimate(solutions[(2, 3.0)])
    assert abs(limit - 1.0) <= 0.02
    limit1, _ = boundary_limit_estimate(solutions[(1, 1.0)])
    assert abs(limit1 - 2.0) <= 0.04


def test_boundary_limit_needs_fine_grid():
    rp = ball_closed_form(2, 3.0)
    coarse = RadialPotential(n=2, K=3.0, grid=rp.grid[:100],
                             phi=rp.phi[:100], dphi=rp.dphi[:100])
    with pytest.raises(ResolutionError):
        boundary_limit_estimate(coarse)


def test_gradient_length_consistent_with_frames():
    """The radial closed form and the full tensor machinery agree."""
    n, K = 2, 3.0
    rp = ball_closed_form(n, K)
    field = closed_form_field(n, K)
    for t in (0.04, 0.25, 0.49, 0.81):
        i = int(np.searchsorted(rp.grid, t))
        tg = rp.grid[i]
        z = np.zeros(n, dtype=complex)
        z[0] = np.sqrt(tg)
        frame = hermgeo.metric_from_potential(field, z)
        full = hermgeo.gradient_length_sq(field, frame)
        assert radial_gradient_length(rp, tg) == pytest.approx(full, abs=1e-6)


def test_canonical_potential_round_trip(solutions):
    """(1/K) log det g evaluated from the metric reproduces the solver."""
    n, K = 2, 3.0
    sol = solutions[(n, K)]
    canon = potentials.canonical_potential(domains.ball(n), K)
    for t in (0.09, 0.36, 0.64):
        i = int(np.searchsorted(sol.grid, t))
        tg = sol.grid[i]
        z = np.zeros(n, dtype=complex)
        z[0] = np.sqrt(tg)
        assert canon(z) == pytest.approx(sol.phi[i], abs=1e-5)


def test_solution_csv(tmp_path):
    rp = ball_closed_form(1, 2.0)
    path = tmp_path / "radial.csv"
    chengyau.solution_to_csv(rp, path, stride=1)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "phi", "dphi", "gradient_length"]
    assert len(rows) == len(rp.grid) + 1
    mid = len(rows) // 2
    t, phi, dphi, grad = (float(x) for x in rows[mid])
    assert phi == pytest.approx(-np.log1p(-t), abs=1e-12)
    assert grad == pytest.approx(t, abs=1e-6)
    # default thinning keeps the endpoints and a manageable row count
    thin = tmp_path / "thin.csv"
    chengyau.solution_to_csv(rp, thin)
    with open(thin) as fh:
        thin_rows = list(csv.reader(fh))
    assert 3 <= len(thin_rows) <= 2500
    assert float(thin_rows[-1][0]) == pytest.approx(rp.grid[-1], abs=1e-15)
