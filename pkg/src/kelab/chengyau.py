"""Radially reduced Kaehler-Einstein solver on circular domains.

For a radial potential phi = phi(t), t = |z|^2, the complex Hessian has
eigenvalues phi' (n-1 times) and phi' + t phi'', so the canonical-potential
normalization phi = (1/K) log det g becomes the scalar ODE

    (n-1) log phi'(t) + log(phi'(t) + t phi''(t)) = K phi(t),

with the regular-singular start phi'(0) = exp(K phi(0) / n) forced at
t = 0.  The complete solution blows up exactly at t = 1; ``shoot`` finds
it by bisecting phi(0) against the blow-up location.  On the ball the
closed form is

    phi(t) = -A log(1 - t) + (n/K) log A,      A = (n+1)/K,

and the radial gradient length t phi'^2 / (phi' + t phi'') equals A t,
so its boundary limit is (n+1)/K.

Integration runs in tau = -log(1 - t): the grid is geometric in (1 - t),
which both resolves the logarithmic blow-up and keeps the independent
finite-difference check of the ODE residual at ~dtau^2 accuracy all the
way to the boundary.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketingError, DegenerateMetricError, ResolutionError
from .domains import ball
from .field import LogProfile, PotentialField, RadialBlock

BLOWUP_THRESHOLD = 1e8
_SERIES_START = 1e-4     # switch from the t ~ 0 series to RK4
_SEARCH_DTAU = 5e-4      # bisection-phase step
_FINE_DTAU = 5e-5        # returned-solution step
_FINAL_EDGE = 2e-4       # returned grid reaches t = 1 - _FINAL_EDGE
_SEARCH_TAU = -math.log(_FINAL_EDGE)   # bisection integrates this far


class _BlowUp(Exception):
    """Internal: a trajectory left the representable range."""


@dataclass(frozen=True)
class RadialPotential:
    """Grid solution phi(t), phi'(t) on [0, 1)."""

    n: int
    K: float
    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray

    def index_of(self, t: float) -> int:
        i = int(np.searchsorted(self.grid, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(self.grid) and abs(self.grid[j] - t) <= 1e-12:
                return j
        raise ValueError(f"t={t!r} is not a grid point")

    @property
    def amplitude_target(self) -> float:
        return (self.n + 1) / self.K


def ball_amplitude(n: int, K: float) -> float:
    return (n + 1) / K


def ball_center_value(n: int, K: float) -> float:
    """phi(0) of the complete radial solution: (n/K) log((n+1)/K)."""
    return (n / K) * math.log(ball_amplitude(n, K))


def _geometric_grid(edge: float, dtau: float) -> np.ndarray:
    """t-grid 1 - exp(-tau), tau uniform from the series start to -log(edge)."""
    tau0 = -math.log1p(-_SERIES_START)
    tau_max = -math.log(edge)
    taus = np.arange(tau0, tau_max + dtau, dtau)
    return 1.0 - np.exp(-taus)


def ball_closed_form(n: int, K: float, grid=None) -> RadialPotential:
    """The exact solution sampled on a grid (default: the solver's grid)."""
    A = ball_amplitude(n, K)
    B = ball_center_value(n, K)
    if grid is None:
        grid = np.concatenate(([0.0], _geometric_grid(_FINAL_EDGE, _FINE_DTAU)))
    grid = np.asarray(grid, dtype=float)
    phi = -A * np.log1p(-grid) + B
    dphi = A / (1.0 - grid)
    return RadialPotential(n=n, K=K, grid=grid, phi=phi, dphi=dphi)


def closed_form_field(n: int, K: float) -> PotentialField:
    """The radial solution as an analytic potential on the ball in C^n."""
    A = ball_amplitude(n, K)
    B = ball_center_value(n, K)
    return PotentialField(
        domain=ball(n),
        ricci_constant=K,
        parts=[(1.0, RadialBlock(range(n), LogProfile(A, offset=B)))],
        analytic_order=4,
        label=f"radial-closed-form[n={n},K={K:g}]",
    )


# ---------------------------------------------------------------------------
# derivatives on the (non-uniform) grid

def _dphi_dt_at(rp: RadialPotential, i: int) -> float:
    """phi''(t_i) by differentiating the stored phi' grid (independent of
    the ODE, so residuals below are genuine checks)."""
    t, f = rp.grid, rp.dphi
    m = len(t)
    if m < 3:
        raise ResolutionError("need at least 3 grid points for derivatives")
    if i == 0:
        i = 1
        h1, h2 = t[1] - t[0], t[2] - t[1]
        return (
            -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0]
            + (h1 + h2) / (h1 * h2) * f[1]
            - h1 / (h2 * (h1 + h2)) * f[2]
        )
    if i == m - 1:
        h1, h2 = t[m - 2] - t[m - 3], t[m - 1] - t[m - 2]
        return (
            h2 / (h1 * (h1 + h2)) * f[m - 3]
            - (h1 + h2) / (h1 * h2) * f[m - 2]
            + (h1 + 2 * h2) / (h2 * (h1 + h2)) * f[m - 1]
        )
    h1, h2 = t[i] - t[i - 1], t[i + 1] - t[i]
    return (
        -h2 / (h1 * (h1 + h2)) * f[i - 1]
        + (h2 - h1) / (h1 * h2) * f[i]
        + h1 / (h2 * (h1 + h2)) * f[i + 1]
    )


def radial_ode_residual(rp: RadialPotential, t: float) -> float:
    """(n-1) log phi' + log(phi' + t phi'') - K phi at a grid point."""
    i = rp.index_of(t)
    dp = rp.dphi[i]
    ddp = _dphi_dt_at(rp, i)
    radial_dir = dp + t * ddp
    if dp <= 0 or radial_dir <= 0:
        raise DegenerateMetricError(
            f"radial metric degenerate at t={t}: phi'={dp}, "
            f"phi'+t phi''={radial_dir}"
        )
    return float(
        (rp.n - 1) * math.log(dp) + math.log(radial_dir) - rp.K * rp.phi[i]
    )


def radial_gradient_length(rp: RadialPotential, t: float) -> float:
    """t phi'^2 / (phi' + t phi''), the gradient length of the radial
    potential in its own metric."""
    i = rp.index_of(t)
    dp = rp.dphi[i]
    ddp = _dphi_dt_at(rp, i)
    radial_dir = dp + t * ddp
    if dp <= 0 or radial_dir <= 0:
        raise DegenerateMetricError(
            f"radial metric degenerate at t={t}: phi'={dp}, "
            f"phi'+t phi''={radial_dir}"
        )
    return float(t * dp * dp / radial_dir)


def boundary_limit_estimate(rp: RadialPotential) -> tuple[float, float]:
    """(extrapolated t->1 limit of the gradient length, gap to (n+1)/K).

    Linear Richardson over the last grid decade: the limit of L(1-u) as
    u -> 0 is estimated from u and u/2.
    """
    t_end = rp.grid[-1]
    if t_end < 1.0 - 1e-3:
        raise ResolutionError(
            f"grid ends at t={t_end:.6f}; need at least 1 - 1e-3"
        )
    u = 10.0 * (1.0 - t_end)
    i1 = int(np.searchsorted(rp.grid, 1.0 - u))
    i2 = int(np.searchsorted(rp.grid, 1.0 - u / 2.0))
    if i1 >= i2 or i2 >= len(rp.grid):
        raise ResolutionError("too few grid points in the last decade")
    t1, t2 = rp.grid[i1], rp.grid[i2]
    L1 = radial_gradient_length(rp, t1)
    L2 = radial_gradient_length(rp, t2)
    u1, u2 = 1.0 - t1, 1.0 - t2
    # linear model L(1-u) = L* - c u through the two samples
    limit = (L2 * u1 - L1 * u2) / (u1 - u2)
    return float(limit), float(limit - rp.amplitude_target)


# ---------------------------------------------------------------------------
# shooting

def _rhs(n, K, t, phi, psi):
    """phi'' from the ODE; psi = phi'."""
    if K * phi > 690.0 or psi <= 0.0:
        raise _BlowUp
    return (math.exp(K * phi) * psi ** (1.0 - n) - psi) / t


def _series_start(n, K, phi0):
    """phi, phi' at t = _SERIES_START from the center expansion."""
    p1 = math.exp(K * phi0 / n)
    p2 = K * p1 * p1 / (2.0 * (n + 1))
    d = _SERIES_START
    return phi0 + p1 * d + p2 * d * d, p1 + 2.0 * p2 * d


def _integrate(n, K, phi0, dtau, tau_end, record=False):
    """RK4 in tau = -log(1-t).  Returns (blow_up_tau or None, arrays).

    State y = (phi, psi); dy/dtau = (1-t) * (psi, rhs).
    """
    tau = -math.log1p(-_SERIES_START)
    phi, psi = _series_start(n, K, phi0)
    taus = [tau]
    phis = [phi]
    psis = [psi]

    def f(tau_c, phi_c, psi_c):
        t = 1.0 - math.exp(-tau_c)
        om = 1.0 - t
        return om * psi_c, om * _rhs(n, K, t, phi_c, psi_c)

    steps = int(math.ceil((tau_end - tau) / dtau))
    for _ in range(steps):
        h = dtau
        try:
            k1 = f(tau, phi, psi)
            k2 = f(tau + 0.5 * h, phi + 0.5 * h * k1[0], psi + 0.5 * h * k1[1])
            k3 = f(tau + 0.5 * h, phi + 0.5 * h * k2[0], psi + 0.5 * h * k2[1])
            k4 = f(tau + h, phi + h * k3[0], psi + h * k3[1])
        except (_BlowUp, OverflowError):
            return tau, (taus, phis, psis)
        phi += (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        psi += (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        tau += h
        if record:
            taus.append(tau)
            phis.append(phi)
            psis.append(psi)
        if not math.isfinite(psi) or psi > BLOWUP_THRESHOLD:
            return tau, (taus, phis, psis)
    return None, (taus, phis, psis)


def shoot(n: int, K: float, phi0_bracket=(-1.0, 3.0),
          tol: float = 1e-11) -> RadialPotential:
    """Find the complete radial solution by bisection on phi(0).

    A candidate phi(0) is classified super-critical when phi' crosses the
    blow-up threshold inside the search window (its blow-up sits at some
    t < 1), or -- for candidates that survive to the window's edge -- when
    the boundary weight w = phi' (1-t) is still growing there: w tends to
    the finite amplitude (n+1)/K on the complete solution, decays for
    sub-critical starts and grows for super-critical ones, so the
    classification boundary is the solution whose blow-up converges to
    t = 1.  Recorded blow-up times must decrease strictly with phi(0),
    the monotonicity bisection relies on.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if K <= 0:
        raise ValueError("Ricci constant must be positive")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi = float(phi0_bracket[0]), float(phi0_bracket[1])
    if not lo < hi:
        raise BracketingError(f"empty bracket {phi0_bracket!r}")

    history = []

    def super_critical(phi0):
        tau_star, (taus, phis, psis) = _integrate(
            n, K, phi0, _SEARCH_DTAU, _SEARCH_TAU, record=True
        )
        history.append((phi0, tau_star))
        if tau_star is not None:
            return True
        w = [p * math.exp(-tau) for tau, p in zip(taus, psis)]
        ia = min(range(len(taus)), key=lambda i: abs(taus[i] - (_SEARCH_TAU - 1.0)))
        return w[-1] > w[ia]

    if super_critical(lo):
        raise BracketingError(
            f"phi(0)={lo} already blows up before t=1; lower the bracket"
        )
    if not super_critical(hi):
        raise BracketingError(
            f"phi(0)={hi} stays complete past t=1; raise the bracket"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if super_critical(mid):
            hi = mid
        else:
            lo = mid
    phi0 = 0.5 * (lo + hi)

    _assert_monotone(history)

    _, (taus, phis, psis) = _integrate(
        n, K, phi0, _FINE_DTAU, -math.log(_FINAL_EDGE), record=True
    )
    grid = 1.0 - np.exp(-np.asarray(taus))
    grid = np.concatenate(([0.0], grid))
    phi = np.concatenate(([phi0], phis))
    dphi = np.concatenate(([math.exp(K * phi0 / n)], psis))
    return RadialPotential(n=n, K=K, grid=grid, phi=phi, dphi=dphi)


def _assert_monotone(history):
    finite = sorted((p0, ts) for p0, ts in history if ts is not None)
    for (a, ta), (b, tb) in zip(finite, finite[1:]):
        if a < b and not tb < ta:
            raise BracketingError(
                f"blow-up location not strictly monotone in phi(0): "
                f"phi0={a}->tau={ta}, phi0={b}->tau={tb}"
            )


def solution_to_csv(rp: RadialPotential, path, stride: int | None = None) -> None:
    """Write (t, phi, dphi, gradient length) rows.

    ``stride=None`` thins the fine solver grid to roughly 2000 rows; pass
    1 to dump every point.
    """
    if stride is None:
        stride = max(1, len(rp.grid) // 2000)
    idx = list(range(0, len(rp.grid), stride))
    if idx[-1] != len(rp.grid) - 1:
        idx.append(len(rp.grid) - 1)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "phi", "dphi", "gradient_length"])
        for i in idx:
            t = rp.grid[i]
            L = radial_gradient_length(rp, t) if len(rp.grid) >= 3 else ""
            writer.writerow(
                [f"{t:.17g}", f"{rp.phi[i]:.17g}", f"{rp.dphi[i]:.17g}",
                 f"{L:.17g}" if L != "" else ""]
            )
