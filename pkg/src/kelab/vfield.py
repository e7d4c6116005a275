"""The holomorphic vector field of a constant-gradient-length potential.

For a potential phi of a metric with Ricci constant K the construction is

    V = i e^(K phi / (n+1)) grad(phi),      grad(phi) = phi^a d/dz^a.

When |dphi|_half^2 is identically (n+1)/K the field is holomorphic and
nowhere vanishing; its real part generates a 1-parameter isometry group.
``dbar_defect`` measures |nabla'' V|^2 for any potential (it is the
diagnostic that vanishes exactly in the certified case), and
``integrate_flow`` follows the real fields

    Re W:  dz/dt = i phi^a(z)          (tangent to the level sets of phi)
    Re V:  dz/dt = i e^(K phi/(n+1)) phi^a(z)

with fixed-step RK4.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import hermgeo
from .errors import CertificateError, FlowExitError
from .jets import as_point

MAX_HORIZON = 10.0


@dataclass(frozen=True)
class VectorFieldAt:
    """Components V^a (including the factor i) and norm data at a point."""

    point: np.ndarray
    components: np.ndarray
    norm: float  # |V|_omega = e^(K phi/(n+1)) |dphi|_half


def _gradient_parts(p, z, order=2):
    frame = hermgeo.metric_from_potential(p, z, order=order)
    phi_z = frame.jet.holo_gradient()
    phi_up = frame.raise_index(phi_z)
    return frame, phi_z, phi_up


def _exp_factor(p, value):
    n = p.domain.n
    return float(np.exp(p.ricci_constant * value / (n + 1)))


def vector_field(p, z, require_certificate: bool = True) -> VectorFieldAt:
    """V at z.  By default the potential must carry a passing certificate
    of constant gradient length; the construction is only guaranteed to be
    holomorphic in that case."""
    if require_certificate:
        cert = getattr(p, "certificate", None)
        if cert is None:
            raise CertificateError(
                f"{p.label} has no constant-gradient-length certificate"
            )
        cert.require()
    z = as_point(z)
    frame, phi_z, phi_up = _gradient_parts(p, z)
    factor = _exp_factor(p, frame.jet.value())
    length = float(np.sqrt(max(hermgeo.gradient_length_sq(p, frame), 0.0)))
    return VectorFieldAt(
        point=z,
        components=1j * factor * phi_up,
        norm=factor * length,
    )


def dbar_defect(p, z) -> float:
    """|nabla'' V|^2 at z, from

        V^a_{;bbar} = e^(K phi/(n+1)) ( (K/(n+1)) phi_bbar phi^a
                                        + g^{a mbar} conj(phi_{m;b}) ).

    Works for any potential (no certificate needed): for non-constant
    gradient length it measures how far the construction is from being
    holomorphic at z.
    """
    z = as_point(z)
    frame = hermgeo.metric_from_potential(p, z, order=3)
    phi_z = frame.jet.holo_gradient()
    phi_up = frame.raise_index(phi_z)
    n = frame.dim
    K = p.ricci_constant
    H = hermgeo.covariant_hessian(p, frame)
    raised_conj_hessian = frame.g_inv.T @ np.conj(H)  # [a, b] = g^{a mbar} conj(H[m, b])
    T = (K / (n + 1)) * np.outer(phi_up, np.conj(phi_z)) + raised_conj_hessian
    factor = _exp_factor(p, frame.jet.value())
    T = factor * T
    # |T|^2 with the upper index lowered by g and the barred one raised:
    val = np.sum(frame.g * (T @ frame.g_inv @ T.conj().T))
    return float(np.real(val))


def dbar_defect_closed_form(p, z) -> float:
    """e^(2K phi/(n+1)) ((K/(n+1)) |dphi|_half^2 - 1)^2 at z.

    Equals ``dbar_defect`` exactly when the gradient length is the constant
    (n+1)/K (both sides are then zero, via the eigenvector identity); for
    other potentials it is a formal expression, not the actual defect.
    """
    z = as_point(z)
    frame = hermgeo.metric_from_potential(p, z, order=2)
    L = hermgeo.gradient_length_sq(p, frame)
    n = frame.dim
    K = p.ricci_constant
    return float(
        _exp_factor(p, frame.jet.value()) ** 2 * (K / (n + 1) * L - 1.0) ** 2
    )


def level_set_tangency(p, z) -> float:
    """|(Re W) phi| at z with W = i grad(phi): i (phi^a phi_a) - conj(...).

    Algebraically zero for every potential since phi^a phi_a is real; the
    return value is pure floating-point noise.
    """
    z = as_point(z)
    frame, phi_z, phi_up = _gradient_parts(p, z)
    a = complex(np.sum(phi_up * phi_z))
    return float(abs(1j * a - 1j * np.conj(a)))


# ---------------------------------------------------------------------------
# flows

def _velocity(p, generator):
    K = p.ricci_constant
    n = p.domain.n

    if generator == "re_w":
        def vel(z):
            frame, phi_z, phi_up = _gradient_parts(p, z)
            return 1j * phi_up
    elif generator == "re_v":
        def vel(z):
            frame, phi_z, phi_up = _gradient_parts(p, z)
            return 1j * np.exp(K * frame.jet.value() / (n + 1)) * phi_up
    else:
        raise ValueError(f"unknown generator {generator!r}; use re_w or re_v")
    return vel


def integrate_flow(p, z0, t: float, dt: float = 1e-3,
                   generator: str = "re_w") -> np.ndarray:
    """Endpoint of the RK4 trajectory of Re W or Re V from z0.

    The membership of every accepted step is checked; leaving the domain
    raises ``FlowExitError`` with the exit time.
    """
    traj = flow_trajectory(p, z0, t, dt=dt, generator=generator,
                           record_every=0)
    return traj["points"][-1]


def flow_trajectory(p, z0, t: float, dt: float = 1e-3,
                    generator: str = "re_w", record_every: int = 1) -> dict:
    """Integrate and optionally record the trajectory.

    Returns {"times": array, "points": list of coordinate vectors,
    "values": array of phi along the way}.  ``record_every=0`` records
    only the endpoints.
    """
    z0 = as_point(z0)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if abs(t) > MAX_HORIZON:
        raise ValueError(f"|t| capped at {MAX_HORIZON} (requested {t})")
    d = p.domain
    if not d.contains(z0):
        raise FlowExitError(f"initial point {z0!r} outside {d.label}", 0.0)
    vel = _velocity(p, generator)
    steps = int(round(abs(t) / dt))
    h = (t / steps) if steps else 0.0

    times = [0.0]
    points = [z0.copy()]
    values = [p(z0)]
    z = z0.copy()
    for k in range(steps):
        k1 = vel(z)
        k2 = vel(z + 0.5 * h * k1)
        k3 = vel(z + 0.5 * h * k2)
        k4 = vel(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        tk = (k + 1) * h
        if not d.contains(z):
            raise FlowExitError(
                f"trajectory left {d.label} at t={tk:.6f}", tk
            )
        if record_every and ((k + 1) % record_every == 0 or k + 1 == steps):
            times.append(tk)
            points.append(z.copy())
            values.append(p(z))
    if not record_every:
        times.append(steps * h)
        points.append(z.copy())
        values.append(p(z))
    return {"times": np.array(times), "points": points,
            "values": np.array(values)}


def trajectory_to_csv(traj: dict, path) -> None:
    """Write (t, Re z^1, Im z^1, ..., phi) rows."""
    n = len(traj["points"][0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["t"]
        for a in range(n):
            header += [f"re_z{a + 1}", f"im_z{a + 1}"]
        header.append("phi")
        writer.writerow(header)
        for t, z, v in zip(traj["times"], traj["points"], traj["values"]):
            row = [f"{t:.10g}"]
            for a in range(n):
                row += [f"{z[a].real:.17g}", f"{z[a].imag:.17g}"]
            row.append(f"{v:.17g}")
            writer.writerow(row)


def pullback_metric_deviation(p, z0, t: float, dt: float = 1e-3,
                              jac_step: float = 1e-4) -> float:
    """max entrywise |(flow_t)^* g - g| at z0 for the Re V flow.

    The flow of a holomorphic field is holomorphic in the initial point,
    so its complex Jacobian J (by central differences) suffices:
    (flow^* g)_{a bbar} = J^T g(flow(z)) conj(J).
    """
    z0 = as_point(z0)
    n = len(z0)

    def flow(z):
        return integrate_flow(p, z, t, dt=dt, generator="re_v")

    J = np.zeros((n, n), dtype=complex)
    for b in range(n):
        zp = z0.copy()
        zp[b] += jac_step
        zm = z0.copy()
        zm[b] -= jac_step
        J[:, b] = (flow(zp) - flow(zm)) / (2.0 * jac_step)

    g0 = hermgeo.metric_from_potential(p, z0, order=2).g
    g1 = hermgeo.metric_from_potential(p, flow(z0), order=2).g
    pulled = J.T @ g1 @ np.conj(J)
    return float(np.max(np.abs(pulled - g0)))


def reparametrization_deviation(p, z0, t: float, dt: float = 1e-3) -> float:
    """|flow_V(t, z0) - flow_W(s t, z0)| with s = e^(K c/(n+1)), c = phi(z0).

    Both flows stay on the level set {phi = c}, where V = s W, so the
    trajectories coincide up to the constant time rescaling.
    """
    z0 = as_point(z0)
    s = _exp_factor(p, p(z0))
    end_v = integrate_flow(p, z0, t, dt=dt, generator="re_v")
    end_w = integrate_flow(p, z0, s * t, dt=dt, generator="re_w")
    return float(np.max(np.abs(end_v - end_w)))
