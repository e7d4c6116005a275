"""Constructions of the specific potentials the package studies.

* the canonical potential (1/K) log det g of a Kaehler-Einstein metric,
* the rescaled ball potential with identically constant gradient length,
* sums over product domains,
* the pulled-back Siegel log-kernel behind the Kai-Ohsawa constant,
* constant-gradient-length certificates and the ball-minimality table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hermgeo
from .domains import (
    BALL,
    POLYDISC,
    DomainModel,
    InvariantsRecord,
    ball,
    ke_potential,
    product,
)
from .errors import (
    CertificateError,
    NormalizationError,
    UnsupportedDomainError,
)
from .field import (
    ConstantPart,
    LinearLog,
    LinearProfile,
    LogProfile,
    PotentialField,
    RadialBlock,
)
from .jets import as_point
from .sampling import sample_interior


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class ConstantLengthCertificate:
    """Evidence that a potential's gradient length is a constant.

    ``constant`` is the value at the domain's center; ``max_deviation`` the
    worst |length - constant| over the sampled interior points.  A valid
    certificate also respects the Einstein lower bound (n+1)/K.
    """

    label: str
    constant: float
    max_deviation: float
    sample_count: int
    tolerance: float
    seed: int

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance

    def require(self):
        if not self.ok:
            raise CertificateError(
                f"{self.label}: gradient length deviates by "
                f"{self.max_deviation:.3e} > {self.tolerance:.1e}"
            )


def certify_constant_length(p: PotentialField, samples: int = 200,
                            seed: int = 0, tolerance: float = 1e-8,
                            shrink: float = 0.95) -> ConstantLengthCertificate:
    """Sample the gradient length and certify its constancy.

    The certified constant must also satisfy the lower bound (n+1)/K that
    holds for every constant-length potential of a metric with Ricci
    constant K.
    """
    d = p.domain
    rng = np.random.default_rng(seed)
    center = np.zeros(d.n, dtype=complex)
    frame0 = hermgeo.metric_from_potential(p, center)
    constant = hermgeo.gradient_length_sq(p, frame0)
    worst = 0.0
    for z in sample_interior(d, rng, samples, shrink=shrink):
        frame = hermgeo.metric_from_potential(p, z)
        val = hermgeo.gradient_length_sq(p, frame)
        worst = max(worst, abs(val - constant))
    cert = ConstantLengthCertificate(
        label=p.label, constant=constant, max_deviation=worst,
        sample_count=samples, tolerance=tolerance, seed=seed,
    )
    bound = (d.n + 1) / p.ricci_constant
    if cert.ok and constant < bound - 1e-9:
        raise CertificateError(
            f"{p.label}: certified constant {constant:.12f} violates the "
            f"lower bound (n+1)/K = {bound:.12f}"
        )
    p.certificate = cert
    return cert


# ---------------------------------------------------------------------------
# canonical potential

_CANONICAL_CHECK_SAMPLES = 4
_CANONICAL_CHECK_TOL = 1e-4


def canonical_potential(source, K: float, validate: bool = True,
                        seed: int = 0) -> PotentialField:
    """(1/K) log det g for the Einstein metric with Ricci constant K.

    ``source`` is a domain from the catalog (its kernel potential is
    rescaled to Ricci constant K first) or an explicit ``PotentialField``
    whose metric is taken as is.  The result is evaluated honestly from
    second derivatives of the base potential; it is itself a potential of
    the same metric only when that metric is Einstein, which is validated
    on a few seeded interior points unless ``validate=False``.
    """
    if K <= 0:
        raise ValueError("Ricci constant must be positive")
    if isinstance(source, DomainModel):
        base = ke_potential(source, K)
    else:
        base = source

    d = base.domain

    def fn(z):
        frame = hermgeo.metric_from_potential(base, z, order=2)
        return frame.log_det_g / K

    p = PotentialField(
        domain=d,
        ricci_constant=K,
        parts=None,
        analytic_order=0,
        label=f"canonical[{d.label},K={K:g}]",
        fn=fn,
    )
    if validate:
        _validate_canonical(p, base, K, seed)
    return p


def _validate_canonical(p, base, K, seed):
    """dd^c of the candidate must reproduce the base metric."""
    rng = np.random.default_rng(seed)
    for z in sample_interior(base.domain, rng, _CANONICAL_CHECK_SAMPLES,
                             shrink=0.6):
        g_base = hermgeo.metric_from_potential(base, z, order=2).g
        g_cand = p.jet(z, 2).mixed_hessian()
        worst = float(np.max(np.abs(g_cand - g_base)))
        if worst > _CANONICAL_CHECK_TOL:
            raise NormalizationError(
                f"(1/K) log det g is not a potential of the given metric "
                f"(residual {worst:.3e} at {z!r}); the metric is not "
                f"Einstein with Ricci constant {K:g}"
            )


# ---------------------------------------------------------------------------
# constant-gradient-length potentials on the ball

def rescaled_ball_potential(n: int, K: float,
                            boundary_point=None) -> PotentialField:
    """((n+1)/K) (-log(1 - |z|^2) + 2 log|1 - <z, q>|), q a unit vector.

    The pluriharmonic log term re-centers the potential at the boundary
    point q; the result is again a potential of the Ricci -K metric and
    its gradient length is identically (n+1)/K.  Default q = (-1, 0, ...).
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if K <= 0:
        raise ValueError("Ricci constant must be positive")
    if boundary_point is None:
        q = np.zeros(n, dtype=complex)
        q[0] = -1.0
    else:
        q = as_point(boundary_point)
        if len(q) != n or abs(np.linalg.norm(q) - 1.0) > 1e-12:
            raise ValueError("boundary point must be a unit vector in C^n")
    scale = (n + 1) / K
    # 2 log|1 - <z, q>| with <z, q> = sum z^a conj(q^a)
    coeffs = {a: -np.conj(q[a]) for a in range(n) if q[a] != 0}
    parts = [
        (scale, RadialBlock(range(n), LogProfile(1.0))),
        (scale, LinearLog(1.0, coeffs)),
    ]
    return PotentialField(
        domain=ball(n),
        ricci_constant=K,
        parts=parts,
        analytic_order=4,
        label=f"rescaled-ball[n={n},K={K:g}]",
    )


def product_potential(p1: PotentialField, p2: PotentialField) -> PotentialField:
    """pi_1^* phi_1 + pi_2^* phi_2 on the product domain.

    Requires matching Ricci constants; the product metric is then Einstein
    with the same constant and gradient lengths add pointwise.
    """
    d1, d2 = p1.domain, p2.domain
    if d2.n == 0:
        return p1
    if d1.n == 0:
        return p2
    if not np.isclose(p1.ricci_constant, p2.ricci_constant, rtol=0, atol=1e-12):
        raise NormalizationError(
            f"Ricci constants differ: {p1.ricci_constant} vs {p2.ricci_constant}"
        )
    dom = product(d1, d2)
    from .domains import _OffsetPart  # shared re-indexing helper

    if p1.parts is None or p2.parts is None:
        raise UnsupportedDomainError(
            "product potentials need analytic summands on both factors"
        )
    parts = [(c, _OffsetPart(part, 0, d1.n)) for c, part in p1.parts]
    parts += [(c, _OffsetPart(part, d1.n, d2.n)) for c, part in p2.parts]
    return PotentialField(
        domain=dom,
        ricci_constant=p1.ricci_constant,
        parts=parts,
        analytic_order=min(p1.analytic_order, p2.analytic_order),
        label=f"({p1.label}) (+) ({p2.label})",
    )


def trivial_factor() -> PotentialField:
    """Zero-dimensional placeholder factor (identity for products)."""
    dom = DomainModel("trivial", (), n=0, rank=0, c=None)
    return PotentialField(
        domain=dom, ricci_constant=np.nan, parts=[], analytic_order=4,
        label="trivial",
    )


def quadratic_fixture(n: int) -> PotentialField:
    """|z|^2 on the unit ball: the flat test metric (Ricci = 0)."""
    return PotentialField(
        domain=ball(n),
        ricci_constant=np.nan,
        parts=[(1.0, RadialBlock(range(n), LinearProfile(1.0)))],
        analytic_order=4,
        label=f"flat-quadratic[n={n}]",
    )


# ---------------------------------------------------------------------------
# the Kai-Ohsawa constant

def kai_ohsawa_potential(d: DomainModel) -> PotentialField:
    """The pullback under the Cayley transform of the Siegel log-kernel.

    On the polydisc the Siegel image is the half-plane product and the
    kernel factorizes, so per factor

        log K_H(sigma(z)) = 2 (-log(1-|z|^2) + 2 log|1+z|) - log 2.

    On the ball the kernel transformation law turns the pullback into the
    kernel potential plus twice the log modulus of the (holomorphic)
    Jacobian of sigma, i.e. (n+1) (-log(1-|z|^2) + 2 log|1+z^1|) up to an
    additive constant.  Either way the result is a potential of the
    Bergman metric (Ricci constant 1).
    """
    if d.kind == POLYDISC:
        parts = []
        for a in range(d.n):
            parts.append((2.0, RadialBlock((a,), LogProfile(1.0))))
            parts.append((2.0, LinearLog(1.0, {a: 1.0})))
            parts.append((1.0, ConstantPart(-np.log(2.0))))
        return PotentialField(
            domain=d, ricci_constant=1.0, parts=parts, analytic_order=4,
            label=f"siegel-pullback[{d.label}]",
        )
    if d.kind == BALL:
        return rescaled_ball_potential(
            d.n, 1.0, boundary_point=_first_axis(d.n)
        )
    raise UnsupportedDomainError(
        f"Siegel pullback implemented for ball and polydisc, not {d.label}; "
        f"only the lower bound rank*c = {d.rank * (d.c or np.nan):g} is "
        f"available"
    )


def _first_axis(n):
    q = np.zeros(n, dtype=complex)
    q[0] = -1.0
    return q


def kai_ohsawa_constant(d: DomainModel, spot_checks: int = 20,
                        seed: int = 0, tol: float = 1e-6) -> float:
    """The constant gradient length of the pulled-back Siegel potential.

    Evaluated at the origin with the Bergman metric and spot-checked for
    constancy at ``spot_checks`` further interior points.
    """
    p = kai_ohsawa_potential(d)
    center = np.zeros(d.n, dtype=complex)
    frame0 = hermgeo.metric_from_potential(p, center)
    L = hermgeo.gradient_length_sq(p, frame0)
    rng = np.random.default_rng(seed)
    for z in sample_interior(d, rng, spot_checks):
        frame = hermgeo.metric_from_potential(p, z)
        val = hermgeo.gradient_length_sq(p, frame)
        if abs(val - L) > tol:
            raise NormalizationError(
                f"gradient length of {p.label} is not constant: "
                f"{val:.12f} vs {L:.12f} at {z!r}"
            )
    return float(L)


# ---------------------------------------------------------------------------
# ball minimality

@dataclass(frozen=True)
class MinimalityRow:
    label: str
    n: int
    rank: int
    c: float
    rc_over_K: float
    bound_over_K: float  # (n+1)/K
    strict: bool
    lower_bound_only: bool

    def as_dict(self):
        return {
            "kind": self.label,
            "n": self.n,
            "rank": self.rank,
            "c": self.c,
            "rc_over_K": self.rc_over_K,
            "(n+1)_over_K": self.bound_over_K,
            "strict": self.strict,
            "lower_bound_only": self.lower_bound_only,
        }


def ball_minimality_report(entries, K: float = 1.0) -> list[MinimalityRow]:
    """Compare rank*c against n+1 (both rescaled by K) across the catalog.

    ``entries`` may mix DomainModel instances and InvariantsRecord data
    rows (the exceptional domains).  Kinds without an explicit Siegel
    pullback are flagged ``lower_bound_only``: for them rank*c bounds the
    constant gradient length from below rather than computing it.
    """
    if K <= 0:
        raise ValueError("Ricci constant must be positive")
    rows = []
    for entry in entries:
        if isinstance(entry, InvariantsRecord):
            rec = entry
            computable = False
        else:
            rec = entry.invariants()
            computable = entry.kind in (BALL, POLYDISC)
        rc = rec.rc / K
        bound = (rec.n + 1) / K
        rows.append(
            MinimalityRow(
                label=rec.label, n=rec.n, rank=rec.rank, c=rec.c,
                rc_over_K=rc, bound_over_K=bound,
                strict=rc > bound + 1e-12,
                lower_bound_only=not computable,
            )
        )
    return rows
