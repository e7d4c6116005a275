"""Seeded interior point sampling.

Points are drawn coordinate-wise uniformly from the unit disc (the
polydisc envelope of every bounded catalog kind) and kept when the
rescaled point z / shrink still lies in the domain, i.e. z is in
shrink * Omega.  The default shrink of 0.95 keeps finite-difference
stencils strictly interior.
"""

from __future__ import annotations

import numpy as np

from .errors import MembershipError
from .domains import HALFPLANE_PRODUCT, DomainModel

DEFAULT_SHRINK = 0.95
_MAX_DRAWS = 200_000


def _disc_coordinate(rng) -> complex:
    while True:
        x = rng.uniform(-1.0, 1.0)
        y = rng.uniform(-1.0, 1.0)
        if x * x + y * y < 1.0:
            return complex(x, y)


def sample_interior(domain: DomainModel, rng, count: int,
                    shrink: float = DEFAULT_SHRINK) -> list[np.ndarray]:
    """``count`` points of shrink * domain, reproducible from ``rng``."""
    if not 0.0 < shrink <= 1.0:
        raise ValueError("shrink must be in (0, 1]")
    if domain.kind == HALFPLANE_PRODUCT:
        return _sample_halfplanes(domain, rng, count)
    out = []
    draws = 0
    while len(out) < count:
        draws += 1
        if draws > _MAX_DRAWS:
            raise MembershipError(
                f"rejection sampling on {domain.label} accepted "
                f"{len(out)}/{count} after {_MAX_DRAWS} draws"
            )
        z = np.array([_disc_coordinate(rng) for _ in range(domain.n)])
        if domain.contains(z / shrink):
            out.append(z)
    return out


def _sample_halfplanes(domain, rng, count):
    """Left half-plane coordinates in a fixed compact window."""
    out = []
    for _ in range(count):
        re = rng.uniform(-2.5, -0.2, domain.n)
        im = rng.uniform(-1.5, 1.5, domain.n)
        out.append(re + 1j * im)
    return out
