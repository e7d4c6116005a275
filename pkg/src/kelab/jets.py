"""Mixed Wirtinger derivatives of real scalar functions on C^n.

A ``Jet`` holds the value and all partial derivatives

    d(a, b) = (prod_{alpha in a} d/dz^alpha) (prod_{beta in b} d/dzbar^beta) f

up to a requested total order (at most 4).  Two evaluation paths exist:

* ``fd_jet`` -- a finite-difference oracle valid for any smooth real
  function, built from tensor-product central stencils in the underlying
  real coordinates with one Richardson extrapolation (steps h and h/2).
* ``analytic_jet`` -- exact derivatives for potentials that declare a
  closed form (see ``field.PotentialField``).

Wirtinger convention: d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2.
Multi-indices are stored as sorted tuples of coordinate indices, so mixed
partials that agree by symmetry share one entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, UnsupportedOrderError

MAX_ORDER = 4

#: default finite-difference steps by derivative order.  Orders 1-2 use a
#: step large enough that rounding noise (eps*|f|/h^2 ~ 1e-9) stays well
#: under the 1e-6 oracle tolerance while h^4 truncation remains ~1e-7.
DEFAULT_STEP_LOW = 5e-4
DEFAULT_STEP_HIGH = 1e-2


def default_step(order: int) -> float:
    return DEFAULT_STEP_LOW if order <= 2 else DEFAULT_STEP_HIGH


def as_point(coords) -> np.ndarray:
    """Coerce to a 1-d complex coordinate vector, validating finiteness."""
    z = np.atleast_1d(np.asarray(coords, dtype=complex)).reshape(-1)
    if z.size < 1:
        raise ValueError("a point needs at least one coordinate")
    if not np.all(np.isfinite(z)):
        raise ValueError(f"non-finite coordinates: {z}")
    return z


def index_pairs(n: int, order: int):
    """All (a, b) multi-index pairs with |a| + |b| <= order, sorted form."""
    for total in range(order + 1):
        for ka in range(total + 1):
            kb = total - ka
            for a in itertools.combinations_with_replacement(range(n), ka):
                for b in itertools.combinations_with_replacement(range(n), kb):
                    yield a, b


@dataclass(frozen=True)
class Jet:
    """Value plus mixed Wirtinger derivatives of a real scalar at a point."""

    point: np.ndarray
    order: int
    derivs: dict

    @property
    def dim(self) -> int:
        return len(self.point)

    def d(self, a, b) -> complex:
        return self.derivs[(tuple(sorted(a)), tuple(sorted(b)))]

    def value(self) -> float:
        return self.derivs[((), ())].real

    def holo_gradient(self) -> np.ndarray:
        """(d f / dz^alpha) as a length-n vector."""
        n = self.dim
        return np.array([self.d((a,), ()) for a in range(n)])

    def mixed_hessian(self) -> np.ndarray:
        """Matrix H[a, b] = d^2 f / dz^a dzbar^b (the metric candidate)."""
        n = self.dim
        out = np.empty((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                out[a, b] = self.d((a,), (b,))
        return out

    def pure_hessian(self) -> np.ndarray:
        """Matrix of unbarred second derivatives d^2 f / dz^a dz^b."""
        n = self.dim
        out = np.empty((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                out[a, b] = self.d((a, b), ())
        return out

    def third_tensor(self) -> np.ndarray:
        """T[a, b, m] = d^3 f / dz^a dz^b dzbar^m (source of Christoffels)."""
        n = self.dim
        out = np.empty((n, n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                for m in range(n):
                    out[a, b, m] = self.d((a, b), (m,))
        return out

    def conjugation_defect(self) -> float:
        """max |d(a,b) - conj(d(b,a))|; zero for derivatives of real functions."""
        worst = 0.0
        for (a, b), val in self.derivs.items():
            worst = max(worst, abs(val - np.conj(self.d(b, a))))
        return worst


# 1-d central stencils with O(h^2) truncation, as {offset: coefficient};
# the h^{-order} factor is applied separately.
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def _real_partials(f, z, needed, h):
    """Central-difference real partials for every multi-index in ``needed``.

    ``needed`` maps a real multi-index (tuple of per-real-dimension orders,
    length 2n, dimension 2k is Re z^k and 2k+1 is Im z^k) to nothing; the
    return value maps it to the O(h^2) stencil estimate.  Function values
    are cached across stencils since neighbouring multi-indices share
    evaluation points.
    """
    n = len(z)
    cache = {}

    def feval(offsets):
        val = cache.get(offsets)
        if val is None:
            w = np.array(z, dtype=complex)
            for dim, k in offsets:
                if dim % 2 == 0:
                    w[dim // 2] += k * h
                else:
                    w[dim // 2] += 1j * k * h
            val = float(f(w))
            if not np.isfinite(val):
                raise EvaluationError(
                    f"non-finite value at stencil point {w!r} (base {z!r})"
                )
            cache[offsets] = val
        return val

    out = {}
    for midx in needed:
        dims = [d for d in range(2 * n) if midx[d] > 0]
        parts = [_STENCILS[midx[d]] for d in dims]
        scale = h ** (-sum(midx))
        acc = 0.0
        for combo in itertools.product(*[p.items() for p in parts]):
            coeff = 1.0
            offsets = []
            for dim, (off, c) in zip(dims, combo):
                coeff *= c
                if off != 0:
                    offsets.append((dim, off))
            acc += coeff * feval(tuple(offsets))
        out[midx] = acc * scale
    return out


def _wirtinger_expansion(a, b, n):
    """Expand prod d/dz^a prod d/dzbar^b into real partials.

    Returns a list of (real multi-index, complex coefficient) pairs.
    """
    factors = []
    for alpha in a:
        factors.append(((2 * alpha, 0.5), (2 * alpha + 1, -0.5j)))
    for beta in b:
        factors.append(((2 * beta, 0.5), (2 * beta + 1, 0.5j)))
    terms = {}
    for combo in itertools.product(*factors) if factors else [()]:
        midx = [0] * (2 * n)
        coeff = 1.0 + 0.0j
        for dim, c in combo:
            midx[dim] += 1
            coeff *= c
        key = tuple(midx)
        terms[key] = terms.get(key, 0.0 + 0.0j) + coeff
    return list(terms.items())


def fd_jet(f, z, order: int, step: float | None = None) -> Jet:
    """Finite-difference jet of a real scalar function.

    Central differences at steps h and h/2 combined by one Richardson
    extrapolation, giving O(h^4) truncation on smooth functions.
    """
    z = as_point(z)
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    h = default_step(order) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    n = len(z)

    expansions = {}
    needed = set()
    for a, b in index_pairs(n, order):
        exp = _wirtinger_expansion(a, b, n)
        expansions[(a, b)] = exp
        for midx, _ in exp:
            needed.add(midx)

    coarse = _real_partials(f, z, needed, h)
    fine = _real_partials(f, z, needed, h / 2)
    # Richardson: leading error of every stencil above is O(h^2).
    partials = {m: (4.0 * fine[m] - coarse[m]) / 3.0 for m in needed}

    derivs = {}
    for (a, b), exp in expansions.items():
        derivs[(a, b)] = sum(c * partials[m] for m, c in exp)
    return Jet(point=z, order=order, derivs=derivs)


def analytic_jet(p, z, order: int) -> Jet:
    """Closed-form jet of a potential field.

    Requires ``p.analytic_order >= order``; agreement with ``fd_jet`` is the
    oracle check exercised by the test suite.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    if order > p.analytic_order:
        raise UnsupportedOrderError(
            f"{p!r} implements closed-form derivatives to order "
            f"{p.analytic_order}, requested {order}"
        )
    return p.analytic_jet(as_point(z), order)
