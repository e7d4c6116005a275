"""Scalar potentials with closed-form derivative access.

A ``PotentialField`` is a real scalar function on a domain together with an
optional analytic jet: a list of (coefficient, part) summands whose mixed
Wirtinger derivatives are known exactly.  The parts implemented here cover
every potential the package constructs:

* ``RadialBlock``      -- f(s) with s = sum of |z^a|^2 over a coordinate set
                          (unit-ball logs, flat quadratics, per-factor disks)
* ``LinearLog``        -- 2 log|c0 + c.z| for a holomorphic affine form
                          (the pluriharmonic rescaling term)
* ``RealLinearLog``    -- log(c0 + 2 Re(c.z)) (half-plane kernel logs)
* ``MatrixLogDetPart`` -- -kappa log det(I - Z Z*) on matrix balls, with a
                          linear parametrization for symmetry-constrained Z
                          (closed form to order 3)
* ``LogOfInnerPart``   -- -kappa log w(z) for an inner function with a known
                          finite jet (the type-IV generic norm)
* ``ConstantPart``     -- additive constants

Derivatives of compositions are assembled by Faa di Bruno sums over set
partitions / partial matchings of the derivative indices; with order <= 4
these sums are tiny.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import EvaluationError, UnsupportedOrderError
from .jets import Jet, as_point, default_step, fd_jet, index_pairs


# ---------------------------------------------------------------------------
# small combinatorial helpers (cached: orders never exceed 4)

def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _partial_matchings(m, l):
    """Injective partial maps between positions 0..m-1 and 0..l-1.

    Yields lists of (i, j) pairs; unmatched positions are implied.
    """
    def rec(i, free):
        if i == m:
            yield []
            return
        for tail in rec(i + 1, free):
            yield tail
        for j in list(free):
            for tail in rec(i + 1, free - {j}):
                yield [(i, j)] + tail

    yield from rec(0, frozenset(range(l)))


_MATCHING_CACHE = {}


def partial_matchings(m, l):
    key = (m, l)
    if key not in _MATCHING_CACHE:
        _MATCHING_CACHE[key] = list(_partial_matchings(m, l))
    return _MATCHING_CACHE[key]


_PARTITION_CACHE = {}


def set_partitions(k):
    if k not in _PARTITION_CACHE:
        _PARTITION_CACHE[k] = [
            [tuple(block) for block in part] for part in _set_partitions(range(k))
        ]
    return _PARTITION_CACHE[k]


_FACT = [1, 1, 2, 6, 24]


# ---------------------------------------------------------------------------
# radial profiles

class LogProfile:
    """f(s) = -A log(1 - s) + offset, the model-domain log profile."""

    def __init__(self, amplitude: float, offset: float = 0.0):
        self.amplitude = float(amplitude)
        self.offset = float(offset)

    def deriv(self, k: int, s: float) -> float:
        if k == 0:
            if s >= 1.0:
                raise EvaluationError(f"log profile evaluated at s={s} >= 1")
            return -self.amplitude * np.log1p(-s) + self.offset
        return self.amplitude * _FACT[k - 1] / (1.0 - s) ** k


class LinearProfile:
    """f(s) = slope * s (flat quadratic fixture)."""

    def __init__(self, slope: float = 1.0):
        self.slope = float(slope)

    def deriv(self, k: int, s: float) -> float:
        if k == 0:
            return self.slope * s
        if k == 1:
            return self.slope
        return 0.0


class RadialBlock:
    """f(s) with s = sum_{a in indices} |z^a|^2.

    Derivative indices outside ``indices`` kill the entry.  Within the
    block, s has first derivatives zbar_a / z_b and the constant mixed
    second derivative delta_ab, so the chain rule reduces to a sum over
    partial matchings of holomorphic against antiholomorphic indices.
    """

    def __init__(self, indices, profile):
        self.indices = frozenset(indices)
        self.profile = profile

    def prepare(self, z):
        idx = sorted(self.indices)
        s = float(sum(abs(z[a]) ** 2 for a in idx))
        return (z, s)

    def entry(self, ctx, a, b):
        z, s = ctx
        if any(i not in self.indices for i in a) or any(
            i not in self.indices for i in b
        ):
            return 0.0 + 0.0j
        m, l = len(a), len(b)
        if m == 0 and l == 0:
            return complex(self.profile.deriv(0, s))
        total = 0.0 + 0.0j
        for matching in partial_matchings(m, l):
            coeff = 1.0 + 0.0j
            matched_a = set()
            matched_b = set()
            for i, j in matching:
                if a[i] != b[j]:
                    coeff = 0.0
                    break
                matched_a.add(i)
                matched_b.add(j)
            if coeff == 0.0:
                continue
            blocks = len(matching) + (m - len(matched_a)) + (l - len(matched_b))
            for i in range(m):
                if i not in matched_a:
                    coeff *= np.conj(z[a[i]])
            for j in range(l):
                if j not in matched_b:
                    coeff *= z[b[j]]
            total += coeff * self.profile.deriv(blocks, s)
        return total


class ConstantPart:
    def __init__(self, value: float):
        self.value = float(value)

    def prepare(self, z):
        return None

    def entry(self, ctx, a, b):
        return complex(self.value) if not a and not b else 0.0 + 0.0j


class LinearLog:
    """2 log |w(z)| for the holomorphic affine form w = c0 + sum c_a z^a.

    Pluriharmonic: mixed derivatives vanish; pure ones are derivatives of
    log w and its conjugate.
    """

    def __init__(self, c0, coeffs):
        self.c0 = complex(c0)
        self.coeffs = {int(k): complex(v) for k, v in coeffs.items()}

    def _w(self, z):
        return self.c0 + sum(c * z[a] for a, c in self.coeffs.items())

    def prepare(self, z):
        w = self._w(z)
        if abs(w) < 1e-300:
            raise EvaluationError(f"log|w| singular: w(z)=0 at z={z!r}")
        return w

    def entry(self, ctx, a, b):
        w = ctx
        if a and b:
            return 0.0 + 0.0j
        if not a and not b:
            return complex(2.0 * np.log(abs(w)))
        idx = a or b
        k = len(idx)
        coeff = np.prod([self.coeffs.get(i, 0.0) for i in idx])
        val = (-1.0) ** (k - 1) * _FACT[k - 1] * coeff / w ** k
        return val if a else np.conj(val)


class RealLinearLog:
    """log(c0 + 2 Re(c.z)) -- the real-linear logs of half-plane kernels."""

    def __init__(self, c0, coeffs):
        self.c0 = float(c0)
        self.coeffs = {int(k): complex(v) for k, v in coeffs.items()}

    def prepare(self, z):
        u = self.c0 + 2.0 * float(
            np.real(sum(c * z[a] for a, c in self.coeffs.items()))
        )
        if u <= 0:
            raise EvaluationError(f"log of non-positive argument u={u} at z={z!r}")
        return u

    def entry(self, ctx, a, b):
        u = ctx
        k = len(a) + len(b)
        if k == 0:
            return complex(np.log(u))
        coeff = np.prod([self.coeffs.get(i, 0.0) for i in a]) * np.prod(
            [np.conj(self.coeffs.get(i, 0.0)) for i in b]
        )
        return (-1.0) ** (k - 1) * _FACT[k - 1] * coeff / u ** k


class MatrixLogDetPart:
    """-kappa log det(I_p - Z Z*) with Z = Z(z) linear in the coordinates.

    ``lifts[alpha]`` lists (i, j, weight) triples: d/dz^alpha acts on the
    full matrix as sum_w weight * d/dZ_ij.  Closed forms (A = (I - Z Z*)^-1,
    P = Z* A, Q = P Z):

        d_(ij)                      =  kappa P[j,i]
        d_(ij)(kl)bar               =  kappa (I + Q)[j,l] A[k,i]
        d_(ij)(kl)                  =  kappa P[j,k] P[l,i]
        d_(ij)(mn)(kl)bar           =  kappa (P[j,m] (I+Q)[n,l] A[k,i]
                                             + (I+Q)[j,l] A[k,m] P[n,i])
        d_(ij)(kl)(mn)              =  kappa (P[j,m] P[n,k] P[l,i]
                                             + P[j,k] P[l,m] P[n,i])

    plus conjugates.  Exact to order 3; order 4 falls back to the
    finite-difference oracle.
    """

    max_order = 3

    def __init__(self, p, q, kappa, lifts):
        self.p = int(p)
        self.q = int(q)
        self.kappa = float(kappa)
        self.lifts = tuple(tuple(entry) for entry in lifts)

    def matrix(self, z):
        Z = np.zeros((self.p, self.q), dtype=complex)
        for alpha, lift in enumerate(self.lifts):
            for i, j, w in lift:
                Z[i, j] += w * z[alpha]
        return Z

    def prepare(self, z):
        Z = self.matrix(z)
        M = np.eye(self.p, dtype=complex) - Z @ Z.conj().T
        sign, logabsdet = np.linalg.slogdet(M)
        if sign.real <= 0:
            raise EvaluationError(
                f"det(I - Z Z*) = {sign * np.exp(logabsdet)} not positive at z={z!r}"
            )
        A = np.linalg.inv(M)
        P = Z.conj().T @ A
        Q = P @ Z
        IQ = np.eye(self.q, dtype=complex) + Q
        return {"logdet": logabsdet, "A": A, "P": P, "IQ": IQ}

    def _full_entry(self, ctx, ae, be):
        """Derivative on the unconstrained matrix space.

        ``ae``/``be`` are tuples of (i, j) entry pairs for the holomorphic /
        antiholomorphic factors.
        """
        k = self.kappa
        A, P, IQ = ctx["A"], ctx["P"], ctx["IQ"]
        m, l = len(ae), len(be)
        if m == 0 and l == 0:
            return complex(-k * ctx["logdet"])
        if m < l:
            return np.conj(self._full_entry(ctx, be, ae))
        if (m, l) == (1, 0):
            (i, j), = ae
            return k * P[j, i]
        if (m, l) == (1, 1):
            (i, j), = ae
            (kk, ll), = be
            return k * IQ[j, ll] * A[kk, i]
        if (m, l) == (2, 0):
            (i, j), (kk, ll) = ae
            return k * P[j, kk] * P[ll, i]
        if (m, l) == (2, 1):
            (i, j), (mm, nn) = ae
            (kk, ll), = be
            return k * (
                P[j, mm] * IQ[nn, ll] * A[kk, i]
                + IQ[j, ll] * A[kk, mm] * P[nn, i]
            )
        if (m, l) == (3, 0):
            (i, j), (kk, ll), (mm, nn) = ae
            return k * (
                P[j, mm] * P[nn, kk] * P[ll, i]
                + P[j, kk] * P[ll, mm] * P[nn, i]
            )
        raise UnsupportedOrderError(
            f"matrix log-det derivatives implemented to order {self.max_order}"
        )

    def entry(self, ctx, a, b):
        if len(a) + len(b) > self.max_order:
            raise UnsupportedOrderError(
                f"matrix log-det derivatives implemented to order {self.max_order}"
            )
        total = 0.0 + 0.0j
        for alift in itertools.product(*[self.lifts[i] for i in a]) if a else [()]:
            for blift in itertools.product(*[self.lifts[i] for i in b]) if b else [()]:
                w = 1.0
                ae = []
                be = []
                for i, j, wt in alift:
                    w *= wt
                    ae.append((i, j))
                for i, j, wt in blift:
                    w *= wt
                    be.append((i, j))
                total += w * self._full_entry(ctx, tuple(ae), tuple(be))
        return total


class TypeIVNorm:
    """The degree-(2,2) polynomial 1 - 2 z.zbar + |z.z|^2 and its jet."""

    def prepare(self, z):
        s = float(np.sum(np.abs(z) ** 2))
        u = complex(np.sum(z * z))
        return {"z": z, "s": s, "u": u, "value": 1.0 - 2.0 * s + abs(u) ** 2}

    def entry(self, ctx, a, b):
        z, u = ctx["z"], ctx["u"]
        m, l = len(a), len(b)
        if (m, l) == (0, 0):
            return complex(ctx["value"])
        if m < l:
            return np.conj(self.entry(ctx, b, a))
        if (m, l) == (1, 0):
            return -2.0 * np.conj(z[a[0]]) + 2.0 * z[a[0]] * np.conj(u)
        if (m, l) == (1, 1):
            return -2.0 * (a[0] == b[0]) + 4.0 * z[a[0]] * np.conj(z[b[0]])
        if (m, l) == (2, 0):
            return 2.0 * (a[0] == a[1]) * np.conj(u)
        if (m, l) == (2, 1):
            return 4.0 * (a[0] == a[1]) * np.conj(z[b[0]])
        if (m, l) == (2, 2):
            return 4.0 * (a[0] == a[1]) * (b[0] == b[1])
        return 0.0 + 0.0j


class LogOfInnerPart:
    """-kappa log w(z) for an inner function with a known jet.

    Assembled by the set-partition form of the chain rule: for a combined
    index multiset S,

        d_S (-kappa log w) = -kappa sum_partitions (-1)^(#blocks-1)
                             (#blocks-1)! w^(-#blocks) prod_blocks d_B w.
    """

    def __init__(self, inner, kappa):
        self.inner = inner
        self.kappa = float(kappa)

    def prepare(self, z):
        ctx = self.inner.prepare(z)
        w = complex(ctx["value"])
        if w.real <= 0:
            raise EvaluationError(f"inner norm {w} not positive at z={z!r}")
        return ctx

    def entry(self, ctx, a, b):
        w = complex(ctx["value"])
        labels = [("h", i) for i in a] + [("a", i) for i in b]
        k = len(labels)
        if k == 0:
            return complex(-self.kappa * np.log(w.real))
        total = 0.0 + 0.0j
        for partition in set_partitions(k):
            nb = len(partition)
            term = (-1.0) ** (nb - 1) * _FACT[nb - 1] / w ** nb
            for block in partition:
                ba = tuple(labels[i][1] for i in block if labels[i][0] == "h")
                bb = tuple(labels[i][1] for i in block if labels[i][0] == "a")
                term *= self.inner.entry(ctx, ba, bb)
                if term == 0.0:
                    break
            total += term
        return -self.kappa * total


# ---------------------------------------------------------------------------
# the potential field itself

@dataclass
class PotentialField:
    """A real potential on a domain, with analytic and/or FD derivatives.

    ``parts`` is a list of (coefficient, part) summands defining both the
    value and the closed-form jet; FD-only potentials set ``parts=None``
    and provide ``fn``.  ``ricci_constant`` is the K > 0 the associated
    metric is normalized to (Ric = -K g); constructions that have no
    Einstein normalization use nan.
    """

    domain: object
    ricci_constant: float
    parts: list | None
    analytic_order: int
    label: str
    fn: object = None
    certificate: object = dataclass_field(default=None, repr=False)

    def __call__(self, z) -> float:
        z = as_point(z)
        if self.fn is not None:
            return float(self.fn(z))
        ctxs = [part.prepare(z) for _, part in self.parts]
        return float(
            sum(
                c * part.entry(ctx, (), ()).real
                for (c, part), ctx in zip(self.parts, ctxs)
            )
        )

    def analytic_jet(self, z, order: int) -> Jet:
        if order > self.analytic_order or self.parts is None:
            raise UnsupportedOrderError(
                f"{self.label}: no closed-form derivatives at order {order}"
            )
        z = as_point(z)
        ctxs = [part.prepare(z) for _, part in self.parts]
        derivs = {}
        for a, b in index_pairs(len(z), order):
            # the potential is real, so deriv(a, b) = conj(deriv(b, a));
            # mirroring keeps the symmetry exact and halves the work, and
            # self-conjugate entries are exactly real
            if (b, a) in derivs:
                derivs[(a, b)] = np.conj(derivs[(b, a)])
                continue
            val = sum(
                c * part.entry(ctx, a, b)
                for (c, part), ctx in zip(self.parts, ctxs)
            )
            derivs[(a, b)] = complex(val.real) if a == b else complex(val)
        return Jet(point=z, order=order, derivs=derivs)

    def jet(self, z, order: int, step: float | None = None) -> Jet:
        """Closed form when available, finite differences otherwise."""
        if self.parts is not None and order <= self.analytic_order:
            return self.analytic_jet(z, order)
        if order == 0:
            z = as_point(z)
            return Jet(point=z, order=0, derivs={((), ()): complex(self(z))})
        return fd_jet(self, z, order, step=step)

    def scaled(self, factor: float, label: str | None = None) -> "PotentialField":
        """The potential c*phi; its metric is c*g, so K becomes K/c."""
        if factor <= 0:
            raise ValueError("scaling factor must be positive")
        new_parts = None
        fn = None
        if self.parts is not None:
            new_parts = [(c * factor, part) for c, part in self.parts]
        else:
            base = self.fn
            fn = lambda z: factor * float(base(z))  # noqa: E731
        return PotentialField(
            domain=self.domain,
            ricci_constant=self.ricci_constant / factor,
            parts=new_parts,
            analytic_order=self.analytic_order,
            label=label or f"{factor:g}*{self.label}",
            fn=fn,
        )

    def plus_constant(self, c: float, label: str | None = None) -> "PotentialField":
        if self.parts is None:
            base = self.fn
            return PotentialField(
                domain=self.domain,
                ricci_constant=self.ricci_constant,
                parts=None,
                analytic_order=self.analytic_order,
                label=label or self.label,
                fn=lambda z: float(base(z)) + c,
            )
        return PotentialField(
            domain=self.domain,
            ricci_constant=self.ricci_constant,
            parts=self.parts + [(1.0, ConstantPart(c))],
            analytic_order=self.analytic_order,
            label=label or self.label,
        )

    def fd_step(self, order: int) -> float:
        return default_step(order)

    def __repr__(self):  # keep frames and reports readable
        return f"PotentialField({self.label}, K={self.ricci_constant:g})"


def combine(domain, ricci_constant, weighted, analytic_order, label):
    """Sum of (coefficient, PotentialField) pairs sharing a domain."""
    parts = []
    for c, p in weighted:
        if p.parts is None:
            raise UnsupportedOrderError(
                f"cannot combine FD-only potential {p.label} analytically"
            )
        parts.extend((c * pc, part) for pc, part in p.parts)
    order = min([analytic_order] + [p.analytic_order for _, p in weighted])
    return PotentialField(
        domain=domain,
        ricci_constant=ricci_constant,
        parts=parts,
        analytic_order=order,
        label=label,
    )
