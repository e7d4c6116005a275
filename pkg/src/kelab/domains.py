"""Catalog of model domains.

Bounded realizations: the unit ball, the polydisc, and the classical
matrix domains

    type I   (p x q matrices,  I - Z Z* > 0),         n = pq,       rank p
    type II  (antisymmetric m x m, I - Z Z* > 0),     n = m(m-1)/2, rank [m/2]
    type III (symmetric m x m,  I - Z Z* > 0),        n = m(m+1)/2, rank m
    type IV  (z in C^m, ||z||^2 < 1 and
              1 - 2 z.zbar + |z.z|^2 > 0),            n = m,        rank 2

plus products, the unbounded half-plane product used as the image of the
Cayley transform, and two exceptional invariant records that exist only as
(c, n, rank) data.

Matrix coordinates are flattened row-major; the symmetry-constrained kinds
are parametrized by their independent entries (type II strictly upper
triangular, type III upper triangular).  Generic norms are normalized to 1
at the origin and vanish on the boundary; the exponent pairing each norm
with the Bergman kernel is validated numerically by the Einstein suite
(Ricci of dd^c log K equals -1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    MembershipError,
    SingularTransformError,
    UnsupportedDomainError,
    UnsupportedPointError,
)
from .field import (
    ConstantPart,
    LogOfInnerPart,
    LogProfile,
    MatrixLogDetPart,
    PotentialField,
    RadialBlock,
    RealLinearLog,
    TypeIVNorm,
)
from .jets import as_point

BALL = "ball"
POLYDISC = "polydisc"
TYPE_I = "type1"
TYPE_II = "type2"
TYPE_III = "type3"
TYPE_IV = "type4"
HALFPLANE_PRODUCT = "halfplane-product"
PRODUCT = "product"

#: minimum matrix sizes; smaller parameters coincide with other kinds
#: (type II with m<=2 and type IV with m<=2 are ball/disc products) and the
#: invariant table does not apply to them.
MIN_TYPE_II = 3
MIN_TYPE_IV = 3


@dataclass(frozen=True)
class InvariantsRecord:
    """Row of the invariant table: kernel exponent c, dimension, rank."""

    label: str
    c: float
    n: int
    rank: int

    @property
    def rc(self) -> float:
        return self.rank * self.c


#: exceptional domains enter only through their invariants.
EXCEPTIONAL_INVARIANTS = (
    InvariantsRecord("exceptional-16", c=12.0, n=16, rank=2),
    InvariantsRecord("exceptional-27", c=18.0, n=27, rank=3),
)


@dataclass(frozen=True)
class DomainModel:
    kind: str
    params: tuple
    n: int
    rank: int
    c: float | None
    factors: tuple = ()

    # -- membership -------------------------------------------------------
    def contains(self, z) -> bool:
        z = as_point(z)
        if len(z) != self.n:
            raise ValueError(f"{self.label} expects {self.n} coordinates, got {len(z)}")
        return _contains(self, z)

    def require_member(self, z) -> np.ndarray:
        z = as_point(z)
        if not self.contains(z):
            raise MembershipError(f"{z!r} is not in {self.label}")
        return z

    # -- descriptive ------------------------------------------------------
    @property
    def label(self) -> str:
        if self.kind == TYPE_I:
            return f"type1({self.params[0]},{self.params[1]})"
        if self.kind in (TYPE_II, TYPE_III, TYPE_IV):
            return f"{self.kind}({self.params[0]})"
        if self.kind == PRODUCT:
            return " x ".join(f.label for f in self.factors)
        return f"{self.kind}({self.n})"

    def invariants(self) -> InvariantsRecord:
        if self.c is None:
            raise UnsupportedDomainError(
                f"{self.label} has no single kernel exponent"
            )
        return InvariantsRecord(self.label, c=self.c, n=self.n, rank=self.rank)

    def to_json(self) -> dict:
        if self.kind == PRODUCT:
            return {
                "kind": PRODUCT,
                "factors": [f.to_json() for f in self.factors],
            }
        keys = {BALL: "n", POLYDISC: "r", TYPE_II: "m", TYPE_III: "m",
                TYPE_IV: "m", HALFPLANE_PRODUCT: "r"}
        if self.kind == TYPE_I:
            return {"kind": TYPE_I, "p": self.params[0], "q": self.params[1]}
        return {"kind": self.kind, keys[self.kind]: self.params[0]}

    def __repr__(self):
        return f"DomainModel({self.label})"


# ---------------------------------------------------------------------------
# constructors

def ball(n: int) -> DomainModel:
    if n < 1:
        raise ValueError("ball dimension must be >= 1")
    return DomainModel(BALL, (n,), n=n, rank=1, c=float(n + 1))


def polydisc(r: int) -> DomainModel:
    """Product of r unit discs; the per-factor kernel exponent is 2."""
    if r < 1:
        raise ValueError("polydisc rank must be >= 1")
    return DomainModel(POLYDISC, (r,), n=r, rank=r, c=2.0)


def type_i(p: int, q: int) -> DomainModel:
    if not 1 <= p <= q:
        raise ValueError("type I requires 1 <= p <= q")
    return DomainModel(TYPE_I, (p, q), n=p * q, rank=p, c=float(p + q))


def type_ii(m: int) -> DomainModel:
    if m < MIN_TYPE_II:
        raise ValueError(f"type II restricted to m >= {MIN_TYPE_II}")
    return DomainModel(TYPE_II, (m,), n=m * (m - 1) // 2, rank=m // 2,
                       c=float(2 * (m - 1)))


def type_iii(m: int) -> DomainModel:
    if m < 1:
        raise ValueError("type III requires m >= 1")
    return DomainModel(TYPE_III, (m,), n=m * (m + 1) // 2, rank=m, c=float(m + 1))


def type_iv(m: int) -> DomainModel:
    if m < MIN_TYPE_IV:
        raise ValueError(f"type IV restricted to m >= {MIN_TYPE_IV}")
    return DomainModel(TYPE_IV, (m,), n=m, rank=2, c=float(m))


def halfplane_product(r: int) -> DomainModel:
    """Product of r left half-planes Re w < 0 (unbounded Cayley image)."""
    if r < 1:
        raise ValueError("half-plane product rank must be >= 1")
    return DomainModel(HALFPLANE_PRODUCT, (r,), n=r, rank=r, c=2.0)


def product(*factors: DomainModel) -> DomainModel:
    factors = tuple(factors)
    if not factors:
        raise ValueError("product needs at least one factor")
    n = sum(f.n for f in factors)
    rank = sum(f.rank for f in factors)
    cs = {f.c for f in factors}
    c = cs.pop() if len(cs) == 1 else None
    return DomainModel(PRODUCT, (), n=n, rank=rank, c=c, factors=factors)


def from_json(obj: dict) -> DomainModel:
    kind = obj.get("kind")
    if kind == BALL:
        return ball(int(obj["n"]))
    if kind == POLYDISC:
        return polydisc(int(obj["r"]))
    if kind == TYPE_I:
        return type_i(int(obj["p"]), int(obj["q"]))
    if kind == TYPE_II:
        return type_ii(int(obj["m"]))
    if kind == TYPE_III:
        return type_iii(int(obj["m"]))
    if kind == TYPE_IV:
        return type_iv(int(obj["m"]))
    if kind == HALFPLANE_PRODUCT:
        return halfplane_product(int(obj["r"]))
    if kind == PRODUCT:
        return product(*[from_json(f) for f in obj["factors"]])
    raise UnsupportedDomainError(f"unknown domain kind {kind!r}")


# ---------------------------------------------------------------------------
# matrix embeddings

def _matrix_lifts(d: DomainModel):
    """Per-coordinate (i, j, weight) lifts into the full matrix space."""
    if d.kind == TYPE_I:
        p, q = d.params
        return p, q, tuple(
            ((i, j, 1.0),) for i in range(p) for j in range(q)
        )
    if d.kind == TYPE_III:
        m = d.params[0]
        lifts = []
        for i in range(m):
            for j in range(i, m):
                if i == j:
                    lifts.append(((i, i, 1.0),))
                else:
                    lifts.append(((i, j, 1.0), (j, i, 1.0)))
        return m, m, tuple(lifts)
    if d.kind == TYPE_II:
        m = d.params[0]
        lifts = []
        for i in range(m):
            for j in range(i + 1, m):
                lifts.append(((i, j, 1.0), (j, i, -1.0)))
        return m, m, tuple(lifts)
    raise UnsupportedDomainError(f"{d.label} is not a matrix kind")


def as_matrix(d: DomainModel, z) -> np.ndarray:
    """Assemble the matrix realization of a flattened coordinate vector."""
    z = as_point(z)
    p, q, lifts = _matrix_lifts(d)
    Z = np.zeros((p, q), dtype=complex)
    for alpha, lift in enumerate(lifts):
        for i, j, w in lift:
            Z[i, j] += w * z[alpha]
    return Z


# ---------------------------------------------------------------------------
# membership and generic norms

def _contains(d: DomainModel, z: np.ndarray) -> bool:
    if d.kind == BALL:
        return float(np.sum(np.abs(z) ** 2)) < 1.0
    if d.kind == POLYDISC:
        return bool(np.all(np.abs(z) < 1.0))
    if d.kind in (TYPE_I, TYPE_II, TYPE_III):
        Z = as_matrix(d, z)
        smax = np.linalg.norm(Z, 2)
        return float(smax) < 1.0
    if d.kind == TYPE_IV:
        s = float(np.sum(np.abs(z) ** 2))
        u = complex(np.sum(z * z))
        return s < 1.0 and 1.0 - 2.0 * s + abs(u) ** 2 > 0.0
    if d.kind == HALFPLANE_PRODUCT:
        return bool(np.all(np.real(z) < 0.0))
    if d.kind == PRODUCT:
        off = 0
        for f in d.factors:
            if not _contains(f, z[off:off + f.n]):
                return False
            off += f.n
        return True
    raise UnsupportedDomainError(f"membership undefined for {d.kind!r}")


def generic_norm(d: DomainModel, z) -> float:
    """The boundary-vanishing polynomial norm N with K = const * N^(-c).

    N(0) = 1 on bounded kinds.  Type II uses det(I - Z Z*)^(1/2): the
    eigenvalues of Z Z* pair up for antisymmetric Z, so the square root is
    the polynomial norm matching the exponent 2(m-1).
    """
    z = d.require_member(z)
    if d.kind == BALL:
        return 1.0 - float(np.sum(np.abs(z) ** 2))
    if d.kind == POLYDISC:
        return float(np.prod(1.0 - np.abs(z) ** 2))
    if d.kind in (TYPE_I, TYPE_III):
        Z = as_matrix(d, z)
        det = np.linalg.det(np.eye(Z.shape[0]) - Z @ Z.conj().T)
        return float(det.real)
    if d.kind == TYPE_II:
        Z = as_matrix(d, z)
        det = np.linalg.det(np.eye(Z.shape[0]) - Z @ Z.conj().T)
        return float(np.sqrt(det.real))
    if d.kind == TYPE_IV:
        s = float(np.sum(np.abs(z) ** 2))
        u = complex(np.sum(z * z))
        return 1.0 - 2.0 * s + abs(u) ** 2
    if d.kind == HALFPLANE_PRODUCT:
        return float(np.prod(-2.0 * np.real(z)))
    if d.kind == PRODUCT:
        off = 0
        out = 1.0
        for f in d.factors:
            out *= generic_norm(f, z[off:off + f.n])
            off += f.n
        return out
    raise UnsupportedDomainError(f"generic norm undefined for {d.kind!r}")


# ---------------------------------------------------------------------------
# canonical Bergman-type potentials

def bergman_potential(d: DomainModel) -> PotentialField:
    """log of the Bergman kernel, normalized to vanish at the origin.

    Its metric dd^c log K is the complete Kaehler-Einstein metric with
    Ricci constant K = 1; that is the correctness check for each norm
    formula above.
    """
    if d.kind == BALL:
        n = d.n
        parts = [(1.0, RadialBlock(range(n), LogProfile(float(n + 1))))]
        order = 4
    elif d.kind == POLYDISC:
        parts = [
            (1.0, RadialBlock((a,), LogProfile(2.0))) for a in range(d.n)
        ]
        order = 4
    elif d.kind in (TYPE_I, TYPE_II, TYPE_III):
        p, q, lifts = _matrix_lifts(d)
        kappa = {
            TYPE_I: float(sum(d.params)),
            TYPE_II: float(d.params[0] - 1),
            TYPE_III: float(d.params[0] + 1),
        }[d.kind]
        parts = [(1.0, MatrixLogDetPart(p, q, kappa, lifts))]
        order = 3
    elif d.kind == TYPE_IV:
        parts = [(1.0, LogOfInnerPart(TypeIVNorm(), float(d.params[0])))]
        order = 4
    elif d.kind == HALFPLANE_PRODUCT:
        # log prod 2 (w + wbar)^-2 = sum (log 2 - 2 log(-(w^a + wbar^a)))
        parts = []
        for a in range(d.n):
            parts.append((-2.0, RealLinearLog(0.0, {a: -1.0})))
            parts.append((1.0, ConstantPart(np.log(2.0))))
        order = 4
    elif d.kind == PRODUCT:
        parts = []
        order = 4
        off = 0
        for f in d.factors:
            sub = bergman_potential(f)
            parts.extend(
                (c, _OffsetPart(part, off, f.n)) for c, part in sub.parts
            )
            order = min(order, sub.analytic_order)
            off += f.n
    else:
        raise UnsupportedDomainError(f"no kernel potential for {d.kind!r}")
    return PotentialField(
        domain=d,
        ricci_constant=1.0,
        parts=parts,
        analytic_order=order,
        label=f"log-kernel[{d.label}]",
    )


def ke_potential(d: DomainModel, K: float) -> PotentialField:
    """Rescale the kernel potential so its metric has Ricci constant K."""
    if K <= 0:
        raise ValueError("Ricci constant must be positive")
    p = bergman_potential(d).scaled(1.0 / K, label=f"ke[{d.label},K={K:g}]")
    return p


class _OffsetPart:
    """Re-index a jet part into a product's coordinate block."""

    def __init__(self, part, offset, width):
        self.part = part
        self.offset = offset
        self.width = width

    def _inside(self, i):
        return self.offset <= i < self.offset + self.width

    def prepare(self, z):
        return self.part.prepare(z[self.offset:self.offset + self.width])

    def entry(self, ctx, a, b):
        if not all(self._inside(i) for i in a) or not all(
            self._inside(i) for i in b
        ):
            return 0.0 + 0.0j
        a2 = tuple(i - self.offset for i in a)
        b2 = tuple(i - self.offset for i in b)
        return self.part.entry(ctx, a2, b2)


# ---------------------------------------------------------------------------
# Cayley transform and the half-plane kernel

def cayley(d: DomainModel, z) -> np.ndarray:
    """Map to the unbounded Siegel-type model.

    Polydisc: componentwise z -> (z-1)/(z+1) onto the product of left
    half-planes.  Ball: (z1, z') -> ((z1-1)/(z1+1), sqrt(2) z'/(z1+1)) onto
    {Re w1 + ||w'||^2 / 2 < 0}.
    """
    z = d.require_member(z)
    if d.kind == POLYDISC:
        if np.any(np.abs(z + 1.0) < 1e-14):
            raise SingularTransformError("Cayley transform singular at z = -1")
        return (z - 1.0) / (z + 1.0)
    if d.kind == BALL:
        if abs(z[0] + 1.0) < 1e-14:
            raise SingularTransformError("Cayley transform singular at z1 = -1")
        w = np.empty_like(z)
        w[0] = (z[0] - 1.0) / (z[0] + 1.0)
        w[1:] = np.sqrt(2.0) * z[1:] / (z[0] + 1.0)
        return w
    raise UnsupportedDomainError(
        f"explicit Cayley transform implemented for ball and polydisc, not {d.label}"
    )


def cayley_inverse(d: DomainModel, w) -> np.ndarray:
    w = as_point(w)
    if d.kind == POLYDISC:
        if np.any(np.abs(1.0 - w) < 1e-14):
            raise SingularTransformError("inverse Cayley singular at w = 1")
        return (1.0 + w) / (1.0 - w)
    if d.kind == BALL:
        if abs(1.0 - w[0]) < 1e-14:
            raise SingularTransformError("inverse Cayley singular at w1 = 1")
        z = np.empty_like(w)
        z[0] = (1.0 + w[0]) / (1.0 - w[0])
        z[1:] = np.sqrt(2.0) * w[1:] / (1.0 - w[0])
        return z
    raise UnsupportedDomainError(
        f"explicit Cayley transform implemented for ball and polydisc, not {d.label}"
    )


def siegel_contains(d: DomainModel, w) -> bool:
    """Membership in the Cayley image of a ball or polydisc."""
    w = as_point(w)
    if d.kind == POLYDISC:
        return bool(np.all(np.real(w) < 0.0))
    if d.kind == BALL:
        return float(np.real(w[0]) + 0.5 * np.sum(np.abs(w[1:]) ** 2)) < 0.0
    raise UnsupportedDomainError(f"no Siegel model wired up for {d.label}")


def halfplane_kernel(w) -> float:
    """Reproducing kernel of the left half-plane: 2 / (w + wbar)^2."""
    w = complex(w)
    if w.real >= 0:
        raise MembershipError(f"{w} is not in the left half-plane")
    return 2.0 / (w + w.conjugate()).real ** 2


def siegel_log_kernel_on_polydisc_slice(d: DomainModel, w) -> float:
    """(c/2) sum_a log K_H(w^a) on the embedded half-plane slice.

    ``w`` must have its first ``rank`` coordinates in the left half-plane
    and the remaining ones exactly zero.  The multiplicative kernel
    constant is dropped.
    """
    w = as_point(w)
    r = d.rank
    if d.kind not in (BALL, POLYDISC):
        raise UnsupportedDomainError(
            f"slice kernel implemented for ball and polydisc, not {d.label}"
        )
    if len(w) != d.n:
        raise UnsupportedPointError(
            f"expected {d.n} coordinates for {d.label}, got {len(w)}"
        )
    if np.any(w[r:] != 0):
        raise UnsupportedPointError(
            f"point {w!r} leaves the rank-{r} half-plane slice"
        )
    total = 0.0
    for a in range(r):
        total += np.log(halfplane_kernel(w[a]))
    return float(d.c / 2.0 * total)


def siegel_pullback_slice_derivative(d: DomainModel, alpha: int = 0) -> complex:
    """d/dz^alpha at 0 of the pulled-back Siegel log-kernel, closed form.

    log K_H has derivative -2/(w + wbar), the Cayley factor contributes
    sigma'(0) = 2, so each slice direction gives (c/2) * 1 * 2 = c.
    """
    if d.kind not in (BALL, POLYDISC):
        raise UnsupportedDomainError(
            f"slice derivative implemented for ball and polydisc, not {d.label}"
        )
    if not 0 <= alpha < d.rank:
        raise UnsupportedPointError(
            f"direction {alpha} leaves the rank-{d.rank} slice"
        )
    sigma0 = -1.0 + 0.0j
    dlog_kh = -2.0 / (sigma0 + np.conj(sigma0))
    sigma_prime = 2.0 / (0.0 + 1.0) ** 2
    return complex(d.c / 2.0 * dlog_kh * sigma_prime)


# convenience: parity between table data and constructed models
def table_records() -> list[InvariantsRecord]:
    """Invariant rows used by the minimality comparisons."""
    rows = [
        type_i(1, 2).invariants(),
        type_i(2, 2).invariants(),
        type_i(2, 3).invariants(),
        type_i(3, 3).invariants(),
        type_ii(5).invariants(),
        type_ii(6).invariants(),
        type_iii(2).invariants(),
        type_iii(3).invariants(),
        type_iv(3).invariants(),
        type_iv(4).invariants(),
    ]
    rows.extend(EXCEPTIONAL_INVARIANTS)
    return rows
