"""Coordinate charts, metric fields and 1-form fields.

Fields are immutable bundles of component programs over a single
Cartesian chart.  Components are evaluated through jet seeds, so one
evaluation yields the component values together with their partial
derivatives up to the requested order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, OrderError, PositivityError
from .jets import MAX_ORDER, Jet, JetSpace

Point = np.ndarray


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Open sampling region: a box for drawing candidates plus a predicate.

    The default construction is an annulus (ball with an inner radius
    removed) minus optional spherical tubes around singular loci, which
    keeps sampling deterministic and away from non-smooth sets.
    """

    low: tuple
    high: tuple
    predicate: Callable[[np.ndarray], bool] | None = None
    description: str = ""

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        if self.predicate is not None:
            return bool(self.predicate(x))
        return bool(np.all(x >= np.asarray(self.low)) and np.all(x <= np.asarray(self.high)))

    def intersect(self, other: "Domain") -> "Domain":
        low = tuple(np.maximum(self.low, other.low))
        high = tuple(np.minimum(self.high, other.high))
        p1, p2 = self.predicate, other.predicate

        def both(x):
            return (p1 is None or p1(x)) and (p2 is None or p2(x))

        return Domain(low, high, both, f"{self.description} & {other.description}")

    def with_predicate(self, extra: Callable[[np.ndarray], bool], note: str = "") -> "Domain":
        p = self.predicate

        def combined(x):
            return (p is None or p(x)) and extra(x)

        return Domain(self.low, self.high, combined,
                      (self.description + " & " + note) if note else self.description)


def ball_domain(dim: int, radius: float, inner: float = 0.0,
                excluded_radii: Sequence[tuple] = (), description: str = "") -> Domain:
    """Ball of given radius, minus an inner ball and radius tubes |r - r0| < w."""
    excl = tuple(excluded_radii)

    def pred(x):
        r = float(np.linalg.norm(x))
        if r > radius or r < inner:
            return False
        for r0, w in excl:
            if abs(r - r0) < w:
                return False
        return True

    box = radius / np.sqrt(dim)
    return Domain((-box,) * dim, (box,) * dim, pred,
                  description or f"ball(r<{radius}, r>{inner})")


# ---------------------------------------------------------------------------
# Evaluated jets of a field
# ---------------------------------------------------------------------------

@dataclass
class TensorJets:
    """Numeric derivative arrays of field components at one point.

    ``values`` has the component shape; ``d1[..., k]`` holds the partial
    derivative along x^k, and so on.  Entries beyond the evaluation
    order are None.
    """

    values: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None
    d3: np.ndarray | None = None


def _evaluate_jets(component_fn, dim: int, x: Sequence[float], order: int,
                   shape: tuple) -> TensorJets:
    if order > MAX_ORDER or order < 0:
        raise OrderError(f"order {order} outside supported range 0..{MAX_ORDER}")
    seeds = Jet.seeds(dim, x, order)
    comps = component_fn(seeds)
    flat: list[Jet] = []

    def collect(obj):
        if isinstance(obj, (list, tuple)):
            for o in obj:
                collect(o)
        else:
            flat.append(obj if isinstance(obj, Jet)
                        else Jet.constant(seeds[0].space, float(obj)))

    collect(comps)
    values = np.array([j.value for j in flat]).reshape(shape)
    out = TensorJets(values=values)
    if order >= 1:
        out.d1 = np.array([j.gradient() for j in flat]).reshape(shape + (dim,))
    if order >= 2:
        out.d2 = np.array([j.hessian() for j in flat]).reshape(shape + (dim, dim))
    if order >= 3:
        out.d3 = np.array([j.third() for j in flat]).reshape(shape + (dim, dim, dim))
    return out


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricField:
    """A Riemannian metric a_ij(x) given by component programs.

    ``components`` maps a list of scalar-like chart coordinates to an
    n x n nested list; symmetry is enforced by symmetrizing the output,
    so only consistency (not storage layout) is the caller's burden.
    Declared constants (``mu_sectional``, ``mu_ricci``) are advisory
    metadata: verification never trusts them, it tests them.
    """

    dim: int
    components: Callable
    domain: Domain
    name: str = ""
    mu_sectional: float | None = None
    mu_ricci: float | None = None

    def check_domain(self, x) -> None:
        if not self.domain.contains(np.asarray(x, dtype=float)):
            raise DomainError(f"point {np.asarray(x)} outside domain of metric {self.name!r}")


@dataclass(frozen=True)
class OneFormField:
    """A 1-form b_i(x) given by component programs on the same chart."""

    dim: int
    components: Callable
    name: str = ""


@dataclass(frozen=True)
class GeometryPair:
    """A metric together with a 1-form on a shared domain.

    ``condition_limit``, when present, supplies the registered
    closed-form limit of s_0^2/(a^2 - mu b^2) on the locus where the
    denominator vanishes (as a function of (x, y)).
    """

    metric: MetricField
    oneform: OneFormField
    name: str = ""
    condition_limit: Callable | None = None

    def __post_init__(self):
        if self.metric.dim != self.oneform.dim:
            raise DomainError("metric and 1-form dimensions disagree")

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def domain(self) -> Domain:
        return self.metric.domain


def metric_at(metric: MetricField, x: Sequence[float], order: int = 0,
              check_positive: bool = True) -> TensorJets:
    """Evaluate a_ij and its partial derivatives; symmetrized in (i, j)."""
    metric.check_domain(x)
    n = metric.dim
    tj = _evaluate_jets(metric.components, n, x, order, (n, n))
    tj.values = 0.5 * (tj.values + tj.values.T)
    if tj.d1 is not None:
        tj.d1 = 0.5 * (tj.d1 + tj.d1.transpose(1, 0, 2))
    if tj.d2 is not None:
        tj.d2 = 0.5 * (tj.d2 + tj.d2.transpose(1, 0, 2, 3))
    if tj.d3 is not None:
        tj.d3 = 0.5 * (tj.d3 + tj.d3.transpose(1, 0, 2, 3, 4))
    if check_positive:
        _require_spd(tj.values, metric.name, x)
    return tj


def oneform_at(oneform: OneFormField, x: Sequence[float], order: int = 0) -> TensorJets:
    return _evaluate_jets(oneform.components, oneform.dim, x, order, (oneform.dim,))


def _require_spd(a: np.ndarray, name: str, x) -> np.ndarray:
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise PositivityError(
            f"metric {name!r} not positive-definite at {np.asarray(x)}") from None


def metric_inverse(a: np.ndarray, name: str = "", x=None) -> np.ndarray:
    _require_spd(a, name, x)
    return np.linalg.inv(a)


def raise_index(metric: MetricField, x: Sequence[float], covector: Sequence[float]) -> np.ndarray:
    """v^i = a^{ij} w_j with a^{ij} the exact inverse of a_ij at x."""
    a = metric_at(metric, x, 0).values
    return metric_inverse(a, metric.name, x) @ np.asarray(covector, dtype=float)


def lower_index(metric: MetricField, x: Sequence[float], vector: Sequence[float]) -> np.ndarray:
    a = metric_at(metric, x, 0).values
    return a @ np.asarray(vector, dtype=float)


def b_squared(pair: GeometryPair, x: Sequence[float]) -> float:
    """Squared length b^2 = a^{ij} b_i b_j of the 1-form at x."""
    pair.metric.check_domain(x)
    a = metric_at(pair.metric, x, 0).values
    b = oneform_at(pair.oneform, x, 0).values
    return float(b @ metric_inverse(a, pair.metric.name, x) @ b)


def alpha2(a: np.ndarray, y: np.ndarray) -> float:
    return float(y @ a @ y)


def with_metadata(metric: MetricField, mu_sectional=None, mu_ricci=None) -> MetricField:
    return replace(metric, mu_sectional=mu_sectional, mu_ricci=mu_ricci)


# ---------------------------------------------------------------------------
# Jet-level linear algebra helpers (used when a derived field must be
# evaluated as a program, e.g. a deformed metric)
# ---------------------------------------------------------------------------

def jet_matrix_inverse(m: list[list], space: JetSpace) -> list[list]:
    """Gauss-Jordan inverse of a matrix of scalar-likes, pivoting by value."""
    n = len(m)
    aug = [[_as_jet(m[i][j], space) for j in range(n)]
           + [Jet.constant(space, 1.0 if i == j else 0.0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col].value))
        if abs(aug[pivot][col].value) < 1e-300:
            raise PositivityError("singular matrix in jet inversion")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1.0 / aug[col][col]
        aug[col] = [e * inv_p for e in aug[col]]
        for r in range(n):
            if r != col:
                factor = aug[r][col]
                aug[r] = [er - factor * ec for er, ec in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _as_jet(v, space: JetSpace) -> Jet:
    return v if isinstance(v, Jet) else Jet.constant(space, float(v))
