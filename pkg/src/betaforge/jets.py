"""Truncated Taylor-jet arithmetic: exact forward-mode derivatives to order 3.

A :class:`Jet` stores the Taylor coefficients of a scalar quantity with
respect to ``nvars`` independent variables, truncated at a fixed total
degree (at most 3).  Sums, products, quotients and the elementary
functions below are closed on jets, so evaluating an ordinary numeric
program on seed jets yields the exact value and all mixed partial
derivatives of the program up to the truncation order, with only
floating-point rounding as noise.

A finite-difference oracle (:func:`fd_oracle`) provides an independent
cross-check; it is deliberately kept free of any jet machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, OrderError

MAX_ORDER = 3

_SPACES: dict[tuple[int, int], "JetSpace"] = {}


class JetSpace:
    """Shared tables for all jets with a given variable count and order."""

    __slots__ = ("nvars", "order", "monomials", "index", "size",
                 "_mul_ii", "_mul_jj", "_mul_kk", "fact")

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monomials = [(0,) * nvars]
        for deg in range(1, order + 1):
            for combo in combinations_with_replacement(range(nvars), deg):
                m = [0] * nvars
                for v in combo:
                    m[v] += 1
                monomials.append(tuple(m))
        self.monomials = monomials
        self.index = {m: p for p, m in enumerate(monomials)}
        self.size = len(monomials)
        degs = [sum(m) for m in monomials]
        ii, jj, kk = [], [], []
        for i, mi in enumerate(monomials):
            for j, mj in enumerate(monomials):
                if degs[i] + degs[j] <= order:
                    ii.append(i)
                    jj.append(j)
                    kk.append(self.index[tuple(a + b for a, b in zip(mi, mj))])
        self._mul_ii = np.asarray(ii, dtype=np.intp)
        self._mul_jj = np.asarray(jj, dtype=np.intp)
        self._mul_kk = np.asarray(kk, dtype=np.intp)
        self.fact = np.array([math.prod(math.factorial(e) for e in m)
                              for m in monomials])

    @staticmethod
    def get(nvars: int, order: int) -> "JetSpace":
        key = (nvars, order)
        sp = _SPACES.get(key)
        if sp is None:
            sp = _SPACES[key] = JetSpace(nvars, order)
        return sp

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.bincount(self._mul_kk, weights=a[self._mul_ii] * b[self._mul_jj],
                           minlength=self.size)


class Jet:
    """Dense truncated Taylor expansion of a scalar in ``nvars`` variables.

    Coefficients are monomial coefficients; the mixed partial for a
    multi-index ``m`` is ``coeffs[space.index[m]] * prod(m_i!)``.
    Order and variable count are fixed at construction and preserved by
    every operation.
    """

    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs: np.ndarray):
        self.space = space
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(space: JetSpace, value: float) -> "Jet":
        c = np.zeros(space.size)
        c[0] = value
        return Jet(space, c)

    @staticmethod
    def variable(space: JetSpace, i: int, value: float) -> "Jet":
        c = np.zeros(space.size)
        c[0] = value
        if space.order >= 1:
            one = [0] * space.nvars
            one[i] = 1
            c[space.index[tuple(one)]] = 1.0
        return Jet(space, c)

    @staticmethod
    def seeds(nvars: int, x: Sequence[float], order: int) -> list["Jet"]:
        space = JetSpace.get(nvars, order)
        return [Jet.variable(space, i, float(xi)) for i, xi in enumerate(x)]

    # -- basic accessors ----------------------------------------------
    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self, multi_index: Sequence[int]) -> float:
        m = tuple(multi_index)
        pos = self.space.index[m]
        return float(self.coeffs[pos] * self.space.fact[pos])

    def gradient(self) -> np.ndarray:
        n = self.space.nvars
        g = np.zeros(n)
        for i in range(n):
            m = [0] * n
            m[i] = 1
            g[i] = self.coeffs[self.space.index[tuple(m)]]
        return g

    def hessian(self) -> np.ndarray:
        n = self.space.nvars
        h = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                m = [0] * n
                m[i] += 1
                m[j] += 1
                pos = self.space.index[tuple(m)]
                h[i, j] = h[j, i] = self.coeffs[pos] * self.space.fact[pos]
        return h

    def third(self) -> np.ndarray:
        n = self.space.nvars
        t = np.zeros((n, n, n))
        for i in range(n):
            for j in range(i, n):
                for k in range(j, n):
                    m = [0] * n
                    m[i] += 1
                    m[j] += 1
                    m[k] += 1
                    pos = self.space.index[tuple(m)]
                    val = self.coeffs[pos] * self.space.fact[pos]
                    for perm in {(i, j, k), (i, k, j), (j, i, k),
                                 (j, k, i), (k, i, j), (k, j, i)}:
                        t[perm] = val
        return t

    # -- ring operations ----------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet.constant(self.space, float(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.space, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.space, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Jet(self.space, o.coeffs - self.coeffs)

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.space, self.space.mul(self.coeffs, other.coeffs))
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet(self.space, self.coeffs / float(other))
        return NotImplemented

    def __rtruediv__(self, other):
        rec = self._reciprocal()
        return rec * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            result = Jet.constant(self.space, 1.0)
            base = self
            e = int(p)
            while e:
                if e & 1:
                    result = result * base
                base = base * base
                e >>= 1
            return result
        return power(self, float(p))

    # -- composition with univariate functions ------------------------
    def compose(self, derivs: Sequence[float]) -> "Jet":
        """Return g(self) given derivatives of g at self.value.

        ``derivs[k]`` must be the k-th derivative of the outer function
        evaluated at the jet's base value, for k = 0..order.
        """
        order = self.space.order
        w = Jet(self.space, self.coeffs.copy())
        w.coeffs[0] = 0.0
        acc = Jet.constant(self.space, derivs[order] / math.factorial(order))
        for k in range(order - 1, -1, -1):
            acc = acc * w + (derivs[k] / math.factorial(k))
        return acc

    def _reciprocal(self) -> "Jet":
        f0 = self.value
        if f0 == 0.0:
            raise ZeroDivisionError("jet division by zero base value")
        d = [1.0 / f0]
        for k in range(1, self.space.order + 1):
            d.append(-d[-1] * k / f0)
        return self.compose(d)

    def __repr__(self):
        return f"Jet(value={self.value!r}, nvars={self.space.nvars}, order={self.space.order})"


# ---------------------------------------------------------------------------
# Elementary functions on floats or jets
# ---------------------------------------------------------------------------

def _derivs_sqrt(f0, order):
    if f0 <= 0.0:
        raise DomainError(f"sqrt of non-positive base value {f0}")
    s = math.sqrt(f0)
    d = [s, 0.5 / s, -0.25 / s ** 3, 0.375 / s ** 5]
    return d[:order + 1]


def _derivs_exp(f0, order):
    e = math.exp(f0)
    return [e] * (order + 1)


def _derivs_log(f0, order):
    if f0 <= 0.0:
        raise DomainError(f"log of non-positive base value {f0}")
    d = [math.log(f0), 1.0 / f0, -1.0 / f0 ** 2, 2.0 / f0 ** 3]
    return d[:order + 1]


def _derivs_sin(f0, order):
    s, c = math.sin(f0), math.cos(f0)
    return [s, c, -s, -c][:order + 1]


def _derivs_cos(f0, order):
    s, c = math.sin(f0), math.cos(f0)
    return [c, -s, -c, s][:order + 1]


def _derivs_tan(f0, order):
    t = math.tan(f0)
    u = 1.0 + t * t
    return [t, u, 2.0 * t * u, u * (2.0 + 6.0 * t * t)][:order + 1]


def _derivs_arctan(f0, order):
    u = 1.0 + f0 * f0
    return [math.atan(f0), 1.0 / u, -2.0 * f0 / u ** 2,
            (6.0 * f0 * f0 - 2.0) / u ** 3][:order + 1]


def _derivs_pow(f0, p, order):
    if f0 <= 0.0:
        raise DomainError(f"real power of non-positive base value {f0}")
    d = [f0 ** p]
    coef = 1.0
    for k in range(1, order + 1):
        coef *= (p - k + 1)
        d.append(coef * f0 ** (p - k))
    return d


def _apply(x, float_fn, derivs_fn):
    if isinstance(x, Jet):
        return x.compose(derivs_fn(x.value, x.space.order))
    return float_fn(x)


def sqrt(x):
    return _apply(x, lambda v: math.sqrt(v) if v > 0 else _raise_dom(v, "sqrt"), _derivs_sqrt)


def exp(x):
    return _apply(x, math.exp, _derivs_exp)


def log(x):
    return _apply(x, lambda v: math.log(v) if v > 0 else _raise_dom(v, "log"), _derivs_log)


def sin(x):
    return _apply(x, math.sin, _derivs_sin)


def cos(x):
    return _apply(x, math.cos, _derivs_cos)


def tan(x):
    return _apply(x, math.tan, _derivs_tan)


def arctan(x):
    return _apply(x, math.atan, _derivs_arctan)


def power(x, p):
    if isinstance(x, Jet):
        return x.compose(_derivs_pow(x.value, p, x.space.order))
    if x <= 0.0:
        _raise_dom(x, "power")
    return x ** p


def absval(x):
    """Branch-fixed absolute value; the program's domain must keep evaluation
    away from the kink at zero."""
    v = x.value if isinstance(x, Jet) else x
    return -x if v < 0 else x


def _raise_dom(v, name):
    raise DomainError(f"{name} of non-positive value {v}")


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarProgram:
    """A deterministic scalar evaluator over abstract scalars.

    ``fn`` maps a sequence of scalar-like inputs (floats or jets) to one
    scalar-like output using only the arithmetic closed on jets.  The
    optional ``domain`` predicate receives a numpy point; evaluation
    outside the domain raises :class:`DomainError` rather than
    propagating NaNs.
    """

    fn: Callable
    nvars: int
    domain: Callable[[np.ndarray], bool] | None = None
    name: str = ""

    def __call__(self, x: Sequence[float]) -> float:
        self.check_domain(x)
        out = self.fn([float(v) for v in x])
        return float(out)

    def check_domain(self, x) -> None:
        if self.domain is not None and not self.domain(np.asarray(x, dtype=float)):
            raise DomainError(f"point {np.asarray(x)} outside domain of program {self.name!r}")


def jet_eval(program: ScalarProgram, x: Sequence[float], order: int) -> Jet:
    """Evaluate a program with jet seeds, returning value and exact partials."""
    if order > MAX_ORDER or order < 0:
        raise OrderError(f"jet order {order} outside supported range 0..{MAX_ORDER}")
    program.check_domain(x)
    seeds = Jet.seeds(program.nvars, x, order)
    out = program.fn(seeds)
    if not isinstance(out, Jet):
        out = Jet.constant(seeds[0].space, float(out))
    return out


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

@dataclass
class FDResult:
    """Central-difference estimates with one Richardson extrapolation level.

    The extrapolated stencils have leading error O(step^4) for orders 1
    and 2; third derivatives combine a second-order stencil with one
    extrapolation level.
    """

    gradient: np.ndarray | None = None
    hessian: np.ndarray | None = None
    third: np.ndarray | None = None
    evaluations: int = field(default=0)


def fd_oracle(program: ScalarProgram, x: Sequence[float], order: int,
              step: float = 1e-3) -> FDResult:
    """Finite-difference derivative estimates, independent of jet arithmetic."""
    if order < 1 or order > MAX_ORDER:
        raise OrderError(f"fd_oracle supports orders 1..{MAX_ORDER}, got {order}")
    x = np.asarray(x, dtype=float)
    n = program.nvars
    count = [0]

    def f(pt):
        count[0] += 1
        return program(pt)

    def richardson(stencil, h):
        return (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0

    def d1(i, h):
        e = np.zeros(n)
        e[i] = h
        return (f(x + e) - f(x - e)) / (2.0 * h)

    def d2(i, j, h):
        if i == j:
            e = np.zeros(n)
            e[i] = h
            return (f(x + e) - 2.0 * f(x) + f(x - e)) / (h * h)
        ei = np.zeros(n)
        ej = np.zeros(n)
        ei[i] = h
        ej[j] = h
        return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * h * h)

    def hess_at(base, h):
        hm = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    e = np.zeros(n)
                    e[i] = h
                    v = (f(base + e) - 2.0 * f(base) + f(base - e)) / (h * h)
                else:
                    ei = np.zeros(n)
                    ej = np.zeros(n)
                    ei[i] = h
                    ej[j] = h
                    v = (f(base + ei + ej) - f(base + ei - ej)
                         - f(base - ei + ej) + f(base - ei - ej)) / (4.0 * h * h)
                hm[i, j] = hm[j, i] = v
        return hm

    result = FDResult()
    if order >= 1:
        g = np.zeros(n)
        for i in range(n):
            g[i] = richardson(lambda h, i=i: d1(i, h), step)
        result.gradient = g
    if order >= 2:
        hm = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                hm[i, j] = hm[j, i] = richardson(lambda h, i=i, j=j: d2(i, j, h), step)
        result.hessian = hm
    if order >= 3:
        t = np.zeros((n, n, n))
        for k in range(n):
            def dh(h, k=k):
                e = np.zeros(n)
                e[k] = h
                return (hess_at(x + e, h) - hess_at(x - e, h)) / (2.0 * h)
            tk = richardson(dh, step)
            t[:, :, k] = tk
        # symmetrize over all index orders; each entry was measured at
        # least once, averaging suppresses stencil asymmetry
        t = (t + t.transpose(0, 2, 1) + t.transpose(1, 0, 2)
             + t.transpose(1, 2, 0) + t.transpose(2, 0, 1) + t.transpose(2, 1, 0)) / 6.0
        result.third = t
    result.evaluations = count[0]
    return result
