"""The derived-tensor zoo of a (metric, 1-form) pair at a point.

From b_{i|j} the symmetric/antisymmetric parts r_ij, s_ij are formed,
then the quadratic combinations p = r.r, q = r.s, t = s.s, their b- and
y-contractions, and the first covariant derivatives that feed the
deformation predictors.  Contraction conventions: indices are raised
and lowered with the metric, dropped ('_i' families) by contraction
with b, and turned into '0' by contraction with y.

Note q_ij is neither symmetric nor antisymmetric, so b^j q_ji and
b^j q_ij differ; they are stored separately as q_i and qstar_i and
never aliased.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import (CurvatureBundle, christoffel_arrays, covderiv2_tensor2,
                        covderiv_tensor2, curvature_from_jets)
from .errors import DomainError, LimitUnavailableError
from .fields import GeometryPair, metric_at, oneform_at

EPS_LIMIT = 1e-8  # below this, s_0^2/(a^2 - mu b^2) switches to its registered limit


@dataclass
class DirectionScalars:
    """All y-contractions of a BetaBundle needed by the predictors."""

    alpha2: float
    beta: float
    r00: float
    r0: float
    s0: float
    p00: float
    q00: float
    t00: float
    p0: float
    q0: float
    qstar0: float
    t0: float
    r00_b: float      # r_{00|k} b^k
    r0_0: float       # r_{0|0}
    s0_0: float       # s_{0|0}
    r0_b: float       # r_{0|k} b^k
    s0_b: float       # s_{0|k} b^k
    r_0: float        # r_{|0}
    sI0_i: float      # s^i_{0|i}


@dataclass
class BetaBundle:
    """Pointwise tensors of a geometry pair, plus covariant derivatives."""

    x: np.ndarray
    n: int
    A: np.ndarray
    Ainv: np.ndarray
    b: np.ndarray            # b_i
    bvec: np.ndarray         # b^i
    b2: float
    bij: np.ndarray          # b_{i|j}
    r: np.ndarray
    s: np.ndarray
    p: np.ndarray
    q: np.ndarray
    t: np.ndarray
    r_i: np.ndarray
    s_i: np.ndarray
    p_i: np.ndarray
    q_i: np.ndarray
    qstar_i: np.ndarray
    t_i: np.ndarray
    r_scalar: float
    p_scalar: float
    q_scalar: float
    t_scalar: float
    trace_r: float
    trace_t: float
    curv: CurvatureBundle | None = None
    Dr: np.ndarray | None = None      # r_{ij|k}
    Ds: np.ndarray | None = None      # s_{ij|k}
    Dr_i: np.ndarray | None = None    # r_{i|j}
    Ds_i: np.ndarray | None = None    # s_{i|j}
    Dr_scalar: np.ndarray | None = None  # r_{|k}

    def scalars(self, y: np.ndarray) -> DirectionScalars:
        y = np.asarray(y, dtype=float)
        b = self.b
        bvec = self.bvec
        return DirectionScalars(
            alpha2=float(y @ self.A @ y),
            beta=float(b @ y),
            r00=float(y @ self.r @ y),
            r0=float(self.r_i @ y),
            s0=float(self.s_i @ y),
            p00=float(y @ self.p @ y),
            q00=float(y @ self.q @ y),
            t00=float(y @ self.t @ y),
            p0=float(self.p_i @ y),
            q0=float(self.q_i @ y),
            qstar0=float(self.qstar_i @ y),
            t0=float(self.t_i @ y),
            r00_b=float(np.einsum("ijk,i,j,k->", self.Dr, y, y, bvec)),
            r0_0=float(y @ self.Dr_i @ y),
            s0_0=float(y @ self.Ds_i @ y),
            r0_b=float(y @ self.Dr_i @ bvec),
            s0_b=float(y @ self.Ds_i @ bvec),
            r_0=float(self.Dr_scalar @ y),
            sI0_i=float(np.einsum("im,mji,j->", self.Ainv, self.Ds, y)),
        )

    # divergence-type scalars without a direction
    @property
    def div_r(self) -> float:
        """r^i_{|i}"""
        return float(np.einsum("im,mi->", self.Ainv, self.Dr_i))

    @property
    def div_s(self) -> float:
        """s^i_{|i}"""
        return float(np.einsum("im,mi->", self.Ainv, self.Ds_i))


def beta_bundle(pair: GeometryPair, x, derivs: bool = True,
                curvature: bool = True) -> BetaBundle:
    """Assemble the tensor bundle at x.

    ``derivs`` adds the covariant derivatives (needs order-2 jets);
    ``curvature`` attaches the metric's curvature bundle.
    """
    x = np.asarray(x, dtype=float)
    order = 2 if (derivs or curvature) else 1
    tj = metric_at(pair.metric, x, order)
    fj = oneform_at(pair.oneform, x, order)
    n = pair.dim
    A = tj.values
    Ainv = np.linalg.inv(A)
    b = fj.values
    bvec = Ainv @ b
    b2 = float(b @ bvec)

    gamma, dgamma, _ = christoffel_arrays(tj, order=1 if derivs else 0)
    bij = fj.d1 - np.einsum("mij,m->ij", gamma, b)
    r = 0.5 * (bij + bij.T)
    s = 0.5 * (bij - bij.T)
    r_mixed = Ainv @ r          # r^i_j
    s_mixed = Ainv @ s
    p = r @ r_mixed             # p_ij = r_im r^m_j
    q = r @ s_mixed             # q_ij = r_im s^m_j
    t = s @ s_mixed
    r_i = bvec @ r              # b^m r_mi
    s_i = bvec @ s
    p_i = bvec @ p
    t_i = bvec @ t
    q_i = bvec @ q              # b^j q_ji
    qstar_i = q @ bvec          # b^j q_ij
    bundle = BetaBundle(
        x=x, n=n, A=A, Ainv=Ainv, b=b, bvec=bvec, b2=b2, bij=bij, r=r, s=s,
        p=p, q=q, t=t, r_i=r_i, s_i=s_i, p_i=p_i, q_i=q_i, qstar_i=qstar_i,
        t_i=t_i, r_scalar=float(r_i @ bvec), p_scalar=float(p_i @ bvec),
        q_scalar=float(q_i @ bvec), t_scalar=float(t_i @ bvec),
        trace_r=float(np.trace(r_mixed)), trace_t=float(np.trace(t @ Ainv)),
    )
    if curvature:
        bundle.curv = curvature_from_jets(x, tj)
    if derivs:
        # chart derivative of b_{i|j} = d_j b_i - G^m_ij b_m
        dbij = (fj.d2 - np.einsum("mijk,m->ijk", dgamma, b)
                - np.einsum("mij,mk->ijk", gamma, fj.d1))
        dr = 0.5 * (dbij + dbij.transpose(1, 0, 2))
        ds = 0.5 * (dbij - dbij.transpose(1, 0, 2))
        Dr = covderiv_tensor2(r, dr, gamma)
        Ds = covderiv_tensor2(s, ds, gamma)
        # covector derivatives via the product rule; b^m_{|j} = a^{mk} b_{k|j}
        b_up_cov = Ainv @ bij                      # b^m_{|j}
        Dr_i = np.einsum("mj,mi->ij", b_up_cov, r) + np.einsum("m,mij->ij", bvec, Dr)
        Ds_i = np.einsum("mj,mi->ij", b_up_cov, s) + np.einsum("m,mij->ij", bvec, Ds)
        bvec_cov = b_up_cov                        # b^i_{|j}
        bundle.Dr = Dr
        bundle.Ds = Ds
        bundle.Dr_i = Dr_i
        bundle.Ds_i = Ds_i
        bundle.Dr_scalar = bundle.r_i @ bvec_cov + bvec @ Dr_i
    return bundle


def covderiv2_tensor(pair: GeometryPair, x, which: str = "s"):
    """First and second covariant derivatives of r_ij or s_ij.

    The second derivative consumes order-3 jets of both the metric and
    the 1-form.  Returns (T_{ij|k}, T_{ij|k|l}).
    """
    if which not in ("r", "s"):
        raise ValueError("which must be 'r' or 's'")
    x = np.asarray(x, dtype=float)
    tj = metric_at(pair.metric, x, 3)
    fj = oneform_at(pair.oneform, x, 3)
    gamma, dgamma, d2gamma = christoffel_arrays(tj, order=2)
    b = fj.values
    bij = fj.d1 - np.einsum("mij,m->ij", gamma, b)
    dbij = (fj.d2 - np.einsum("mijk,m->ijk", dgamma, b)
            - np.einsum("mij,mk->ijk", gamma, fj.d1))
    d2bij = (fj.d3
             - np.einsum("mijkl,m->ijkl", d2gamma, b)
             - np.einsum("mijk,ml->ijkl", dgamma, fj.d1)
             - np.einsum("mijl,mk->ijkl", dgamma, fj.d1)
             - np.einsum("mij,mkl->ijkl", gamma, fj.d2))
    sign = 1.0 if which == "r" else -1.0
    T = 0.5 * (bij + sign * bij.T)
    dT = 0.5 * (dbij + sign * dbij.transpose(1, 0, 2))
    d2T = 0.5 * (d2bij + sign * d2bij.transpose(1, 0, 2, 3))
    return covderiv2_tensor2(T, dT, d2T, gamma, dgamma)


# ---------------------------------------------------------------------------
# Condition residuals
# ---------------------------------------------------------------------------

def killing_residual(pair: GeometryPair, x) -> float:
    """Max-norm of r_ij; zero iff the 1-form is Killing at x."""
    bundle = beta_bundle(pair, x, derivs=False, curvature=False)
    return float(np.max(np.abs(bundle.r)))


def condition_A_residual(pair: GeometryPair, x, y, a_const: float, mu: float,
                         bundle: BetaBundle | None = None) -> float:
    """Residual of t00 + (a^2 - mu b^2) alpha^2 + mu (b^2 alpha^2 - beta^2)
    - mu s0^2/(a^2 - mu b^2).

    Near the locus a^2 = mu b^2 the quotient is replaced by the pair's
    registered closed-form limit; without one, LimitUnavailableError.
    """
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DomainError("direction y must be nonzero")
    if bundle is None:
        bundle = beta_bundle(pair, x, derivs=False, curvature=False)
    sc_t00 = float(y @ bundle.t @ y)
    a2 = float(y @ bundle.A @ y)
    beta = float(bundle.b @ y)
    s0 = float(bundle.s_i @ y)
    b2 = bundle.b2
    denom = a_const * a_const - mu * b2
    if abs(denom) < EPS_LIMIT:
        if pair.condition_limit is None:
            raise LimitUnavailableError(
                f"a^2 - mu b^2 = {denom:.3e} at {bundle.x}; no registered limit")
        quotient = pair.condition_limit(bundle.x, y)
    else:
        quotient = s0 * s0 / denom
    return sc_t00 + denom * a2 + mu * (b2 * a2 - beta * beta) - mu * quotient


def condition_B_residual(pair: GeometryPair, x, y, mu: float,
                         bundle: BetaBundle | None = None) -> float:
    """Residual of R_bb - mu (b^2 alpha^2 - beta^2)."""
    y = np.asarray(y, dtype=float)
    if bundle is None:
        bundle = beta_bundle(pair, x, derivs=False, curvature=True)
    rbb = bundle.curv.rbb(y, bundle.b, bundle.bvec)
    a2 = float(y @ bundle.A @ y)
    beta = float(bundle.b @ y)
    return rbb - mu * (bundle.b2 * a2 - beta * beta)


def evenness_witness(pair: GeometryPair, x, rank_eps: float = 1e-9):
    """Numeric rank of s_ij and the Frobenius residual of t_ij + a_ij.

    When t00 = -alpha^2 holds (the mu = 0, a = 1 condition), s has full
    rank, which forces even dimension.
    """
    bundle = beta_bundle(pair, x, derivs=False, curvature=False)
    svals = np.linalg.svd(bundle.s, compute_uv=False)
    rank = int(np.sum(svals > rank_eps))
    t_res = float(np.linalg.norm(bundle.t + bundle.A) / np.linalg.norm(bundle.A))
    return rank, t_res


def gradient_identity_residual(pair: GeometryPair, x) -> float:
    """Residual of d_k(b^2) = 2 (r_k + s_k).

    The left side is assembled from chart derivatives alone,
    d_k b^2 = -(d_k a_pq) b^p b^q + 2 b^i d_k b_i, so the comparison
    exercises the Christoffel route used by r_k + s_k.
    """
    x = np.asarray(x, dtype=float)
    tj = metric_at(pair.metric, x, 1)
    fj = oneform_at(pair.oneform, x, 1)
    bvec = np.linalg.inv(tj.values) @ fj.values
    grad = (-np.einsum("pqk,p,q->k", tj.d1, bvec, bvec)
            + 2.0 * np.einsum("ik,i->k", fj.d1, bvec))
    bundle = beta_bundle(pair, x, derivs=False, curvature=False)
    target = 2.0 * (bundle.r_i + bundle.s_i)
    return float(np.max(np.abs(grad - target)))
