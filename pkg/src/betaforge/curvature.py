"""Curvature of a metric field: Christoffel symbols, Riemann, Ricci,
sectional curvature, and covariant derivatives of 1-forms and 2-tensors.

Index conventions, pinned by the requirement that the unit-curvature
round metric satisfies R^i_k(x, y) = alpha^2 d^i_k - y^i y_k:

    Gamma^i_{jk} = 1/2 a^{im} (d_j a_mk + d_k a_mj - d_m a_jk)
    R^i_{jkl}    = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
                   + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
    R^i_k(y)     = R^i_{jkl} y^j y^l           (Jacobi operator, quadratic in y)
    Ric_{jl}     = R^i_{jil}                    (agrees with the y-Hessian of
                                                 the trace R^k_k, tested)
    R_{ijkl}     = a_{im} R^m_{jkl}

Covariant derivative layout: T_{ij|k} stores the derivative index last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlaneError
from .fields import (GeometryPair, MetricField, TensorJets, metric_at,
                     metric_inverse, oneform_at)

PLANE_EPS = 1e-12


# ---------------------------------------------------------------------------
# Christoffel symbols and their chart derivatives
# ---------------------------------------------------------------------------

def christoffel_arrays(tj: TensorJets, order: int = 0):
    """Gamma^i_{jk} and, if requested, its first/second chart derivatives.

    ``order`` counts how many derivative levels of Gamma are needed;
    the metric jets must go one level deeper.
    """
    A = tj.values
    Ainv = metric_inverse(A)
    dA = tj.d1
    # S[m, j, k] = d_j a_mk + d_k a_mj - d_m a_jk
    S = np.einsum("mkj->mjk", dA) + np.einsum("mjk->mjk", dA) - np.einsum("jkm->mjk", dA)
    gamma = 0.5 * np.einsum("im,mjk->ijk", Ainv, S)
    if order == 0:
        return gamma, None, None

    d2A = tj.d2
    dAinv = -np.einsum("ip,pql,qm->iml", Ainv, dA, Ainv)
    dS = (np.einsum("mkjl->mjkl", d2A) + np.einsum("mjkl->mjkl", d2A)
          - np.einsum("jkml->mjkl", d2A))
    # dS[m, j, k, l] = d_l S_mjk
    dgamma = 0.5 * (np.einsum("iml,mjk->ijkl", dAinv, S)
                    + np.einsum("im,mjkl->ijkl", Ainv, dS))
    if order == 1:
        return gamma, dgamma, None

    d3A = tj.d3
    d2Ainv = -(np.einsum("iap,aql,qm->imlp", dAinv, dA, Ainv)
               + np.einsum("ia,aqlp,qm->imlp", Ainv, d2A, Ainv)
               + np.einsum("ia,aql,qmp->imlp", Ainv, dA, dAinv))
    d2S = (np.einsum("mkjlp->mjklp", d3A) + np.einsum("mjklp->mjklp", d3A)
           - np.einsum("jkmlp->mjklp", d3A))
    d2gamma = 0.5 * (np.einsum("imlp,mjk->ijklp", d2Ainv, S)
                     + np.einsum("iml,mjkp->ijklp", dAinv, dS)
                     + np.einsum("imp,mjkl->ijklp", dAinv, dS)
                     + np.einsum("im,mjklp->ijklp", Ainv, d2S))
    return gamma, dgamma, d2gamma


def christoffel(metric: MetricField, x) -> np.ndarray:
    """Levi-Civita connection coefficients Gamma^i_{jk} at x."""
    return christoffel_arrays(metric_at(metric, x, 1))[0]


# ---------------------------------------------------------------------------
# Curvature bundle
# ---------------------------------------------------------------------------

@dataclass
class CurvatureBundle:
    """All pointwise curvature data of a metric at one chart point."""

    x: np.ndarray
    n: int
    A: np.ndarray
    Ainv: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    riemann: np.ndarray        # R^i_{jkl}
    riemann_cov: np.ndarray    # R_{ijkl}
    ricci: np.ndarray
    ricci_contracted: np.ndarray
    ricci_hessian: np.ndarray

    def rik(self, y: np.ndarray) -> np.ndarray:
        """Jacobi-operator matrix R^i_k(x, y), quadratic homogeneous in y."""
        y = np.asarray(y, dtype=float)
        return np.einsum("ijkl,j,l->ik", self.riemann, y, y)

    def ricci00(self, y: np.ndarray) -> float:
        return float(y @ self.ricci @ y)

    def ricci0(self, y: np.ndarray, bvec: np.ndarray) -> float:
        return float(y @ self.ricci @ bvec)

    def ricci_bb(self, bvec: np.ndarray) -> float:
        return float(bvec @ self.ricci @ bvec)

    def rbb(self, y: np.ndarray, b_cov: np.ndarray, bvec: np.ndarray) -> float:
        """R^i_k b_i b^k, the Jacobi operator squeezed between the 1-form."""
        return float(b_cov @ self.rik(y) @ bvec)

    def sectional(self, u: np.ndarray, v: np.ndarray) -> float:
        """Sectional curvature of span(u, v); basis-change invariant."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        uu = u @ self.A @ u
        vv = v @ self.A @ v
        uv = u @ self.A @ v
        gram = uu * vv - uv * uv
        scale = max(uu * vv, 1e-300)
        if gram < PLANE_EPS * scale:
            raise DegeneratePlaneError(
                f"plane spanned by u, v is degenerate (gram {gram:.3e})")
        num = np.einsum("ijkl,i,j,k,l->", self.riemann_cov, u, v, u, v)
        return float(num / gram)

    def kretschmann(self) -> float:
        """Full-contraction curvature invariant R_{ijkl} R^{ijkl}."""
        r_up = np.einsum("ia,jb,kc,ld,abcd->ijkl", self.Ainv, self.Ainv,
                         self.Ainv, self.Ainv, self.riemann_cov)
        return float(np.einsum("ijkl,ijkl->", r_up, self.riemann_cov))


def curvature_bundle(metric: MetricField, x) -> CurvatureBundle:
    tj = metric_at(metric, x, 2)
    return curvature_from_jets(np.asarray(x, dtype=float), tj)


def curvature_from_jets(x: np.ndarray, tj: TensorJets) -> CurvatureBundle:
    n = tj.values.shape[0]
    A = tj.values
    Ainv = metric_inverse(A)
    gamma, dgamma, _ = christoffel_arrays(tj, order=1)
    # R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
    riemann = (np.einsum("iljk->ijkl", dgamma) - np.einsum("ikjl->ijkl", dgamma)
               + np.einsum("ikm,mlj->ijkl", gamma, gamma)
               - np.einsum("ilm,mkj->ijkl", gamma, gamma))
    riemann_cov = np.einsum("im,mjkl->ijkl", A, riemann)
    ric_c = np.einsum("ijil->jl", riemann)
    ric_h = 0.5 * (ric_c + ric_c.T)  # y-Hessian of the trace quadratic form
    ricci = 0.5 * (ric_c + ric_c.T)
    return CurvatureBundle(x=x, n=n, A=A, Ainv=Ainv, gamma=gamma, dgamma=dgamma,
                           riemann=riemann, riemann_cov=riemann_cov, ricci=ricci,
                           ricci_contracted=ric_c, ricci_hessian=ric_h)


def riemann_Rik(metric: MetricField, x, y) -> np.ndarray:
    """R^i_k(x, y); sign pinned so the round unit sphere gives
    alpha^2 d^i_k - y^i y_k."""
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DegeneratePlaneError("direction y must be nonzero")
    return curvature_bundle(metric, x).rik(y)


def ricci(metric: MetricField, x) -> np.ndarray:
    return curvature_bundle(metric, x).ricci


def sectional(metric: MetricField, x, u, v) -> float:
    return curvature_bundle(metric, x).sectional(u, v)


# ---------------------------------------------------------------------------
# Covariant derivatives of the 1-form and of derived 2-tensors
# ---------------------------------------------------------------------------

def covderiv_oneform(pair: GeometryPair, x) -> np.ndarray:
    """b_{i|j} = d_j b_i - Gamma^m_{ij} b_m."""
    tj = metric_at(pair.metric, x, 1)
    fj = oneform_at(pair.oneform, x, 1)
    gamma = christoffel_arrays(tj)[0]
    return fj.d1 - np.einsum("mij,m->ij", gamma, fj.values)


def covderiv_tensor2(T: np.ndarray, dT: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """T_{ij|k} = d_k T_ij - G^m_{ik} T_mj - G^m_{jk} T_im."""
    return (dT - np.einsum("mik,mj->ijk", gamma, T)
            - np.einsum("mjk,im->ijk", gamma, T))


def covderiv2_tensor2(T: np.ndarray, dT: np.ndarray, d2T: np.ndarray,
                      gamma: np.ndarray, dgamma: np.ndarray) -> tuple:
    """First and second covariant derivatives of a 2-tensor.

    Returns (T_{ij|k}, T_{ij|k|l}); the second derivative needs one more
    chart-derivative level of both T and Gamma.
    """
    DT = covderiv_tensor2(T, dT, gamma)
    # chart derivative of DT: d_l (d_k T_ij - G^m_ik T_mj - G^m_jk T_im)
    dDT = (d2T
           - np.einsum("mikl,mj->ijkl", dgamma, T)
           - np.einsum("mik,mjl->ijkl", gamma, dT)
           - np.einsum("mjkl,im->ijkl", dgamma, T)
           - np.einsum("mjk,iml->ijkl", gamma, dT))
    D2T = (dDT
           - np.einsum("mil,mjk->ijkl", gamma, DT)
           - np.einsum("mjl,imk->ijkl", gamma, DT)
           - np.einsum("mkl,ijm->ijkl", gamma, DT))
    return DT, D2T
