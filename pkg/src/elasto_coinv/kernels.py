"""Elastic kernel matrices built from Helmholtz potentials.

A displacement is written as ``u = grad u_p + curl u_s`` with
``curl v = (d2 v, -d1 v)``, where ``u_p`` and ``u_s`` solve Helmholtz
equations with the compressional and shear wavenumbers.  Every kernel here
is assembled from derivatives of ``Phi(k|x - y|)`` so that x and y always sit
on disjoint curves and no singular quadrature is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specialfn import phi_derivs

__all__ = [
    "MaterialParams",
    "ElasticField",
    "kernel_E",
    "kernel_dE",
    "kernel_T",
    "kernel_dT",
    "traction",
    "layer_field",
    "point_source_field",
]

# curl as a matrix acting on a gradient: (d1, d2) -> (d2, -d1)
ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class MaterialParams:
    """Lame constants, density and angular frequency."""

    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not self.lam + self.mu > 0:
            raise ValueError("lam + mu must be positive")
        if not self.rho > 0 or not self.omega > 0:
            raise ValueError("rho and omega must be positive")

    @property
    def kp(self):
        """Compressional wavenumber ``omega sqrt(rho / (lam + 2 mu))``."""
        return self.omega * np.sqrt(self.rho / (self.lam + 2 * self.mu))

    @property
    def ks(self):
        """Shear wavenumber ``omega sqrt(rho / mu)``."""
        return self.omega * np.sqrt(self.rho / self.mu)


def _check_normal(n):
    n = np.asarray(n, dtype=float)
    if np.any(np.abs(np.hypot(n[..., 0], n[..., 1]) - 1.0) > 1e-10):
        raise ValueError("normal must have unit length")
    return n


def kernel_E(params, x, y):
    """2x2 kernel ``[[d1 Phi_p, d2 Phi_s], [d2 Phi_p, -d1 Phi_s]]`` (derivatives in x)."""
    gp = phi_derivs(params.kp, x, y, 1).grad
    gs = phi_derivs(params.ks, x, y, 1).grad
    return np.stack([gp, gs @ ROT.T], axis=-1)


def kernel_dE(params, x, y):
    """``out[..., i, l, k] = d/dx_k E_il(x, y)``."""
    hp = phi_derivs(params.kp, x, y, 2).hess
    hs = phi_derivs(params.ks, x, y, 2).hess
    return np.stack([hp, np.einsum("ij,...jk->...ik", ROT, hs)], axis=-2)


def _kernel_d2E(params, x, y):
    """``out[..., i, l, k, m] = d^2/dx_k dx_m E_il(x, y)``."""
    tp = phi_derivs(params.kp, x, y, 3).third
    ts = phi_derivs(params.ks, x, y, 3).third
    return np.stack([tp, np.einsum("ij,...jkm->...ikm", ROT, ts)], axis=-3)


def _traction_rows(params, dE, n):
    # dE[..., i, l, k] = d_k E_il ; returns T[..., i, l]
    lam, mu = params.lam, params.mu
    n1, n2 = n[..., 0, None], n[..., 1, None]
    d1E1, d2E1 = dE[..., 0, :, 0], dE[..., 0, :, 1]
    d1E2, d2E2 = dE[..., 1, :, 0], dE[..., 1, :, 1]
    shear = mu * (d2E1 + d1E2)
    t1 = ((lam + 2 * mu) * d1E1 + lam * d2E2) * n1 + shear * n2
    t2 = shear * n1 + (lam * d1E1 + (lam + 2 * mu) * d2E2) * n2
    return np.stack([t1, t2], axis=-2)


def kernel_T(params, x, n, y):
    """Traction kernel at ``x`` with unit normal ``n``; rows follow the bracketed T_1l, T_2l formulas."""
    n = _check_normal(n)
    return _traction_rows(params, kernel_dE(params, x, y), n)


def kernel_dT(params, x, n, y, direction, dn_dx=None):
    """``d/dx_direction`` of the traction kernel, ``direction`` in {1, 2}.

    By default the normal is held fixed (its derivative terms vanish).  Passing
    ``dn_dx[..., j, k] = d n_j / d x_k`` adds the terms carrying the normal's
    variation.
    """
    if direction not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    k = direction - 1
    n = _check_normal(n)
    d2E = _kernel_d2E(params, x, y)
    out = _traction_rows(params, d2E[..., k], n)
    if dn_dx is not None:
        dn = np.asarray(dn_dx, dtype=float)[..., :, k]
        out = out + _traction_rows(params, kernel_dE(params, x, y), dn)
    return out


def traction(params, grad_u, n):
    """Surface traction ``2 mu du/dn + lam n div u - mu n_perp (d1 u2 - d2 u1)``.

    ``grad_u[..., i, k] = d u_i / d x_k`` and ``n_perp = (-n2, n1)``.
    """
    n = np.asarray(n, dtype=float)
    div = grad_u[..., 0, 0] + grad_u[..., 1, 1]
    rot = grad_u[..., 1, 0] - grad_u[..., 0, 1]
    n_perp = np.stack([-n[..., 1], n[..., 0]], axis=-1)
    dudn = np.einsum("...ik,...k->...i", grad_u, n)
    return 2 * params.mu * dudn + params.lam * n * div[..., None] - params.mu * n_perp * rot[..., None]


def stress(params, grad_u):
    """Cauchy stress ``lam div(u) I + mu (grad u + grad u^T)``; works on trailing 2x2 axes."""
    div = grad_u[..., 0, 0] + grad_u[..., 1, 1]
    return params.lam * div[..., None, None] * np.eye(2) + params.mu * (grad_u + np.swapaxes(grad_u, -1, -2))


@dataclass
class ElasticField:
    """Displacement and derivatives at a batch of points.

    ``grad_u[q, i, k] = d u_i / d x_k``; ``hess_u[q, i, k, m]`` its derivative in
    ``x_m``.  ``traction`` and ``grad_traction`` are filled when normals are
    given; ``grad_traction[q, i, k]`` holds the normal fixed.
    """

    u: np.ndarray
    grad_u: np.ndarray
    hess_u: np.ndarray | None = None
    normals: np.ndarray | None = None
    traction: np.ndarray | None = None
    grad_traction: np.ndarray | None = None

    def stress(self, params):
        return stress(params, self.grad_u)


def _potential(k, x, y, dens, order):
    # contracted derivatives of sum_m Phi(k|x - y_m|) dens_m
    pd = phi_derivs(k, x[:, None, :], y[None, :, :], order)
    grad = np.einsum("qmi,m->qi", pd.grad, dens)
    hess = np.einsum("qmij,m->qij", pd.hess, dens)
    third = np.einsum("qmijk,m->qijk", pd.third, dens) if order >= 3 else None
    return grad, hess, third


def layer_field(params, x, y, dens_p, dens_s, normals=None, order=3):
    """Field of weighted point densities at nodes ``y`` evaluated at points ``x``.

    ``u = grad(sum_m Phi_p(.,y_m) dens_p[m]) + curl(sum_m Phi_s(.,y_m) dens_s[m])``.
    Quadrature weights must already be folded into the densities.
    ``order=3`` also returns second derivatives of ``u`` and the traction gradient.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    gp, hp, tp = _potential(params.kp, x, y, np.asarray(dens_p), order)
    gs, hs, ts = _potential(params.ks, x, y, np.asarray(dens_s), order)
    u = gp + gs @ ROT.T
    grad_u = hp + np.einsum("ij,qjk->qik", ROT, hs)
    hess_u = None
    if order >= 3:
        hess_u = tp + np.einsum("ij,qjkm->qikm", ROT, ts)
    field = ElasticField(u=u, grad_u=grad_u, hess_u=hess_u)
    if normals is not None:
        n = np.atleast_2d(np.asarray(normals, dtype=float))
        field.normals = n
        field.traction = traction(params, grad_u, n)
        if hess_u is not None:
            # d/dx_m of traction with n frozen: traction of the m-th slice of hess_u
            field.grad_traction = np.stack(
                [traction(params, hess_u[..., m], n) for m in range(2)], axis=-1
            )
    return field


def point_source_field(params, y0, scale, x, normals=None):
    """Exact field ``grad u_p + curl u_s`` with ``u_{p,s} = scale * H_0^(1)(k_{p,s}|x - y0|)``."""
    # H_0 = (4/i) Phi
    c = np.array([-4j * scale])
    return layer_field(params, x, np.asarray(y0, dtype=float)[None, :], c, c, normals=normals)
