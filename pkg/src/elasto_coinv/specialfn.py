"""Hankel functions and Cartesian derivatives of the 2D Helmholtz fundamental solution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["hankel1", "phi", "phi_derivs", "PhiDerivs", "SingularityError"]

MAX_ORDER = 3


class SingularityError(ValueError):
    """Raised when a kernel is evaluated at coincident points."""


def hankel1(order, x):
    """Hankel function of the first kind, ``H_n^(1)(x) = J_n(x) + i Y_n(x)``.

    Parameters
    ----------
    order : int
        Order, one of 0, 1, 2, 3.
    x : float or array_like
        Positive real argument.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be in 0..3, got {order!r}")
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("hankel1 requires a strictly positive argument")
    return special.hankel1(order, x)


def phi(k, x, y):
    """Fundamental solution ``(i/4) H_0^(1)(k|x-y|)``."""
    return phi_derivs(k, x, y, max_order=0).value


@dataclass(frozen=True)
class PhiDerivs:
    """Derivatives of ``Phi(k|x-y|)`` with respect to ``x``, up to third order.

    ``grad[..., i]``, ``hess[..., i, j]`` and ``third[..., i, j, l]`` are fully
    symmetric tensors; entries beyond ``max_order`` are ``None``.
    """

    d: np.ndarray
    k: float
    value: np.ndarray
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None
    third: np.ndarray | None = None

    def entry(self, alpha):
        """Return ``d^{a1}_{x1} d^{a2}_{x2} Phi`` for the multi-index ``alpha = (a1, a2)``."""
        a1, a2 = alpha
        order = a1 + a2
        idx = (0,) * a1 + (1,) * a2
        if order == 0:
            return self.value
        table = {1: self.grad, 2: self.hess, 3: self.third}.get(order)
        if table is None:
            raise ValueError(f"derivative order {order} not available")
        return table[(...,) + idx]


def _radial_ladder(k, r, max_order):
    # f_m = (r^{-1} d/dr)^m Phi = (i/4) (-k)^m r^{-m} H_m(kr)
    kr = k * r
    return [0.25j * (-k) ** m * special.hankel1(m, kr) / r**m for m in range(max_order + 1)]


def phi_derivs(k, x, y, max_order=3):
    """Evaluate ``Phi(k|x-y|) = (i/4) H_0^(1)(k|x-y|)`` and its x-derivatives.

    Uses the identity ``(r^{-1} d/dr)^m H_0(kr) = (-k)^m r^{-m} H_m(kr)`` so that
    every Cartesian derivative is a polynomial in ``d = x - y`` times one Hankel
    function; no finite differences are involved.

    ``x`` and ``y`` broadcast against each other, trailing axis of length 2.
    """
    if not 0 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_ORDER}")
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2)
    if np.any(r == 0.0):
        raise SingularityError("Phi is singular at coincident points")
    f = _radial_ladder(k, r, max_order)
    out = {"value": f[0]}
    if max_order >= 1:
        out["grad"] = d * f[1][..., None]
    if max_order >= 2:
        eye = np.eye(2)
        out["hess"] = eye * f[1][..., None, None] + d[..., :, None] * d[..., None, :] * f[2][..., None, None]
    if max_order >= 3:
        eye = np.eye(2)
        dd = d[..., :, None, None]
        sym = (
            eye[:, :, None] * d[..., None, None, :]
            + eye[:, None, :] * d[..., None, :, None]
            + eye[None, :, :] * dd
        )
        ddd = d[..., :, None, None] * d[..., None, :, None] * d[..., None, None, :]
        out["third"] = sym * f[2][..., None, None, None] + ddd * f[3][..., None, None, None]
    return PhiDerivs(d=d, k=float(k), **out)
