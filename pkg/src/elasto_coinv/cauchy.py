"""Cauchy data completion by layer potentials on a virtual circle.

Densities ``(phi_1, phi_2)`` live on the virtual boundary; the discrete
operator maps them to displacement and traction on the measured arc.  The
ill-posed system is solved by Tikhonov regularization with the parameter
picked by the discrepancy principle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import kernels
from .geometry import CurveSample, FourierCurve, collocation_grid

__all__ = [
    "GeometryError",
    "MorozovError",
    "CauchyData",
    "DiscreteOperator",
    "DensityPair",
    "RegularizationResult",
    "CompletedField",
    "virtual_boundary",
    "assemble",
    "tikhonov_solve",
    "morozov_alpha",
    "eval_completed_fields",
    "complete",
]

log = logging.getLogger(__name__)

ALPHA_FLOOR = 1e-16
MIN_SEPARATION = 1e-6


class GeometryError(ValueError):
    """Curves touch or a query point is too close to the virtual boundary."""


class MorozovError(ValueError):
    """The discrepancy level cannot be reached."""


def _min_distance(a, b):
    d = a[:, None, :] - b[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).min())


@dataclass
class CauchyData:
    """Displacement ``f`` and traction ``t`` (shape ``(M, 2)``) on the measured arc.

    ``samples`` carries the nodes, normals and arc-length speeds;
    ``weights`` the parameter-space quadrature weights.  ``eps`` is the
    discrepancy radius ``delta * ||h||`` in the weighted L2 norm.
    """

    samples: CurveSample
    weights: np.ndarray
    f: np.ndarray
    t: np.ndarray
    delta: float = 0.0
    eps: float = 0.0

    @property
    def arc_weights(self):
        return self.weights * self.samples.speed

    def stacked(self):
        """Data vector ``(f1, f2, t1, t2)`` matching the operator's row layout."""
        return np.concatenate([self.f[:, 0], self.f[:, 1], self.t[:, 0], self.t[:, 1]])

    def row_weights(self):
        return np.tile(self.arc_weights, 4)

    def norm(self):
        h = self.stacked()
        return float(np.sqrt(np.sum(self.row_weights() * np.abs(h) ** 2)))


@dataclass(frozen=True)
class DensityPair:
    """Layer densities at the virtual-boundary nodes: ``values = (phi_1; phi_2)`` stacked.

    ``weights`` are the arc-length quadrature weights of the nodes.
    """

    values: np.ndarray
    boundary: CurveSample
    weights: np.ndarray

    @property
    def phi_p(self):
        return self.values[: len(self.boundary)]

    @property
    def phi_s(self):
        return self.values[len(self.boundary):]


@dataclass
class DiscreteOperator:
    """Dense ``(4 Mc) x (2 Mb)`` matrix of the data map, plus quadrature metadata.

    Rows are ``(u1, u2, t1, t2)`` blocks over the arc nodes, columns
    ``(phi_1, phi_2)`` over the virtual nodes; the column quadrature weights
    are already folded into ``matrix``.
    """

    params: kernels.MaterialParams
    matrix: np.ndarray
    arc: CurveSample
    boundary: CurveSample
    row_weights: np.ndarray
    col_weights: np.ndarray
    _svd: tuple | None = field(default=None, repr=False)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def scaled(self):
        """Operator between unweighted coordinates: ``W_r^{1/2} A W_c^{-1/2}``."""
        return np.sqrt(self.row_weights)[:, None] * self.matrix / np.sqrt(self.col_weights)[None, :]

    def svd(self):
        if self._svd is None:
            self._svd = np.linalg.svd(self.scaled, full_matrices=False)
        return self._svd

    def apply(self, phi):
        return self.matrix @ phi

    def adjoint(self, xi):
        """Adjoint with respect to the weighted L2 inner products on both curves."""
        return (self.matrix.conj().T @ (self.row_weights * xi)) / self.col_weights

    def inner_rows(self, a, b):
        return np.sum(self.row_weights * a * np.conj(b))

    def inner_cols(self, a, b):
        return np.sum(self.col_weights * a * np.conj(b))

    def norm_rows(self, a):
        return float(np.sqrt(np.sum(self.row_weights * np.abs(a) ** 2)))


def virtual_boundary(radius, count=128):
    """Samples and parameter weights of the virtual circle ``|x| = radius``."""
    theta = collocation_grid(count)
    return FourierCurve.circle(radius, degree=1).sample(theta), np.full(count, 2 * np.pi / count)


def assemble(params, arc, boundary, boundary_weights, arc_weights):
    """Assemble the discrete data operator.

    Parameters
    ----------
    arc : CurveSample
        Collocation nodes on the measured arc.
    boundary : CurveSample
        Quadrature nodes on the virtual boundary.
    boundary_weights, arc_weights : ndarray
        Parameter-space quadrature weights; speeds are multiplied in here.
    """
    if _min_distance(arc.points, boundary.points) < MIN_SEPARATION:
        raise GeometryError("measured arc and virtual boundary are not separated")
    cw = boundary_weights * boundary.speed
    x = arc.points[:, None, :]
    y = boundary.points[None, :, :]
    E = kernels.kernel_E(params, x, y) * cw[None, :, None, None]
    T = kernels.kernel_T(params, x, arc.normals[:, None, :], y) * cw[None, :, None, None]
    # rows (u1, u2, t1, t2), columns (phi_1, phi_2)
    rows = [np.hstack([K[:, :, i, 0], K[:, :, i, 1]]) for K in (E, T) for i in (0, 1)]
    matrix = np.vstack(rows)
    row_w = np.tile(arc_weights * arc.speed, 4)
    col_w = np.tile(cw, 2)
    return DiscreteOperator(params, matrix, arc, boundary, row_w, col_w)


def _density_from_scaled(op, psi):
    return psi / np.sqrt(op.col_weights)


def _scaled_data(op, h):
    return np.sqrt(op.row_weights) * h


def tikhonov_solve(op, h, alpha):
    """Return ``(alpha I + N^* N)^{-1} N^* h`` as a :class:`DensityPair`."""
    if not alpha > 0:
        raise ValueError("regularization parameter must be positive")
    U, s, Vh = op.svd()
    c = U.conj().T @ _scaled_data(op, h)
    psi = Vh.conj().T @ (s / (s**2 + alpha) * c)
    return DensityPair(_density_from_scaled(op, psi), op.boundary, op.col_weights[: len(op.boundary)])


def discrepancy(op, h, alpha):
    """Weighted residual norm ``||N phi_alpha - h||`` computed from the SVD."""
    U, s, _ = op.svd()
    hs = _scaled_data(op, h)
    c = U.conj().T @ hs
    outside = max(np.linalg.norm(hs) ** 2 - np.linalg.norm(c) ** 2, 0.0)
    return float(np.sqrt(np.sum((alpha / (s**2 + alpha)) ** 2 * np.abs(c) ** 2) + outside))


@dataclass
class RegularizationResult:
    alpha: float
    density: DensityPair
    discrepancy: float
    iterations: int
    floored: bool = False


def morozov_alpha(op, h, eps, alpha_max=None, rtol=1e-2):
    """Pick ``alpha`` with ``||N phi_alpha - h|| = eps`` (to relative ``rtol``).

    The residual is monotone in ``alpha``; the root of
    ``log(residual / eps)`` is bracketed over ``log alpha`` and refined by Brent's
    method.  When even ``alpha = 1e-16`` over-shoots ``eps`` the floor value is
    returned with ``floored=True``.
    """
    hnorm = op.norm_rows(h)
    if eps >= hnorm:
        raise MorozovError(f"discrepancy level {eps:.3e} is not below the data norm {hnorm:.3e}")
    if eps <= 0 or discrepancy(op, h, ALPHA_FLOOR) >= eps:
        phi = tikhonov_solve(op, h, ALPHA_FLOOR)
        return RegularizationResult(ALPHA_FLOOR, phi, discrepancy(op, h, ALPHA_FLOOR), 0, floored=True)
    s_max = op.svd()[1][0]
    hi = alpha_max if alpha_max is not None else 1e4 * s_max**2
    while discrepancy(op, h, hi) < eps:
        hi *= 100.0
    calls = 0

    def g(logalpha):
        nonlocal calls
        calls += 1
        return np.log(discrepancy(op, h, np.exp(logalpha)) / eps)

    # |log ratio| < 1e-3 keeps the ratio well inside [1 - rtol, 1 + rtol]
    root = optimize.brentq(g, np.log(ALPHA_FLOOR), np.log(hi), xtol=1e-10, rtol=1e-12, maxiter=200)
    alpha = float(np.exp(root))
    res = discrepancy(op, h, alpha)
    if abs(res - eps) > rtol * eps:
        raise MorozovError(f"root finder ended at ratio {res / eps:.4f}")
    log.debug("morozov: alpha=%.4e ratio=%.6f after %d evaluations", alpha, res / eps, calls)
    return RegularizationResult(alpha, tikhonov_solve(op, h, alpha), res, calls)


@dataclass
class CompletedField:
    """Field generated by regularized densities on the virtual boundary."""

    params: kernels.MaterialParams
    density: DensityPair
    min_clearance: float = MIN_SEPARATION

    def __call__(self, points, normals=None, order=3):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        bnd = self.density.boundary
        R = np.hypot(bnd.points[:, 0], bnd.points[:, 1]).min()
        if _min_distance(points, bnd.points) < self.min_clearance or np.any(
            np.hypot(points[:, 0], points[:, 1]) >= R
        ):
            raise GeometryError("query point is not strictly inside the virtual boundary")
        w = self.density.weights
        return kernels.layer_field(
            self.params,
            points,
            bnd.points,
            self.density.phi_p * w,
            self.density.phi_s * w,
            normals=normals,
            order=order,
        )


def eval_completed_fields(params, density, points, normals=None, order=3):
    """Evaluate ``u``, its gradient and, with normals, traction and traction gradient."""
    return CompletedField(params, density)(points, normals, order)


def complete(params, data, boundary_radius, boundary_nodes=128):
    """Solve the completion problem for ``data`` and return ``(CompletedField, RegularizationResult, op)``."""
    bnd, bw = virtual_boundary(boundary_radius, boundary_nodes)
    op = assemble(params, data.samples, bnd, bw, data.weights)
    reg = morozov_alpha(op, data.stacked(), data.eps)
    return CompletedField(params, reg.density), reg, op
