"""Alternating Newton-type reconstruction of the missing boundary and its impedance.

Each sweep linearizes ``Q(a) = t(z_a) + i omega chi u(z_a)`` in the radial
Fourier coefficients ``a`` and solves a damped least-squares problem for the
shape update, then re-evaluates on the new curve and solves for the
impedance update on the missing arc.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cauchy import GeometryError
from .geometry import (
    BoundarySplit,
    DegenerateCurveError,
    FourierCurve,
    collocation_grid,
    trig_basis,
    trig_basis_deriv,
)

__all__ = [
    "InversionConfig",
    "ImpedanceModel",
    "IterationState",
    "InversionResult",
    "Inversion",
    "IterateDivergedError",
    "StepFailure",
    "ImpedanceUnidentifiableError",
    "damped_lstsq",
    "relative_l2_error",
]

log = logging.getLogger(__name__)


class IterateDivergedError(RuntimeError):
    """The curve left the virtual boundary or its radius became nonpositive."""

    def __init__(self, msg, history=None):
        super().__init__(msg)
        self.history = history or []


class StepFailure(RuntimeError):
    """Linearized system could not be solved."""


class ImpedanceUnidentifiableError(StepFailure):
    """The displacement vanishes on the missing arc, so the impedance update is undefined."""


@dataclass
class InversionConfig:
    degree: int = 8
    impedance_degree: int = 8
    impedance_mode: str = "basis"  # or "pointwise"
    nodes: int = 64
    max_iter: int = 300
    tol: float = 1e-5
    damping: float = 1e-8
    normal_mode: str = "exact"  # or "frozen"
    clamp_impedance: bool = False
    known_stop: float = np.pi

    def __post_init__(self):
        if self.normal_mode not in ("frozen", "exact"):
            raise ValueError(f"unknown normal mode {self.normal_mode!r}")
        if self.impedance_mode not in ("basis", "pointwise"):
            raise ValueError(f"unknown impedance mode {self.impedance_mode!r}")


@dataclass
class ImpedanceModel:
    """Impedance on the missing arc.

    In ``basis`` mode ``coeffs`` are trigonometric coefficients
    ``(c0, c1..cN, d1..dN)`` in the angle; in ``pointwise`` mode they are
    values at ``nodes`` (linearly interpolated in between).
    """

    coeffs: np.ndarray
    mode: str = "basis"
    nodes: np.ndarray | None = None

    @classmethod
    def constant(cls, value, degree=8, mode="basis", nodes=None):
        if mode == "pointwise":
            return cls(np.full(len(nodes), float(value)), mode, np.asarray(nodes, dtype=float))
        c = np.zeros(2 * degree + 1)
        c[0] = value
        return cls(c, mode)

    @property
    def degree(self):
        return (self.coeffs.size - 1) // 2

    def design(self, theta):
        """Matrix mapping ``coeffs`` to values at ``theta``."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if self.mode == "basis":
            return trig_basis(theta, self.degree)
        if theta.shape == self.nodes.shape and np.allclose(theta, self.nodes):
            return np.eye(self.nodes.size)
        # hat functions on the node grid
        eye = np.eye(self.nodes.size)
        return np.stack([np.interp(theta, self.nodes, eye[i]) for i in range(self.nodes.size)], axis=-1)

    def __call__(self, theta):
        return self.design(theta) @ self.coeffs

    def updated(self, delta):
        return ImpedanceModel(self.coeffs + delta, self.mode, self.nodes)


@dataclass
class IterationState:
    n: int
    coeffs: np.ndarray
    impedance: ImpedanceModel
    residual: np.ndarray
    residual_norm: float
    error: float = np.inf


@dataclass
class InversionResult:
    history: list
    converged: bool

    @property
    def final(self):
        return self.history[-1]

    @property
    def steps(self):
        return self.history[-1].n


def damped_lstsq(J, rhs, damping):
    """Solve ``(J^T J + tau I) x = J^T rhs`` with ``tau = damping * max diag(J^T J)``."""
    A = J.T @ J
    tau = damping * float(np.max(np.diag(A))) if A.size else 0.0
    if not tau > 0:
        if np.allclose(rhs, 0):
            return np.zeros(J.shape[1])
        raise StepFailure("linearized system has a zero Jacobian")
    try:
        x = np.linalg.solve(A + tau * np.eye(A.shape[0]), J.T @ rhs)
    except np.linalg.LinAlgError as exc:
        raise StepFailure(f"damped normal equations are singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise StepFailure("nonfinite update")
    return x


def _realify(J):
    # complex (nodes, 2, cols) -> real (4 nodes, cols)
    J = J.reshape(-1, J.shape[-1]) if J.ndim == 3 else J.reshape(-1, 1)
    return np.vstack([J.real, J.imag])


def relative_l2_error(approx, exact):
    return float(np.linalg.norm(approx - exact) / np.linalg.norm(exact))


class Inversion:
    """Reconstruction problem bound to a completed field.

    Parameters
    ----------
    params : MaterialParams
    field : callable
        ``field(points, normals)`` returning an ``ElasticField`` with traction
        and gradients (typically a :class:`~elasto_coinv.cauchy.CompletedField`).
    target : callable
        ``g(theta)`` returning ``(n, 2)`` complex values.
    known_curve : curve
        Geometry of the measured arc; only evaluated at known-arc parameters.
    config : InversionConfig
    """

    def __init__(self, params, field, target, known_curve, config=None):
        self.params = params
        self.field = field
        self.target = target
        self.known_curve = known_curve
        self.config = config or InversionConfig()
        cfg = self.config
        self.split = BoundarySplit(0.0, cfg.known_stop)
        self.theta = collocation_grid(cfg.nodes)
        self.known_mask = self.split.is_known(self.theta)
        self.missing_mask = ~self.known_mask
        self.theta_missing = self.theta[self.missing_mask]
        self.g = np.asarray(target(self.theta))
        self._last = None
        self.chi_known = self._fit_known_impedance()

    # -- impedance on the measured arc ---------------------------------
    def _fit_known_impedance(self):
        """Per-node real least-squares fit of ``t + i omega chi u = g`` on the known arc."""
        th = self.theta[self.known_mask]
        if th.size == 0:
            return np.zeros(0)
        smp = self.known_curve.sample(th)
        fld = self.field(smp.points, smp.normals)
        col = 1j * self.params.omega * fld.u
        r = self.g[self.known_mask] - fld.traction
        den = np.sum(np.abs(col) ** 2, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.real(np.sum(np.conj(col) * r, axis=-1)) / den

    def chi_nodes(self, impedance):
        chi = np.empty(self.theta.size)
        chi[self.known_mask] = self.chi_known
        chi[self.missing_mask] = impedance(self.theta_missing)
        return chi

    def initial_state(self, radius, chi0):
        cfg = self.config
        a = FourierCurve.circle(radius, cfg.degree).coeffs.copy()
        imp = ImpedanceModel.constant(chi0, cfg.impedance_degree, cfg.impedance_mode, self.theta_missing)
        Q, fld, smp = self._evaluate(a, imp)
        res = Q - self.g
        return IterationState(0, a, imp, res, self.residual_norm(res))

    # -- residual ------------------------------------------------------
    def _sample(self, coeffs):
        curve = FourierCurve(coeffs)
        try:
            return curve.sample(self.theta)
        except DegenerateCurveError as exc:
            raise IterateDivergedError(f"iterate degenerated: {exc}") from exc

    def _field(self, points, normals):
        try:
            return self.field(points, normals)
        except GeometryError as exc:
            raise IterateDivergedError(f"iterate left the virtual boundary: {exc}") from exc

    def _evaluate(self, coeffs, impedance, normals=None):
        key = None
        if normals is None:
            key = (np.asarray(coeffs).tobytes(), impedance.coeffs.tobytes())
            if self._last is not None and self._last[0] == key:
                return self._last[1]
        smp = self._sample(coeffs)
        n = smp.normals if normals is None else normals
        fld = self._field(smp.points, n)
        chi = self.chi_nodes(impedance)
        Q = fld.traction + 1j * self.params.omega * chi[:, None] * fld.u
        if key is not None:
            self._last = (key, (Q, fld, smp))
        return Q, fld, smp

    def residual_Q(self, coeffs, impedance, normals=None):
        """``Q = t(z) + i omega chi u(z)`` at the grid nodes of the curve ``coeffs``.

        ``normals`` overrides the curve normals (used to freeze them).
        """
        return self._evaluate(coeffs, impedance, normals)[0]

    def residual_norm(self, res):
        return float(np.sqrt(np.sum(np.abs(res) ** 2) * (2 * np.pi / self.theta.size)))

    # -- shape ---------------------------------------------------------
    def jacobian(self, coeffs, impedance, normal_mode=None):
        """Complex Jacobian ``dQ/da`` of shape ``(nodes, 2, 2N+1)``."""
        normal_mode = normal_mode or self.config.normal_mode
        Q, fld, smp = self._evaluate(coeffs, impedance)
        chi = self.chi_nodes(impedance)
        th = self.theta
        xhat = np.stack([np.cos(th), np.sin(th)], axis=-1)
        dQdx = fld.grad_traction + 1j * self.params.omega * chi[:, None, None] * fld.grad_u
        radial = np.einsum("qik,qk->qi", dQdx, xhat)
        B = trig_basis(th, self.config.degree)
        J = radial[:, :, None] * B[:, None, :]
        if normal_mode == "exact":
            # n = rot(z') / |z'| with rot(v) = (v2, -v1); dz'/da_m = B_m' xhat + B_m xhat_perp
            xperp = np.stack([-np.sin(th), np.cos(th)], axis=-1)
            dB = trig_basis_deriv(th, self.config.degree)
            dz = dB[:, None, :] * xhat[:, :, None] + B[:, None, :] * xperp[:, :, None]
            dv = np.stack([dz[:, 1], -dz[:, 0]], axis=1)
            n = smp.normals
            proj = np.eye(2) - n[:, :, None] * n[:, None, :]
            dn = np.einsum("qij,qjm->qim", proj, dv) / smp.speed[:, None, None]
            sigma = fld.stress(self.params)
            J = J + np.einsum("qij,qjm->qim", sigma, dn)
        return J

    def shape_step(self, state):
        Q, _, _ = self._evaluate(state.coeffs, state.impedance)
        rhs = self.g - Q
        J = self.jacobian(state.coeffs, state.impedance)
        return damped_lstsq(_realify(J), _realify(rhs[..., None])[:, 0], self.config.damping)

    # -- impedance -----------------------------------------------------
    def impedance_step(self, coeffs, impedance):
        Q, fld, _ = self._evaluate(coeffs, impedance)
        m = self.missing_mask
        u = fld.u[m]
        if np.max(np.abs(u)) < 1e-12:
            raise ImpedanceUnidentifiableError("displacement vanishes on the missing arc")
        rhs = (self.g - Q)[m]
        D = impedance.design(self.theta_missing)
        J = 1j * self.params.omega * u[:, :, None] * D[:, None, :]
        return damped_lstsq(_realify(J), _realify(rhs[..., None])[:, 0], self.config.damping)

    # -- driver --------------------------------------------------------
    def _chi_norm(self, impedance_or_delta):
        return float(np.linalg.norm(impedance_or_delta))

    def step(self, state):
        """One alternating sweep; returns the next state."""
        da = self.shape_step(state)
        a_new = state.coeffs + da
        dchi_coeffs = self.impedance_step(a_new, state.impedance)
        imp_new = state.impedance.updated(dchi_coeffs)
        if self.config.clamp_impedance:
            vals = np.maximum(imp_new(self.theta_missing), 0.0)
            D = imp_new.design(self.theta_missing)
            imp_new = ImpedanceModel(np.linalg.lstsq(D, vals, rcond=None)[0], imp_new.mode, imp_new.nodes)
        Q, _, _ = self._evaluate(a_new, imp_new)
        res = Q - self.g
        chi_prev = state.impedance(self.theta_missing)
        dchi = imp_new(self.theta_missing) - chi_prev
        chi_den = np.linalg.norm(chi_prev)
        err = np.linalg.norm(da) / np.linalg.norm(state.coeffs)
        err += np.linalg.norm(dchi) / chi_den if chi_den > 0 else np.linalg.norm(dchi)
        return IterationState(state.n + 1, a_new, imp_new, res, self.residual_norm(res), float(err))

    def run(self, init_radius, chi0, callback=None):
        state = self.initial_state(init_radius, chi0)
        history = [state]
        converged = False
        for _ in range(self.config.max_iter):
            try:
                state = self.step(state)
            except (IterateDivergedError, StepFailure) as exc:
                exc.history = history
                raise
            history.append(state)
            if callback is not None:
                callback(state)
            log.debug("iter %d: E=%.3e |Q-g|=%.3e", state.n, state.error, state.residual_norm)
            if state.error < self.config.tol:
                converged = True
                break
        return InversionResult(history, converged)

    # -- diagnostics ---------------------------------------------------
    def boundary_error(self, coeffs, true_curve, count=256):
        th = collocation_grid(count, self.split.missing)
        return relative_l2_error(FourierCurve(coeffs).radius(th), true_curve.radius(th))

    def impedance_error(self, impedance, true_chi, count=256):
        th = collocation_grid(count, self.split.missing)
        return relative_l2_error(impedance(th), true_chi(th))
