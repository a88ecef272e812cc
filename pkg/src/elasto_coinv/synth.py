"""Synthetic experiments: exact Cauchy data, boundary targets and noise."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .cauchy import CauchyData
from .geometry import analytic_curve, collocation_grid, trapezoid_weights

__all__ = [
    "ExperimentSpec",
    "GroundTruth",
    "BoundaryTarget",
    "ExactField",
    "make_data",
    "add_noise",
    "parse_function",
    "solve_impedance_field",
    "EXAMPLES",
]

_FUNC_NAMESPACE = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt, "pi": np.pi, "abs": np.abs}


def parse_function(expr):
    """Compile a config expression in the angle ``t`` (e.g. ``"sin(t)**4 + 1"``) to a vectorized callable."""
    code = compile(expr, "<config>", "eval")
    for name in code.co_names:
        if name not in _FUNC_NAMESPACE and name != "t":
            raise ValueError(f"unknown name {name!r} in expression {expr!r}")

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(eval(code, {"__builtins__": {}}, {**_FUNC_NAMESPACE, "t": t}), t.shape).astype(float)

    fn.expr = expr
    return fn


@dataclass
class ExperimentSpec:
    """One synthetic experiment.

    ``field_mode`` is ``"point_source"`` (exact field ``grad u_p + curl u_s``
    generated by ``source``/``scale``) or ``"impedance"`` (field solving the
    impedance problem with the explicit ``target``).  ``target`` is an
    expression in ``t`` or ``"manufactured"``.
    """

    name: str = "custom"
    geometry: str = "circle"
    geometry_radius: float = 1.0
    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0
    omega: float = 1.0
    field_mode: str = "point_source"
    source: tuple = (4.0, 9.0)
    scale: complex = 1.0
    impedance: str = "1"
    target: str = "manufactured"
    boundary_radius: float = 4.0
    init_radius: float = 0.3
    chi0: float = 0.5
    noise: float = 0.0
    seed: int = 0
    arc_nodes: int = 32
    known_stop: float = np.pi

    @property
    def material(self):
        return kernels.MaterialParams(self.lam, self.mu, self.rho, self.omega)

    def curve(self):
        if self.geometry == "circle":
            return analytic_curve("circle", radius=self.geometry_radius)
        return analytic_curve(self.geometry)

    def chi_true(self):
        return parse_function(self.impedance)

    def source_inside(self):
        y0 = np.asarray(self.source, dtype=float)
        r0 = np.hypot(*y0)
        if r0 == 0:
            return True
        return bool(r0 <= self.curve().radius(np.arctan2(y0[1], y0[0])))


class ExactField:
    """Callable exact field; returns an :class:`~elasto_coinv.kernels.ElasticField`."""

    def __init__(self, params, nodes, dens_p, dens_s):
        self.params = params
        self.nodes = np.atleast_2d(nodes)
        self.dens_p = np.asarray(dens_p)
        self.dens_s = np.asarray(dens_s)

    @classmethod
    def point_source(cls, params, y0, scale):
        c = np.array([-4j * complex(scale)])  # H_0 = (4/i) Phi
        return cls(params, np.asarray(y0, dtype=float)[None, :], c, c)

    def __call__(self, points, normals=None, order=2):
        return kernels.layer_field(self.params, points, self.nodes, self.dens_p, self.dens_s, normals, order)


def solve_impedance_field(params, curve, chi, g, source_radius=None, n_sources=64, n_colloc=256):
    """Fit an exact field with ``T_n u + i omega chi u = g`` on the whole closed ``curve``.

    The field is a sum of fundamental solutions centred on a circle outside the
    curve; densities are the least-squares solution of the boundary condition
    at ``n_colloc`` nodes.  Returns ``(ExactField, relative residual)``.
    """
    theta = collocation_grid(n_colloc)
    smp = curve.sample(theta)
    if source_radius is None:
        source_radius = 1.75 * float(np.max(np.hypot(smp.points[:, 0], smp.points[:, 1])))
    phi_src = collocation_grid(n_sources)
    nodes = source_radius * np.stack([np.cos(phi_src), np.sin(phi_src)], axis=-1)
    x = smp.points[:, None, :]
    E = kernels.kernel_E(params, x, nodes[None])
    T = kernels.kernel_T(params, x, smp.normals[:, None, :], nodes[None])
    A = T + 1j * params.omega * chi(theta)[:, None, None, None] * E  # (q, m, i, l)
    A = A.transpose(0, 2, 3, 1).reshape(2 * n_colloc, 2 * n_sources)
    b = np.asarray(g(theta)).reshape(-1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    bnorm = np.linalg.norm(b)
    rel = np.linalg.norm(A @ sol - b) / bnorm if bnorm > 0 else 0.0
    sol = sol.reshape(2, n_sources)
    return ExactField(params, nodes, sol[0], sol[1]), float(rel)


@dataclass
class BoundaryTarget:
    """Boundary function ``g`` indexed by the angular parameter; returns ``(n, 2)`` complex."""

    fn: object
    description: str = ""

    def __call__(self, theta):
        return self.fn(np.atleast_1d(np.asarray(theta, dtype=float)))


@dataclass
class GroundTruth:
    curve: object
    chi: object
    field: ExactField
    split_stop: float = np.pi
    diagnostics: dict = field(default_factory=dict)


def _explicit_target(expr):
    fn = parse_function(expr)

    def g(theta):
        v = fn(theta).astype(complex)
        return np.stack([v, v], axis=-1)

    return BoundaryTarget(g, f"g1 = g2 = {expr}")


def _manufactured_target(params, curve, chi, exact):
    def g(theta):
        smp = curve.sample(theta)
        fld = exact(smp.points, smp.normals, order=2)
        return fld.traction + 1j * params.omega * chi(theta)[:, None] * fld.u

    return BoundaryTarget(g, "T_n u + i omega chi u of the exact field on the true boundary")


def make_data(spec):
    """Return ``(CauchyData, BoundaryTarget, GroundTruth)`` for ``spec``, noise included."""
    params = spec.material
    curve = spec.curve()
    chi = spec.chi_true()
    diagnostics = {}
    if spec.field_mode == "point_source":
        exact = ExactField.point_source(params, spec.source, spec.scale)
        if spec.target == "manufactured":
            target = _manufactured_target(params, curve, chi, exact)
        else:
            target = _explicit_target(spec.target)
        if spec.source_inside():
            warnings.warn(
                f"source {tuple(spec.source)} lies inside the domain; the exact field is singular there",
                stacklevel=2,
            )
    elif spec.field_mode == "impedance":
        if spec.target == "manufactured":
            raise ValueError("impedance field mode needs an explicit target expression")
        target = _explicit_target(spec.target)
        exact, rel = solve_impedance_field(params, curve, chi, target)
        diagnostics["impedance_fit_residual"] = rel
    else:
        raise ValueError(f"unknown field mode {spec.field_mode!r}")

    theta = collocation_grid(spec.arc_nodes, (0.0, spec.known_stop))
    smp = curve.sample(theta)
    fld = exact(smp.points, smp.normals, order=2)
    data = CauchyData(
        samples=smp,
        weights=trapezoid_weights(spec.arc_nodes, (0.0, spec.known_stop)),
        f=fld.u,
        t=fld.traction,
    )
    data = add_noise(data, spec.noise, spec.seed)
    return data, target, GroundTruth(curve, chi, exact, spec.known_stop, diagnostics)


def add_noise(data, delta, seed=0):
    """Perturb the stacked data so that the weighted norm of the perturbation is exactly ``delta * ||h||``."""
    if delta < 0:
        raise ValueError("noise level must be nonnegative")
    if delta == 0:
        return replace(data, delta=0.0, eps=0.0)
    rng = np.random.default_rng(seed)
    h = data.stacked()
    w = data.row_weights()
    e = rng.standard_normal(h.size) + 1j * rng.standard_normal(h.size)
    hnorm = data.norm()
    e *= delta * hnorm / np.sqrt(np.sum(w * np.abs(e) ** 2))
    hd = h + e
    m = data.f.shape[0]
    f = np.stack([hd[:m], hd[m:2 * m]], axis=-1)
    t = np.stack([hd[2 * m:3 * m], hd[3 * m:]], axis=-1)
    return replace(data, f=f, t=t, delta=float(delta), eps=float(delta * hnorm))


EXAMPLES = {
    "ex1_bean": ExperimentSpec(
        name="ex1_bean", geometry="bean", omega=3.0, source=(1.0, 0.0), scale=1.0,
        impedance="sin(t)**4 + 1", boundary_radius=4.0, init_radius=0.3,
    ),
    "ex1_bean_exterior": ExperimentSpec(
        name="ex1_bean_exterior", geometry="bean", omega=3.0, source=(4.0, 9.0), scale=1.0,
        impedance="sin(t)**4 + 1", boundary_radius=4.0, init_radius=0.3,
    ),
    "ex2_peanut": ExperimentSpec(
        name="ex2_peanut", geometry="peanut", omega=5.0, source=(4.0, -9.0), scale=0.25j,
        impedance="sin(t)**4", boundary_radius=4.0, init_radius=0.3,
    ),
    "ex2_starfish": ExperimentSpec(
        name="ex2_starfish", geometry="starfish", omega=3.0, source=(4.0, 9.0), scale=0.25j,
        impedance="1", boundary_radius=4.0, init_radius=0.3,
    ),
    "ex3_circle": ExperimentSpec(
        name="ex3_circle", geometry="circle", geometry_radius=1.2, omega=2.0, field_mode="impedance",
        impedance="sin(t)**2", target="sin(t)**2", boundary_radius=7.0, init_radius=0.6, chi0=0.5,
    ),
}
