"""Starlike boundary curves, curve samples and collocation grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateCurveError",
    "FourierCurve",
    "AnalyticCurve",
    "BoundarySplit",
    "CurveSample",
    "analytic_curve",
    "collocation_grid",
    "trapezoid_weights",
    "trig_basis",
    "fit_fourier",
    "eval_curve",
    "sample",
]

TWO_PI = 2.0 * np.pi


class DegenerateCurveError(ValueError):
    """Nonpositive radius or vanishing tangent."""


def trig_basis(theta, degree):
    """Rows ``(1, cos t, ..., cos Nt, sin t, ..., sin Nt)`` evaluated at ``theta``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    j = np.arange(1, degree + 1)
    jt = theta[:, None] * j[None, :]
    return np.hstack([np.ones((theta.size, 1)), np.cos(jt), np.sin(jt)])


def trig_basis_deriv(theta, degree, order=1):
    """Derivatives in ``theta`` of :func:`trig_basis` columns."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    j = np.arange(1, degree + 1)
    jt = theta[:, None] * j[None, :]
    # d^m/dt^m cos(jt) = j^m cos(jt + m pi/2)
    shift = order * np.pi / 2
    scale = j[None, :] ** order
    return np.hstack([
        np.zeros((theta.size, 1)),
        scale * np.cos(jt + shift),
        scale * np.sin(jt + shift),
    ])


class _RadialCurve:
    """Shared geometry for curves given by a radial function ``r(theta)``."""

    def radius(self, theta):
        raise NotImplementedError

    def radius_deriv(self, theta):
        raise NotImplementedError

    def points(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        if np.any(r <= 0):
            raise DegenerateCurveError("radial function must be positive")
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def tangents(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.radius(theta)
        dr = self.radius_deriv(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    def sample(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = self.points(theta)
        dz = self.tangents(theta)
        speed = np.hypot(dz[:, 0], dz[:, 1])
        if np.any(speed == 0):
            raise DegenerateCurveError("curve has a vanishing tangent")
        # counter-clockwise parameterization: outward normal is the tangent turned by -pi/2
        normal = np.stack([dz[:, 1], -dz[:, 0]], axis=-1) / speed[:, None]
        return CurveSample(theta=theta, points=z, normals=normal, speed=speed)


@dataclass(frozen=True)
class FourierCurve(_RadialCurve):
    """Radial function ``a0 + sum_j (a_j cos j t + b_j sin j t)``.

    ``coeffs`` is laid out as ``(a0, a1..aN, b1..bN)``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).copy()
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient vector must have odd length 2N+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return (self.coeffs.size - 1) // 2

    @classmethod
    def circle(cls, radius, degree=8):
        c = np.zeros(2 * degree + 1)
        c[0] = radius
        return cls(c)

    def radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (trig_basis(theta.ravel(), self.degree) @ self.coeffs).reshape(theta.shape)

    def radius_deriv(self, theta, order=1):
        theta = np.asarray(theta, dtype=float)
        return (trig_basis_deriv(theta.ravel(), self.degree, order) @ self.coeffs).reshape(theta.shape)


@dataclass(frozen=True)
class AnalyticCurve(_RadialCurve):
    """One of the closed-form ground-truth boundaries (bean, peanut, starfish, circle)."""

    name: str
    params: dict = field(default_factory=dict)

    def radius(self, theta):
        t = np.asarray(theta, dtype=float)
        if self.name == "bean":
            return (1 + 0.8 * np.cos(t) + 0.2 * np.sin(2 * t)) / (1 + 0.7 * np.cos(t))
        if self.name == "peanut":
            return 0.5 * np.sqrt(4 * np.cos(t) ** 2 + np.sin(t) ** 2)
        if self.name == "starfish":
            return 1 + 0.2 * np.cos(5 * t)
        if self.name == "circle":
            return np.full_like(t, float(self.params.get("radius", 1.0)))
        raise ValueError(f"unknown curve {self.name!r}")

    def radius_deriv(self, theta):
        t = np.asarray(theta, dtype=float)
        if self.name == "bean":
            num = 1 + 0.8 * np.cos(t) + 0.2 * np.sin(2 * t)
            dnum = -0.8 * np.sin(t) + 0.4 * np.cos(2 * t)
            den = 1 + 0.7 * np.cos(t)
            dden = -0.7 * np.sin(t)
            return (dnum * den - num * dden) / den**2
        if self.name == "peanut":
            q = 4 * np.cos(t) ** 2 + np.sin(t) ** 2
            return 0.25 * (-3 * np.sin(2 * t)) / np.sqrt(q)
        if self.name == "starfish":
            return -np.sin(5 * t)
        if self.name == "circle":
            return np.zeros_like(t)
        raise ValueError(f"unknown curve {self.name!r}")


CURVE_NAMES = ("bean", "peanut", "starfish", "circle")


def analytic_curve(name, **params):
    """Closed-form ground-truth curve by name; ``circle`` takes ``radius``."""
    if name not in CURVE_NAMES:
        raise ValueError(f"unknown curve {name!r}; expected one of {CURVE_NAMES}")
    return AnalyticCurve(name, dict(params))


def eval_curve(curve, theta):
    return curve.points(theta)


def sample(curve, theta):
    return curve.sample(theta)


@dataclass(frozen=True)
class CurveSample:
    """Points, unit outward normals and speeds ``|z'(theta)|`` at parameters ``theta``."""

    theta: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    speed: np.ndarray

    def __len__(self):
        return self.theta.size

    def subset(self, mask):
        return CurveSample(self.theta[mask], self.points[mask], self.normals[mask], self.speed[mask])


@dataclass(frozen=True)
class BoundarySplit:
    """Known arc ``[known_start, known_stop)``; the rest of ``[0, 2pi)`` is missing."""

    known_start: float = 0.0
    known_stop: float = np.pi

    def __post_init__(self):
        if not 0.0 <= self.known_start < self.known_stop <= TWO_PI:
            raise ValueError("known arc must be a nonempty sub-interval of [0, 2pi)")

    @property
    def known(self):
        return (self.known_start, self.known_stop)

    @property
    def missing(self):
        # the complement is contiguous when the known arc starts at 0
        return (self.known_stop, self.known_start + TWO_PI)

    def is_known(self, theta):
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        return (t >= self.known_start) & (t < self.known_stop)

    def is_missing(self, theta):
        return ~self.is_known(theta)


def collocation_grid(count, interval=(0.0, TWO_PI)):
    """Equispaced half-open nodes ``start + j * (stop - start) / count``."""
    start, stop = map(float, interval)
    if count < 2:
        raise ValueError("need at least two nodes")
    if not stop > start:
        raise ValueError("empty parameter interval")
    return start + np.arange(count) * ((stop - start) / count)


def trapezoid_weights(count, interval=(0.0, TWO_PI)):
    """Parameter-space weights matching :func:`collocation_grid` (multiply by speed for arc length)."""
    start, stop = map(float, interval)
    return np.full(count, (stop - start) / count)


def fit_fourier(theta, radius, degree):
    """Discrete least-squares projection of radial samples onto the degree-``N`` trig basis."""
    coeffs, *_ = np.linalg.lstsq(trig_basis(theta, degree), np.asarray(radius, dtype=float), rcond=None)
    return FourierCurve(coeffs)
