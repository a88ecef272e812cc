"""End-to-end experiment: synthesize data, complete it, invert for shape and impedance."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import cauchy, synth
from .geometry import FourierCurve, collocation_grid
from .inversion import Inversion, InversionResult

__all__ = ["PipelineResult", "run_pipeline"]


@dataclass
class PipelineResult:
    config: object
    data: cauchy.CauchyData
    truth: synth.GroundTruth
    regularization: cauchy.RegularizationResult
    inversion: Inversion
    result: InversionResult
    runtime: float

    @property
    def boundary_error(self):
        return self.inversion.boundary_error(self.result.final.coeffs, self.truth.curve)

    @property
    def impedance_error(self):
        return self.inversion.impedance_error(self.result.final.impedance, self.truth.chi)

    def boundary_table(self, count=256):
        th = collocation_grid(count)
        r_init = FourierCurve(self.result.history[0].coeffs).radius(th)
        r_rec = FourierCurve(self.result.final.coeffs).radius(th)
        return th, self.truth.curve.radius(th), r_init, r_rec

    def impedance_table(self, count=128):
        th = collocation_grid(count, self.inversion.split.missing)
        return th, self.truth.chi(th), self.result.final.impedance(th)


def prepare(config):
    """Synthesize the data and run the completion stage; returns ``(data, target, truth, field, reg)``."""
    spec = config.spec
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        data, target, truth = synth.make_data(spec)
    field, reg, _ = cauchy.complete(spec.material, data, spec.boundary_radius, config.boundary_nodes)
    return data, target, truth, field, reg


def run_pipeline(config, callback=None):
    """Run completion and inversion for a :class:`~elasto_coinv.config.RunConfig`."""
    t0 = time.perf_counter()
    data, target, truth, field, reg = prepare(config)
    inv = Inversion(config.spec.material, field, target, truth.curve, config.inversion)
    result = inv.run(config.spec.init_radius, config.spec.chi0, callback=callback)
    return PipelineResult(config, data, truth, reg, inv, result, time.perf_counter() - t0)


def fmt(x):
    return f"{float(x):.17e}"


def history_rows(result):
    for s in result.history:
        yield [str(s.n), fmt(s.error) if np.isfinite(s.error) else "inf", fmt(s.residual_norm), "1"] + [
            fmt(v) for v in s.coeffs
        ] + [fmt(v) for v in s.impedance.coeffs]
