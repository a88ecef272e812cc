"""Co-inversion of a missing boundary arc and its impedance from partial elastic Cauchy data."""

from .cauchy import CauchyData, CompletedField, assemble, complete, morozov_alpha, tikhonov_solve
from .geometry import FourierCurve, analytic_curve, collocation_grid
from .inversion import ImpedanceModel, Inversion, InversionConfig
from .kernels import MaterialParams, kernel_dT, kernel_E, kernel_T, point_source_field
from .specialfn import hankel1, phi_derivs
from .synth import EXAMPLES, ExperimentSpec, add_noise, make_data

__version__ = "0.1.0"
