"""Isoprobability classes of driven two-level models.

Construct {Rabi frequency, detuning, phase} model pairs from a shared
Stueckelberg function, propagate them in the detuning or phase picture,
evaluate the closed-form class probabilities, scan excitation
landscapes, and register landscape maps against each other.
"""

__version__ = "0.1.0"

from .errors import (IsopulseError, ContractError, DomainError,
                     ConvergenceError, SingularityError, CatalogError,
                     ScanError, MapFormatError)
from .shapes import PulseShape, shape, custom_shape, audit_report
from .catalog import (LMSZ, AEH, StueckelbergClass, stueckelberg, ModelPair,
                      Window, TailBound, FixedWindow, EndpointGuard,
                      FullWindow, catalog_model, pair_from_shape,
                      pair_from_detuning, model_from_alpha_beta, truncate,
                      resolve_window, pair_audit_report)
from .dynamics import (IntegratorConfig, QubitState, DriveSample, Propagator,
                       drive_sample, propagate_detuning, propagate_phase,
                       transition_probability)
from .analytic import ClassParameters, lmsz_asymptotic, aeh_exact, rabi_resonant
from .landscape import (AxisSpec, Landscape, scan, save_csv, load_csv,
                        render_heatmap)
from .alignment import (AlignParams, Bounds, AlignmentResult, mse, objective,
                        shift_map, resample_bilinear, align)

__all__ = [
    "__version__",
    "IsopulseError", "ContractError", "DomainError", "ConvergenceError",
    "SingularityError", "CatalogError", "ScanError", "MapFormatError",
    "PulseShape", "shape", "custom_shape", "audit_report",
    "LMSZ", "AEH", "StueckelbergClass", "stueckelberg", "ModelPair",
    "Window", "TailBound", "FixedWindow", "EndpointGuard", "FullWindow",
    "catalog_model", "pair_from_shape", "pair_from_detuning",
    "model_from_alpha_beta", "truncate", "resolve_window",
    "pair_audit_report",
    "IntegratorConfig", "QubitState", "DriveSample", "Propagator",
    "drive_sample", "propagate_detuning", "propagate_phase",
    "transition_probability",
    "ClassParameters", "lmsz_asymptotic", "aeh_exact", "rabi_resonant",
    "AxisSpec", "Landscape", "scan", "save_csv", "load_csv",
    "render_heatmap",
    "AlignParams", "Bounds", "AlignmentResult", "mse", "objective",
    "shift_map", "resample_bilinear", "align",
]