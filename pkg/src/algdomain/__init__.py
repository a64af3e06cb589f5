"""Recover planar algebraic domains from generalized polarization tensors."""

import logging

from ._kernels import BACKEND_NAME
from .errors import (AlgDomainError, CircuitLimitError, KernelAmbiguityError, LevelSetError,
                     NotAlgebraicError, SolveError, StageError)
from .geometry import BoundaryCurve, ShapeSpec, hausdorff, make_shape, resample
from .inversion import degree_scan, recover_coefficients
from .nptensor import Contrast, TgptMatrix, forward_tgpt, gpt, tgpt
from .pipeline import RecoveryConfig, rank_domains, recover_domain, stability_experiment
from .poly2d import Poly2

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"

__all__ = [
    "AlgDomainError", "BACKEND_NAME", "BoundaryCurve", "CircuitLimitError", "Contrast",
    "KernelAmbiguityError", "LevelSetError", "NotAlgebraicError", "Poly2", "RecoveryConfig",
    "ShapeSpec", "SolveError", "StageError", "TgptMatrix", "degree_scan", "forward_tgpt", "gpt",
    "hausdorff", "make_shape", "rank_domains", "recover_coefficients", "recover_domain",
    "resample", "stability_experiment", "tgpt",
]
