"""Heavy-tailed linear processes: path simulation and numerical checks of their limit behaviour."""

__version__ = "0.1.0"

from .coefficients import CoefficientSeq, aggregates, coeff, d_coefficient, three_series_sum
from .innovations import SlowlyVarying, TailModel, norming_constant, sample_innovations
from .linproc import CadlagPath, InnovationWindow, build_process, partial_sum_path
from .stable import stable_oracle_chf, stable_oracle_sample

__all__ = [
    "CadlagPath", "CoefficientSeq", "InnovationWindow", "SlowlyVarying", "TailModel",
    "aggregates", "build_process", "coeff", "d_coefficient", "norming_constant",
    "partial_sum_path", "sample_innovations", "stable_oracle_chf", "stable_oracle_sample",
    "three_series_sum",
]
