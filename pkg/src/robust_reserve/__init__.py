"""Max-min robust reserve prices for second-price auctions."""
from .core import (ParametricSetting, PiecewiseCdf, RandomStream, VerificationReport,
                   cdf_eval, moment, quantile, sample, validate)
from .kernels import BACKEND

__all__ = ["ParametricSetting", "PiecewiseCdf", "RandomStream", "VerificationReport",
           "cdf_eval", "moment", "quantile", "sample", "validate", "BACKEND"]
__version__ = "0.1.0"
