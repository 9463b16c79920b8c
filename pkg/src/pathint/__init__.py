"""Exact non-Markovian polarization dynamics of dot-cavity systems via
path-integral tensor multiplication with SVD compression."""

__version__ = "0.1.0"

from .bath import (BathSpec, CumulantTable, QuadratureError, spectral_density,
                   correlation_function, cumulant_function,
                   build_cumulant_table)
from .system import (SystemSpec, StepMatrix, build_h0_case1, build_h0_case2,
                     step_matrix)
from .oracle import (FullIF, CapacityError, propagator_factor, propagate_full,
                     readout_full, trace_full)
from .compressed import (CompressedIF, init_compressed, apply_propagator,
                         truncate, readout_compressed, run_polarization)
from .trace import PolarizationTrace
from .fit import (FitTerm, RateFit, FitError, fit_exponentials,
                  residual_trace, evaluate_fit)
from .extrapolate import (ParameterFamily, Extrapolation, power_law_fit,
                          extrapolation_error, extrapolated_trace)
from .fgr import (RatePrediction, gamma_ph_case1, gamma_ph_case2,
                  rates_with_virtual)
