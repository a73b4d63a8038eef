"""Optimal constant strategies for power utility in exponential Lévy models."""

from ._backend import BACKEND
from .discrete import (GnValue, McConfig, QuadConfig, discrete_value_function, eval_gN,
                       eval_gN_prime, optimal_discrete, sample_log_increment,
                       sample_log_increments)
from .model import (AdmissibleInterval, JumpAtom, LevyTriplet, LogTriplet, MarketModel,
                    ModelError, PowerUtility, ValidationReport, admissible_set,
                    cumulant_exponent, levy_triplet, load_model, log_triplet, make_model,
                    model_from_config, validate_model)
from .objective import (ObjectiveDomainError, ObjectiveValue, continuous_value, eval_g,
                        eval_g_prime)
from .optimizer import OptResult, UnboundedProblemError, maximize_concave_1d, optimal_continuous
from .wealth_sim import CoupledTerminals, Estimate, l2_terminal_gap, simulate_coupled_terminals

__version__ = "0.1.0"
