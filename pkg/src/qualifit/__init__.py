"""Bayesian parameter estimation from qualitative and quantitative observations."""

from ._kernels import BACKEND
from .errors import ConfigError, ConstraintSyntaxError, DataError, QualifitError, SimulationError
from .likelihood import (
    chi_squared_nll,
    gaussian_cdf,
    many_category_term,
    observation_probability,
    static_penalty,
    three_category_probabilities,
    total_nll,
    two_category_term,
)
from .models import BiphasicToyModel, DecayODEModel, SimProtocol, get_model, rk4_integrate
from .observations import QualitativeObservation, QuantitativePoint, ReducedBinding
from .problem import Problem
from .sampler import PosteriorSamples, Prior, SamplerConfig, Target, anneal_run, pt_run
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BiphasicToyModel",
    "ConfigError",
    "ConstraintSyntaxError",
    "DataError",
    "DecayODEModel",
    "PosteriorSamples",
    "Prior",
    "Problem",
    "QualifitError",
    "QualitativeObservation",
    "QuantitativePoint",
    "ReducedBinding",
    "SamplerConfig",
    "SimProtocol",
    "SimulationError",
    "Target",
    "Trajectory",
    "anneal_run",
    "chi_squared_nll",
    "gaussian_cdf",
    "get_model",
    "many_category_term",
    "observation_probability",
    "pt_run",
    "rk4_integrate",
    "static_penalty",
    "three_category_probabilities",
    "total_nll",
    "two_category_term",
]
