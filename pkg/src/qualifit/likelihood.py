"""Likelihood and objective terms for quantitative and qualitative data.

All functions are pure. Qualitative observations are in canonical
``reduced < threshold`` form; the probability that such an observation is
reported, given a predicted mean ``mu`` for the reduced quantity, is

    eps_plus + (1 - eps_plus - eps_minus) * cdf(mu, sigma, threshold)

and the returned terms are the negative logs of these probabilities.

Note on the CDF: the closed form sometimes printed as
``mu + (1 + erf(x / (sigma*sqrt(2)))) / 2`` is not a CDF; the function
below is the standard Gaussian CDF, ``(1 + erf((x - mu) / (sigma*sqrt(2)))) / 2``.
"""

import logging
import math

import numpy as np

from . import _kernels
from .errors import DataError
from .observations import reduce_over_trajectory

log = logging.getLogger(__name__)


def gaussian_cdf(mu, sigma, x):
    """P(Y < x) for Y ~ N(mu, sigma**2).

    ``sigma == 0`` is the degenerate step: 1 below, 0 above, 0.5 at a tie.
    Scalar inputs give a float; array inputs broadcast.
    """
    if np.ndim(mu) == 0 and np.ndim(sigma) == 0 and np.ndim(x) == 0:
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        if sigma == 0:
            return 1.0 if mu < x else (0.0 if mu > x else 0.5)
        return 0.5 * math.erfc(-(x - mu) / (sigma * math.sqrt(2.0)))
    mu, sigma, x = np.broadcast_arrays(
        np.asarray(mu, float), np.asarray(sigma, float), np.asarray(x, float)
    )
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    from scipy.special import erfc

    with np.errstate(divide="ignore", invalid="ignore"):
        smooth = 0.5 * erfc(-(x - mu) / (sigma * math.sqrt(2.0)))
    step = np.where(mu < x, 1.0, np.where(mu > x, 0.0, 0.5))
    return np.where(sigma > 0, smooth, step)


def chi_squared_nll(points, predictions):
    """Sum of squared standardized residuals, halved."""
    if len(points) != len(predictions):
        raise DataError(
            f"{len(points)} quantitative points but {len(predictions)} predictions"
        )
    if not points:
        return 0.0
    y = np.array([p.value for p in points], dtype=float)
    s = np.array([p.sigma for p in points], dtype=float)
    return float(_kernels.chi2_nll(y, np.asarray(predictions, dtype=float), s))


def observation_probability(prediction, sigma, threshold, eps_plus, eps_minus):
    """Probability that ``reduced < threshold`` is reported."""
    w = 1.0 - eps_plus - eps_minus
    return eps_plus + w * gaussian_cdf(prediction, sigma, threshold)


def many_category_term(obs, prediction):
    """Negative log probability of one qualitative observation.

    Returns ``inf`` when the probability is exactly zero (no discrepancy and a
    saturated CDF) or when the prediction is NaN.
    """
    return float(
        _kernels.qual_terms(
            np.array([prediction], dtype=float),
            np.array([obs.sigma]),
            np.array([obs.threshold]),
            np.array([obs.eps_plus]),
            np.array([obs.eps_minus]),
        )[0]
    )


def two_category_term(obs, prediction):
    """Symmetric-discrepancy special case of :func:`many_category_term`."""
    if obs.eps_plus != obs.eps_minus:
        raise DataError(
            "two-category term needs eps_plus == eps_minus; "
            "use many_category_term for asymmetric rates"
        )
    if not 0.0 <= obs.eps_plus < 0.5:
        raise DataError("two-category discrepancy rate must lie in [0, 0.5)")
    return many_category_term(obs, prediction)


def static_penalty(constraints):
    """``sum(C * max(0, g))`` over ``(g, C)`` pairs."""
    total = 0.0
    for g, weight in constraints:
        if weight < 0:
            raise DataError("penalty weights must be non-negative")
        if math.isnan(g):
            return math.inf
        total += weight * max(0.0, g)
    return total


def three_category_probabilities(mu, sigma, c_low, c_high, eps_plus, eps_minus):
    """Reported probabilities of the lower, middle and upper categories.

    Each category is built from one-sided observations with rates
    ``(eps_plus, eps_minus)``. The middle category uses the separated-threshold
    decomposition: the CDF factor is the product of its two one-sided CDFs,
    wrapped once in the discrepancy mixture.
    """
    w = 1.0 - eps_plus - eps_minus
    below_low = gaussian_cdf(mu, sigma, c_low)
    below_high = gaussian_cdf(mu, sigma, c_high)
    lower = eps_plus + w * below_low
    upper = eps_plus + w * (1.0 - below_high)
    middle = eps_plus + w * (1.0 - below_low) * below_high
    return lower, middle, upper


def total_nll(quant, qual, model_outputs):
    """Combined negative log likelihood of quantitative and qualitative data.

    ``model_outputs`` is a :class:`~qualifit.trajectory.Trajectory`. A failed
    trajectory, or NaN anywhere a term reads from, yields ``inf``.
    """
    if not quant and not qual:
        return 0.0
    for item in list(quant) + [o.binding for o in qual]:
        names = (item.observable,) if hasattr(item, "observable") else item.observables
        for name in names:
            if name not in model_outputs:
                raise DataError(f"observable {name!r} is not produced by the model")
    if model_outputs.failed:
        log.warning("simulation failed; likelihood set to +inf")
        return math.inf
    preds = [model_outputs.interpolate(p.observable, p.time) for p in quant]
    nll = chi_squared_nll(list(quant), preds) if quant else 0.0
    for obs in qual:
        value = reduce_over_trajectory(obs.binding, model_outputs)
        if math.isnan(value):
            log.warning("NaN model output in %s; likelihood set to +inf", obs.label)
            return math.inf
        nll += many_category_term(obs, value)
    if math.isnan(nll):
        log.warning("NaN in quantitative predictions; likelihood set to +inf")
        return math.inf
    return nll
