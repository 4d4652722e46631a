"""Closed-form yield models."""

from __future__ import annotations

import math

# 1 nm^2 expressed in mm^2
NM2_TO_MM2 = 1e-12


class DegenerateTestError(ValueError):
    """Observed yield is zero, so KGD yield is undefined."""


def nbd_yield(defect_density: float, area: float, alpha: float) -> float:
    """Negative-binomial die yield ``(1 + D*A/alpha) ** -alpha``.

    Clustering enters through ``alpha``; as ``alpha`` grows the model tends to
    the Poisson yield ``exp(-D*A)``.
    """
    if defect_density < 0 or area < 0:
        raise ValueError("defect_density and area must be >= 0")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    # log1p keeps precision for tiny D*A and huge alpha
    return math.exp(-alpha * math.log1p(defect_density * area / alpha))


def core_area_nm2(transistors: int, feature_lambda: float, beta: float) -> float:
    """Layout area ``N_t * beta * lambda**2`` in nm^2."""
    if transistors <= 0 or feature_lambda <= 0 or beta <= 0:
        raise ValueError("transistors, feature_lambda and beta must be > 0")
    if transistors > 10**12:
        raise OverflowError("transistor count above 1e12 is out of range")
    return float(transistors) * beta * feature_lambda * feature_lambda


def core_area(transistors: int, feature_lambda: float, beta: float) -> float:
    """Layout area in mm^2."""
    return core_area_nm2(transistors, feature_lambda, beta) * NM2_TO_MM2


def module_yield(core_yield: float, router_yield: float) -> float:
    for y in (core_yield, router_yield):
        if not 0.0 <= y <= 1.0:
            raise ValueError(f"yield must lie in [0, 1], got {y}")
    return core_yield * router_yield


def observed_yield(true_yield: float, test_accuracy: float) -> float:
    """Fraction of dies that pass an imperfect test.

    Good dies pass with probability ``test_accuracy``; bad dies slip through
    with probability ``1 - test_accuracy``.
    """
    for y in (true_yield, test_accuracy):
        if not 0.0 <= y <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {y}")
    return true_yield * test_accuracy + (1.0 - true_yield) * (1.0 - test_accuracy)


def kgd_yield(true_yield: float, test_accuracy: float) -> float:
    """Probability that a die which passed test is actually good."""
    y_ob = observed_yield(true_yield, test_accuracy)
    if y_ob <= 0.0:
        raise DegenerateTestError("observed yield is zero; KGD yield undefined")
    return min(1.0, true_yield * test_accuracy / y_ob)
