#!/usr/bin/env python3
"""
Problem Model Module
Defines the two-point boundary-value problem -eps*u'' + a(x)*u' = f(x) on [0, 1],
the closed-form solution of the model problem (a = 1, f(x) = x, u(0) = u(1) = 0)
and the analytical envelopes used for verification.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from convdiff_errors import CoefficientError, DomainError, InvalidArgumentError

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[float], float]

_SAMPLE_POINTS = 33     # points used to check a(x) >= alpha at construction
_MODEL_CHECK_TOL = 1e-14


def _unit_coefficient(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _identity_source(x):
    return np.asarray(x, dtype=float)


def sample_function(func: ScalarFunction, xs: np.ndarray) -> np.ndarray:
    """Evaluate *func* at every entry of *xs*.

    Vectorized callables are called once on the whole array; scalar-only ones
    (math.exp and friends) fall back to a point-by-point loop.
    """
    xs = np.asarray(xs, dtype=float)
    try:
        values = np.asarray(func(xs), dtype=float)
        return np.array(np.broadcast_to(values, xs.shape), dtype=float)
    except (TypeError, ValueError):
        return np.array([func(float(x)) for x in xs.ravel()], dtype=float).reshape(xs.shape)


def _check_unit_interval(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return arr


def _as_result(value: np.ndarray, like) -> float | np.ndarray:
    return float(value) if np.ndim(like) == 0 else value


@dataclass(frozen=True)
class ProblemSpec:
    """The boundary-value problem -eps*u'' + a(x)*u' = f(x), u(0)=u_left, u(1)=u_right."""

    epsilon: float
    coeff_a: ScalarFunction = field(default=_unit_coefficient, compare=False)
    alpha: float = 1.0
    source_f: ScalarFunction = field(default=_identity_source, compare=False)
    u_left: float = 0.0
    u_right: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 1.0):
            raise InvalidArgumentError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not self.alpha > 0.0:
            raise InvalidArgumentError(f"alpha must be positive, got {self.alpha}")
        if not (np.isfinite(self.u_left) and np.isfinite(self.u_right)):
            raise InvalidArgumentError("boundary values must be finite")
        self.check_coefficient(np.linspace(0.0, 1.0, _SAMPLE_POINTS))

    @classmethod
    def model(cls, epsilon: float) -> "ProblemSpec":
        """The model problem -eps*u'' + u' = x with homogeneous boundary values."""
        return cls(epsilon=epsilon)

    def coefficient_values(self, xs: np.ndarray) -> np.ndarray:
        return sample_function(self.coeff_a, xs)

    def source_values(self, xs: np.ndarray) -> np.ndarray:
        return sample_function(self.source_f, xs)

    def check_coefficient(self, xs: np.ndarray) -> np.ndarray:
        """Return a(xs), raising CoefficientError where a(x) < alpha."""
        a_values = self.coefficient_values(xs)
        bad = ~(a_values >= self.alpha)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise CoefficientError(
                f"a({xs[i]:.6g}) = {a_values[i]:.6g} is below alpha = {self.alpha}"
            )
        return a_values

    def is_model_problem(self) -> bool:
        """True when a = 1, f(x) = x and both boundary values vanish (checked by sampling)."""
        if self.u_left != 0.0 or self.u_right != 0.0:
            return False
        xs = np.linspace(0.0, 1.0, _SAMPLE_POINTS)
        return bool(
            np.allclose(self.coefficient_values(xs), 1.0, rtol=0.0, atol=_MODEL_CHECK_TOL)
            and np.allclose(self.source_values(xs), xs, rtol=0.0, atol=_MODEL_CHECK_TOL)
        )


@dataclass(frozen=True)
class ModelExactSolution:
    """Closed-form solution of the model problem for a given epsilon."""

    epsilon: float

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 1.0):
            raise InvalidArgumentError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    @classmethod
    def from_problem(cls, problem: ProblemSpec) -> "ModelExactSolution":
        if not problem.is_model_problem():
            raise InvalidArgumentError(
                "the closed-form solution exists only for a = 1, f(x) = x, u(0) = u(1) = 0"
            )
        return cls(epsilon=problem.epsilon)

    def __call__(self, x):
        return evaluate_exact(self, x)


def evaluate_exact(model: ModelExactSolution, x):
    """u(x) = x(x/2 + eps) - (1/2 + eps)(e^((x-1)/eps) - e^(-1/eps)) / (1 - e^(-1/eps)).

    Both exponents are non-positive, so tiny eps only underflows to zero.
    Accepts a scalar or an array of points.
    """
    xs = _check_unit_interval(x)
    eps = model.epsilon
    tail = np.exp(-1.0 / eps)
    layer = (np.exp((xs - 1.0) / eps) - tail) / (1.0 - tail)
    return _as_result(xs * (xs / 2.0 + eps) - (0.5 + eps) * layer, x)


def reduced_solution(x):
    """x**2 / 2, the solution of u' = x, u(0) = 0 obtained by setting eps = 0."""
    xs = _check_unit_interval(x)
    return _as_result(xs * xs / 2.0, x)


def layer_envelope(
    x,
    epsilon: float,
    alpha: float,
    deriv_order_j: int,
    c_const: float,
):
    """Bound C * eps**(-j) * exp(-alpha*(1 - x)/eps) on the j-th derivative of the layer part."""
    xs = _check_unit_interval(x)
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not c_const > 0.0:
        raise DomainError(f"c_const must be positive, got {c_const}")
    if int(deriv_order_j) != deriv_order_j or deriv_order_j < 0:
        raise DomainError(f"deriv_order_j must be a nonnegative integer, got {deriv_order_j}")
    # log space: eps**(-j) alone overflows for large j even where the exponential kills it
    exponent = -int(deriv_order_j) * np.log(epsilon) - alpha * (1.0 - xs) / epsilon
    with np.errstate(over="ignore"):
        value = c_const * np.exp(exponent)
    return _as_result(value, x)
