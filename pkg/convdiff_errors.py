#!/usr/bin/env python3
"""Exception types raised by the convection-diffusion solver modules."""


class ConvDiffError(Exception):
    """Base class for every error raised by the solver library."""


class InvalidArgumentError(ConvDiffError, ValueError):
    """Raised when a parameter violates an operation's precondition."""


class DomainError(InvalidArgumentError):
    """Raised when an evaluation point or parameter lies outside its domain."""


class LengthMismatchError(InvalidArgumentError):
    """Raised when two sequences that must agree in length do not."""


class SchemeMismatchError(InvalidArgumentError):
    """Raised when a difference scheme is applied to a mesh it does not support."""


class CoefficientError(InvalidArgumentError):
    """Raised when the convection coefficient drops below its lower bound alpha."""


class MissingExactSolutionError(ConvDiffError):
    """Raised when an error norm is requested for a grid without an exact solution."""


class SingularPivotError(ConvDiffError, ArithmeticError):
    """Raised when tridiagonal elimination meets a (numerically) zero pivot."""
