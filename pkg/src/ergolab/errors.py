"""Exception and warning types shared across the package.

The experiment runner maps these onto process exit codes: configuration
problems exit 1, precision exhaustion exits 2 and exceeded iteration
budgets exit 3 (see :mod:`ergolab.cli`).
"""
from __future__ import annotations


class ErgolabError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionExhaustedError(ErgolabError):
    """A guarded comparison was ambiguous, or error bounds grew past the safety margin.

    Carries the orbit step (or flow time) at which the ambiguity occurred in
    ``step`` when the enclosing scan knows it.
    """

    def __init__(self, message: str = "precision exhausted", step=None):
        super().__init__(message)
        self.step = step


class BudgetExceededError(ErgolabError):
    """Base class for iteration-budget failures (exit code 3)."""


class CrossingBudgetError(BudgetExceededError):
    """A special-flow step needed more roof crossings than the allowed budget."""


class ReturnBudgetError(BudgetExceededError):
    """An induced-map orbit failed to return to the target set within the budget."""


class ResonantFrequencyError(ErgolabError):
    """A trigonometric mode has frequency j + k*gamma = 0, so its orbit integral grows linearly."""


class ZeroValueStartError(ErgolabError):
    """The observable vanishes at the starting point; the return-time detectors reject it."""


class RationalAngleError(ErgolabError):
    """Raised when a rational angle is passed where an infinite expansion is required."""


class ConfigError(ErgolabError):
    """An experiment configuration document is malformed or inconsistent."""


class RationalAngleWarning(UserWarning):
    """Emitted when an ergodicity-dependent detector runs on a rational rotation angle.

    Rational angles are supported so that exact brute-force oracles can be
    run against the same code paths, but the recurrence theorems themselves
    assume an ergodic base.
    """
