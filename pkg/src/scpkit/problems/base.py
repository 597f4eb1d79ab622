"""Oracle interface the engine drives: sampled values and gradients."""
from __future__ import annotations

import abc

import numpy as np

from ..types import VariableLayout


class SampledOracle(abc.ABC):
    """An objective evaluable on any index subset of its data.

    ``point`` is always the concatenated (z, theta) vector of length
    layout.n_vars; implementations slice what they need. Oracles are immutable
    after construction and safe for concurrent reads.
    """

    layout: VariableLayout
    n_data: int

    @abc.abstractmethod
    def value(self, point: np.ndarray, indices: np.ndarray) -> float:
        ...

    @abc.abstractmethod
    def value_and_gradient(self, point: np.ndarray, indices: np.ndarray) -> tuple:
        ...

    @abc.abstractmethod
    def warm_start(self) -> np.ndarray:
        """A feasible starting point for the first cut."""

    @abc.abstractmethod
    def eta_lower_bound(self) -> float:
        """A valid lower bound on the objective over the feasible set."""

    def solve_continuous(self, z: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """Minimizer over theta with z fixed; override when p2 > 0 and p1 > 0."""
        raise NotImplementedError
