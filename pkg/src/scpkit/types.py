"""Domain types shared by the engine, masters, and problem oracles."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from .errors import InvalidArgumentError

SENSE_LE = "<="
SENSE_GE = ">="
SENSE_EQ = "=="

STATUS_OPTIMAL = "optimal"
STATUS_ITERATION_CAP = "iteration-cap"
STATUS_INFEASIBLE = "infeasible"

MODE_FULL = "full"
MODE_STOCHASTIC = "stochastic"

CUT_OBJECTIVE = "objective"
CUT_CONSTRAINT = "constraint"

FULL_SAMPLE_ID = "full"


@dataclass(frozen=True)
class LinearConstraint:
    """One static row a^T (z || theta) {<=,>=,==} rhs."""

    coeffs: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))
        if self.sense not in (SENSE_LE, SENSE_GE, SENSE_EQ):
            raise InvalidArgumentError(f"unknown constraint sense {self.sense!r}")
        if not np.all(np.isfinite(self.coeffs)) or not np.isfinite(self.rhs):
            raise InvalidArgumentError("constraint data must be finite")


@dataclass
class VariableLayout:
    """Variable split and feasible box: p1 integer dims, p2 continuous dims.

    Continuous bounds must be finite (the feasible set is compact); integer
    bounds are finite by construction.
    """

    p1: int
    p2: int
    integer_lower: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    integer_upper: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    continuous_lower: np.ndarray = field(default_factory=lambda: np.zeros(0))
    continuous_upper: np.ndarray = field(default_factory=lambda: np.zeros(0))
    constraints: List[LinearConstraint] = field(default_factory=list)

    def __post_init__(self):
        self.integer_lower = np.asarray(self.integer_lower, dtype=np.int64)
        self.integer_upper = np.asarray(self.integer_upper, dtype=np.int64)
        self.continuous_lower = np.asarray(self.continuous_lower, dtype=np.float64)
        self.continuous_upper = np.asarray(self.continuous_upper, dtype=np.float64)
        if self.p1 < 0 or self.p2 < 0 or self.p1 + self.p2 < 1:
            raise InvalidArgumentError("need p1 >= 0, p2 >= 0 and p1 + p2 >= 1")
        if self.integer_lower.shape != (self.p1,) or self.integer_upper.shape != (self.p1,):
            raise InvalidArgumentError("integer bound arrays must have length p1")
        if self.continuous_lower.shape != (self.p2,) or self.continuous_upper.shape != (self.p2,):
            raise InvalidArgumentError("continuous bound arrays must have length p2")
        if np.any(self.integer_lower > self.integer_upper):
            raise InvalidArgumentError("integer bounds need lo <= hi")
        if not (np.all(np.isfinite(self.continuous_lower)) and np.all(np.isfinite(self.continuous_upper))):
            raise InvalidArgumentError("continuous bounds must be finite")
        if np.any(self.continuous_lower > self.continuous_upper):
            raise InvalidArgumentError("continuous bounds need lo <= hi")
        for con in self.constraints:
            if con.coeffs.shape != (self.n_vars,):
                raise InvalidArgumentError("constraint row length must equal p1 + p2")

    @property
    def n_vars(self) -> int:
        return self.p1 + self.p2

    def lower(self) -> np.ndarray:
        return np.concatenate([self.integer_lower.astype(np.float64), self.continuous_lower])

    def upper(self) -> np.ndarray:
        return np.concatenate([self.integer_upper.astype(np.float64), self.continuous_upper])


@dataclass(frozen=True)
class SubsetSample:
    """A without-replacement index subset of [0, N) with its RNG provenance."""

    indices: np.ndarray
    n: int
    N: int
    seed: int
    iteration: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if self.n != idx.shape[0]:
            raise InvalidArgumentError("n must equal len(indices)")
        if self.n == 0 or self.n > self.N:
            raise InvalidArgumentError("need 1 <= n <= N")
        if idx.shape[0] and (idx[0] < 0 or idx[-1] >= self.N):
            raise InvalidArgumentError("indices out of range")
        if np.any(np.diff(idx) <= 0):
            raise InvalidArgumentError("indices must be sorted and distinct")

    @property
    def is_full(self) -> bool:
        return self.n == self.N


@dataclass(frozen=True)
class Cut:
    """Linear under-estimator anchored at a visited point.

    Row shape once installed in a master: eta >= value + gradient^T (x - anchor).
    """

    anchor: np.ndarray
    value: float
    gradient: np.ndarray
    kind: str = CUT_OBJECTIVE
    constraint_index: Optional[int] = None
    sample_id: Union[int, str] = FULL_SAMPLE_ID

    def __post_init__(self):
        object.__setattr__(self, "anchor", np.asarray(self.anchor, dtype=np.float64))
        object.__setattr__(self, "gradient", np.asarray(self.gradient, dtype=np.float64))
        if self.gradient.shape != self.anchor.shape:
            raise InvalidArgumentError("gradient and anchor lengths differ")
        if not (np.all(np.isfinite(self.anchor)) and np.all(np.isfinite(self.gradient))
                and np.isfinite(self.value)):
            raise InvalidArgumentError("cut data must be finite")
        if self.kind not in (CUT_OBJECTIVE, CUT_CONSTRAINT):
            raise InvalidArgumentError(f"unknown cut kind {self.kind!r}")

    def value_at(self, point: np.ndarray) -> float:
        return float(self.value + self.gradient @ (np.asarray(point, dtype=np.float64) - self.anchor))


def _default_schedule_placeholder(N: int) -> int:  # resolved in sampling to avoid a cycle
    from .sampling import default_n_schedule

    return default_n_schedule(N)


@dataclass
class EngineConfig:
    """Knobs for one cutting-plane run."""

    mode: str
    epsilon: float
    lb: float
    seed: int
    n_schedule: Callable[[int], int] = _default_schedule_placeholder
    max_iterations: int = 500

    def __post_init__(self):
        if self.mode not in (MODE_FULL, MODE_STOCHASTIC):
            raise InvalidArgumentError(f"unknown mode {self.mode!r}")
        if not self.epsilon > 0:
            raise InvalidArgumentError("epsilon must be positive")
        if self.max_iterations < 1:
            raise InvalidArgumentError("max_iterations must be >= 1")
        if not np.isfinite(self.lb):
            raise InvalidArgumentError("lb must be finite")


@dataclass(frozen=True)
class TraceRecord:
    """One engine iteration: what was sampled, seen, and how long it took."""

    iteration: int
    sample_seed: Union[int, str]
    eta: float
    oracle_value: float
    master_seconds: float
    oracle_seconds: float

    def deterministic_fields(self) -> tuple:
        return (self.iteration, self.sample_seed, self.eta, self.oracle_value)


@dataclass
class RunReport:
    """Outcome of one run: final point, status, and the per-iteration trace."""

    status: str
    z: np.ndarray
    theta: np.ndarray
    eta: float
    iterations: int
    trace: List[TraceRecord]
    full_objective_at_solution: float

    @property
    def point(self) -> np.ndarray:
        return np.concatenate([self.z.astype(np.float64), self.theta])

    def deterministic_trace(self) -> list:
        """Trace with wall-clock fields stripped, for replay comparisons."""
        return [rec.deterministic_fields() for rec in self.trace]

    @property
    def master_seconds(self) -> float:
        return float(sum(rec.master_seconds for rec in self.trace))

    @property
    def oracle_seconds(self) -> float:
        return float(sum(rec.oracle_seconds for rec in self.trace))
