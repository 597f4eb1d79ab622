"""Master-problem model: accumulated cuts, static rows, bounds, epigraph column."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..errors import InvalidArgumentError
from ..types import (
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    Cut,
    VariableLayout,
)

# integer row-sense codes used by the LP arrays
ROW_LE = 0
ROW_GE = 1
ROW_EQ = 2

_SENSE_CODE = {SENSE_LE: ROW_LE, SENSE_GE: ROW_GE, SENSE_EQ: ROW_EQ}
_SENSE_TEXT = {ROW_LE: "<=", ROW_GE: ">=", ROW_EQ: "=="}


@dataclass
class LpSolution:
    """Primal solution of one master (or node) solve.

    ``point`` covers the structural columns (z, theta, eta); slack values are
    dropped. ``basis`` is the (basis indices, variable statuses) pair over the
    extended column space, reusable as a warm start.
    """

    point: np.ndarray
    objective: float
    status: str
    basis: Optional[Tuple[np.ndarray, np.ndarray]] = None
    iterations: int = 0

    @property
    def eta(self) -> float:
        return float(self.point[-1])


class MasterModel:
    """min eta subject to accumulated cuts, static linear rows, and bounds.

    Columns are ordered z (p1) then theta (p2) then eta. Rows are stored dense;
    masters at this scale stay small. The eta column carries a finite upper
    bound so the LP relaxation is always bounded.
    """

    def __init__(self, layout: VariableLayout, lb_eta: float, ub_eta: float):
        if not np.isfinite(lb_eta) or not np.isfinite(ub_eta) or lb_eta > ub_eta:
            raise InvalidArgumentError("eta bounds must be finite with lb <= ub")
        self.layout = layout
        self.lb_eta = float(lb_eta)
        self.ub_eta = float(ub_eta)
        self.cuts: List[Cut] = []
        n = layout.n_vars + 1
        self._rows: List[np.ndarray] = []
        self._senses: List[int] = []
        self._rhs: List[float] = []
        self._names: List[str] = []
        for i, con in enumerate(layout.constraints):
            row = np.zeros(n)
            row[: layout.n_vars] = con.coeffs
            self._rows.append(row)
            self._senses.append(_SENSE_CODE[con.sense])
            self._rhs.append(float(con.rhs))
            self._names.append(f"static{i}")

    @property
    def n_structural(self) -> int:
        return self.layout.n_vars + 1

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    @property
    def eta_column(self) -> int:
        return self.layout.n_vars

    def add_row(self, coeffs: np.ndarray, sense: int, rhs: float, name: str = "") -> None:
        """Raw structural row (length p1 + p2 + 1, eta column included)."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.n_structural,) or not np.all(np.isfinite(coeffs)):
            raise InvalidArgumentError("row must be finite with one entry per structural column")
        if sense not in (ROW_LE, ROW_GE, ROW_EQ):
            raise InvalidArgumentError(f"bad sense code {sense}")
        self._rows.append(coeffs)
        self._senses.append(int(sense))
        self._rhs.append(float(rhs))
        self._names.append(name or f"row{len(self._rows) - 1}")

    def append_cut(self, cut: Cut) -> None:
        """Install eta - grad^T x >= value - grad^T anchor as one new row."""
        if cut.anchor.shape != (self.layout.n_vars,):
            raise InvalidArgumentError("cut dimensions do not match layout")
        row = np.zeros(self.n_structural)
        row[: self.layout.n_vars] = -cut.gradient
        row[self.eta_column] = 1.0
        self.add_row(row, ROW_GE, float(cut.value - cut.gradient @ cut.anchor),
                     name=f"cut{len(self.cuts)}")
        self.cuts.append(cut)

    def set_eta_upper_bound(self, ub: float) -> None:
        if not np.isfinite(ub) or ub < self.lb_eta:
            raise InvalidArgumentError("eta upper bound must be finite and >= lb")
        self.ub_eta = float(ub)

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.concatenate([self.layout.lower(), [self.lb_eta]])
        hi = np.concatenate([self.layout.upper(), [self.ub_eta]])
        return lo, hi

    def to_arrays(self):
        """(A, b, senses, c, lo, hi) over the structural columns."""
        n = self.n_structural
        if self._rows:
            A = np.vstack(self._rows)
        else:
            A = np.zeros((0, n))
        b = np.asarray(self._rhs, dtype=np.float64)
        senses = np.asarray(self._senses, dtype=np.int64)
        c = np.zeros(n)
        c[self.eta_column] = 1.0
        lo, hi = self.bounds()
        return A, b, senses, c, lo, hi

    def integer_columns(self) -> np.ndarray:
        return np.arange(self.layout.p1, dtype=np.int64)

    def debug_listing(self) -> str:
        """Plain-text dump (objective, rows, bounds) for diagnosis; not a
        round-trip format."""
        out = [f"minimize: eta (column {self.eta_column})"]
        for name, row, sense, rhs in zip(self._names, self._rows, self._senses, self._rhs):
            coeffs = " ".join(f"{v:+g}" for v in row)
            out.append(f"{name}: {coeffs} {_SENSE_TEXT[sense]} {rhs:g}")
        lo, hi = self.bounds()
        for j in range(self.n_structural):
            kind = "int" if j < self.layout.p1 else ("eta" if j == self.eta_column else "cont")
            out.append(f"bound x{j} ({kind}): [{lo[j]:g}, {hi[j]:g}]")
        return "\n".join(out)
