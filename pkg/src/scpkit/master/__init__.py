from .milp import MilpMaster, solve_lp, solve_milp
from .model import LpSolution, MasterModel
from .qp import QpMaster, QpRiskMaster, solve_qp
from .simplex import LpResult, LpState, solve_lp_arrays

__all__ = [
    "MilpMaster",
    "solve_lp",
    "solve_milp",
    "LpSolution",
    "MasterModel",
    "QpMaster",
    "QpRiskMaster",
    "solve_qp",
    "LpResult",
    "LpState",
    "solve_lp_arrays",
]
