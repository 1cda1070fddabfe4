"""Desk-scale solvers: grid oracle, dual subgradient method, dense LP."""
from .kkt import KKTExtraction, extract_kkt
from .lp import LPResult, solve_lp
from .oracle import (SolveResult, oracle_solve_epigraph, oracle_solve_primal,
                     slater_probe)
from .subgradient import default_rho, solve_dual_subgradient

__all__ = ["LPResult", "solve_lp", "SolveResult", "oracle_solve_primal",
           "oracle_solve_epigraph", "slater_probe", "default_rho",
           "solve_dual_subgradient", "KKTExtraction", "extract_kkt"]
