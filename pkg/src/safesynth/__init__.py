"""Synthesis of safety controllers for AIGER specifications.

Winning areas are learned as CNF formulas with incremental SAT or 2QBF
solving; controllers are then extracted by interpolation or QBF
certification and written back as AIGER circuits.
"""
from .aiger import AigerError, SafetySpec, parse_aag, write_aag
from .bench import BenchParams, gen_benchmark
from .cnf import Cnf, VarPool, compress_cnf, neg_learn
from .extract import ControllerCircuit, ExtractConfig, cnf_interpol, extract_qbf_learn, extract_sat_learn
from .oracle import check_winning_area, explicit_attractor, verify_controller
from .portfolio import run_portfolio_extract, run_portfolio_win
from .qbf import TwoQbfQuery, TwoQbfSolver, qbf_solve, qbf_solve_expansion
from .template import build_template, templ_schedule, templ_win_qbf, templ_win_sat
from .winning import (REALIZABLE, UNKNOWN, UNREALIZABLE, WinConfig, WinningOutcome, qbf_win, sat_win1,
                      solve_win)

__all__ = [
    "AigerError", "SafetySpec", "parse_aag", "write_aag",
    "BenchParams", "gen_benchmark",
    "Cnf", "VarPool", "compress_cnf", "neg_learn",
    "ControllerCircuit", "ExtractConfig", "cnf_interpol", "extract_qbf_learn", "extract_sat_learn",
    "check_winning_area", "explicit_attractor", "verify_controller",
    "run_portfolio_extract", "run_portfolio_win",
    "TwoQbfQuery", "TwoQbfSolver", "qbf_solve", "qbf_solve_expansion",
    "build_template", "templ_schedule", "templ_win_qbf", "templ_win_sat",
    "REALIZABLE", "UNKNOWN", "UNREALIZABLE", "WinConfig", "WinningOutcome", "qbf_win", "sat_win1", "solve_win",
]
__version__ = "0.1.0"
