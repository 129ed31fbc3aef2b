"""
Task runners package
"""

from spdcopt.tasks.convergence import run_convergence
from spdcopt.tasks.jsa_dump import run_jsa_dump
from spdcopt.tasks.optimize import run_optimize
from spdcopt.tasks.sweep import run_sweep
from spdcopt.tasks.table import run_table

__all__ = ['run_convergence', 'run_jsa_dump', 'run_optimize', 'run_sweep', 'run_table']
