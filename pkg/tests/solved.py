"""Memoized solves shared across test modules (solves are deterministic)."""

from functools import lru_cache

from calabi.profile import profile_from_trajectory
from calabi.shooting import solve_conical, solve_smooth

GRID_M = (0.5, 1.0, 2.0, 5.0)
GRID_BETA0 = (0.5, 1.0, 2.0)
GRID = tuple((m, b) for m in GRID_M for b in GRID_BETA0)


@lru_cache(maxsize=None)
def conical(m: float, beta0: float):
    return solve_conical(m, beta0)


@lru_cache(maxsize=None)
def conical_profile(m: float, beta0: float):
    rep = conical(m, beta0)
    return profile_from_trajectory(rep.trajectory, rep.coeffs)


@lru_cache(maxsize=None)
def smooth(m: float):
    return solve_smooth(m)


@lru_cache(maxsize=None)
def smooth_profile(m: float):
    rep = smooth(m)
    return profile_from_trajectory(rep.trajectory, rep.coeffs)
