"""Shared fixtures-in-spirit: the closed-form solution/forcing pairs and
reference constants used across the suite.

Reference values were computed once with mpmath at 40 significant digits
and frozen here; they are independent of the package's own Gamma path.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from fracbvp import (
    GreenProblem,
    PowerSum,
    WeightSpec,
    as_weight_spec,
    frac_derivative,
    solve_linear,
)

ALPHA_PAIRS = 1.5

# u_i(t) = t^lam (1 - t); their order-1.5 derivatives are the closed-form
# forcings of the round-trip experiments.
U1 = PowerSum([(1.0, 2.2), (-1.0, 3.2)])
U2 = PowerSum([(1.0, 0.8), (-1.0, 1.8)])
U3 = PowerSum([(1.0, 0.2), (-1.0, 1.2)])
PAIRS = {"u1": U1, "u2": U2, "u3": U3}

# mpmath, 40 digits:
GAMMA_M03 = -4.3268511088251926189       # Gamma(-0.3) via reflection
SQRT_PI = 1.7724538509055160273
R_G18_G03 = 0.31133621681918139031       # Gamma(1.8)/Gamma(0.3)
R_G28_G13 = 1.8680173009150883418        # Gamma(2.8)/Gamma(1.3)
R_G12_GM03 = -0.21220252772900653531     # Gamma(1.2)/Gamma(-0.3)
R_G22_G07 = 0.84881011091602614123       # Gamma(2.2)/Gamma(0.7)
R_G32_G17 = 2.6676889200217964439        # Gamma(3.2)/Gamma(1.7)
R_G42_G27 = 5.0215320847469109532        # Gamma(4.2)/Gamma(2.7)
R_G12_G17 = 1.0104882272809835015        # Gamma(1.2)/Gamma(1.7)
R_G22_G27 = 0.71328580749245894221       # Gamma(2.2)/Gamma(2.7)
U3_AT_SIXTH = 0.58235593230964937103     # (1/6)^0.2 * (5/6)
GREEN_HALF_15 = 0.56418958354775628695   # 0.5 / Gamma(1.5)
D05_U3_AT_HALF = 0.12440569357677908639  # closed-form D^0.5 u3 at t = 0.5


def forcing(name: str) -> PowerSum:
    """The signed forcing g = -D^1.5 u_i recovered by the linear solver."""
    return -frac_derivative(PAIRS[name], ALPHA_PAIRS)


@lru_cache(maxsize=None)
def solved(name: str, n: int):
    return solve_linear(forcing(name), ALPHA_PAIRS, n)


@lru_cache(maxsize=None)
def pair_problem(name: str, n: int = 512) -> GreenProblem:
    return GreenProblem.build(forcing(name), ALPHA_PAIRS, n)


@lru_cache(maxsize=None)
def weight_problem(beta: float, alpha: float, n: int = 512) -> GreenProblem:
    return GreenProblem.build(WeightSpec(beta), alpha, n)


def sup_node_error(name: str, n: int) -> float:
    sol = solved(name, n)
    return float(np.max(np.abs(sol.values - PAIRS[name](sol.mesh.nodes))))


def decomposed(g):
    """(beta_g, regular) of a forcing given as PowerSum or WeightSpec."""
    return as_weight_spec(g).singular_decomposition()
