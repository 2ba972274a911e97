"""Green's function of D^alpha with homogeneous Dirichlet data on (0, 1).

For order alpha in (1, 2] the kernel is

    G(t, s) = [ (t*(1-s))^(alpha-1) - (t-s)^(alpha-1) ] / Gamma(alpha),  s <= t
    G(t, s) =   (t*(1-s))^(alpha-1) / Gamma(alpha),                      t <= s

Both branches agree at s = t, G vanishes on t in {0, 1}, and G >= 0.

The delicate regime is s << t, where the two powers in the first branch
agree to O(s/t) and naive subtraction loses every digit; the Green integral
of a forcing that blows up like s^(-beta) at the origin leans exactly on
that cancellation.  The bracket is therefore evaluated as

    (t-s)^(alpha-1) * expm1( (alpha-1) * [log1p(-s) - log1p(-s/t)] )

whenever the two powers are within a factor of two of each other, which
keeps full relative accuracy all the way down to s = 0.
"""

from __future__ import annotations

import numpy as np

from .gammafn import gamma

__all__ = ["green_eval", "green_values"]

# Below this separation the (t-s)^(alpha-1) term is dropped outright; the
# power of anything <= 1e-300 is negligible against the co-factor and the
# logarithm path would produce spurious infinities.
_UNDERFLOW = 1e-300


def bracket_values(t: float, s: np.ndarray, alpha: float) -> np.ndarray:
    """(t*(1-s))^(alpha-1) - (t-s)^(alpha-1) for s < t, cancellation-safe.

    Internal helper shared with the quadrature module; assumes
    0 < t <= 1 and 0 <= s < t elementwise.
    """
    a1 = alpha - 1.0
    pp = np.power(t * (1.0 - s), a1)
    x = t - s
    tiny = x <= _UNDERFLOW
    x = np.where(tiny, 1.0, x)
    xp = np.power(x, a1)
    with np.errstate(divide="ignore"):
        d = a1 * (np.log1p(-s) - np.log1p(-s / t))
    # d >= 0 always (t <= 1); values with d > log 2 take the direct branch.
    safe = xp * np.expm1(np.minimum(d, 2.0))
    out = np.where(xp > 0.5 * pp, safe, pp - xp)
    return np.where(tiny, pp, out)


def green_values(t: float, s: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorized G(t, s) over an array of s for fixed t; no validation."""
    s = np.asarray(s, dtype=float)
    a1 = alpha - 1.0
    out = np.power(t * (1.0 - s), a1)
    left = s < t
    if np.any(left):
        out[left] = bracket_values(t, s[left], alpha)
    return out / gamma(alpha)


def green_eval(t: float, s: float, alpha: float) -> float:
    """G(t, s) for t, s in [0, 1] and order alpha in (1, 2]."""
    t = float(t)
    s = float(s)
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"order must lie in (1, 2], got {alpha!r}")
    if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
        raise ValueError(f"(t, s) must lie in the unit square, got {(t, s)!r}")
    if s >= t:
        return float((t * (1.0 - s)) ** (alpha - 1.0) / gamma(alpha))
    return float(bracket_values(t, np.array([s]), alpha)[0] / gamma(alpha))
