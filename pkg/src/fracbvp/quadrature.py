"""Graded-mesh quadrature of the Green-operator integrals.

Evaluates, for a forcing g(s) = s^(-beta_g) * g_reg(s) with g_reg continuous
on [0, 1]:

    apply_green            u(t)        = int_0^1 G(t,s) g(s) ds
    apply_green_derivative u'(t)       = (alpha-1)/Gamma(alpha) *
        [ int_0^t (t^(a-2)(1-s)^(a-1) - (t-s)^(a-2)) g ds
          + int_t^1 t^(a-2)(1-s)^(a-1) g ds ]
    apply_dalpha_minus_1   D^(a-1)u(t) = int_0^t ((1-s)^(a-1) - 1) g ds
                                         + int_t^1 (1-s)^(a-1) g ds

The admissible forcing class is fixed by the integrability condition at the
origin, int_0^1 s^(alpha-1) g(s) ds < infty, which allows beta_g up to (not
including) alpha - i.e. weights that are not integrable on their own.  Near
s = 0 the kernels vanish like s, so the combined integrands are integrable;
they are evaluated through the expm1/log1p brackets so that cancellation
does not destroy that product structure.

Three constructions replace adaptivity:

* panels follow a graded mesh t_i = (i/n)^grading, refined toward 0;
* the first panel [0, e] is mapped by s = tau^m, m = ceil(2/(alpha-beta_g)),
  which turns the leading s^(margin-1)-type behaviour into a smooth power;
* the panel ending at s = t (for the kernels with a kink or an
  (t-s)^(alpha-2) blow-up there) is mapped by s = t - tau^(1/(alpha-1)),
  which absorbs the singular factor into the Jacobian exactly.

Fixed-order Gauss-Legendre (12 points) is used on every transformed panel:
once the integrands are regularized, panel count - not order - controls the
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gammafn import gamma
from .green import bracket_values
from .powersum import ONE, PowerSum

__all__ = [
    "GAUSS_ORDER",
    "GRADING_MAX",
    "ConditionHError",
    "ConditionReport",
    "WeightSpec",
    "GradedMesh",
    "as_weight_spec",
    "check_condition_h",
    "build_mesh",
    "apply_green",
    "apply_green_derivative",
    "apply_dalpha_minus_1",
]

GAUSS_ORDER = 12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GAUSS_ORDER)

# Unbounded grading collapses the early panels below double-precision node
# spacing, so the exponent is clamped.
GRADING_MIN = 1.0
GRADING_MAX = 8.0

MIN_PANELS = 16


class ConditionHError(ValueError):
    """The forcing fails the integrability condition at the origin."""


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the origin-integrability check."""

    satisfied: bool
    exponent_margin: float


@dataclass(frozen=True)
class WeightSpec:
    """A weight h(s) = s^(-beta) * regular(s), regular a PowerSum on [0, 1].

    ``beta >= 0`` is the declared singularity exponent; ``regular`` must
    have only nonnegative exponents so h is continuous on (0, 1].  The same
    structure also carries signed forcings g (the Green representation is
    linear and sign-agnostic); nonnegativity matters only to the positivity
    theory of the nonlinear solver.
    """

    beta: float
    regular: PowerSum = ONE

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")
        if not self.regular.is_zero and self.regular.min_exponent < 0.0:
            raise ValueError(
                "regular factor must have nonnegative exponents, got minimum"
                f" {self.regular.min_exponent}"
            )

    @property
    def min_regular_exponent(self) -> float:
        return 0.0 if self.regular.is_zero else self.regular.min_exponent

    def singular_decomposition(self) -> tuple[float, PowerSum]:
        """(effective origin exponent, regular factor with min exponent 0).

        Shifting the smallest regular exponent into beta gives the true
        algebraic order at 0, which may be negative (h vanishing at 0).
        """
        lam = self.min_regular_exponent
        return self.beta - lam, self.regular.times_power(-lam)

    def __call__(self, s):
        scalar = np.isscalar(s)
        arr = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.power(arr, -self.beta) * self.regular(arr)
        return float(out) if scalar else out


def as_weight_spec(g) -> WeightSpec:
    """Normalize a PowerSum forcing (possibly signed) into WeightSpec form."""
    if isinstance(g, WeightSpec):
        return g
    if isinstance(g, PowerSum):
        if g.is_zero:
            return WeightSpec(0.0, g)
        beta = max(0.0, -g.min_exponent)
        return WeightSpec(beta, g.times_power(beta))
    raise TypeError(f"expected WeightSpec or PowerSum, got {type(g).__name__}")


def check_condition_h(w, alpha: float) -> ConditionReport:
    """Integrability of s^(alpha-1) h(s) at the origin, by exponent count.

    With h ~ s^(lam_min - beta) near 0, the integral converges iff
    alpha - beta + lam_min > 0; the margin is that quantity.
    """
    w = as_weight_spec(w)
    alpha = _checked_alpha(alpha)
    margin = alpha - w.beta + w.min_regular_exponent
    return ConditionReport(satisfied=margin > 0.0, exponent_margin=margin)


@dataclass(frozen=True, eq=False)
class GradedMesh:
    """Nodes t_i = (i/n)^grading, i = 0..n, clustering toward the origin."""

    n: int
    grading: float
    nodes: np.ndarray

    def __post_init__(self):
        if self.n < MIN_PANELS:
            raise ValueError(f"need at least {MIN_PANELS} panels, got {self.n}")
        if len(self.nodes) != self.n + 1:
            raise ValueError("node count must be n + 1")
        if self.nodes[0] != 0.0 or self.nodes[-1] != 1.0:
            raise ValueError("mesh must span [0, 1] exactly")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly ascending")
        self.nodes.setflags(write=False)

    @classmethod
    def from_grading(cls, n: int, grading: float) -> "GradedMesh":
        i = np.arange(n + 1, dtype=float)
        return cls(n=n, grading=grading, nodes=(i / n) ** grading)


def grading_for_margin(margin: float) -> float:
    """Grading exponent 2/margin, clamped to [1, 8]."""
    return min(max(2.0 / margin, GRADING_MIN), GRADING_MAX)


def build_mesh(n: int, w, alpha: float) -> GradedMesh:
    """Graded mesh adapted to the weight's integrability margin."""
    if n < MIN_PANELS:
        raise ValueError(f"need at least {MIN_PANELS} panels, got {n}")
    report = check_condition_h(w, alpha)
    if not report.satisfied:
        raise ConditionHError(
            "condition (H) violated: exponent margin"
            f" {report.exponent_margin:.6g} <= 0"
        )
    return GradedMesh.from_grading(n, grading_for_margin(report.exponent_margin))


# --- operator evaluation -----------------------------------------------------


def apply_green(t, g_singular_exponent, g_regular, alpha, mesh) -> float:
    """int_0^1 G(t,s) g(s) ds for g(s) = s^(-beta_g) g_regular(s).

    ``g_regular`` must accept numpy arrays of s in (0, 1).  Returns exactly
    0.0 at t = 0 and t = 1 where the kernel vanishes.
    """
    alpha = _checked_alpha(alpha)
    t = _checked_t(t, endpoint_ok=True)
    if t == 0.0 or t == 1.0:
        return 0.0
    a1 = alpha - 1.0

    def left_kernel(s):
        return bracket_values(t, s, alpha)

    def right_kernel(s):
        return np.power(t * (1.0 - s), a1)

    total = _assemble(
        t, g_singular_exponent, g_regular, alpha, mesh,
        left_kernel, right_kernel, t_panel=_green_t_panel,
    )
    return total / gamma(alpha)


def apply_green_derivative(t, g_singular_exponent, g_regular, alpha, mesh) -> float:
    """u'(t) of the Green representation, t strictly inside (0, 1)."""
    alpha = _checked_alpha(alpha)
    t = _checked_t(t, endpoint_ok=False)
    a1 = alpha - 1.0
    a2 = alpha - 2.0
    t_pow = t**a2

    def left_kernel(s):
        return _derivative_bracket(t, s, alpha)

    def right_kernel(s):
        return t_pow * np.power(1.0 - s, a1)

    total = _assemble(
        t, g_singular_exponent, g_regular, alpha, mesh,
        left_kernel, right_kernel, t_panel=_derivative_t_panel,
    )
    return total * a1 / gamma(alpha)


def apply_dalpha_minus_1(t, g_singular_exponent, g_regular, alpha, mesh) -> float:
    """D^(alpha-1)u(t) of the Green representation, t in (0, 1].

    The integrand has no kink at s = t (only the integral splits there), so
    no substitution is needed on the abutting panel; t = 1 is admitted with
    an empty right part.
    """
    alpha = _checked_alpha(alpha)
    t = _checked_t(t, endpoint_ok=False, right_endpoint_ok=True)
    a1 = alpha - 1.0

    def left_kernel(s):
        return np.expm1(a1 * np.log1p(-s))

    def right_kernel(s):
        return np.power(1.0 - s, a1)

    return _assemble(
        t, g_singular_exponent, g_regular, alpha, mesh,
        left_kernel, right_kernel, t_panel=None,
    )


# --- internals ---------------------------------------------------------------


def _checked_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"order must lie in (1, 2], got {alpha!r}")
    return alpha


def _checked_t(t, endpoint_ok: bool, right_endpoint_ok: bool = False) -> float:
    t = float(t)
    if endpoint_ok:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {t!r}")
    else:
        hi_ok = t < 1.0 or (right_endpoint_ok and t == 1.0)
        if not (0.0 < t and hi_ok):
            raise ValueError(f"t must lie strictly inside (0, 1), got {t!r}")
    return t


def _derivative_bracket(t, s, alpha):
    # t^(a-2)(1-s)^(a-1) - (t-s)^(a-2); always negative on (0, t).
    a1 = alpha - 1.0
    a2 = alpha - 2.0
    pp = t**a2 * np.power(1.0 - s, a1)
    xp = np.power(t - s, a2)
    with np.errstate(divide="ignore"):
        d = a1 * np.log1p(-s) + (2.0 - alpha) * np.log1p(-s / t)
    # d <= 0 always; |d| <= log 2 marks the cancellation regime.
    return np.where(d > -0.6931, xp * np.expm1(d), pp - xp)


def _origin_substitution_order(alpha: float, beta_g: float) -> int:
    margin = alpha - beta_g
    if margin <= 0.0:
        raise ConditionHError(
            f"forcing singularity exponent {beta_g} is not below the order"
            f" {alpha}; the Green integral diverges"
        )
    return max(1, math.ceil(2.0 / margin))


def _assemble(t, beta_g, g_regular, alpha, mesh, left_kernel, right_kernel, t_panel):
    beta_g = float(beta_g)
    m = _origin_substitution_order(alpha, beta_g)
    nodes = mesh.nodes

    def integrand_left(s):
        return left_kernel(s) * np.power(s, -beta_g) * g_regular(s)

    def integrand_right(s):
        return right_kernel(s) * np.power(s, -beta_g) * g_regular(s)

    inner = nodes[(nodes > 0.0) & (nodes < t)]
    left_edges = np.concatenate(([0.0], inner, [t]))
    if t_panel is not None and len(left_edges) == 2:
        # t sits inside the first mesh panel: isolate the origin treatment
        # from the s = t substitution.
        left_edges = np.array([0.0, 0.5 * t, t])

    total = _first_panel(left_edges[1], m, beta_g, g_regular, left_kernel)
    if len(left_edges) > 2:
        if t_panel is None:
            total += _plain_panels(left_edges[1:], integrand_left)
        else:
            total += _plain_panels(left_edges[1:-1], integrand_left)
            total += t_panel(left_edges[-2], t, beta_g, g_regular, alpha)

    if t < 1.0:
        inner = nodes[(nodes > t) & (nodes < 1.0)]
        total += _plain_panels(
            np.concatenate(([t], inner, [1.0])), integrand_right
        )
    return total


def _plain_panels(edges, integrand) -> float:
    if len(edges) < 2:
        return 0.0
    half = 0.5 * np.diff(edges)
    s = edges[:-1, None] + half[:, None] * (_GL_X + 1.0)[None, :]
    w = half[:, None] * _GL_W[None, :]
    return float(np.sum(w * integrand(s.ravel()).reshape(s.shape)))


def _first_panel(b, m, beta_g, g_regular, kernel) -> float:
    # int_0^b kernel(s) s^(-beta_g) g_reg(s) ds under s = tau^m; the
    # Jacobian and the singular power fold into one smooth tau power.
    tau_hi = b ** (1.0 / m)
    tau = 0.5 * tau_hi * (_GL_X + 1.0)
    w = 0.5 * tau_hi * _GL_W
    s = tau**m
    fold = m * np.power(tau, m - 1.0 - m * beta_g)
    return float(np.dot(w, kernel(s) * g_regular(s) * fold))


def _green_t_panel(a, t, beta_g, g_regular, alpha) -> float:
    # int_a^t [(t(1-s))^(a1) - (t-s)^(a1)] g ds under s = t - tau^(1/a1);
    # the subtracted power becomes tau itself.
    a1 = alpha - 1.0
    p = 1.0 / a1
    tau_hi = (t - a) ** a1
    tau = 0.5 * tau_hi * (_GL_X + 1.0)
    w = 0.5 * tau_hi * _GL_W
    s = t - tau**p
    kern = np.power(t * (1.0 - s), a1) - tau
    vals = kern * np.power(s, -beta_g) * g_regular(s) * p * np.power(tau, p - 1.0)
    return float(np.dot(w, vals))


def _derivative_t_panel(a, t, beta_g, g_regular, alpha) -> float:
    # int_a^t [t^(a-2)(1-s)^(a-1) - (t-s)^(a-2)] g ds under the same map;
    # (t-s)^(a-2) ds reduces to dtau/(alpha-1) exactly.
    a1 = alpha - 1.0
    p = 1.0 / a1
    tau_hi = (t - a) ** a1
    tau = 0.5 * tau_hi * (_GL_X + 1.0)
    w = 0.5 * tau_hi * _GL_W
    s = t - tau**p
    kern = t ** (alpha - 2.0) * np.power(1.0 - s, a1) * np.power(tau, p - 1.0) - 1.0
    vals = kern * np.power(s, -beta_g) * g_regular(s) * p
    return float(np.dot(w, vals))
