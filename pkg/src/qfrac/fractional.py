"""Left and right q-fractional integrals, Riemann and Caputo q-derivatives.

Left operators integrate downward from t on the chain t, tq, tq**2, ...;
right operators integrate upward toward b (or infinity) and evaluate their
operand at shifted points s * q**(1 - alpha), i.e. on a shifted q-grid.
Derivatives of non-integer order compose an exact n-fold q-derivative with a
fractional integral of order n - alpha; integer orders short-circuit to the
plain iterated q-derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from . import special
from .core import GridPoint, QFunction, QParams, nabla_q_n, q_integral, q_integral_tail
from .errors import DomainError

__all__ = [
    "FracOrder",
    "RightOpContext",
    "r_coef",
    "left_frac_integral",
    "right_frac_integral",
    "left_riemann_deriv",
    "right_riemann_deriv",
    "left_caputo",
    "right_caputo",
]

OrderLike = Union[float, "FracOrder"]


@dataclass(frozen=True)
class FracOrder:
    """A derivative order alpha > 0 with its ceiling index.

    For non-integer alpha, n = floor(alpha) + 1; exactly integer alpha routes
    operators through their integer-order clause with n = alpha.
    """

    alpha: float
    n: int
    is_integer: bool

    @classmethod
    def of(cls, order: OrderLike) -> "FracOrder":
        if isinstance(order, FracOrder):
            return order
        alpha = float(order)
        if not (math.isfinite(alpha) and alpha > 0.0):
            raise DomainError(f"derivative order must be a finite real > 0, got {alpha}")
        if alpha == round(alpha):
            return cls(alpha, int(round(alpha)), True)
        return cls(alpha, math.floor(alpha) + 1, False)


@dataclass(frozen=True)
class RightOpContext:
    """Upper endpoint of a right-sided operator: a grid point or infinity."""

    b: float | GridPoint = math.inf

    def b_value(self, p: QParams) -> float:
        value = self.b.value(p) if isinstance(self.b, GridPoint) else float(self.b)
        if not value > 0.0:
            raise DomainError(f"right endpoint must be positive, got {value}")
        return value


def r_coef(alpha: float, q: float) -> float:
    """Prefactor q**(-alpha (alpha - 1) / 2) of right-sided operators."""
    return q ** (-0.5 * alpha * (alpha - 1.0))


def _integral_order(order: OrderLike) -> float:
    alpha = order.alpha if isinstance(order, FracOrder) else float(order)
    if not math.isfinite(alpha) or (alpha == round(alpha) and alpha <= 0.0):
        raise DomainError(
            f"fractional integral order must avoid 0, -1, -2, ...; got {alpha}"
        )
    return alpha


def _right_context(ctx: "RightOpContext | float | GridPoint") -> RightOpContext:
    if isinstance(ctx, RightOpContext):
        return ctx
    return RightOpContext(ctx)


def left_frac_integral(
    f: QFunction, a: float, order: OrderLike, t: float, p: QParams
) -> float:
    """Left q-fractional integral of order alpha starting at a, evaluated at t.

    (1 / q_gamma(alpha)) * integral_a^t (t - qs)_q^(alpha-1) f(s) nabla_q s.
    """
    alpha = _integral_order(order)
    q = p.q

    def integrand(s: float) -> float:
        kernel = special.q_factorial_power(t, q * s, alpha - 1.0, p)
        return kernel * f(s) if kernel != 0.0 else 0.0

    return q_integral(integrand, a, t, p) / special.q_gamma(alpha, p)


def right_frac_integral(
    f: QFunction, ctx: "RightOpContext | float | GridPoint", order: OrderLike,
    t: float, p: QParams,
) -> float:
    """Right q-fractional integral of order alpha ending at ctx.b, at t.

    r(alpha)/q_gamma(alpha) * integral_t^b (s - t)_q^(alpha-1) f(s q**(1-alpha)) nabla_q s;
    the operand is sampled on the shifted grid s * q**(1 - alpha).
    """
    alpha = _integral_order(order)
    b = _right_context(ctx).b_value(p)
    q = p.q
    shift = q ** (1.0 - alpha)

    def integrand(s: float) -> float:
        kernel = special.q_factorial_power(s, t, alpha - 1.0, p)
        return kernel * f(s * shift) if kernel != 0.0 else 0.0

    tail = q_integral_tail(integrand, t, b, p)
    return r_coef(alpha, q) * tail / special.q_gamma(alpha, p)


def left_riemann_deriv(
    f: QFunction, a: float, order: OrderLike, t: float, p: QParams
) -> float:
    """Left Riemann q-fractional derivative: nabla_q^n of the (n - alpha)-integral."""
    o = FracOrder.of(order)
    if o.is_integer:
        return nabla_q_n(f, t, o.n, p)
    inner_order = o.n - o.alpha
    return nabla_q_n(
        lambda x: left_frac_integral(f, a, inner_order, x, p), t, o.n, p
    )


def right_riemann_deriv(
    f: QFunction, ctx: "RightOpContext | float | GridPoint", order: OrderLike,
    t: float, p: QParams,
) -> float:
    """Right Riemann q-fractional derivative: (-1)**n nabla_q^n of the right integral."""
    o = FracOrder.of(order)
    sign = -1.0 if o.n % 2 else 1.0
    if o.is_integer:
        return sign * nabla_q_n(f, t, o.n, p)
    context = _right_context(ctx)
    inner_order = o.n - o.alpha
    return sign * nabla_q_n(
        lambda x: right_frac_integral(f, context, inner_order, x, p), t, o.n, p
    )


def left_caputo(
    f: QFunction, a: float, order: OrderLike, t: float, p: QParams
) -> float:
    """Left Caputo q-fractional derivative: (n - alpha)-integral of nabla_q^n f.

    Kills constants for non-integer order; integer order is the plain n-fold
    q-derivative.
    """
    o = FracOrder.of(order)
    if o.is_integer:
        return nabla_q_n(f, t, o.n, p)
    return left_frac_integral(
        lambda s: nabla_q_n(f, s, o.n, p), a, o.n - o.alpha, t, p
    )


def right_caputo(
    f: QFunction, ctx: "RightOpContext | float | GridPoint", order: OrderLike,
    t: float, p: QParams,
) -> float:
    """Right Caputo q-fractional derivative via the compositional definition.

    The right (n - alpha)-integral applied to the n-fold image of f under the
    reflected derivative, which on this scale is -nabla_q.
    """
    o = FracOrder.of(order)
    sign = -1.0 if o.n % 2 else 1.0
    if o.is_integer:
        return sign * nabla_q_n(f, t, o.n, p)
    context = _right_context(ctx)
    return right_frac_integral(
        lambda s: sign * nabla_q_n(f, s, o.n, p), context, o.n - o.alpha, t, p
    )
