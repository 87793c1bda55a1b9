"""q-special functions: factorial powers, q-gamma, q-Pochhammer, q-exponentials.

The central primitive is the q-factorial power (t - s)_q^alpha: a finite
product for integer alpha >= 0, otherwise the ratio product

    t**alpha * prod_{i>=0} (1 - (s/t) q**i) / (1 - (s/t) q**(i+alpha)).

When s/t coincides with an integer power of q the ratio is snapped onto the
grid so that vanishing (s/t = q**-j) and poles surface exactly instead of as
rounding noise.  Aligned products reduce to ratios of the tail product
(q**x; q)_inf, which is memoised per (q, x, truncation policy).
"""

from __future__ import annotations

import math
from typing import Iterator

from .core import QParams, Truncation, _accumulate, _grid_exponent, _note_terms
from .errors import DomainError, NonConvergence, PoleError

__all__ = [
    "q_pochhammer",
    "q_factorial_power",
    "q_gamma",
    "q_exp_e",
    "q_exp_E",
]


def _is_integer_valued(x: float) -> bool:
    return math.isfinite(x) and x == round(x)


def q_pochhammer(n: int, p: QParams) -> float:
    """(q)_n = prod_{j=1..n} (1 - q**j), with (q)_0 = 1."""
    if n < 0 or n != int(n):
        raise DomainError(f"q_pochhammer needs an integer n >= 0, got {n}")
    q = p.q
    product = 1.0
    power = 1.0
    for _ in range(int(n)):
        power *= q
        product *= 1.0 - power
    return product


_TAIL_CACHE: dict[tuple[float, float, Truncation], tuple[float, int]] = {}


def _pochhammer_tail(x: float, p: QParams) -> float:
    """(q**x; q)_inf = prod_{j>=0} (1 - q**(x+j)) for x > 0, memoised.

    Cache hits report the same term count a fresh computation would, so
    diagnostics stay identical between cold and warm runs.
    """
    key = (p.q, x, p.trunc)
    cached = _TAIL_CACHE.get(key)
    if cached is not None:
        _note_terms(cached[1])
        return cached[0]
    trunc = p.trunc
    product = 1.0
    power = p.q**x
    small_run = 0
    for count in range(1, trunc.max_terms + 1):
        product *= 1.0 - power
        if power <= trunc.rel_tol:
            small_run += 1
            if small_run >= trunc.consecutive_small:
                _note_terms(count)
                _TAIL_CACHE[key] = (product, count)
                return product
        else:
            small_run = 0
        power *= p.q
    _note_terms(trunc.max_terms)
    raise NonConvergence(f"(q**x; q)_inf did not converge for q={p.q}, x={x}")


def _product_with_stoprule(factors: Iterator[float], trunc: Truncation, label: str) -> float:
    product = 1.0
    small_run = 0
    for count, factor in enumerate(factors, start=1):
        if count > trunc.max_terms:
            _note_terms(count)
            raise NonConvergence(f"{label}: no convergence within {trunc.max_terms} factors")
        if not math.isfinite(factor):
            _note_terms(count)
            raise NonConvergence(f"{label}: non-finite factor at index {count - 1}")
        product *= factor
        if abs(factor - 1.0) <= trunc.rel_tol:
            small_run += 1
            if small_run >= trunc.consecutive_small:
                _note_terms(count)
                return product
        else:
            small_run = 0
    _note_terms(trunc.max_terms)
    raise NonConvergence(f"{label}: factor stream ended unexpectedly")


def q_factorial_power(t: float, s: float, alpha: float, p: QParams) -> float:
    """The q-factorial power (t - s)_q^alpha.

    Integer alpha >= 0 gives the finite product prod_{i<alpha} (t - q**i s).
    Any other real alpha uses the infinite ratio product, which vanishes
    exactly when s = t q**-j (j >= 0) and raises PoleError when a denominator
    factor hits zero (negative integer alpha on the grid).
    """
    q = p.q
    if not math.isfinite(alpha):
        raise DomainError(f"exponent must be finite, got {alpha}")
    if _is_integer_valued(alpha) and alpha >= 0:
        m = int(round(alpha))
        if m == 0:
            return 1.0
        if t == 0.0:
            # prod (0 - q**i s) = (-s)**m q**(m(m-1)/2)
            return (-s) ** m * q ** (m * (m - 1) // 2)
        d = _grid_exponent(s / t, q) if s != 0.0 and s / t > 0.0 else None
        product = 1.0
        if d is not None:
            for i in range(m):
                product *= 1.0 - q ** (d + i)
            return t**m * product
        power = 1.0
        for _ in range(m):
            product *= t - power * s
            power *= q
        return product

    # Fractional (or negative integer) exponent: ratio product.
    if t == 0.0:
        if s == 0.0 and alpha > 0.0:
            return 0.0
        raise DomainError(
            f"(t - s)_q^alpha with non-integer alpha={alpha} requires t != 0 (or s = 0)"
        )
    if t < 0.0:
        raise DomainError(f"fractional q-factorial power needs t > 0, got t={t}")
    if s == 0.0:
        return t**alpha
    u = s / t
    d = _grid_exponent(u, q) if u > 0.0 else None
    trunc = p.trunc
    if d is not None:
        if _is_integer_valued(alpha):
            m = -int(round(alpha))
            if d <= m:
                raise PoleError(
                    f"(t - s)_q^{alpha} has a vanishing denominator at s = t q**{-d}"
                )
            return t**alpha * _pochhammer_tail(float(d), p) / _pochhammer_tail(d + alpha, p)
        if d <= 0:
            # Numerator factor 1 - q**(d + i) vanishes identically at i = -d.
            return 0.0
        x2 = d + alpha
        if x2 > 0.0:
            return t**alpha * _pochhammer_tail(float(d), p) / _pochhammer_tail(x2, p)

        def snapped_factors() -> Iterator[float]:
            i = 0
            while True:
                yield (1.0 - q ** (d + i)) / (1.0 - q ** (d + i + alpha))
                i += 1

        product = _product_with_stoprule(snapped_factors(), trunc, "q-factorial power")
        return t**alpha * product

    # Generic, off-grid ratio.  A denominator within ~1e-12 of zero cannot be
    # told apart from a true pole at double precision (the ratio u itself
    # carries rounding), so it is reported as one instead of returning a
    # meaninglessly amplified product.
    def factors() -> Iterator[float]:
        num_pow = u
        den_pow = u * q**alpha
        while True:
            den = 1.0 - den_pow
            if abs(den) < max(trunc.abs_tol, 1e-12):
                raise PoleError(
                    f"(t - s)_q^{alpha} denominator vanished for s/t = {u}"
                )
            yield (1.0 - num_pow) / den
            num_pow *= q
            den_pow *= q

    product = _product_with_stoprule(factors(), trunc, "q-factorial power")
    return t**alpha * product


def q_gamma(alpha: float, p: QParams) -> float:
    """q-gamma via (1 - q)**(1 - alpha) (q; q)_inf / (q**alpha; q)_inf.

    Satisfies the recurrence q_gamma(alpha + 1) = [alpha]_q q_gamma(alpha)
    with q_gamma(1) = 1; poles at alpha = 0, -1, -2, ...
    """
    if not math.isfinite(alpha):
        raise DomainError(f"q_gamma argument must be finite, got {alpha}")
    if _is_integer_valued(alpha) and alpha <= 0.0:
        raise PoleError(f"q_gamma has a pole at alpha = {alpha}")
    q = p.q
    divisor = 1.0
    a = alpha
    while a <= 0.0:
        # Shift negative non-integer arguments up through the recurrence.
        divisor *= (1.0 - q**a) / (1.0 - q)
        a += 1.0
    value = (1.0 - q) ** (1.0 - a) * _pochhammer_tail(1.0, p) / _pochhammer_tail(a, p)
    return value / divisor


def q_exp_e(t: float, p: QParams) -> float:
    """Small q-exponential e_q(t) = sum_k t**k / [k]_q!.

    Converges for |t| < 1/(1 - q); divergence is detected at runtime.
    """
    q = p.q

    def terms() -> Iterator[float]:
        term = 1.0
        k = 0
        while True:
            yield term
            k += 1
            term *= t * (1.0 - q) / (1.0 - q**k)

    return _accumulate(terms(), p.trunc, detect_growth=True, label="e_q series")


def q_exp_E(t: float, p: QParams) -> float:
    """Big q-exponential E_q(t) = prod_{n>=0} (1 - q**n t)**-1 for |t| < 1."""
    if abs(t) >= 1.0:
        raise DomainError(f"E_q requires |t| < 1, got t={t}")
    q = p.q
    trunc = p.trunc

    def factors() -> Iterator[float]:
        power = 1.0
        while True:
            den = 1.0 - power * t
            if den == 0.0 or abs(den) < trunc.abs_tol:
                raise PoleError(f"E_q factor vanished at t={t}")
            yield 1.0 / den
            power *= q

    return _product_with_stoprule(factors(), trunc, "E_q product")
