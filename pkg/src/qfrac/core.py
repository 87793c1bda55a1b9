"""Exact q-grid representation and the basic nabla q-calculus.

Everything here lives on the geometric scale t, tq, tq**2, ... for a fixed
base 0 < q < 1.  The backward q-derivative is an exact difference quotient;
integrals are Jackson sums, i.e. truncated geometric series whose stopping
behaviour is governed by a :class:`Truncation` policy.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .errors import DomainError, NonConvergence

__all__ = [
    "QFunction",
    "Truncation",
    "QParams",
    "GridPoint",
    "count_terms",
    "q_bracket",
    "nabla_q",
    "nabla_q_n",
    "q_integral",
    "q_integral_tail",
]

# A function evaluable at any non-negative real.  Operators sample it on
# geometric chains; right-sided operators additionally shift arguments off
# the plain q-grid, which is why a rule (not a sample table) is required.
QFunction = Callable[[float], float]


@dataclass(frozen=True)
class Truncation:
    """Stopping policy for every infinite sum or factor product.

    A sum stops once ``consecutive_small`` successive terms satisfy
    ``|term| <= rel_tol * |partial_sum| + abs_tol``; products use the analogous
    test on ``|factor - 1|``.  Exhausting ``max_terms`` raises
    :class:`~qfrac.errors.NonConvergence`.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 10_000
    consecutive_small: int = 3

    def __post_init__(self) -> None:
        if not self.rel_tol > 0.0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.abs_tol < 0.0:
            raise DomainError(f"abs_tol must be non-negative, got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be at least 1, got {self.max_terms}")
        if self.consecutive_small < 1:
            raise DomainError(
                f"consecutive_small must be at least 1, got {self.consecutive_small}"
            )


@dataclass(frozen=True)
class QParams:
    """The base q in (0, 1) plus the truncation policy shared by all operators."""

    q: float
    trunc: Truncation = field(default_factory=Truncation)

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"q must lie strictly inside (0, 1), got {self.q}")


@dataclass(frozen=True, eq=False)
class GridPoint:
    """A point q**(exponent + shift) of a (possibly shifted) q-grid, or zero.

    Comparison is carried out on the exact pair (exponent, shift), never on the
    derived floating value, so points reached along different algebraic routes
    still compare equal.
    """

    exponent: int = 0
    shift: float = 0.0
    is_zero: bool = False

    def __post_init__(self) -> None:
        if self.is_zero:
            object.__setattr__(self, "exponent", 0)
            object.__setattr__(self, "shift", 0.0)
            return
        if not math.isfinite(self.shift) or self.shift < 0.0:
            raise DomainError(f"shift must be finite and >= 0, got {self.shift}")

    @classmethod
    def zero(cls) -> "GridPoint":
        return cls(is_zero=True)

    def value(self, q: "float | QParams") -> float:
        base = q.q if isinstance(q, QParams) else q
        if self.is_zero:
            return 0.0
        return base ** (self.exponent + self.shift)

    def scaled(self, dexp: int = 0, dshift: float = 0.0) -> "GridPoint":
        """Multiply by q**(dexp + dshift), renormalising shift into [0, 1)."""
        if self.is_zero:
            return self
        exponent = self.exponent + dexp
        shift = self.shift + dshift
        carry = math.floor(shift)
        return GridPoint(exponent + carry, shift - carry)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridPoint):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return self.exponent + self.shift == other.exponent + other.shift

    def __hash__(self) -> int:
        return hash((self.is_zero, self.exponent + self.shift))

    def __repr__(self) -> str:
        if self.is_zero:
            return "GridPoint.zero()"
        return f"GridPoint({self.exponent}, {self.shift!r})"


# ---------------------------------------------------------------------------
# Term accounting.  Diagnostics only: sums report how many terms they consumed
# to every counter active on the stack.  Uses a ContextVar so concurrent use
# stays isolated; purely observational, never affects values.

class TermCounter:
    __slots__ = ("total",)

    def __init__(self) -> None:
        self.total = 0


_COUNTERS: ContextVar[tuple[TermCounter, ...]] = ContextVar("qfrac_counters", default=())


@contextmanager
def count_terms() -> Iterator[TermCounter]:
    """Collect the number of series/product terms consumed inside the block."""
    counter = TermCounter()
    token = _COUNTERS.set(_COUNTERS.get() + (counter,))
    try:
        yield counter
    finally:
        _COUNTERS.reset(token)


def _note_terms(n: int) -> None:
    for counter in _COUNTERS.get():
        counter.total += n


# ---------------------------------------------------------------------------
# Series accumulation with the shared stopping rule.

# Net magnitude gain a growth run must reach before it counts as divergence.
# Convergent tails with kernels vanishing at the lower endpoint ramp up for
# several steps (the longer the closer q is to 1) before decaying; a bounded
# hump must not be mistaken for a divergent geometric tail.
_GROWTH_FACTOR = 1e3


def _accumulate(
    terms: Iterable[float],
    trunc: Truncation,
    *,
    detect_growth: bool = False,
    label: str = "series",
) -> float:
    total = 0.0
    small_run = 0
    growth_run = 0
    growth_base = math.inf
    prev_mag = math.inf
    count = 0
    for term in terms:
        count += 1
        if count > trunc.max_terms:
            _note_terms(count)
            raise NonConvergence(
                f"{label}: stopping rule did not fire within {trunc.max_terms} terms"
            )
        if not math.isfinite(term):
            _note_terms(count)
            raise NonConvergence(f"{label}: non-finite term at index {count - 1}")
        total += term
        mag = abs(term)
        if mag <= trunc.rel_tol * abs(total) + trunc.abs_tol:
            small_run += 1
            if small_run >= trunc.consecutive_small:
                _note_terms(count)
                return total
        else:
            small_run = 0
        if detect_growth:
            if math.isfinite(prev_mag) and 0.0 < prev_mag < mag:
                if growth_run == 0:
                    growth_base = prev_mag
                growth_run += 1
                if (
                    growth_run >= trunc.consecutive_small
                    and mag > _GROWTH_FACTOR * growth_base
                ):
                    _note_terms(count)
                    raise NonConvergence(
                        f"{label}: terms grew for {growth_run} successive steps"
                    )
            else:
                growth_run = 0
            prev_mag = mag
    _note_terms(count)
    return total


def _grid_exponent(ratio: float, q: float, tol: float = 1e-9) -> int | None:
    """Integer d with ratio == q**d up to snap tolerance, else None.

    Floating inputs that are grid points in intent land within ~1e-12 of an
    integer exponent; deliberate fractional offsets stay far away, so a 1e-9
    radius separates the two regimes safely.
    """
    if not (ratio > 0.0) or not math.isfinite(ratio):
        return None
    d = math.log(ratio) / math.log(q)
    r = round(d)
    if abs(d - r) <= tol:
        return int(r)
    return None


def q_bracket(r: float, p: QParams) -> float:
    """The q-number [r]_q = (1 - q**r) / (1 - q)."""
    return (1.0 - p.q**r) / (1.0 - p.q)


def nabla_q(f: QFunction, t: float, p: QParams) -> float:
    """Backward q-derivative (f(t) - f(qt)) / ((1 - q) t); exact, t > 0."""
    if not t > 0.0:
        raise DomainError(f"nabla_q is undefined at t = {t}; requires t > 0")
    return (f(t) - f(p.q * t)) / ((1.0 - p.q) * t)


def nabla_q_n(f: QFunction, t: float, n: int, p: QParams) -> float:
    """n-fold backward q-derivative by literal repeated application."""
    if n < 0:
        raise DomainError(f"derivative order must be >= 0, got {n}")
    if n == 0:
        return f(t)
    if n == 1:
        return nabla_q(f, t, p)
    return nabla_q(lambda x: nabla_q_n(f, x, n - 1, p), t, p)


def _base_sum(f: QFunction, x: float, p: QParams) -> float:
    """Jackson sum (1 - q) x sum_{i>=0} q**i f(x q**i) for the range [0, x]."""
    if x == 0.0:
        return 0.0
    q = p.q

    def terms() -> Iterator[float]:
        weight = (1.0 - q) * x
        s = x
        while True:
            yield weight * f(s)
            weight *= q
            s *= q

    return _accumulate(terms(), p.trunc, label="q-integral")


def q_integral(f: QFunction, a: float, t: float, p: QParams) -> float:
    """Signed nabla q-integral of f from a to t.

    Computed as the difference of two Jackson sums anchored at zero, so both
    endpoints may be arbitrary non-negative reals; a > t yields the negative
    of the reversed integral.
    """
    if a < 0.0 or t < 0.0:
        raise DomainError(f"integration endpoints must be >= 0, got a={a}, t={t}")
    if a == t:
        return 0.0
    return _base_sum(f, t, p) - _base_sum(f, a, p)


def q_integral_tail(f: QFunction, t: float, b: float, p: QParams) -> float:
    """Nabla q-integral of f from t upward, to infinity or to b = t q**-m.

    The infinite tail is (1 - q) t sum_{i>=1} q**-i f(t q**-i); divergence is
    detected at runtime by watching the terms grow.  A finite b must sit on
    the q-grid through t (b = t q**-m with m >= 0), in which case the two-tail
    difference telescopes to an exact finite sum over the points in (t, b].
    """
    if not t > 0.0:
        raise DomainError(f"tail integrals require t > 0, got t={t}")
    q = p.q
    if math.isinf(b):
        def terms() -> Iterator[float]:
            weight = (1.0 - q) * t
            s = t
            while True:
                weight /= q
                s /= q
                yield weight * f(s)

        return _accumulate(terms(), p.trunc, detect_growth=True, label="tail integral")
    m = _grid_exponent(b / t, q)
    if m is None or m > 0:
        raise DomainError(
            f"finite upper limit must satisfy b = t * q**-m, m >= 0; got t={t}, b={b}"
        )
    steps = -m

    def finite_terms() -> Iterator[float]:
        weight = (1.0 - q) * t
        s = t
        for _ in range(steps):
            weight /= q
            s /= q
            yield weight * f(s)

    return _accumulate(finite_terms(), p.trunc, label="tail integral")
