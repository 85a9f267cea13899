"""Defining polynomials and derived constants.

Two one-parameter families of algebraic numbers drive everything here:

* ``beta_n``: the largest root in (1, 2) of  x^n = x^(n-2) + ... + x + 1,
  equivalently  sum_{t=2..n} x^(-t) = 1.  It increases to the golden ratio.
* ``lambda_n``: the largest root in (1, 2) of  x^n = 2(1 + x + ... + x^(n-2)),
  the dominant eigenvalue of the transition structure built later.

Both are found by bisection on [1, 2] followed by Newton polishing.  An
optional extended-precision mode (mpmath, >= 100-bit significand) exists for
large n, where the roots crowd the golden ratio and double-precision
residuals flatten.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import InvariantViolationError

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

_REL_RESIDUAL_TOL = 1e-14
_IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraicBeta:
    """The pair (n, beta_n) with its derived constants.

    a = 1/(beta^2-1) and b = beta*a bound the switch region; domain_max =
    1/(beta-1) is the right end of the expansion domain [0, 1/(beta-1)].
    b is *defined* as beta*a, so T0(a) = b holds exactly, also in floats.
    """

    n: int
    beta: float
    a: float
    b: float
    domain_max: float


@dataclass(frozen=True)
class PerronValue:
    """The pair (n, lambda_n)."""

    n: int
    lam: float


def _poly(n: int, factor):
    """f(x) = x^n - factor * sum_{i=0}^{n-2} x^i, plus its derivative."""

    def f(x):
        p = 1 + 0 * x  # one, in x's arithmetic type
        s = 0 * x
        for _ in range(n - 1):
            s = s + p
            p = p * x
        return p * x - factor * s

    def fprime(x):
        d = n * x ** (n - 1)
        for i in range(1, n - 1):
            d = d - factor * i * x ** (i - 1)
        return d

    return f, fprime


def _solve_poly(n: int, factor, precision: int | None):
    """Largest root in (1, 2): bisection to tolerance, then Newton."""
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")
    f, fp = _poly(n, factor)
    if precision is None:
        lo, hi = 1.0, 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            # f(1) = 2 - n - ... < 0 and f(2) > 0: root where sign flips
            if f(mid) > 0:
                hi = mid
            else:
                lo = mid
        x = 0.5 * (lo + hi)
        for _ in range(4):
            x = x - f(x) / fp(x)
        scale = x ** n
        if abs(f(x)) / scale > _REL_RESIDUAL_TOL:
            raise InvariantViolationError(
                f"root residual {abs(f(x)) / scale:.3e} above tolerance at n={n}")
        return x
    if precision < 100:
        raise ValueError("extended precision needs >= 100 bits")
    with mpmath.workprec(precision + 20):
        lo, hi = mpmath.mpf(1), mpmath.mpf(2)
        for _ in range(80):
            mid = (lo + hi) / 2
            if f(mid) > 0:
                hi = mid
            else:
                lo = mid
        x = (lo + hi) / 2
        for _ in range(40):
            step = f(x) / fp(x)
            x = x - step
            if abs(step) < mpmath.mpf(2) ** (-(precision + 10)):
                break
        return +x  # round to the working precision


def solve_beta(n: int, precision: int | None = None) -> AlgebraicBeta:
    """Solve for beta_n and populate the derived constants.

    precision=None uses doubles; an integer is an mpmath significand width in
    bits (>= 100), in which case all fields are mpf values.
    """
    beta = _solve_poly(n, 1, precision)
    a = 1 / (beta * beta - 1)
    b = beta * a
    domain_max = 1 / (beta - 1)
    ctx = AlgebraicBeta(n=n, beta=beta, a=a, b=b, domain_max=domain_max)
    _check_ctx(ctx)
    return ctx


def solve_lambda(n: int, precision: int | None = None) -> PerronValue:
    """Solve for lambda_n (largest root of x^n = 2(1 + x + ... + x^(n-2)))."""
    lam = _solve_poly(n, 2, precision)
    if not (1 < lam < 2):
        raise InvariantViolationError(f"lambda out of (1,2) at n={n}: {lam!r}")
    return PerronValue(n=n, lam=lam)


def _check_ctx(ctx: AlgebraicBeta) -> None:
    beta, a, b = ctx.beta, ctx.a, ctx.b
    if not (1 < beta < GOLDEN_RATIO):
        raise InvariantViolationError(f"beta out of (1, golden): {beta!r}")
    if not (0 < a < b < ctx.domain_max):
        raise InvariantViolationError("derived constants out of order")
    if abs(beta * b - 1 - a) > _IDENTITY_TOL:
        raise InvariantViolationError("T1(b) = a identity failed")
    # sum_{t=2..n} beta^(-t) = 1 restates the defining equation
    s = sum(beta ** (-t) for t in range(2, ctx.n + 1))
    if abs(s - 1) > _IDENTITY_TOL:
        raise InvariantViolationError(f"sum beta^-t = {s!r}, expected 1")


def eval_word(word, beta):
    """Value of a finite 0/1 digit word in base beta, with its tail bound.

    Returns (sum_{k=1..m} w_k beta^(-k), beta^(-m)/(beta-1)).  The bound
    dominates the contribution of any infinite continuation of the word.
    """
    digits = list(word)
    for w in digits:
        if w not in (0, 1):
            raise ValueError(f"digit {w!r} not in {{0, 1}}")
    v = 0 * beta
    for w in reversed(digits):
        v = (v + w) / beta
    tail = beta ** (-len(digits)) / (beta - 1)
    return v, tail


def grid_sign_changes(f, lo: float, hi: float, num: int) -> int:
    """Count strict sign changes of f on a uniform grid of `num` points."""
    xs = [lo + (hi - lo) * i / (num - 1) for i in range(num)]
    vals = [f(x) for x in xs]
    changes = 0
    for v0, v1 in zip(vals, vals[1:]):
        if v0 == 0 or v1 == 0:
            continue
        if (v0 < 0) != (v1 < 0):
            changes += 1
    return changes


def beta_defining_poly(n: int):
    """The callable x -> x^n - (x^(n-2) + ... + 1), for root-locating tests."""
    f, _ = _poly(n, 1)
    return f


def lambda_defining_poly(n: int):
    """The callable x -> x^n - 2(x^(n-2) + ... + 1)."""
    f, _ = _poly(n, 2)
    return f
