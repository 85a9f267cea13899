"""Root solving and base-beta word evaluation."""

import math

import mpmath
import pytest

from shrinkbeta.algebra import (AlgebraicBeta, beta_defining_poly, eval_word,
                                grid_sign_changes, lambda_defining_poly,
                                solve_beta, solve_lambda)

# frozen from 50-digit mpmath evaluations of the defining polynomials
BETA3 = 1.324717957244746
BETA4 = 1.4655712318767682
BETA5 = 1.534157744914267
LAMBDA3 = 1.7692923542386314
A3 = 1.3247179572447456
B3 = 1.7548776662466923
DOMAIN_MAX3 = 3.0795956234914383

GOLDEN = (1 + math.sqrt(5)) / 2


def test_beta3_context_frozen_values():
    ctx = solve_beta(3)
    assert isinstance(ctx, AlgebraicBeta)
    assert ctx.n == 3
    assert ctx.beta == pytest.approx(BETA3, abs=1e-15)
    assert ctx.a == pytest.approx(A3, abs=1e-15)
    assert ctx.b == pytest.approx(B3, abs=1e-15)
    assert ctx.domain_max == pytest.approx(DOMAIN_MAX3, abs=1e-15)
    # b is beta*a bitwise, domain_max is 1/(beta-1)
    assert ctx.b == ctx.beta * ctx.a
    assert ctx.domain_max == 1.0 / (ctx.beta - 1.0)


@pytest.mark.parametrize("n,expected", [(3, BETA3), (4, BETA4), (5, BETA5)])
def test_beta_frozen(n, expected):
    assert solve_beta(n).beta == pytest.approx(expected, abs=1e-15)


def test_lambda3_frozen():
    assert solve_lambda(3).lam == pytest.approx(LAMBDA3, abs=1e-15)


@pytest.mark.parametrize("n", [3, 4, 5, 8, 13, 21, 30])
def test_beta_satisfies_defining_equation(n):
    beta = solve_beta(n).beta
    # sum_{t=2..n} beta^-t = 1 characterizes beta_n in (1, 2)
    total = math.fsum(beta ** (-t) for t in range(2, n + 1))
    assert abs(total - 1.0) <= 1e-12, f"n={n}: sum beta^-t = {total!r}"
    f = beta_defining_poly(n)
    assert abs(f(beta)) <= 1e-10 * beta ** n


@pytest.mark.parametrize("n", [3, 4, 5, 8, 13, 21, 30])
def test_lambda_satisfies_defining_equation(n):
    lam = solve_lambda(n).lam
    f = lambda_defining_poly(n)
    assert abs(f(lam)) <= 1e-10 * lam ** n
    # lam^n = 2*(1 + lam + ... + lam^(n-2))
    rhs = 2.0 * math.fsum(lam ** i for i in range(n - 1))
    assert lam ** n == pytest.approx(rhs, rel=1e-13)


def test_beta_monotone_below_golden_small_range():
    values = [solve_beta(n).beta for n in range(3, 13)]
    for lo, hi in zip(values, values[1:]):
        assert lo < hi
    assert all(v < GOLDEN for v in values)


def test_lambda_below_two_and_above_beta():
    for n in range(3, 13):
        lam = solve_lambda(n).lam
        assert solve_beta(n).beta < lam < 2.0


@pytest.mark.parametrize("n", [3, 10])
def test_extended_precision_agrees_with_double(n):
    ctx = solve_beta(n, precision=120)
    with mpmath.workprec(120):
        assert abs(float(ctx.beta) - solve_beta(n).beta) < 1e-14
        residual = sum(ctx.beta ** (-t) for t in range(2, n + 1)) - 1
        assert abs(residual) < mpmath.mpf(2) ** -100
    lam = solve_lambda(n, precision=120).lam
    assert abs(float(lam) - solve_lambda(n).lam) < 1e-14


@pytest.mark.parametrize("bad", [2, 1, 0, -3])
def test_small_n_rejected(bad):
    with pytest.raises(ValueError):
        solve_beta(bad)
    with pytest.raises(ValueError):
        solve_lambda(bad)


def test_eval_word_geometric_tail():
    beta = solve_beta(3).beta
    value, tail = eval_word([1, 0, 1, 1], beta)
    direct = beta ** -1 + beta ** -3 + beta ** -4
    assert value == pytest.approx(direct, abs=1e-15)
    assert tail == pytest.approx(beta ** -4 / (beta - 1), abs=1e-15)
    # all-ones word: value + tail telescopes to 1/(beta-1)
    ones, tail1 = eval_word([1] * 40, beta)
    assert ones + tail1 == pytest.approx(1 / (beta - 1), rel=1e-12)


def test_eval_word_empty():
    value, tail = eval_word([], solve_beta(3).beta)
    assert value == 0.0
    assert tail == pytest.approx(1 / (solve_beta(3).beta - 1))


def test_grid_sign_changes_counts_roots():
    f = beta_defining_poly(3)
    # exactly one sign change in (1, 2): the root is simple and unique there
    assert grid_sign_changes(f, 1.0, 2.0, 4000) == 1
    g = lambda_defining_poly(3)
    assert grid_sign_changes(g, 1.0, 2.0, 4000) == 1
