"""Cell partition, adjacency matrix, Perron data and the maximal chain."""

import math

import numpy as np
import pytest

from shrinkbeta.algebra import solve_beta, solve_lambda
from shrinkbeta.errors import InvariantViolationError
from shrinkbeta.markov import (adjacency_from_images, build_adjacency,
                               build_chain, build_partition,
                               char_poly_closed_form, char_poly_residual,
                               chain_to_json, check_inequality,
                               closed_form_inv_cd, cylinder_measure,
                               eigen_closed_form, eigen_residuals,
                               entropy_rate, induced_parry_entropy,
                               parry_measure, perron_by_power_iteration,
                               sample_chain, _inv_cd_direct)

LAMBDA3 = 1.7692923542386314
H_IND3 = 1.3471974089195764
MARGIN3 = 0.03909695220031417
MU_CENTER3 = 0.42353085227270193
CD3 = 0.07646914772729807   # 1/(lam^3 + 2*lam + 4)


def test_partition_shape_and_pinning():
    ctx = solve_beta(3)
    cells = build_partition(ctx)
    assert len(cells) == 5
    assert [c.label for c in cells] == ["L0", "L1", "C", "R0", "R1"]
    assert cells[2].lo == ctx.a and cells[2].hi == ctx.b
    assert cells[0].lo == pytest.approx(ctx.beta * ctx.a - 1)
    assert cells[-1].hi == pytest.approx(ctx.beta * ctx.b)
    # shared endpoints, ascending
    for c0, c1 in zip(cells, cells[1:]):
        assert c0.hi == c1.lo


@pytest.mark.parametrize("n", [3, 4, 5, 10, 20, 30])
def test_partition_scales_with_n(n):
    cells = build_partition(solve_beta(n))
    assert len(cells) == 2 * n - 1


def test_adjacency_rule_equals_images():
    for n in range(3, 9):
        rule = build_adjacency(n)
        images = adjacency_from_images(solve_beta(n))
        assert np.array_equal(rule, images), f"adjacency mismatch at n={n}"


def test_adjacency_row_structure():
    s = build_adjacency(5)
    center = 4
    assert s[center].sum() == 2 * 5 - 2 and s[center, center] == 0
    for i in range(2 * 5 - 1):
        if i != center:
            assert s[i].sum() == 1  # deterministic march back to the center


def test_char_poly_matches_determinant():
    assert char_poly_residual(3, [-1.5, -0.5, 0.3, 0.9, 1.7, 2.5]) <= 1e-9
    assert char_poly_residual(6, [-1.5, 0.3, 1.7]) <= 1e-9
    lam = solve_lambda(4).lam
    assert char_poly_closed_form(lam, 4) == pytest.approx(0.0, abs=1e-10)


def test_det_two_i_minus_s():
    for n in (3, 4, 7):
        s = build_adjacency(n)
        det = np.linalg.det(2.0 * np.eye(2 * n - 1) - s)
        assert det == pytest.approx(2.0 ** n, rel=1e-9)


def test_eigen_closed_form_n3():
    lam = solve_lambda(3).lam
    u, v, cd = eigen_closed_form(lam, 3)
    assert cd == pytest.approx(CD3, abs=1e-15)
    assert np.allclose(v, [1.0, lam, lam ** 2, lam, 1.0], rtol=0, atol=1e-15)
    res_r, res_l = eigen_residuals(3)
    assert res_r <= 1e-10 and res_l <= 1e-10
    assert float(u @ v) == pytest.approx(1.0, abs=1e-14)


def test_inv_cd_closed_form_vs_direct():
    for n in range(3, 31):
        lam = solve_lambda(n).lam
        assert closed_form_inv_cd(lam, n) == pytest.approx(
            _inv_cd_direct(lam, n), rel=1e-12)


def test_parry_measure_frozen_n3():
    chain = build_chain(3)
    lam = chain.lam
    expected_p = np.array([1.0, 1.0 + lam, lam ** 3, 1.0 + lam, 1.0]) * CD3
    assert np.allclose(chain.p, expected_p, rtol=0, atol=1e-15)
    assert chain.p[2] == pytest.approx(MU_CENTER3, abs=1e-15)
    center_row = np.array([1.0, lam, 0.0, lam, 1.0]) / lam ** 3
    assert np.allclose(chain.P_trans[2], center_row, rtol=0, atol=1e-15)
    assert np.allclose(chain.P_trans.sum(axis=1), 1.0, atol=1e-12)


def test_parry_measure_rejects_bad_eigendata():
    chain = build_chain(3)
    with pytest.raises(InvariantViolationError):
        parry_measure(chain.adjacency, chain.lam, chain.u * 1.01, chain.v)


@pytest.mark.parametrize("n", [3, 4, 8, 16, 30])
def test_entropy_rate_is_log_lambda(n):
    chain = build_chain(n)
    assert entropy_rate(chain.p, chain.P_trans) == pytest.approx(
        math.log(chain.lam), abs=1e-10)


def test_induced_entropy_and_margin_frozen():
    assert induced_parry_entropy(3) == pytest.approx(H_IND3, abs=1e-14)
    rows = check_inequality(10)
    assert [r.n for r in rows] == list(range(3, 11))
    assert rows[0].margin == pytest.approx(MARGIN3, abs=1e-14)
    assert rows[0].h_max == math.log(4)
    assert all(r.margin > 0 for r in rows)


def test_extended_precision_margin_continuity():
    # force the mpmath path at small n and compare with the double path
    ext = check_inequality(6, extended_threshold=0, bits=150)
    dbl = check_inequality(6)
    for r_ext, r_dbl in zip(ext, dbl):
        assert r_ext.margin == pytest.approx(r_dbl.margin, rel=1e-12)


def test_depth3_cylinders_sum_to_one():
    chain = build_chain(3)
    size = len(chain.p)
    total = math.fsum(
        cylinder_measure(chain, (i, j, k))
        for i in range(size) for j in range(size) for k in range(size))
    assert total == pytest.approx(1.0, abs=1e-12)
    # a forbidden transition gives a zero cylinder
    assert cylinder_measure(chain, (0, 0)) == 0.0


def test_power_iteration_cross_check():
    for n in (3, 5, 9):
        lam = perron_by_power_iteration(build_adjacency(n))
        assert lam == pytest.approx(solve_lambda(n).lam, abs=1e-9)


def test_chain_to_json_fields():
    report = chain_to_json(3)
    assert report["adjacency"] == [[0, 1, 0, 0, 0],
                                   [0, 0, 1, 0, 0],
                                   [1, 1, 0, 1, 1],
                                   [0, 0, 1, 0, 0],
                                   [0, 0, 0, 1, 0]]
    assert report["margin"] == pytest.approx(MARGIN3, abs=1e-14)
    assert report["h_K"] == pytest.approx(math.log(LAMBDA3), abs=1e-14)
    assert len(report["cells"]) == 5


def test_sample_chain_deterministic_and_stationary():
    chain = build_chain(3)
    path1 = sample_chain(chain, 40000, seed=5)
    path2 = sample_chain(chain, 40000, seed=5)
    assert np.array_equal(path1, path2)
    assert path1.dtype == np.int8
    freqs = np.bincount(path1, minlength=5) / path1.size
    # loose agreement with the stationary law
    assert np.abs(freqs - chain.p).max() < 0.01
    # every realized transition is allowed by the adjacency matrix
    allowed = chain.adjacency[path1[:-1], path1[1:]]
    assert allowed.min() == 1
