"""Interval Markov chain for the attractor [T1(a), T0(b)].

The attractor splits into 2n-1 cells: n-1 left cells iterating T0 from
T1(a) up to a, the switch cell [a, b], and n-1 right cells iterating down
from T0(b) to b. Each cell's image under its active branch(es) is a union
of cells, giving a 0/1 adjacency matrix S_n whose characteristic polynomial
is  x^(n-1) * (x^n - 2(1 + x + ... + x^(n-2))).

Its Perron eigenvalue lambda has closed-form eigenvectors

    v = (c, c*lam, ..., c*lam^(n-1), ..., c*lam, c)
    u = (d*s_0, d*s_1/lam, ..., d*s_{n-2}/lam^(n-2), d*lam, ... mirrored)

with s_k = 1 + lam + ... + lam^k, normalized by u.v = 1. The stationary
chain p_i = u_i v_i with transitions p_ij = S_ij v_j / (lam v_i) maximizes
entropy over the subshift, with entropy log lam; inducing on the switch
cell divides the entropy by its weight p_center = cd*lam^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath
import numpy as np

from .algebra import AlgebraicBeta, PerronValue, solve_beta, solve_lambda
from .errors import InequalityViolationError, InvariantViolationError

_EIGEN_TOL = 1e-10
_ROW_TOL = 1e-10
_PARTITION_TOL = 1e-10
# doubles carry the closed forms comfortably this far; beyond, beta and
# lambda crowd their limits and the extended mode takes over
EXTENDED_THRESHOLD = 30
EXTENDED_BITS = 150


class Cell(NamedTuple):
    lo: float
    hi: float
    label: str


@dataclass(frozen=True)
class MarkovChain:
    n: int
    lam: float
    cells: tuple
    adjacency: np.ndarray
    u: np.ndarray
    v: np.ndarray
    cd: float
    p: np.ndarray
    P_trans: np.ndarray


def build_partition(ctx: AlgebraicBeta):
    """Cells of the attractor, ascending, with shared endpoints.

    Left cells iterate T0 from T1(a); the n-1-st iterate must land back on
    a, and the last left endpoint is pinned to a exactly. Right cells mirror
    this from T0(b) downward to b. Each multiplication by beta amplifies the
    ulp error of the previous endpoint, so the closure tolerance scales like
    n*beta^n ulps; any structural miss would be on the cell-width scale,
    orders of magnitude above the cap.
    """
    beta, a, b, n = ctx.beta, ctx.a, ctx.b, ctx.n
    tol = min(1e-3, max(_PARTITION_TOL, 50 * n * beta ** n * 1e-15))
    left = [beta * a - 1]
    for _ in range(n - 1):
        left.append(beta * left[-1])
    if abs(left[-1] - a) > tol:
        raise InvariantViolationError(
            f"left endpoint chain missed a by {left[-1] - a!r}")
    left[-1] = a
    right = [beta * b]
    for _ in range(n - 1):
        right.append(beta * right[-1] - 1)
    if abs(right[-1] - b) > tol:
        raise InvariantViolationError(
            f"right endpoint chain missed b by {right[-1] - b!r}")
    right[-1] = b
    right.reverse()  # ascending: b, ..., T0(b)
    cells = []
    for k in range(n - 1):
        cells.append(Cell(left[k], left[k + 1], f"L{k}"))
    cells.append(Cell(a, b, "C"))
    for m in range(n - 1):
        cells.append(Cell(right[m], right[m + 1], f"R{m}"))
    for c in cells:
        if not c.lo < c.hi:
            raise InvariantViolationError(f"degenerate cell {c}")
    for c0, c1 in zip(cells, cells[1:]):
        if c0.hi != c1.lo:
            raise InvariantViolationError(
                f"gap/overlap between {c0} and {c1}")
    return cells


def build_adjacency(n: int) -> np.ndarray:
    """Cell-to-cell reachability: left cells chain upward into the center,
    the center spreads to everything but itself, right cells chain downward
    into the center."""
    if not isinstance(n, int) or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n!r}")
    size = 2 * n - 1
    center = n - 1
    s = np.zeros((size, size), dtype=np.int64)
    for k in range(n - 2):
        s[k, k + 1] = 1
    s[n - 2, center] = 1
    for j in range(size):
        if j != center:
            s[center, j] = 1
    s[n, center] = 1
    for m in range(1, n - 1):
        s[n + m, n + m - 1] = 1
    return s


def adjacency_from_images(ctx: AlgebraicBeta, tol: float = 1e-9) -> np.ndarray:
    """Brute-force adjacency: push each cell through its active branch(es)
    and mark the cells its image covers.

    Also enforces the Markov property: every image interval must align with
    cell boundaries to within tol.
    """
    cells = build_partition(ctx)
    beta, a, b = ctx.beta, ctx.a, ctx.b
    size = len(cells)
    s = np.zeros((size, size), dtype=np.int64)

    def mark(i, lo, hi):
        covered = [j for j, c in enumerate(cells)
                   if lo - tol <= 0.5 * (c.lo + c.hi) <= hi + tol]
        if not covered:
            raise InvariantViolationError(f"image of cell {i} covers nothing")
        if covered != list(range(covered[0], covered[-1] + 1)):
            raise InvariantViolationError(f"image of cell {i} not contiguous")
        if abs(cells[covered[0]].lo - lo) > tol or abs(cells[covered[-1]].hi - hi) > tol:
            raise InvariantViolationError(
                f"image of cell {i} does not align with cell boundaries")
        for j in covered:
            s[i, j] = 1

    for i, c in enumerate(cells):
        mid = 0.5 * (c.lo + c.hi)
        if mid < a:  # left of the switch: only T0 acts
            mark(i, beta * c.lo, beta * c.hi)
        elif mid > b:  # right of the switch: only T1 acts
            mark(i, beta * c.lo - 1, beta * c.hi - 1)
        else:  # switch cell: both branches act
            mark(i, beta * c.lo - 1, beta * c.hi - 1)
            mark(i, beta * c.lo, beta * c.hi)
    return s


def char_poly_closed_form(x, n: int):
    """x^(n-1) * (x^n - 2*(1 + x + ... + x^(n-2)))."""
    s = sum(x ** i for i in range(n - 1))
    return x ** (n - 1) * (x ** n - 2 * s)


def char_poly_residual(n: int, sample_points) -> float:
    """Max relative gap between det(xI - S_n) and the closed form."""
    s = build_adjacency(n).astype(float)
    worst = 0.0
    for x in sample_points:
        det = float(np.linalg.det(x * np.eye(2 * n - 1) - s))
        cf = char_poly_closed_form(float(x), n)
        worst = max(worst, abs(det - cf) / max(1.0, abs(cf)))
    return worst


def closed_form_inv_cd(lam, n: int):
    """The printed normalization constant: 1/(cd) = 2/(lam-1) *
    (lam^(n-1) - n + lam^n/2) + lam^n."""
    return 2 / (lam - 1) * (lam ** (n - 1) - n + lam ** n / 2) + lam ** n


def _inv_cd_direct(lam, n: int):
    """1/(cd) as the direct inner product of the unit-scale eigenvectors.

    Works for floats and mpmath values alike; used by the extended-precision
    entropy path as well as the double-precision builder.
    """
    total = lam ** n  # center: u_c * v_c = lam * lam^(n-1)
    for i in range(n - 1):
        s = sum(lam ** j for j in range(i + 1))
        total += 2 * (s / lam ** i) * lam ** i  # two mirrored wings
    return total


def eigen_closed_form(lam, n: int):
    """Closed-form Perron eigenvectors, scaled to c = 1 and u.v = 1.

    Returns (u, v, cd). Residuals are checked on infinity-norm-normalized
    copies (the raw entries grow like lam^(n-1), so only a scale-free
    residual is meaningful in fixed precision).
    """
    if isinstance(lam, PerronValue):
        lam = lam.lam
    size = 2 * n - 1
    v = np.array([lam ** min(i, size - 1 - i) for i in range(size)])
    u_unit = np.empty(size)
    for i in range(n - 1):
        s = sum(lam ** j for j in range(i + 1))
        u_unit[i] = s / lam ** i
        u_unit[size - 1 - i] = u_unit[i]
    u_unit[n - 1] = lam
    inv_cd = math.fsum(float(a) * float(b) for a, b in zip(u_unit, v))
    cd = 1.0 / inv_cd
    u = cd * u_unit
    s_mat = build_adjacency(n)
    _check_eigen_residual(s_mat, lam, u, v)
    return u, v, cd


def _check_eigen_residual(s_mat, lam, u, v):
    v_hat = v / np.abs(v).max()
    u_hat = u / np.abs(u).max()
    res_v = np.abs(s_mat @ v_hat - lam * v_hat).max()
    res_u = np.abs(u_hat @ s_mat - lam * u_hat).max()
    if res_v > _EIGEN_TOL or res_u > _EIGEN_TOL:
        raise InvariantViolationError(
            f"eigen residuals too large: right {res_v:.3e}, left {res_u:.3e}")


def eigen_residuals(n: int, adjacency=None):
    """Scale-free residuals (right, left) of the closed-form eigenvectors."""
    lam = solve_lambda(n).lam
    u, v, _ = eigen_closed_form(lam, n)
    s_mat = build_adjacency(n) if adjacency is None else adjacency
    v_hat = v / np.abs(v).max()
    u_hat = u / np.abs(u).max()
    return (float(np.abs(s_mat @ v_hat - lam * v_hat).max()),
            float(np.abs(u_hat @ s_mat - lam * u_hat).max()))


def parry_measure(adjacency, lam, u, v):
    """Stationary vector p_i = u_i v_i and transition matrix
    p_ij = S_ij v_j / (lam v_i); the unique entropy maximizer."""
    p = u * v
    if abs(p.sum() - 1.0) > _ROW_TOL:
        raise InvariantViolationError(f"stationary mass {p.sum()!r} != 1")
    trans = adjacency * v[np.newaxis, :] / (lam * v[:, np.newaxis])
    row_err = np.abs(trans.sum(axis=1) - 1.0).max()
    if row_err > _ROW_TOL:
        raise InvariantViolationError(f"transition row sums off by {row_err:.3e}")
    stat_err = np.abs(p @ trans - p).max()
    if stat_err > _ROW_TOL:
        raise InvariantViolationError(f"stationarity off by {stat_err:.3e}")
    return p, trans


def build_chain(n: int) -> MarkovChain:
    ctx = solve_beta(n)
    lam = solve_lambda(n).lam
    cells = build_partition(ctx)
    adjacency = build_adjacency(n)
    u, v, cd = eigen_closed_form(lam, n)
    p, trans = parry_measure(adjacency, lam, u, v)
    return MarkovChain(n=n, lam=lam, cells=tuple(cells), adjacency=adjacency,
                       u=u, v=v, cd=cd, p=p, P_trans=trans)


def entropy_rate(p, trans) -> float:
    """Shannon entropy rate -sum_i p_i sum_j p_ij log p_ij (nats)."""
    total = 0.0
    for i in range(len(p)):
        for q in trans[i]:
            if q > 0:
                total -= p[i] * q * math.log(q)
    return total


def cylinder_measure(chain: MarkovChain, word) -> float:
    """Chain measure of the cylinder on a cell-index word:
    p_{a1} * p_{a1 a2} * ... ; zero when a transition is forbidden."""
    word = list(word)
    if not word:
        raise ValueError("empty cylinder word")
    size = len(chain.p)
    for i in word:
        if not 0 <= i < size:
            raise ValueError(f"cell index {i} out of range")
    value = float(chain.p[word[0]])
    for i, j in zip(word, word[1:]):
        value *= float(chain.P_trans[i, j])
    return value


def induced_parry_entropy(n: int, precision: int | None = None):
    """Entropy of the chain's maximal measure induced on the switch cell:
    log(lam) / (cd * lam^n) = log(lam) * (1/cd) / lam^n."""
    if precision is None:
        lam = solve_lambda(n).lam
        return math.log(lam) * _inv_cd_direct(lam, n) / lam ** n
    lam = solve_lambda(n, precision).lam
    with mpmath.workprec(precision):
        return mpmath.log(lam) * _inv_cd_direct(lam, n) / lam ** n


class InequalityRow(NamedTuple):
    n: int
    lam: float
    h_max: float
    h_induced: float
    margin: float


def check_inequality(n_max: int, extended_threshold: int = EXTENDED_THRESHOLD,
                     bits: int = EXTENDED_BITS):
    """Full-shift entropy minus induced chain entropy, for n = 3..n_max.

    The margin log(2n-2) - log(lam)/(cd lam^n) must stay strictly positive:
    a non-positive value means an implementation bug, not a borderline
    rounding case, so it raises. n above the threshold runs in extended
    precision with the given significand width.
    """
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    rows = []
    for n in range(3, n_max + 1):
        if n <= extended_threshold:
            lam = solve_lambda(n).lam
            h_ind = induced_parry_entropy(n)
            h_max = math.log(2 * n - 2)
            margin = h_max - h_ind
        else:
            lam_mp = solve_lambda(n, bits).lam
            with mpmath.workprec(bits):
                h_ind_mp = mpmath.log(lam_mp) * _inv_cd_direct(lam_mp, n) / lam_mp ** n
                margin_mp = mpmath.log(2 * n - 2) - h_ind_mp
            lam, h_ind = float(lam_mp), float(h_ind_mp)
            h_max, margin = math.log(2 * n - 2), float(margin_mp)
        if margin <= 0:
            raise InequalityViolationError(
                f"entropy margin non-positive at n={n}: {margin!r}")
        rows.append(InequalityRow(n=n, lam=lam, h_max=h_max,
                                  h_induced=h_ind, margin=margin))
    return rows


def perron_by_power_iteration(adjacency, max_iter: int = 20000,
                              tol: float = 1e-13) -> float:
    """Dominant eigenvalue by plain power iteration; cross-check oracle for
    the closed forms, never the source of truth."""
    s = np.asarray(adjacency, dtype=float)
    vec = np.ones(s.shape[0])
    lam_prev = 0.0
    for _ in range(max_iter):
        nxt = s @ vec
        lam = nxt @ vec / (vec @ vec)
        vec = nxt / np.linalg.norm(nxt)
        if abs(lam - lam_prev) < tol * max(1.0, abs(lam)):
            return float(lam)
        lam_prev = lam
    return float(lam_prev)


def chain_to_json(n: int) -> dict:
    """Full report: cells, adjacency, eigendata, chain, entropies."""
    chain = build_chain(n)
    h_ind = induced_parry_entropy(n)
    h_max = math.log(2 * n - 2)
    return {
        "n": n,
        "lambda": chain.lam,
        "cells": [{"lo": c.lo, "hi": c.hi, "label": c.label} for c in chain.cells],
        "adjacency": chain.adjacency.tolist(),
        "u": chain.u.tolist(),
        "v": chain.v.tolist(),
        "cd": chain.cd,
        "p": chain.p.tolist(),
        "P_trans": chain.P_trans.tolist(),
        "h_K": math.log(chain.lam),
        "h_I_induced": h_ind,
        "h_I_max": h_max,
        "margin": h_max - h_ind,
    }


def sample_chain(chain: MarkovChain, steps: int, seed: int):
    """Seeded sample path of the chain (stationary start), as int8 states."""
    from . import kernels
    cum_rows = np.cumsum(chain.P_trans, axis=1)
    start_cum = np.cumsum(chain.p)
    return kernels.chain_sample(np.ascontiguousarray(cum_rows),
                                np.ascontiguousarray(start_cum), steps, seed)
