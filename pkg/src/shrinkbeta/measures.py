"""Measures for the induced system and their lift to the full map.

Everything here is an evaluator on rectangles (coin cylinder x interval);
all verification reduces to exact piecewise-affine interval arithmetic, no
quadrature. Supported induced measures on Omega x [a, b]:

* lebesgue(p): Bernoulli(p) coins x normalized Lebesgue on [a, b]. This is
  invariant for the induced map, and the coding pushes it onto the product
  of Bernoulli(p) with the return-time law (beta^-2, ..., beta^-n).
* product(p, pi): the pullback through the coding of Bernoulli(p) x pi^N
  for an arbitrary return-time law pi. Rectangle values are computed by
  adaptive refinement of symbolic cylinders, whose preimages are nested
  intervals shrinking geometrically.

An induced-invariant measure nu lifts to an invariant measure mu of the
full map by the first-return sum

    mu(E) = (1/int tau dnu) * sum_{k>=0} nu({tau > k} & K^-k E),

finite here because tau <= n. The lift lives on Omega x [T1(a), T0(b)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import AlgebraicBeta
from .errors import InvariantViolationError
from .gls import greedy_breakpoints, lazy_breakpoints, return_time_law
from .markov import _inv_cd_direct, induced_parry_entropy, solve_lambda

_REFINE_TOL = 1e-14
_MAX_DEPTH = 200


@dataclass(frozen=True)
class CylinderSpec:
    """Symbolic cylinder: coin prefix i_1..i_m and return-time prefix
    n_1..n_m of equal length."""

    coins: tuple
    rts: tuple

    def __post_init__(self):
        if len(self.coins) != len(self.rts):
            raise ValueError("coin and return-time prefixes differ in length")
        for c in self.coins:
            if c not in (0, 1):
                raise ValueError(f"coin {c!r} not in {{0, 1}}")
        for t in self.rts:
            if not isinstance(t, int) or t < 2:
                raise ValueError(f"return time {t!r} must be an int >= 2")


@dataclass(frozen=True)
class InducedMeasureSpec:
    """kind 'lebesgue': Bernoulli(p) x normalized Lebesgue.
    kind 'product': coding pullback of Bernoulli(p) x pi^N, with pi given
    as probabilities for t = 2..n."""

    kind: str
    p: float
    pi: tuple = None

    def __post_init__(self):
        if self.kind not in ("lebesgue", "product"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if not 0 < self.p < 1:
            raise ValueError("coin bias must lie in (0, 1)")
        if self.kind == "product":
            if self.pi is None:
                raise ValueError("product kind needs a return-time law")
            if abs(sum(self.pi) - 1.0) > 1e-12:
                raise ValueError(f"return-time law sums to {sum(self.pi)!r}")

    def law(self, ctx: AlgebraicBeta) -> dict:
        if self.kind == "lebesgue":
            return return_time_law(ctx)
        return {t + 2: w for t, w in enumerate(self.pi)}


def bernoulli_mass(bits, p: float) -> float:
    m = 1.0
    for b in bits:
        m *= p if b else 1.0 - p
    return m


def _branch_interval(gp, lp, coin: int, t: int):
    """Domain of the branch with the given coin and return time."""
    n = gp.n
    if coin == 1:
        i = n - t
        return gp.breakpoints[i], gp.breakpoints[i + 1]
    i = t - 2
    return lp.breakpoints[i], lp.breakpoints[i + 1]


def _branch_affine(gp, lp, coin: int, t: int):
    if coin == 1:
        i = gp.n - t
        return gp.slopes[i], gp.offsets[i]
    i = t - 2
    return lp.slopes[i], lp.offsets[i]


def cylinder_preimage_interval(spec: CylinderSpec, ctx: AlgebraicBeta):
    """Interval of switch-region points whose coding starts with the spec.

    Composes inverse branches from the back: J = D_1 & L_1^-1(D_2 & ...).
    All branches are affine and increasing, so the result is an interval;
    it is never empty for valid letters (the coding is onto the full shift).
    """
    gp = greedy_breakpoints(ctx)
    lp = lazy_breakpoints(ctx)
    for t in spec.rts:
        if t > ctx.n:
            raise ValueError(f"return time {t} exceeds n={ctx.n}")
    lo, hi = _branch_interval(gp, lp, spec.coins[-1], spec.rts[-1])
    for coin, t in zip(reversed(spec.coins[:-1]), reversed(spec.rts[:-1])):
        s, o = _branch_affine(gp, lp, coin, t)
        d_lo, d_hi = _branch_interval(gp, lp, coin, t)
        lo, hi = max(d_lo, (lo + o) / s), min(d_hi, (hi + o) / s)
        if not lo < hi:
            raise InvariantViolationError(
                f"empty cylinder preimage for {spec!r}")
    return lo, hi


class PushforwardResult(NamedTuple):
    lhs: float
    rhs: float
    deviation: float


def pushforward_check(spec: CylinderSpec, p: float, ctx: AlgebraicBeta,
                      law: dict = None) -> PushforwardResult:
    """Compare the normalized Lebesgue mass of a symbolic cylinder's
    preimage (lhs) with its product-measure value (rhs).

    With the geometric law pi_t = beta^-t the two agree identically: the
    coding carries Bernoulli(p) x Lebesgue onto Bernoulli(p) x pi^N. Any
    other law (negative control) breaks the equality.
    """
    lo, hi = cylinder_preimage_interval(spec, ctx)
    mass = bernoulli_mass(spec.coins, p)
    lhs = mass * (hi - lo) / (ctx.b - ctx.a)
    if law is None:
        law = return_time_law(ctx)
    rhs = mass
    for t in spec.rts:
        rhs *= law[t]
    return PushforwardResult(lhs=lhs, rhs=rhs, deviation=abs(lhs - rhs))


def integral_tau(nu: InducedMeasureSpec, ctx: AlgebraicBeta) -> float:
    """Expected return time under the measure's return-time law."""
    return sum(t * w for t, w in nu.law(ctx).items())


def _lebesgue_rectangle(p: float, coins, lo: float, hi: float,
                        ctx: AlgebraicBeta) -> float:
    lo = max(lo, ctx.a)
    hi = min(hi, ctx.b)
    if not lo < hi:
        return 0.0
    return bernoulli_mass(coins, p) * (hi - lo) / (ctx.b - ctx.a)


def _product_rectangle(nu: InducedMeasureSpec, ctx: AlgebraicBeta,
                       coin_constraints: dict, x_lo: float, x_hi: float,
                       min_first_rt: int = 2, tol: float = _REFINE_TOL) -> float:
    """Product-kind measure of {coin constraints} x [x_lo, x_hi].

    Walks the symbolic cylinder tree, keeping for each node the forward
    affine map F(x) = S*x - O of its letter prefix and the interval J of
    starts consistent with it. Nodes with J inside/outside the target
    contribute fully/nothing; straddling nodes split until their weight
    drops below tol, then contribute half their weight.

    Cost caveat: because the coin is an input, cylinders with different
    coins overlap in x, so a target endpoint interior to cylinders at every
    depth straddles one node per coin prefix. For such targets the node
    count grows like tol^(-1/2) and the truncation error can reach the sum
    of the cut weights, far above tol. Exact callers therefore only pass
    targets that resolve at finite depth: whole-interval targets, branch
    domains, or symbolic cylinder preimages.
    """
    gp = greedy_breakpoints(ctx)
    lp = lazy_breakpoints(ctx)
    law = nu.law(ctx)
    letters = [(c, t) for c in (0, 1) for t in law]
    p = nu.p

    x_lo = max(x_lo, ctx.a)
    x_hi = min(x_hi, ctx.b)
    if not x_lo < x_hi:
        return 0.0

    def coin_mass_from(depth: int) -> float:
        m = 1.0
        for pos, bit in coin_constraints.items():
            if pos >= depth:
                m *= p if bit else 1.0 - p
        return m

    total = 0.0
    # node: (depth, J_lo, J_hi, S, O, weight)
    stack = [(0, ctx.a, ctx.b, 1.0, 0.0, 1.0)]
    while stack:
        depth, j_lo, j_hi, s_acc, o_acc, weight = stack.pop()
        if j_hi <= x_lo or j_lo >= x_hi:
            continue
        # the root may not shortcut when a first-letter return-time
        # constraint is active: it is not encoded in the weight yet
        if x_lo <= j_lo and j_hi <= x_hi and not (depth == 0 and min_first_rt > 2):
            total += weight * coin_mass_from(depth)
            continue
        if weight <= tol or depth >= _MAX_DEPTH:
            # straddling leaf: its mass lies between 0 and weight
            total += 0.5 * weight * coin_mass_from(depth)
            continue
        forced = coin_constraints.get(depth)
        for coin, t in letters:
            if forced is not None and coin != forced:
                continue
            if depth == 0 and t < min_first_rt:
                continue
            d_lo, d_hi = _branch_interval(gp, lp, coin, t)
            # child starts satisfy F(x) in [d_lo, d_hi]
            c_lo = max(j_lo, (d_lo + o_acc) / s_acc)
            c_hi = min(j_hi, (d_hi + o_acc) / s_acc)
            if not c_lo < c_hi:
                continue
            s, o = _branch_affine(gp, lp, coin, t)
            w = weight * (p if coin else 1.0 - p) * law[t]
            stack.append((depth + 1, c_lo, c_hi, s * s_acc,
                          s * o_acc + o, w))
    return total


def rectangle_measure(nu: InducedMeasureSpec, coins, interval,
                      ctx: AlgebraicBeta) -> float:
    """nu-measure of the rectangle {omega starts with coins} x interval,
    for intervals inside the switch region."""
    lo, hi = interval
    if nu.kind == "lebesgue":
        return _lebesgue_rectangle(nu.p, coins, lo, hi, ctx)
    constraints = {j: bit for j, bit in enumerate(coins)}
    return _product_rectangle(nu, ctx, constraints, lo, hi)


def kac_lift(nu: InducedMeasureSpec, coins, interval,
             ctx: AlgebraicBeta) -> float:
    """Lifted invariant measure of a rectangle E = cylinder x interval.

    Splits the first-return sum by the coin bit consumed when leaving the
    switch region. Given first bit 1 the k-th image of x is
    beta^k x - beta^(k-1) (excursion below a); given bit 0 it is
    beta^k x - (beta^(k-1)-1)/(beta-1) (excursion above b). Both are affine
    and the excursions are monotone, so {tau > k} & K^-k E meets each
    first-bit slice in one rectangle. Only k <= n-1 contributes.
    """
    beta = ctx.beta
    lo, hi = interval
    if not lo < hi:
        return 0.0
    denom = integral_tau(nu, ctx)
    total = rectangle_measure(nu, coins, (lo, hi), ctx)  # k = 0 term
    for k in range(1, ctx.n):
        scale = beta ** k
        for first_bit in (0, 1):
            if first_bit == 1:
                off = beta ** (k - 1)
            else:
                off = (beta ** (k - 1) - 1) / (beta - 1)
            # preimage of the target interval under the excursion map
            x_lo = max(ctx.a, (lo + off) / scale)
            x_hi = min(ctx.b, (hi + off) / scale)
            if not x_lo < x_hi:
                continue
            if nu.kind == "lebesgue":
                # tau > k: the k-th image has not yet re-entered [a, b]
                if first_bit == 1:
                    x_hi = min(x_hi, (ctx.a + off) / scale)
                else:
                    x_lo = max(x_lo, (ctx.b + off) / scale)
                if not x_lo < x_hi:
                    continue
                mass = (nu.p if first_bit else 1.0 - nu.p)
                mass *= bernoulli_mass(coins, nu.p)
                total += mass * (x_hi - x_lo) / (ctx.b - ctx.a)
            else:
                # tau = first letter's return time: tau > k symbolically
                constraints = {0: first_bit}
                for j, bit in enumerate(coins):
                    constraints[j + 1] = bit
                total += _product_rectangle(nu, ctx, constraints,
                                            x_lo, x_hi,
                                            min_first_rt=k + 1)
    return total / denom


def k_preimage_rectangles(coins, interval, ctx: AlgebraicBeta):
    """Decompose K^-1(cylinder x interval) into rectangles.

    At most four pieces: the two coin-free branches (below a, above b) keep
    the cylinder, and the switch branch contributes one piece per consumed
    bit, with that bit prepended to the cylinder.
    """
    beta = ctx.beta
    lo, hi = interval
    pieces = []
    f_lo, f_hi = max(lo / beta, 0.0), min(hi / beta, ctx.a)
    if f_lo < f_hi:
        pieces.append((tuple(coins), (f_lo, f_hi)))
    g_lo, g_hi = max((lo + 1) / beta, ctx.b), min((hi + 1) / beta, ctx.domain_max)
    if g_lo < g_hi:
        pieces.append((tuple(coins), (g_lo, g_hi)))
    for bit in (0, 1):
        s_lo = max((lo + bit) / beta, ctx.a)
        s_hi = min((hi + bit) / beta, ctx.b)
        if s_lo < s_hi:
            pieces.append(((bit,) + tuple(coins), (s_lo, s_hi)))
    return pieces


def lift_invariance_deviation(nu: InducedMeasureSpec, coins, interval,
                              ctx: AlgebraicBeta) -> float:
    """|mu(E) - mu(K^-1 E)| for the lifted measure, via the exact rectangle
    decomposition of the preimage."""
    direct = kac_lift(nu, coins, interval, ctx)
    back = sum(kac_lift(nu, cs, iv, ctx)
               for cs, iv in k_preimage_rectangles(coins, interval, ctx))
    return abs(direct - back)


def cylinder_overlap(law1, law2, depth: int) -> float:
    """Shared mass sum_w min(P1[w], P2[w]) over length-`depth` letter words.

    law1 and law2 are per-letter probability vectors over a common alphabet
    and P_i[w] is the product of entries along w. Words with the same letter
    counts have the same mass under both laws, so the sum collapses to count
    vectors weighted by multinomial coefficients; everything is accumulated
    in log space to survive large depths.

    By Cauchy-Schwarz the result is at most (sum_j sqrt(law1_j*law2_j))**depth,
    so distinct laws drive it to zero geometrically. Used with the geometric
    and uniform return-time laws it quantifies how fast the two product
    measures concentrate on disjoint families of cylinders (the coin factor
    is common to both and drops out of every min).
    """
    p = tuple(float(v) for v in law1)
    q = tuple(float(v) for v in law2)
    if not p or len(p) != len(q):
        raise ValueError("laws must be nonempty and of equal length")
    if any(v < 0.0 for v in p + q):
        raise ValueError("law entries must be nonnegative")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    logp = tuple(math.log(v) if v > 0.0 else -math.inf for v in p)
    logq = tuple(math.log(v) if v > 0.0 else -math.inf for v in q)
    last = len(p) - 1
    total = 0.0

    def scan(slot: int, remaining: int, lg: float, lp: float, lq: float):
        nonlocal total
        if slot == last:
            if remaining:
                lg -= math.lgamma(remaining + 1)
                lp += remaining * logp[slot]
                lq += remaining * logq[slot]
            exponent = lg + min(lp, lq)
            if exponent > -745.0:  # exp underflows to 0 below this anyway
                total += math.exp(exponent)
            return
        scan(slot + 1, remaining, lg, lp, lq)
        for k in range(1, remaining + 1):
            scan(slot + 1, remaining - k, lg - math.lgamma(k + 1),
                 lp + k * logp[slot], lq + k * logq[slot])

    scan(0, depth, math.lgamma(depth + 1), 0.0, 0.0)
    return total


class AbramovResult(NamedTuple):
    h_K: float
    h_I: float
    mu_center: float
    deviation: float


def abramov_check(n: int, kind: str = "parry") -> AbramovResult:
    """Entropy bookkeeping h_K = h_I * mu(switch cell) for a lifted measure.

    kind 'parry': h_I = log(lam)/(cd lam^n), mu_center = cd lam^n, and h_K
    = log(lam) independently; the deviation checks the identity.
    kind 'uniform': the maximal measure of the letter shift, lifted; here
    h_K is *defined* through the formula (h_I = log(2n-2), mu_center =
    2/(n+2) from the uniform return-time law), so the deviation is trivial
    and the interesting fact is h_K staying below log(lam).
    """
    if kind == "parry":
        lam = solve_lambda(n).lam
        h_i = induced_parry_entropy(n)
        mu_center = lam ** n / _inv_cd_direct(lam, n)
        h_k = math.log(lam)
        return AbramovResult(h_K=h_k, h_I=h_i, mu_center=mu_center,
                             deviation=abs(h_k - h_i * mu_center))
    if kind == "uniform":
        h_i = math.log(2 * n - 2)
        mu_center = 2.0 / (n + 2)
        h_k = h_i * mu_center
        return AbramovResult(h_K=h_k, h_I=h_i, mu_center=mu_center,
                             deviation=abs(h_k - h_i * mu_center))
    raise ValueError(f"unknown measure kind {kind!r}")


def block_entropy(sample, block_len: int, alphabet_size: int) -> float:
    """Shannon entropy (nats) of the empirical distribution of overlapping
    length-block_len blocks."""
    sample = np.asarray(sample, dtype=np.int64)
    count = sample.size - block_len + 1
    codes = np.zeros(count, dtype=np.int64)
    for i in range(block_len):
        codes = codes * alphabet_size + sample[i:count + i]
    freqs = np.bincount(codes) / count
    freqs = freqs[freqs > 0]
    return float(-(freqs * np.log(freqs)).sum())


def empirical_entropy(sample, block_len: int,
                      alphabet_size: int = None) -> float:
    """Per-symbol block entropy -(1/L) sum f log f over length-L blocks."""
    sample = np.asarray(sample, dtype=np.int64)
    if alphabet_size is None:
        alphabet_size = int(sample.max()) + 1 if sample.size else 0
    if sample.size < 100 * alphabet_size ** block_len:
        raise ValueError(
            f"need >= {100 * alphabet_size ** block_len} symbols for "
            f"block length {block_len}, got {sample.size}")
    return block_entropy(sample, block_len, alphabet_size) / block_len


def entropy_rate_estimate(sample, block_len: int,
                          alphabet_size: int = None) -> float:
    """Conditional block-entropy estimate H(L) - H(L-1) of the entropy rate.

    Unlike the per-symbol average, this converges to the true rate for
    Markov sources once block_len exceeds the memory length.
    """
    sample = np.asarray(sample, dtype=np.int64)
    if alphabet_size is None:
        alphabet_size = int(sample.max()) + 1 if sample.size else 0
    if sample.size < 100 * alphabet_size ** block_len:
        raise ValueError(
            f"need >= {100 * alphabet_size ** block_len} symbols for "
            f"block length {block_len}, got {sample.size}")
    if block_len == 1:
        return block_entropy(sample, 1, alphabet_size)
    return (block_entropy(sample, block_len, alphabet_size)
            - block_entropy(sample, block_len - 1, alphabet_size))


def sample_return_times(law: dict, count: int, seed: int):
    """Seeded iid sample from a return-time law, via inverse transform."""
    from . import kernels
    ts = sorted(law)
    cum = np.cumsum([law[t] for t in ts])
    u = kernels.uniform_array(seed, count)
    idx = np.minimum(np.searchsorted(cum, u, side="right"), len(ts) - 1)
    return np.asarray(ts, dtype=np.int64)[idx]
