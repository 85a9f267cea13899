"""Backend dispatch for the bulk loops, plus shared seeded samplers.

Prefers the compiled extension and falls back to the numpy implementation;
`BACKEND` records which one loaded. The two are bit-for-bit interchangeable
(tested), so everything downstream is backend-agnostic.
"""

import numpy as np

from ._bits import _MASK, STREAM_CHAIN, STREAM_START
from .errors import InvariantViolationError, OrbitEscapeError

try:
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    from . import _kernels_py as _impl
    BACKEND = "python"

from . import _kernels_py as _pure


def _retype(exc: RuntimeError, ctx):
    kind, _, payload = str(exc).partition(":")
    if kind == "escape":
        return OrbitEscapeError(float(payload), 0.0, ctx.domain_max,
                                "bulk kernel")
    if kind == "drift":
        return InvariantViolationError(
            f"return time exceeded n={ctx.n} at x={payload} (bulk kernel)")
    return exc


def induced_stats(ctx, x0, steps: int, seed: int, backend=None):
    """Bulk first-return statistics. Returns (hist, final_x, tau1_count);
    hist[t] counts returns at time t over all points and steps."""
    impl = {None: _impl, "python": _pure, "compiled": _impl}[backend]
    if backend == "compiled" and BACKEND != "compiled":
        raise RuntimeError("compiled backend requested but not built")
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    try:
        return impl.induced_stats(ctx.beta, ctx.a, ctx.b, ctx.domain_max,
                                  ctx.n, x0, int(steps), int(seed) & _MASK)
    except RuntimeError as exc:
        raise _retype(exc, ctx) from None


def chain_sample(cum_rows, start_cum, steps: int, seed: int):
    """Seeded Markov path from cumulative rows; int8 states."""
    cum_rows = np.ascontiguousarray(cum_rows, dtype=np.float64)
    start_cum = np.ascontiguousarray(start_cum, dtype=np.float64)
    return _impl.chain_sample(cum_rows, start_cum, int(steps),
                              int(seed) & _MASK)


def uniform_array(seed: int, count: int, stream: int = STREAM_CHAIN):
    """count uniforms in [0, 1) from the counter-based stream."""
    idx = np.arange(count, dtype=np.uint64)
    z = _pure._raw(int(seed) & _MASK, stream, idx)
    return (z >> np.uint64(11)) * 2.0 ** -53


def uniform_starts(seed: int, count: int, lo: float, hi: float):
    """Seeded start points spread over [lo, hi], on a stream of their own
    so they never collide with the coin bits for the same seed."""
    u = uniform_array(seed, count, stream=STREAM_START)
    return lo + (hi - lo) * u


def coin_bits(seed: int, count: int):
    """First `count` coin bits of the scalar stream, vectorized."""
    idx = np.arange(count, dtype=np.uint64)
    z = _pure._raw(int(seed) & _MASK, 0, idx)
    return (z >> np.uint64(63)).astype(np.uint8)
