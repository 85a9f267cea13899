"""Counter-based bit/uniform generator (splitmix64 finalizer).

Bit k of a seeded stream is addressable directly from (seed, k): no state,
no sequential generation. The same mixing function is re-implemented
vectorized in the numpy kernel and in C in the compiled kernel; all three
must stay bit-for-bit identical.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Distinct stream tweaks so coins, start points and chain draws never share
# raw counter values for the same user seed.
STREAM_COIN = 0x0000000000000000
STREAM_START = 0xD1B54A32D192ED03
STREAM_CHAIN = 0x8BB84B93962EACC9


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def raw_at(seed: int, index: int, stream: int = STREAM_COIN) -> int:
    return mix64(((seed ^ stream) + (index + 1) * _GOLDEN) & _MASK)


def bit_at(seed: int, index: int, stream: int = STREAM_COIN) -> int:
    return raw_at(seed, index, stream) >> 63


def uniform_at(seed: int, index: int, stream: int = STREAM_COIN) -> float:
    """Uniform double in [0, 1) with 53 random mantissa bits."""
    return (raw_at(seed, index, stream) >> 11) * 2.0 ** -53
