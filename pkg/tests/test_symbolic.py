"""Letter coding of the first-return system and its inverse."""

import math

import pytest

from shrinkbeta.algebra import eval_word, solve_beta
from shrinkbeta.dynamics import CoinStream, PointState, induced_step
from shrinkbeta.errors import DeletedPointError
from shrinkbeta.kernels import uniform_starts
from shrinkbeta.symbolic import (SymbolicWord, alphabet, boundary_expansions,
                                 decode, encode, mme_entropy,
                                 mme_letter_probability)

CTX = solve_beta(3)


def test_alphabet_coin_major():
    assert alphabet(3) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    assert len(alphabet(6)) == 10


def test_word_digit_blocks():
    w = SymbolicWord(((1, 2), (0, 3)))
    # letter (c, t) contributes c followed by t-1 copies of 1-c
    assert w.digits() == [1, 0, 0, 1, 1]
    assert len(w) == 2
    assert w.shifted().letters == ((0, 3),)


def test_word_validation():
    with pytest.raises(ValueError):
        SymbolicWord(((2, 2),))
    with pytest.raises(ValueError):
        SymbolicWord(((1, 1),))


def test_word_serialization_roundtrip():
    w = SymbolicWord(((1, 2), (0, 3), (1, 3)))
    assert SymbolicWord.from_csv(w.to_csv()) == w
    assert SymbolicWord.from_json(w.to_json()) == w


def test_encode_reads_off_induced_orbit():
    state = PointState(CoinStream.explicit([1, 0]), 1.40)
    word = encode(state, 2, CTX)
    # first letter frozen by the n=3 oracle values: coin 1 returns in 3
    assert word.letters[0] == (1, 3)
    assert word.letters[1][0] == 0


def test_encode_shift_is_induced_step():
    xs = uniform_starts(424242, 200, CTX.a + 1e-9, CTX.b - 1e-9)
    for j, x in enumerate(xs):
        state = PointState(CoinStream.seeded(1000 + j), float(x))
        word = encode(state, 6, CTX)
        after = induced_step(state, CTX)
        assert encode(after, 5, CTX).letters == word.shifted().letters


def test_encode_rejects_deleted_points():
    with pytest.raises(DeletedPointError):
        encode(PointState(CoinStream.explicit([0]), CTX.a), 1, CTX)
    with pytest.raises(DeletedPointError):
        encode(PointState(CoinStream.explicit([1]), CTX.b), 1, CTX)


def test_decode_inverts_encode_within_tail():
    xs = uniform_starts(77, 100, CTX.a + 1e-9, CTX.b - 1e-9)
    for j, x in enumerate(xs):
        word = encode(PointState(CoinStream.seeded(j), float(x)), 10, CTX)
        value, tail = decode(word, CTX)
        assert abs(value - float(x)) <= tail, (
            f"decode missed x={float(x)!r} by more than tail={tail!r}")


def test_decode_range_and_validation():
    value, tail = decode(SymbolicWord(((1, 2),)), CTX)
    assert CTX.a - tail <= value <= CTX.b + tail
    with pytest.raises(ValueError):
        decode(SymbolicWord(((1, 4),)), CTX)  # return time above n
    with pytest.raises(ValueError):
        decode(SymbolicWord(()), CTX)


@pytest.mark.parametrize("endpoint", ["a", "b"])
@pytest.mark.parametrize("blocks", [(3,), (2, 1), (1, 1, 1), (0, 2, 4), (5,)])
def test_boundary_expansions_evaluate_to_endpoint(endpoint, blocks):
    digits = boundary_expansions(endpoint, blocks, CTX)
    target = CTX.a if endpoint == "a" else CTX.b
    value, tail = eval_word(digits, CTX.beta)
    assert abs(value - target) <= tail + 1e-15


def test_boundary_expansion_blocks_n4():
    ctx4 = solve_beta(4)
    assert boundary_expansions("a", (1, 1), ctx4) == [0, 1, 1, 0, 0, 0]
    assert boundary_expansions("b", (1, 1), ctx4) == [1, 0, 0, 1, 1, 1]
    with pytest.raises(ValueError):
        boundary_expansions("c", (1,), ctx4)


def test_full_shift_entropy_values():
    assert mme_entropy(3) == math.log(4)
    assert mme_entropy(5) == math.log(8)
    assert mme_letter_probability(3) == 0.25
    with pytest.raises(ValueError):
        mme_entropy(2)
