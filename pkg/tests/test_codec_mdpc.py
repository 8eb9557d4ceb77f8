import itertools

import numpy as np
import pytest

from utils.codec_mdpc import (
    mdpc_decode, mdpc_decode_blocks, mdpc_encode, mdpc_encode_blocks,
    mdpc_new, parity_ok,
)


@pytest.mark.parametrize("n, m, K, R, t", [
    (2, 28, 784, 57, 1),
    (2, 1, 1, 3, 1),
    (3, 2, 8, 19, 3),
])
def test_dimensions(n, m, K, R, t):
    code = mdpc_new(n, m)
    assert (code.K, code.R, code.t) == (K, R, t)
    assert code.N == (m + 1) ** n
    assert code.d_min == 2 ** n


def test_invalid_parameters():
    with pytest.raises(ValueError):
        mdpc_new(1, 4)
    with pytest.raises(ValueError):
        mdpc_new(2, 0)


def test_canonical_order_2x2():
    code = mdpc_new(2, 2)
    # extended 3x3 cube, row-major: parity positions are column 2 and row 2
    assert code.data_index.tolist() == [0, 1, 3, 4]
    assert code.parity_index.tolist() == [2, 5, 6, 7, 8]

    # rows [1,0],[0,1]: row parities 1,1; column parities 1,1; corner 0
    parity = mdpc_encode(code, [1, 0, 0, 1])
    assert parity.tolist() == [1, 1, 1, 1, 0]


def test_corner_is_parity_of_parities():
    code = mdpc_new(2, 5)
    rng = np.random.default_rng(0)
    blocks = mdpc_encode_blocks(code, rng.integers(0, 2, size=(50, code.K)))
    cubes = np.zeros((50, code.N), dtype=np.uint8)
    cubes[:, code.data_index] = blocks[:, : code.K]
    cubes[:, code.parity_index] = blocks[:, code.K:]
    cubes = cubes.reshape(50, 6, 6)
    row_par = np.bitwise_xor.reduce(cubes[:, :5, 5], axis=1)
    col_par = np.bitwise_xor.reduce(cubes[:, 5, :5], axis=1)
    np.testing.assert_array_equal(row_par, col_par)
    np.testing.assert_array_equal(row_par, cubes[:, 5, 5])
    assert parity_ok(code, blocks).all()


def test_encode_rejects_wrong_length():
    code = mdpc_new(2, 3)
    with pytest.raises(ValueError):
        mdpc_encode(code, [0] * 8)
    with pytest.raises(ValueError):
        mdpc_decode(code, [0] * 15)


def _single_error_batch(code, rng):
    data = rng.integers(0, 2, size=(1, code.K))
    sent = mdpc_encode_blocks(code, data)
    received = np.repeat(sent, code.N, axis=0) ^ np.eye(code.N, dtype=np.uint8)
    return sent, received


def test_every_single_error_corrected_2d28l():
    code = mdpc_new(2, 28)
    sent, received = _single_error_batch(code, np.random.default_rng(42))
    decoded, flips = mdpc_decode_blocks(code, received)
    assert (decoded == sent).all()
    assert (flips == 1).all()


@pytest.mark.parametrize("m", range(1, 29))
def test_single_error_correction_for_every_side_length(m):
    code = mdpc_new(2, m)
    sent, received = _single_error_batch(code, np.random.default_rng(m))
    decoded, _ = mdpc_decode_blocks(code, received)
    assert (decoded == sent).all()


def test_3d_corrects_one_and_two_errors():
    code = mdpc_new(3, 2)
    sent = mdpc_encode_blocks(code, np.ones((1, code.K), dtype=np.uint8))
    patterns = []
    for k in (1, 2):
        for pos in itertools.combinations(range(code.N), k):
            e = np.zeros(code.N, dtype=np.uint8)
            e[list(pos)] = 1
            patterns.append(e)
    received = sent ^ np.array(patterns)
    decoded, _ = mdpc_decode_blocks(code, received)
    assert (decoded == sent).all()


def _error_patterns(N, weights):
    patterns = []
    for k in weights:
        for pos in itertools.combinations(range(N), k):
            e = np.zeros(N, dtype=np.uint8)
            e[list(pos)] = 1
            patterns.append(e)
    return np.array(patterns)


def test_2d2l_decoding_table_up_to_two_errors():
    code = mdpc_new(2, 2)
    sent = mdpc_encode_blocks(code, np.array([[1, 0, 1, 1]], dtype=np.uint8))
    cube_index = np.concatenate([code.data_index, code.parity_index])

    patterns = _error_patterns(code.N, (0, 1, 2))
    received = sent ^ patterns
    decoded, flips = mdpc_decode_blocks(code, received)
    weight = patterns.sum(axis=1)

    # every pattern of weight <= t comes back exactly
    assert (decoded[weight <= 1] == sent).all()

    outcome = {"left_as_received": 0, "corrected": 0, "wrong_codeword": 0}
    for e, out, f in zip(patterns[weight == 2], decoded[weight == 2], flips[weight == 2]):
        rows, cols = np.divmod(np.sort(cube_index[np.flatnonzero(e)]), 3)
        if rows[0] == rows[1] or cols[0] == cols[1]:
            # two failing lines, no bit above the flip threshold
            assert f == 0
            assert (out == sent[0] ^ e).all()
            assert not parity_ok(code, out[None, :])[0]
            outcome["left_as_received"] += 1
        elif cols[0] < cols[1]:
            # the single-bit fallback starts on the top-left corner, which is an error
            assert f == 2
            assert (out == sent[0]).all()
            outcome["corrected"] += 1
        else:
            # it starts on a clean corner and completes the rectangle
            assert f == 2
            assert parity_ok(code, out[None, :])[0]
            assert not (out == sent[0]).all()
            outcome["wrong_codeword"] += 1

    assert outcome == {"left_as_received": 18, "corrected": 9, "wrong_codeword": 9}


def test_decoder_is_idempotent_on_parity_clean_output():
    code = mdpc_new(2, 5)
    rng = np.random.default_rng(17)
    sent = mdpc_encode_blocks(code, rng.integers(0, 2, size=(200, code.K)))
    noise = (rng.random(sent.shape) < 0.05).astype(np.uint8)
    first, _ = mdpc_decode_blocks(code, sent ^ noise)
    clean = parity_ok(code, first)
    assert clean.any()

    again, flips = mdpc_decode_blocks(code, first[clean])
    np.testing.assert_array_equal(again, first[clean])
    assert not flips.any()


def test_3d_three_error_patterns_mostly_corrected():
    code = mdpc_new(3, 2)
    sent = mdpc_encode_blocks(code, np.ones((1, code.K), dtype=np.uint8))
    patterns = _error_patterns(code.N, (3,))
    assert len(patterns) == 2925

    decoded, _ = mdpc_decode_blocks(code, sent ^ patterns)
    failures = int((decoded != sent).any(axis=1).sum())
    # t = 3 is not reached for every pattern; measured 54 failures
    assert 0 < failures < len(patterns) // 20


def test_clean_blocks_untouched():
    code = mdpc_new(2, 4)
    data = np.random.default_rng(7).integers(0, 2, size=(10, code.K))
    sent = mdpc_encode_blocks(code, data)
    decoded, flips = mdpc_decode_blocks(code, sent)
    assert (decoded == sent).all()
    assert not flips.any()


def test_single_block_api_returns_data_bits():
    code = mdpc_new(2, 3)
    data = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1], dtype=np.uint8)
    block = np.concatenate([data, mdpc_encode(code, data)])
    block[4] ^= 1
    decoded, flips = mdpc_decode(code, block)
    assert decoded.tolist() == data.tolist()
    assert flips == 1
