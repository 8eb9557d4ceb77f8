import numpy as np
import pytest

from utils.codec_rs import (
    DecodeFailure,
    bits_to_symbols, rs_codeword, rs_decode, rs_encode, rs_encode_blocks,
    rs_new, rs_syndromes, symbols_to_bits,
)
from utils.galois_field import Poly, field_new, gf_pow, poly_eval, poly_mod


@pytest.fixture(scope="module")
def rs30():
    return rs_new(field_new(8), 28, 2)


@pytest.fixture(scope="module")
def rs240():
    return rs_new(field_new(8), 224, 16)


def _random_msg(code, rng):
    return rng.integers(0, code.field.size, size=code.k_sym).tolist()


def test_code_dimensions(rs30, rs240):
    assert (rs30.n_sym, rs30.z_pad, rs30.t) == (30, 225, 1)
    assert (rs240.n_sym, rs240.z_pad, rs240.t) == (240, 15, 8)
    assert rs240.K == 1792 and rs240.R == 128
    assert rs240.d_min == 17

    tiny = rs_new(field_new(2), 1, 2)
    assert (tiny.n_sym, tiny.t, tiny.z_pad) == (3, 1, 0)


@pytest.mark.parametrize("k, r", [(28, 3), (28, 0), (0, 2), (250, 6)])
def test_invalid_parameters(k, r):
    with pytest.raises(ValueError):
        rs_new(field_new(8), k, r)


def test_generator_roots(rs240):
    f = rs240.field
    assert rs240.generator.degree == 16
    assert rs240.generator.coeffs[-1] == 1
    for i in range(16):
        assert poly_eval(f, rs240.generator, gf_pow(f, f.alpha, 1 + i)) == 0


def test_parity_of_last_unit_message(rs240):
    msg = [0] * 224
    msg[-1] = 1
    x16 = Poly.of([0] * 16 + [1])
    expected = list(poly_mod(rs240.field, x16, rs240.generator).coeffs)
    expected += [0] * (16 - len(expected))
    assert rs_encode(rs240, msg) == expected[::-1]


def test_codeword_vanishes_at_generator_roots(rs240):
    rng = np.random.default_rng(11)
    f = rs240.field
    word = rs_codeword(rs240, _random_msg(rs240, rng))
    poly = Poly.of(word[::-1])
    for i in range(16):
        assert poly_eval(f, poly, gf_pow(f, f.alpha, 1 + i)) == 0
    assert not any(rs_syndromes(rs240, word))


@pytest.mark.parametrize("s, k, r", [(8, 28, 2), (8, 224, 16), (4, 5, 4)])
def test_shortened_encoding_matches_full_length_code(s, k, r):
    field = field_new(s)
    short = rs_new(field, k, r)
    full = rs_new(field, field.order - r, r)
    assert full.z_pad == 0
    rng = np.random.default_rng(s * 1000 + k)
    for _ in range(20):
        msg = _random_msg(short, rng)
        padded = [0] * short.z_pad + msg
        assert list(rs_encode(short, msg)) == list(rs_encode(full, padded))


def test_shortened_decoding_matches_full_length_code(rs30):
    full = rs_new(rs30.field, 253, 2)
    msg = _random_msg(rs30, np.random.default_rng(3))
    word = rs_codeword(rs30, msg)
    word[4] ^= 0x5A
    decoded, n_err = rs_decode(rs30, word)
    decoded_full, n_err_full = rs_decode(full, [0] * rs30.z_pad + word)
    assert n_err == n_err_full == 1
    assert list(decoded_full[rs30.z_pad:]) == list(decoded)


def test_encode_rejects_bad_input(rs30):
    with pytest.raises(ValueError):
        rs_encode(rs30, [0] * 27)
    with pytest.raises(ValueError):
        rs_encode(rs30, [256] + [0] * 27)


def test_clean_word_passes_through(rs30):
    word = rs_codeword(rs30, list(range(28)))
    assert rs_decode(rs30, word) == (word, 0)


def test_every_single_symbol_error_corrected(rs30):
    rng = np.random.default_rng(5)
    word = rs_codeword(rs30, _random_msg(rs30, rng))
    for pos in range(30):
        for value in (1, 0x80, int(rng.integers(1, 256))):
            received = list(word)
            received[pos] ^= value
            corrected, n_errors = rs_decode(rs30, received)
            assert corrected == word
            assert n_errors == 1


def test_random_errors_up_to_t(rs240):
    rng = np.random.default_rng(2024)
    for _ in range(300):
        word = rs_codeword(rs240, _random_msg(rs240, rng))
        n_err = int(rng.integers(1, 9))
        received = list(word)
        for pos in rng.choice(240, size=n_err, replace=False):
            received[pos] ^= int(rng.integers(1, 256))
        corrected, n_errors = rs_decode(rs240, received)
        assert corrected == word
        assert n_errors == n_err


def test_beyond_t_never_returns_a_non_codeword(rs240):
    rng = np.random.default_rng(9)
    for _ in range(50):
        word = rs_codeword(rs240, _random_msg(rs240, rng))
        received = list(word)
        for pos in rng.choice(240, size=9, replace=False):
            received[pos] ^= int(rng.integers(1, 256))
        try:
            corrected, _ = rs_decode(rs240, received)
        except DecodeFailure:
            continue
        assert corrected != word
        assert not any(rs_syndromes(rs240, corrected))


def test_batch_encoder_matches_scalar(rs30):
    rng = np.random.default_rng(1)
    msgs = rng.integers(0, 256, size=(20, 28))
    batch = rs_encode_blocks(rs30, msgs)
    assert batch.shape == (20, 30)
    for msg, word in zip(msgs, batch):
        assert word.tolist() == rs_codeword(rs30, msg.tolist())

    with pytest.raises(ValueError):
        rs_encode_blocks(rs30, msgs[:, :27])


def test_bit_symbol_packing_is_msb_first():
    bits = np.array([[1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0]])
    symbols = bits_to_symbols(bits, 8)
    np.testing.assert_array_equal(symbols, [[0x81, 0x02]])
    np.testing.assert_array_equal(symbols_to_bits(symbols, 8), bits)


@pytest.mark.slow
def test_ten_thousand_random_trials_up_to_t(rs240):
    rng = np.random.default_rng(77)
    msgs = rng.integers(0, 256, size=(10_000, 224))
    words = rs_encode_blocks(rs240, msgs)
    for word in words:
        received = word.tolist()
        for pos in rng.choice(240, size=int(rng.integers(0, 9)), replace=False):
            received[pos] ^= int(rng.integers(1, 256))
        corrected, _ = rs_decode(rs240, received)
        assert corrected == word.tolist()
