import itertools

import pytest

from ccasim.model import SimulationFault
from ccasim.randomness import (
    HashFunction,
    RandomTape,
    RgStream,
    TapeSource,
    global_bit,
    hash_field_prime,
    sample_hash,
    smallest_prime_at_least,
)


def test_smallest_prime():
    assert smallest_prime_at_least(2) == 2
    assert smallest_prime_at_least(8) == 11
    assert smallest_prime_at_least(1000) == 1009


def test_hash_field_prime_covers_power_of_two():
    # smallest prime >= max(N, L, 2^ceil(log2 max))
    assert hash_field_prime(5, 5) >= 8
    assert hash_field_prime(16, 16) == 17


def all_functions(c, p, length):
    """Every coefficient vector in the family over F_p."""
    for coeffs in itertools.product(range(p), repeat=c):
        yield HashFunction(c=c, domain=length, range_=length, prime=p, coeffs=coeffs)


def test_pairwise_joint_uniform_exhaustive():
    # c=2, P=5, L=5: for fixed x != y every (h(x), h(y)) pair occurs once
    for x, y in [(0, 1), (1, 4), (2, 3)]:
        seen = [ (h(x), h(y)) for h in all_functions(2, 5, 5) ]
        assert len(seen) == 25
        assert len(set(seen)) == 25


def test_threewise_joint_uniform_exhaustive():
    for xs in [(0, 1, 2), (1, 3, 6)]:
        seen = [tuple(h(x) for x in xs) for h in all_functions(3, 7, 7)]
        assert len(seen) == 343
        assert len(set(seen)) == 343


def test_zero_coefficients_constant_zero():
    h = HashFunction(c=2, domain=5, range_=5, prime=5, coeffs=(0, 0))
    assert all(h(x) == 0 for x in range(5))


def test_constant_one_function():
    h = HashFunction(c=2, domain=7, range_=7, prime=7, coeffs=(1, 0))
    assert all(h(x) == 1 for x in range(7))


def test_degree_zero_family_is_constant():
    h = HashFunction(c=1, domain=9, range_=4, prime=11, coeffs=(6,))
    assert len({h(x) for x in range(9)}) == 1


def test_hash_domain_enforced():
    h = HashFunction(c=2, domain=5, range_=5, prime=5, coeffs=(1, 1))
    with pytest.raises(SimulationFault):
        h(5)


def test_sample_hash_replay_stable():
    def draw(seed):
        tape = RandomTape(seed, "hash")
        return sample_hash(3, 1009, 16, tape.bits, prime=1009)

    h1, h2 = draw(42), draw(42)
    assert h1.coeffs == h2.coeffs
    assert h1(5) == h2(5)
    assert draw(43).coeffs != h1.coeffs


def test_tape_isolation_interleaving():
    src = TapeSource(7)
    ref_a, ref_b = RandomTape(7, "a"), RandomTape(7, "b")
    a_ref = [ref_a.integers(0, 100) for _ in range(6)]
    b_ref = [ref_b.integers(0, 100) for _ in range(6)]
    a, b = src.tape("a"), src.tape("b")
    got_a, got_b = [], []
    for i in range(6):
        if i % 2:
            got_b.append(b.integers(0, 100))
            got_a.append(a.integers(0, 100))
        else:
            got_a.append(a.integers(0, 100))
            got_b.append(b.integers(0, 100))
    assert got_a == a_ref and got_b == b_ref


def test_global_bits_replayable():
    run1 = [global_bit(42, s) for s in range(64)]
    run2 = [global_bit(42, s) for s in range(64)]
    assert run1 == run2
    assert any(run1) and not all(run1)


def test_rg_stream_matches_global_bits():
    stream = RgStream(11, tag_base=3)
    word = stream.take(10)
    bits = [(word >> i) & 1 for i in range(10)]
    assert bits == [global_bit(11, 3 + i) for i in range(10)]
    assert stream.tag == 13


def test_tape_counter_tracks_draws():
    tape = RandomTape(1, "x")
    tape.random()
    tape.random(5)
    tape.bits(8)
    assert tape.counter == 1 + 5 + 8
