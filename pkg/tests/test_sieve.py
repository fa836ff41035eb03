"""Unit tests for src.sieve."""
import itertools

import pytest

from src.sieve import factorize, is_prime, prime_count, prime_stream, segment_primes, simple_sieve


def test_simple_sieve_small():
    assert simple_sieve(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert simple_sieve(1).tolist() == []


def test_segment_primes_half_open():
    assert segment_primes(10, 30).tolist() == [11, 13, 17, 19, 23, 29]
    assert segment_primes(0, 10).tolist() == [2, 3, 5, 7]
    assert segment_primes(29, 29).tolist() == []


def test_prime_stream_crosses_segment_boundaries():
    # first segment covers [2, 4098); pull well beyond it
    head = list(itertools.islice(prime_stream(), 2000))
    assert head == simple_sieve(head[-1]).tolist()
    assert head[-1] == 17389


@pytest.mark.parametrize("limit, count", [(10, 4), (1000, 168), (10000, 1229), (100000, 9592)])
def test_prime_count(limit, count):
    assert prime_count(limit) == count


def test_is_prime_agrees_with_sieve():
    primes = set(simple_sieve(500).tolist())
    assert all(is_prime(n) == (n in primes) for n in range(-3, 501))


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    assert factorize(9973) == {9973: 1}
    with pytest.raises(ValueError):
        factorize(0)
