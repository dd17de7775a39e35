import random

import numpy as np
import pytest

import oracles
from gaplab import (InvalidArgumentError, InvalidConfigError, InvalidRangeError,
                    SequenceKind, count_terms, iter_segments, plan_segments,
                    read_term_dump, sieve_segment, write_term_dump)

PRIMES = SequenceKind.PRIMES
SQUAREFREE = SequenceKind.SQUAREFREE


def streamed_terms(limit, segment_len, kind, threads=None):
    plan = plan_segments(limit, segment_len, kind)
    chunks = [seg.terms() for seg in iter_segments(plan, threads=threads)]
    return np.concatenate(chunks)


def test_plan_tiling_small():
    plan = plan_segments(100, 64, PRIMES)
    assert plan.num_segments == 2
    assert plan.segment_base(0) == 1
    assert plan.segment_base(1) == 65


def test_plan_tiling_large():
    plan = plan_segments(10**8, 1 << 20, PRIMES)
    assert plan.num_segments == 96


def test_plan_rejects_bad_limit():
    with pytest.raises(InvalidRangeError):
        plan_segments(1, 64, PRIMES)
    with pytest.raises(InvalidRangeError):
        plan_segments(0, 64, PRIMES)


def test_plan_rejects_bad_segment_len():
    with pytest.raises(InvalidConfigError):
        plan_segments(100, 63, PRIMES)
    with pytest.raises(InvalidConfigError):
        plan_segments(100, 96, PRIMES)
    with pytest.raises(InvalidConfigError):
        plan_segments(100, 0, PRIMES)


def test_segment_index_out_of_range():
    plan = plan_segments(100, 64, PRIMES)
    with pytest.raises(InvalidArgumentError):
        sieve_segment(plan, 2)
    with pytest.raises(InvalidArgumentError):
        sieve_segment(plan, -1)


def test_first_prime_segment_count():
    plan = plan_segments(64, 64, PRIMES)
    seg = sieve_segment(plan, 0)
    assert seg.count == 18  # pi(64), from trial division
    assert seg.count == len(oracles.primes_upto(64))


def test_first_squarefree_values():
    plan = plan_segments(10, 64, SQUAREFREE)
    seg = sieve_segment(plan, 0)
    assert seg.terms().tolist() == [1, 2, 3, 5, 6, 7, 10]
    assert seg.count == 7


def test_segment_covering_90_100():
    plan = plan_segments(100, 64, PRIMES)
    seg = sieve_segment(plan, 1)
    terms = seg.terms()
    assert terms[(terms >= 90) & (terms <= 100)].tolist() == [97]


def test_sequence_openings():
    assert streamed_terms(11, 64, PRIMES)[:5].tolist() == [2, 3, 5, 7, 11]
    assert streamed_terms(7, 64, SQUAREFREE)[:6].tolist() == [1, 2, 3, 5, 6, 7]


def test_count_terms_reference_points():
    assert count_terms(plan_segments(100, 64, PRIMES)) == 25
    assert count_terms(plan_segments(100, 64, SQUAREFREE)) == 61
    assert count_terms(plan_segments(10, 64, SQUAREFREE)) == 7


def test_prime_oracle_equivalence_1e5(prime_oracle_1e5):
    for seg_len in (1 << 10, 1 << 14, 1 << 20):
        got = streamed_terms(10**5, seg_len, PRIMES)
        assert got.tolist() == prime_oracle_1e5


def test_squarefree_oracle_equivalence_1e5(squarefree_oracle_1e5):
    for seg_len in (1 << 10, 1 << 20):
        got = streamed_terms(10**5, seg_len, SQUAREFREE)
        assert got.tolist() == squarefree_oracle_1e5


@pytest.mark.parametrize("limit", [2, 3, 10, 63, 64, 65, 100, 127, 128, 1000, 4099])
@pytest.mark.parametrize("kind", [PRIMES, SQUAREFREE])
def test_oracle_equivalence_assorted_limits(limit, kind):
    oracle = (oracles.primes_upto if kind is PRIMES else oracles.squarefree_upto)(limit)
    assert streamed_terms(limit, 64, kind).tolist() == oracle
    assert streamed_terms(limit, 1 << 12, kind).tolist() == oracle


def test_determinism_same_plan_twice():
    plan = plan_segments(10**5, 1 << 12, PRIMES)
    a = [seg.words.tobytes() for seg in iter_segments(plan)]
    b = [seg.words.tobytes() for seg in iter_segments(plan)]
    assert a == b


def test_determinism_across_worker_counts():
    plan = plan_segments(10**5, 1 << 12, SQUAREFREE)
    a = [seg.words.tobytes() for seg in iter_segments(plan, threads=1)]
    b = [seg.words.tobytes() for seg in iter_segments(plan, threads=4)]
    assert a == b


def test_count_monotone_consistency(prime_oracle_1e5):
    # prefix counts from one stream imply the per-limit counts
    rng = random.Random(20240811)
    prime_set = set(prime_oracle_1e5)
    running = 0
    counts = {}
    for n in range(2, 2001):
        running += n in prime_set
        counts[n] = running
    for limit in rng.sample(range(2, 2001), 60):
        c = count_terms(plan_segments(limit, 64, PRIMES))
        assert c == counts[limit]
        if limit > 2:
            prev = count_terms(plan_segments(limit - 1, 64, PRIMES))
            assert c - prev in (0, 1)
            assert c >= prev


def test_squarefree_density_window():
    for x in (10**3, 10**4, 10**5, 10**6):
        s = count_terms(plan_segments(x, 1 << 20, SQUAREFREE))
        assert 0.55 <= s / x <= 0.67


def test_prime_bits_coprime_to_base_primes():
    plan = plan_segments(10**4, 1 << 10, PRIMES)
    for seg in iter_segments(plan):
        terms = seg.terms()
        for p in (2, 3, 5, 7):
            assert not np.any((terms % p == 0) & (terms != p))


def test_squarefree_bits_avoid_square_divisors():
    plan = plan_segments(10**4, 1 << 10, SQUAREFREE)
    for seg in iter_segments(plan):
        terms = seg.terms()
        for q in (2, 3, 5, 7, 11):
            assert not np.any(terms % (q * q) == 0)


def test_term_dump_round_trip(tmp_path, squarefree_oracle_1e5):
    plan = plan_segments(10**4, 1 << 10, SQUAREFREE)
    path = tmp_path / "terms.gapl"
    write_term_dump(plan, str(path))
    kind, limit, mask = read_term_dump(str(path))
    assert kind is SQUAREFREE and limit == 10**4
    got = (np.flatnonzero(mask) + 1).tolist()
    assert got == [t for t in squarefree_oracle_1e5 if t <= 10**4]


def test_term_dump_header_layout(tmp_path):
    plan = plan_segments(300, 64, PRIMES)
    path = tmp_path / "terms.gapl"
    write_term_dump(plan, str(path))
    raw = path.read_bytes()
    assert raw[:4] == b"GAPL"
    assert raw[4] == 1  # version
    assert raw[5] == 0  # primes
    assert int.from_bytes(raw[6:14], "little") == 300
    # 5 segments of 64 bits -> 5 words of payload
    assert len(raw) == 14 + 5 * 8
