"""Brute-force reference implementations, independent of the library's
segmented/bit-packed code paths. Everything here favors obviousness over
speed and is only used to pin expected values."""

import math
from fractions import Fraction

import numpy as np


def primes_upto(n):
    """Trial division."""
    out = []
    for m in range(2, n + 1):
        if all(m % d for d in range(2, math.isqrt(m) + 1)):
            out.append(m)
    return out


def squarefree_upto(n):
    """Per-integer square-divisor test."""
    out = []
    for m in range(1, n + 1):
        d = 2
        ok = True
        while d * d <= m:
            if m % (d * d) == 0:
                ok = False
                break
            d += 1
        if ok:
            out.append(m)
    return out


def simple_sieve_terms(n, kind):
    """One-shot unsegmented numpy sieve; a second independent counting path."""
    if kind == "primes":
        flags = np.ones(n + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(n) + 1):
            if flags[p]:
                flags[p * p :: p] = False
    else:
        flags = np.ones(n + 1, dtype=bool)
        flags[0] = False
        for q in range(2, math.isqrt(n) + 1):
            flags[q * q :: q * q] = False
    return np.flatnonzero(flags)


def gaps(terms):
    """(term, gap) pairs with the first gap equal to the first term."""
    prev = 0
    out = []
    for t in terms:
        out.append((t, t - prev))
        prev = t
    return out


def ledger_q(t, terms):
    """Exact Q(t) = sum of gaps over terms <= t, minus floor(t)."""
    gap_sum = 0
    prev = 0
    for v in terms:
        if v > t:
            break
        gap_sum += v - prev
        prev = v
    return gap_sum - t


def abel_sides_exact(x, terms):
    """Both sides of the identity at integer x as exact rationals."""
    gap_recip = Fraction(0)
    prev = 0
    for t in terms:
        if t > x:
            break
        gap_recip += Fraction(t - prev, t)
        prev = t
    harmonic = sum(Fraction(1, n) for n in range(1, x + 1))
    lhs = gap_recip - harmonic
    integral = sum(Fraction(ledger_q(n, terms)) * (Fraction(1, n) - Fraction(1, n + 1))
                   for n in range(1, x))
    rhs = Fraction(ledger_q(x, terms), x) + integral
    return lhs, rhs, gap_recip, harmonic
