"""Exact integer ledgers and the partial-summation identity check.

The ledger at t is the running gap sum minus floor(t). It is computed in
integer arithmetic only, is zero at every term, and stays within
[-(bracketing gap), 0] between terms. Because the ledger is constant on each
[n, n+1), the identity's integral collapses to a finite sum

    integral(1, x) = sum_{n=1}^{x-1} Q(n) * (1/n - 1/(n+1))

which is evaluated term by term; only floating-point rounding separates the
two sides of the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .numerics import CompensatedSum, validate_checkpoints
from .sequence import SegmentPlan, SequenceKind, iter_segments


@dataclass(frozen=True)
class LedgerPoint:
    """Exact integer ledger value at t: q_value = gap_sum - floor_count."""

    t: int
    gap_sum: int
    floor_count: int
    q_value: int


@dataclass(frozen=True)
class AbelCheck:
    """Both sides of the partial-summation identity at x."""

    x: int
    lhs: float  # gap_recip_sum - harmonic
    rhs: float  # Q(x)/x + integral(1, x)
    abs_diff: float
    gap_recip_sum: float
    harmonic: float


@dataclass(frozen=True)
class KeyAsymptoticPoint:
    x: int
    gap_recip_sum: float
    ratio_to_logx: float
    c_value: float  # lhs of the identity; bounded, stabilizes as x grows


@dataclass
class LedgerBoundsReport:
    limit: int
    kind: SequenceKind
    checked: int
    violation_count: int
    violations: list[tuple[int, int, int]]  # (t, q_value, lower_bound), capped sample
    term_zero_failures: int


@dataclass
class SweepState:
    """Resumable fold state; only valid at segment boundaries.

    Mirrors the run-checkpoint wire format: two compensated accumulators
    (gap reciprocal sum, harmonic) carry their residuals, the integral is a
    plain double built from exactly rounded per-segment partials.
    """

    kind: SequenceKind
    limit: int
    next_segment: int
    carried_last_term: int
    term_count: int
    gap_sum: int
    gap_recip_sum: float
    gap_recip_comp: float
    harmonic_sum: float
    harmonic_comp: float
    integral_sum: float

    @classmethod
    def fresh(cls, plan: SegmentPlan) -> "SweepState":
        return cls(kind=plan.kind, limit=plan.limit, next_segment=0,
                   carried_last_term=0, term_count=0, gap_sum=0,
                   gap_recip_sum=0.0, gap_recip_comp=0.0,
                   harmonic_sum=0.0, harmonic_comp=0.0, integral_sum=0.0)


class _SegmentArrays:
    """Per-segment vectors for the identity fold, all derived from the bitset."""

    __slots__ = ("lo", "hi", "n", "inv", "integrand", "gap_ledger",
                 "terms", "gaps", "d_over_term")

    def __init__(self, seg, plan: SegmentPlan, carry_term: int, carry_gap_sum: int):
        lo = seg.base
        hi = min(seg.base + seg.bit_length - 1, plan.limit)
        valid = hi - lo + 1
        mask = seg.mask()[:valid]
        n = np.arange(lo, hi + 1, dtype=np.int64)

        self.terms = n[mask]
        self.gaps = np.empty_like(self.terms)
        if len(self.terms):
            self.gaps[0] = self.terms[0] - carry_term
            self.gaps[1:] = np.diff(self.terms)

        gap_at = np.zeros(valid, dtype=np.int64)
        gap_at[np.flatnonzero(mask)] = self.gaps
        self.gap_ledger = np.cumsum(gap_at) + carry_gap_sum  # sum of d over terms <= n

        self.lo = lo
        self.hi = hi
        self.inv = 1.0 / n
        weight = self.inv - 1.0 / (n + 1)
        self.integrand = (self.gap_ledger - n).astype(np.float64) * weight
        self.d_over_term = self.gaps / self.terms if len(self.terms) else self.gaps.astype(np.float64)

    def q_at(self, x: int) -> int:
        return int(self.gap_ledger[x - self.lo]) - x


def abel_sweep(plan: SegmentPlan, checkpoints: Sequence[int],
               threads: Optional[int] = None,
               resume_state: Optional[SweepState] = None,
               segment_callback: Optional[Callable[[SweepState], None]] = None) -> list[AbelCheck]:
    """Evaluate the identity at each checkpoint in one ordered pass.

    `segment_callback` fires after each fully committed segment with the
    current state; saving that state and later passing it as `resume_state`
    (with the same plan and the remaining checkpoints) continues the fold
    bit-identically.
    """
    cps = validate_checkpoints(checkpoints, plan.limit, minimum=2)
    state = replace(resume_state) if resume_state is not None else SweepState.fresh(plan)
    if state.kind is not plan.kind or state.limit != plan.limit:
        raise InvalidArgumentError("resume state does not match the plan")
    covered = state.next_segment * plan.segment_len
    if cps[0] <= covered:
        raise InvalidArgumentError(
            f"checkpoint {cps[0]} already behind resumed position {covered}")

    s_d = CompensatedSum(state.gap_recip_sum, state.gap_recip_comp)
    s_h = CompensatedSum(state.harmonic_sum, state.harmonic_comp)
    pending = list(cps)
    results: list[AbelCheck] = []

    stop_index = plan.segment_containing(pending[-1]) + 1
    for seg in iter_segments(plan, threads=threads,
                             start=state.next_segment, stop=stop_index):
        arrays = _SegmentArrays(seg, plan, state.carried_last_term, state.gap_sum)
        lo, hi = arrays.lo, arrays.hi
        pos = lo
        tpos = 0
        while pending and pending[0] <= hi:
            x = pending.pop(0)
            tcut = int(np.searchsorted(arrays.terms, x))  # terms < x
            _commit(state, s_d, s_h, arrays, pos - lo, x - lo, tpos, tcut)
            pos, tpos = x, tcut
            results.append(_snapshot(x, arrays, s_d, s_h, state.integral_sum))
            if not pending:
                return results
        _commit(state, s_d, s_h, arrays, pos - lo, hi - lo + 1, tpos, len(arrays.terms))
        state.next_segment = seg.base // plan.segment_len + 1
        if len(arrays.terms):
            state.carried_last_term = int(arrays.terms[-1])
        state.gap_sum = int(arrays.gap_ledger[-1])
        state.gap_recip_sum, state.gap_recip_comp = s_d.total, s_d.comp
        state.harmonic_sum, state.harmonic_comp = s_h.total, s_h.comp
        if segment_callback is not None:
            segment_callback(state)
    return results


def _commit(state: SweepState, s_d: CompensatedSum, s_h: CompensatedSum,
            arrays: _SegmentArrays, i_lo: int, i_hi: int, t_lo: int, t_hi: int) -> None:
    """Fold integers [lo+i_lo, lo+i_hi) and terms [t_lo, t_hi) into the sums."""
    if i_hi > i_lo:
        s_h.add(math.fsum(arrays.inv[i_lo:i_hi]))
        state.integral_sum += math.fsum(arrays.integrand[i_lo:i_hi])
    if t_hi > t_lo:
        s_d.add(math.fsum(arrays.d_over_term[t_lo:t_hi]))
        state.term_count += t_hi - t_lo


def _snapshot(x: int, arrays: _SegmentArrays, s_d: CompensatedSum,
              s_h: CompensatedSum, integral: float) -> AbelCheck:
    # committed sums end just below x; extend to include x without
    # disturbing the running accumulators
    gap_recip = s_d.value
    tcut = int(np.searchsorted(arrays.terms, x))
    if tcut < len(arrays.terms) and arrays.terms[tcut] == x:
        gap_recip += float(arrays.gaps[tcut]) / x
    harmonic = s_h.value + 1.0 / x
    q_x = arrays.q_at(x)
    lhs = gap_recip - harmonic
    rhs = q_x / x + integral
    return AbelCheck(x=x, lhs=lhs, rhs=rhs, abs_diff=abs(lhs - rhs),
                     gap_recip_sum=gap_recip, harmonic=harmonic)


def abel_check(plan: SegmentPlan, x: int, threads: Optional[int] = None) -> AbelCheck:
    """Both sides of the identity at a single point x in [2, limit]."""
    if not 2 <= x <= plan.limit:
        raise InvalidArgumentError(f"x must lie in [2, {plan.limit}], got {x}")
    return abel_sweep(plan, [int(x)], threads=threads)[0]


def key_asymptotic_series(plan: SegmentPlan, checkpoints: Sequence[int],
                          threads: Optional[int] = None) -> list[KeyAsymptoticPoint]:
    """Gap reciprocal sums with their log-ratio and bounded remainder C(x)."""
    cps = validate_checkpoints(checkpoints, plan.limit, minimum=10)
    checks = abel_sweep(plan, cps, threads=threads)
    return [KeyAsymptoticPoint(x=c.x, gap_recip_sum=c.gap_recip_sum,
                               ratio_to_logx=c.gap_recip_sum / math.log(c.x),
                               c_value=c.lhs)
            for c in checks]


def ledger_at(plan: SegmentPlan, t: int, threads: Optional[int] = None) -> LedgerPoint:
    """Exact ledger at integer t in [1, limit]."""
    if not 1 <= t <= plan.limit:
        raise InvalidArgumentError(f"t must lie in [1, {plan.limit}], got {t}")
    t = int(t)
    gap_sum = 0
    prev = 0
    stop = plan.segment_containing(t) + 1
    for seg in iter_segments(plan, threads=threads, stop=stop):
        terms = seg.terms()
        cut = int(np.searchsorted(terms, t, side="right"))
        if cut:
            gap_sum += int(terms[cut - 1]) - prev  # telescoped sum of gaps
            prev = int(terms[cut - 1])
    return LedgerPoint(t=t, gap_sum=gap_sum, floor_count=t, q_value=gap_sum - t)


_VIOLATION_SAMPLE_CAP = 100


def ledger_bounds_check(plan: SegmentPlan, threads: Optional[int] = None) -> LedgerBoundsReport:
    """Scan every integer t in [2, limit] against the ledger bounds.

    Checks q(t) <= 0, q(term) = 0, and q(t) >= -(bracketing gap) wherever the
    upper bracket term is known (for t past the last term below the limit the
    bracketing gap is not determined by the plan, so only the upper bound
    applies there).
    """
    report = LedgerBoundsReport(limit=plan.limit, kind=plan.kind, checked=0,
                                violation_count=0, violations=[],
                                term_zero_failures=0)
    held: list[tuple] = []  # segments waiting for a forward term
    carry_term = 0
    carry_gap_sum = 0

    def flush(next_term: Optional[int]) -> None:
        while held:
            _scan_segment(report, held.pop(0), next_term)

    for seg in iter_segments(plan, threads=threads):
        lo = seg.base
        hi = min(seg.base + seg.bit_length - 1, plan.limit)
        valid = hi - lo + 1
        mask = seg.mask()[:valid]
        n = np.arange(lo, hi + 1, dtype=np.int64)
        terms = n[mask]
        gaps = np.empty_like(terms)
        if len(terms):
            gaps[0] = terms[0] - carry_term
            gaps[1:] = np.diff(terms)
        gap_at = np.zeros(valid, dtype=np.int64)
        gap_at[np.flatnonzero(mask)] = gaps
        ledger = np.cumsum(gap_at) + carry_gap_sum

        if len(terms):
            flush(int(terms[0]))
            carry_term = int(terms[-1])
        carry_gap_sum = int(ledger[-1])
        held.append((n, mask, terms, ledger))
    flush(None)
    return report


def _scan_segment(report: LedgerBoundsReport, bundle: tuple,
                  next_term: Optional[int]) -> None:
    n, mask, terms, ledger = bundle
    q = ledger - n
    in_range = n >= 2
    report.checked += int(np.count_nonzero(in_range))

    report.term_zero_failures += int(np.count_nonzero(q[mask] != 0))

    bad_upper = in_range & (q > 0)

    # lower bound needs the bracketing pair around each t
    prev = np.maximum.accumulate(np.where(mask, n, 0))
    big = np.iinfo(np.int64).max
    nxt = np.minimum.accumulate(np.where(mask, n, big)[::-1])[::-1]
    if next_term is not None:
        nxt = np.minimum(nxt, next_term)
    known = in_range & (prev > 0) & (nxt < big)
    bad_lower = known & (q < -(nxt - prev))

    bad = bad_upper | bad_lower
    count = int(np.count_nonzero(bad))
    if count:
        report.violation_count += count
        for i in np.flatnonzero(bad)[: _VIOLATION_SAMPLE_CAP - len(report.violations)]:
            bound = int(-(nxt[i] - prev[i])) if known[i] else 0
            report.violations.append((int(n[i]), int(q[i]), bound))
