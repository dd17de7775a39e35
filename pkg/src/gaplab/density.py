"""Gap-threshold density statistics and the violator inequality chain.

A term is a violator when its gap exceeds the threshold curve
M * (log term)^exponent, with exponent 2+eps for primes and 1+eps for
squarefree numbers. The density defect delta(x) is the violator share among
all terms <= x. The chain report instantiates partial summation with the
violator counting function against q(t) = M (log t)^exponent / t, whose step
integral is evaluated in closed form between consecutive violators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .census import GapChunk, GapEvent, iter_gap_chunks
from .errors import InvalidArgumentError
from .numerics import CompensatedSum, validate_checkpoints
from .sequence import SegmentPlan, SequenceKind

VIOLATOR_SAMPLE_CAP = 64


@dataclass(frozen=True)
class ThresholdCurve:
    """Gap threshold M * (log t)^exponent and the matching curve q(t) = threshold/t."""

    epsilon: float
    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidArgumentError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.scale < 1.0:
            raise InvalidArgumentError(f"scale must be >= 1, got {self.scale}")

    @classmethod
    def for_kind(cls, kind: SequenceKind, epsilon: float, scale: float = 1.0) -> "ThresholdCurve":
        base = 2.0 if kind is SequenceKind.PRIMES else 1.0
        return cls(epsilon=float(epsilon), exponent=base + float(epsilon), scale=float(scale))

    def threshold(self, term: int) -> float:
        if term < 1:
            raise InvalidArgumentError(f"term must be >= 1, got {term}")
        if term == 1:
            return 0.0
        return self.scale * math.log(term) ** self.exponent

    def q_value(self, t: float) -> float:
        return self.scale * math.log(t) ** self.exponent / t

    def q_derivative(self, t: float) -> float:
        lt = math.log(t)
        return self.scale * (self.exponent * lt ** (self.exponent - 1.0) - lt ** self.exponent) / (t * t)

    @property
    def turning_point(self) -> float:
        """q is increasing below exp(exponent) and decreasing above it."""
        return math.exp(self.exponent)


def threshold(curve: ThresholdCurve, term: int) -> float:
    return curve.threshold(term)


@dataclass
class DensityReport:
    x: int
    kind: SequenceKind
    epsilon: float
    total: int  # terms <= x
    n_eps: int  # terms whose gap obeys the threshold
    delta: float
    violator_count: int
    violators: list[GapEvent]  # capped sample, ascending term


@dataclass
class ChainReport:
    x: int
    epsilon: float
    violator_recip_sum: float  # sum of gap/term over violators <= x
    boundary_term: float  # |S| * q(x)
    integral_term: float  # minus the step integral of q' from 2 to x
    m_eps_estimate: float
    full_sum: float  # sum of gap/term over all terms <= x


class _ViolatorFold:
    """Streaming violator detection shared by the density operations."""

    def __init__(self, curve: ThresholdCurve, keep_all: bool = False,
                 sample_cap: int = VIOLATOR_SAMPLE_CAP):
        self.curve = curve
        self.keep_all = keep_all
        self.sample_cap = sample_cap
        self.total = 0
        self.violator_count = 0
        self.sample: list[GapEvent] = []
        self.terms_kept: list[np.ndarray] = []
        self.gaps_kept: list[np.ndarray] = []
        self.full_sum = CompensatedSum()
        self.violator_recip = CompensatedSum()

    def update(self, chunk: GapChunk) -> None:
        terms, gaps = chunk.terms, chunk.gaps
        self.total += len(terms)
        self.full_sum.add(math.fsum(gaps / terms))
        logs = np.log(terms.astype(np.float64))
        thresholds = self.curve.scale * logs ** self.curve.exponent
        hit = gaps > thresholds
        count = int(np.count_nonzero(hit))
        if not count:
            return
        self.violator_count += count
        idx = np.flatnonzero(hit)
        self.violator_recip.add(math.fsum(gaps[idx] / terms[idx]))
        if self.keep_all:
            self.terms_kept.append(terms[idx].copy())
            self.gaps_kept.append(gaps[idx].copy())
        for i in idx[: self.sample_cap - len(self.sample)]:
            self.sample.append(GapEvent(index=chunk.first_index + int(i),
                                        term=int(terms[i]), prev=int(chunk.prevs[i]),
                                        gap=int(gaps[i])))

    def violator_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.terms_kept:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        return np.concatenate(self.terms_kept), np.concatenate(self.gaps_kept)


def _report_at(fold: _ViolatorFold, x: int, kind: SequenceKind, epsilon: float) -> DensityReport:
    total = fold.total
    count = fold.violator_count
    delta = count / total if total else 0.0
    return DensityReport(x=x, kind=kind, epsilon=epsilon, total=total,
                         n_eps=total - count, delta=delta, violator_count=count,
                         violators=list(fold.sample))


def density_report(plan: SegmentPlan, epsilon: float, x: int, scale: float = 1.0,
                   threads: Optional[int] = None,
                   sample_cap: int = VIOLATOR_SAMPLE_CAP) -> DensityReport:
    """Exact violator counts among terms <= x against the threshold curve."""
    first = 2 if plan.kind is SequenceKind.PRIMES else 1
    if not first <= x <= plan.limit:
        raise InvalidArgumentError(f"x must lie in [{first}, {plan.limit}], got {x}")
    curve = ThresholdCurve.for_kind(plan.kind, epsilon, scale)
    fold = _ViolatorFold(curve, sample_cap=sample_cap)
    for item in iter_gap_chunks(plan, checkpoints=(int(x),), threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
    return _report_at(fold, int(x), plan.kind, epsilon)


def delta_series(plan: SegmentPlan, epsilon: float, checkpoints: Sequence[int],
                 scale: float = 1.0, threads: Optional[int] = None) -> list[tuple[int, float]]:
    """Density defect delta at each checkpoint, from one streaming pass."""
    cps = validate_checkpoints(checkpoints, plan.limit, allow_empty=True)
    if not cps:
        return []
    curve = ThresholdCurve.for_kind(plan.kind, epsilon, scale)
    fold = _ViolatorFold(curve)
    out = []
    for item in iter_gap_chunks(plan, checkpoints=cps, threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
        else:
            out.append((item, fold.violator_count / fold.total if fold.total else 0.0))
    return out


def _chain_from_fold(fold: _ViolatorFold, x: int, epsilon: float,
                     running_m_eps: float = 0.0) -> ChainReport:
    curve = fold.curve
    v_terms, _ = fold.violator_arrays()
    count = len(v_terms)
    boundary = count * curve.q_value(x) if count else 0.0
    pieces = []  # exact step integral of q' over [2, x], one piece per plateau
    for i in range(count):
        a = max(int(v_terms[i]), 2)
        b = int(v_terms[i + 1]) if i + 1 < count else x
        b = min(b, x)
        if b > a:
            pieces.append((i + 1) * (curve.q_value(b) - curve.q_value(a)))
    integral = math.fsum(pieces)
    integral_term = -integral
    m_eps = max(running_m_eps, integral, 0.0)
    return ChainReport(x=x, epsilon=epsilon,
                       violator_recip_sum=fold.violator_recip.value,
                       boundary_term=boundary, integral_term=integral_term,
                       m_eps_estimate=m_eps, full_sum=fold.full_sum.value)


def chain_report(plan: SegmentPlan, epsilon: float, x: int, scale: float = 1.0,
                 threads: Optional[int] = None) -> ChainReport:
    """One-point inequality chain: violator reciprocal sum vs boundary + integral."""
    second = 3 if plan.kind is SequenceKind.PRIMES else 2
    if not second <= x <= plan.limit:
        raise InvalidArgumentError(f"x must lie in [{second}, {plan.limit}], got {x}")
    curve = ThresholdCurve.for_kind(plan.kind, epsilon, scale)
    fold = _ViolatorFold(curve, keep_all=True)
    for item in iter_gap_chunks(plan, checkpoints=(int(x),), threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
    return _chain_from_fold(fold, int(x), epsilon)


def density_series(plan: SegmentPlan, epsilon: float, checkpoints: Sequence[int],
                   scale: float = 1.0, with_chain: bool = False,
                   threads: Optional[int] = None
                   ) -> list[tuple[DensityReport, Optional[ChainReport]]]:
    """Full density report (and optionally the chain) at each checkpoint."""
    first = 2 if plan.kind is SequenceKind.PRIMES else 1
    minimum = max(first, 3 if plan.kind is SequenceKind.PRIMES else 2) if with_chain else first
    cps = validate_checkpoints(checkpoints, plan.limit, minimum=minimum)
    curve = ThresholdCurve.for_kind(plan.kind, epsilon, scale)
    fold = _ViolatorFold(curve, keep_all=with_chain)
    out: list[tuple[DensityReport, Optional[ChainReport]]] = []
    m_eps = 0.0
    for item in iter_gap_chunks(plan, checkpoints=cps, threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
        else:
            chain = None
            if with_chain:
                chain = _chain_from_fold(fold, item, epsilon, running_m_eps=m_eps)
                m_eps = chain.m_eps_estimate
            out.append((_report_at(fold, item, plan.kind, epsilon), chain))
    return out


def chain_sweep(plan: SegmentPlan, epsilon: float, checkpoints: Sequence[int],
                scale: float = 1.0, threads: Optional[int] = None) -> list[ChainReport]:
    """Chain reports at each checkpoint; m_eps_estimate is the running max."""
    second = 3 if plan.kind is SequenceKind.PRIMES else 2
    cps = validate_checkpoints(checkpoints, plan.limit, minimum=second)
    curve = ThresholdCurve.for_kind(plan.kind, epsilon, scale)
    fold = _ViolatorFold(curve, keep_all=True)
    out: list[ChainReport] = []
    m_eps = 0.0
    for item in iter_gap_chunks(plan, checkpoints=cps, threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
        else:
            report = _chain_from_fold(fold, item, epsilon, running_m_eps=m_eps)
            m_eps = report.m_eps_estimate
            out.append(report)
    return out
