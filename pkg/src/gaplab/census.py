"""Gap events and census statistics over a sieved term stream.

The k-th event carries (term, prev, gap). By convention the first event's gap
is the term itself, which makes the gap sums telescope to the newest term.
The census aggregates record gaps, a sparse histogram, and the two empirical
ratio statistics: gap / (log term)^2 and gap / prev^0.535.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgumentError
from .numerics import validate_checkpoints
from .sequence import SegmentPlan, SequenceKind, iter_segments

BHP_EXPONENT = 0.535  # 1/2 + 7/200, as a literal double


@dataclass(frozen=True)
class GapEvent:
    """Consecutive-term pair: gap = term - prev, or gap = term for the first."""

    index: int  # 1-based position in the sequence
    term: int
    prev: int  # 0 for the first term
    gap: int


@dataclass(frozen=True)
class GapChunk:
    """A batch of consecutive gap events as parallel arrays."""

    terms: np.ndarray
    prevs: np.ndarray
    gaps: np.ndarray
    first_index: int  # 1-based index of terms[0]


@dataclass
class CensusSummary:
    limit: int
    kind: SequenceKind
    term_count: int
    max_gap: int
    record_gaps: list[tuple[int, int]]  # (term, gap), strictly increasing gap
    histogram: dict[int, int]
    max_bhp_ratio: float
    max_cramer_ratio: float


@dataclass(frozen=True)
class CensusCheckpoint:
    """Running census statistics after all terms <= x."""

    x: int
    max_gap: int
    max_cramer_ratio: float
    max_bhp_ratio: float


def iter_gap_chunks(plan: SegmentPlan, checkpoints: Sequence[int] = (),
                    threads: Optional[int] = None) -> Iterator[Union[GapChunk, int]]:
    """Stream gap events as array chunks, in term order.

    Yields GapChunk items; after every event with term <= x has been yielded
    for a checkpoint x, the bare int x is yielded as a snapshot marker. With a
    nonempty checkpoint list the stream stops after the last marker.
    """
    cps = validate_checkpoints(checkpoints, plan.limit, allow_empty=True)
    pending = list(cps)
    stop_index = None
    if pending:
        stop_index = plan.segment_containing(pending[-1]) + 1

    carry = 0  # last term seen, 0 before the first
    emitted = 0
    for seg in iter_segments(plan, threads=threads, stop=stop_index):
        terms = seg.terms()
        seg_hi = min(seg.base + seg.bit_length - 1, plan.limit)
        pos = 0
        while pending and pending[0] <= seg_hi:
            x = pending.pop(0)
            cut = int(np.searchsorted(terms, x, side="right"))
            if cut > pos:
                chunk, carry = _make_chunk(terms[pos:cut], carry, emitted + 1)
                emitted += cut - pos
                pos = cut
                yield chunk
            yield x
        if pos < len(terms):
            chunk, carry = _make_chunk(terms[pos:], carry, emitted + 1)
            emitted += len(terms) - pos
            yield chunk
        if cps and not pending:
            return


def _make_chunk(terms: np.ndarray, carry: int, first_index: int) -> tuple[GapChunk, int]:
    prevs = np.empty_like(terms)
    prevs[0] = carry
    prevs[1:] = terms[:-1]
    return GapChunk(terms=terms, prevs=prevs, gaps=terms - prevs,
                    first_index=first_index), int(terms[-1])


def gaps_from_terms(plan: SegmentPlan, threads: Optional[int] = None) -> Iterator[GapEvent]:
    """One GapEvent per term <= limit, in increasing term order."""
    for item in iter_gap_chunks(plan, threads=threads):
        if isinstance(item, GapChunk):
            for off in range(len(item.terms)):
                yield GapEvent(index=item.first_index + off,
                               term=int(item.terms[off]),
                               prev=int(item.prevs[off]),
                               gap=int(item.gaps[off]))


class _CensusFold:
    """Mergeable running state for census statistics."""

    def __init__(self) -> None:
        self.count = 0
        self.max_gap = 0
        self.records: list[tuple[int, int]] = []
        self.histogram: dict[int, int] = {}
        self.max_cramer = 0.0
        self.max_bhp = 0.0

    def update(self, chunk: GapChunk) -> None:
        terms, prevs, gaps = chunk.terms, chunk.prevs, chunk.gaps
        self.count += len(terms)

        counts = np.bincount(gaps)
        for g in np.flatnonzero(counts):
            g = int(g)
            self.histogram[g] = self.histogram.get(g, 0) + int(counts[g])

        running = np.maximum.accumulate(gaps)
        before = np.empty_like(running)
        before[0] = self.max_gap
        np.maximum(running[:-1], self.max_gap, out=before[1:])
        for i in np.flatnonzero(gaps > before):
            self.records.append((int(terms[i]), int(gaps[i])))
        self.max_gap = max(self.max_gap, int(running[-1]))

        sel = terms >= 3
        if sel.any():
            ratios = gaps[sel] / np.log(terms[sel]) ** 2
            self.max_cramer = max(self.max_cramer, float(ratios.max()))
        sel = prevs > 0
        if sel.any():
            ratios = gaps[sel] / prevs[sel].astype(np.float64) ** BHP_EXPONENT
            self.max_bhp = max(self.max_bhp, float(ratios.max()))


def census(plan: SegmentPlan, threads: Optional[int] = None) -> CensusSummary:
    """Full-range census of gaps up to plan.limit."""
    fold = _CensusFold()
    for item in iter_gap_chunks(plan, checkpoints=(plan.limit,), threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
    return CensusSummary(limit=plan.limit, kind=plan.kind, term_count=fold.count,
                         max_gap=fold.max_gap, record_gaps=fold.records,
                         histogram=dict(sorted(fold.histogram.items())),
                         max_bhp_ratio=fold.max_bhp, max_cramer_ratio=fold.max_cramer)


def census_series(plan: SegmentPlan, checkpoints: Sequence[int],
                  threads: Optional[int] = None) -> list[CensusCheckpoint]:
    """Running (max_gap, ratio) statistics observed at each checkpoint."""
    if not checkpoints:
        raise InvalidArgumentError("census_series requires at least one checkpoint")
    fold = _CensusFold()
    out = []
    for item in iter_gap_chunks(plan, checkpoints=checkpoints, threads=threads):
        if isinstance(item, GapChunk):
            fold.update(item)
        else:
            out.append(CensusCheckpoint(x=item, max_gap=fold.max_gap,
                                        max_cramer_ratio=fold.max_cramer,
                                        max_bhp_ratio=fold.max_bhp))
    return out


def cramer_ratio_series(plan: SegmentPlan, checkpoints: Sequence[int],
                        exponent: float = 2.0, min_term: int = 3,
                        threads: Optional[int] = None) -> list[tuple[int, float]]:
    """Running max of gap / (log term)^exponent at each checkpoint.

    Terms below min_term are excluded; the default skips term 2, whose
    log is below 1 and makes the squared ratio degenerate.
    """
    if not checkpoints:
        raise InvalidArgumentError("cramer_ratio_series requires at least one checkpoint")
    best = 0.0
    out = []
    for item in iter_gap_chunks(plan, checkpoints=checkpoints, threads=threads):
        if isinstance(item, GapChunk):
            sel = item.terms >= min_term
            if sel.any():
                ratios = item.gaps[sel] / np.log(item.terms[sel]) ** exponent
                best = max(best, float(ratios.max()))
        else:
            out.append((item, best))
    return out
