"""Segmented sieving of monotone integer sequences (primes, squarefree numbers).

Terms are produced as a deterministic stream of bit-packed segments tiling
[1, limit]. Sieving one segment is a pure function of (plan, index), so
segments may be computed by any number of workers; delivery to consumers is
always in index order.
"""

from __future__ import annotations

import enum
import math
import os
import struct
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import InvalidArgumentError, InvalidConfigError, InvalidRangeError

DEFAULT_SEGMENT_LEN = 1 << 20  # bits; keeps the working set inside L2

TERM_DUMP_MAGIC = b"GAPL"
TERM_DUMP_VERSION = 1

THREADS_ENV_VAR = "GAPLAB_THREADS"


class SequenceKind(enum.Enum):
    PRIMES = "primes"
    SQUAREFREE = "squarefree"

    @property
    def code(self) -> int:
        """Single-byte encoding used in binary file headers."""
        return 0 if self is SequenceKind.PRIMES else 1

    @classmethod
    def from_code(cls, code: int) -> "SequenceKind":
        if code == 0:
            return cls.PRIMES
        if code == 1:
            return cls.SQUAREFREE
        raise InvalidArgumentError(f"unknown sequence kind byte {code}")

    @classmethod
    def parse(cls, name: str) -> "SequenceKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise InvalidArgumentError(
                f"unknown sequence kind {name!r} (expected 'primes' or 'squarefree')"
            ) from None


@dataclass(frozen=True)
class SegmentPlan:
    """Tiling of [1, limit] into fixed-width bit segments."""

    limit: int
    segment_len: int
    kind: SequenceKind

    @property
    def num_segments(self) -> int:
        return (self.limit + self.segment_len - 1) // self.segment_len

    def segment_base(self, index: int) -> int:
        """First integer covered by segment `index` (bit i holds base + i)."""
        if not 0 <= index < self.num_segments:
            raise InvalidArgumentError(
                f"segment index {index} out of range [0, {self.num_segments})"
            )
        return 1 + index * self.segment_len

    def segment_containing(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise InvalidArgumentError(f"{n} outside plan range [1, {self.limit}]")
        return (n - 1) // self.segment_len


@dataclass(frozen=True)
class TermSegment:
    """One sieved block: bit i of the packed words is set iff base+i is a term."""

    base: int
    words: np.ndarray  # little-endian uint64, bit-packed
    count: int

    @property
    def bit_length(self) -> int:
        return len(self.words) * 64

    def mask(self) -> np.ndarray:
        """Unpacked boolean view of the bitset."""
        return np.unpackbits(self.words.view(np.uint8), bitorder="little").view(np.bool_)

    def positions(self) -> np.ndarray:
        return np.flatnonzero(self.mask())

    def terms(self) -> np.ndarray:
        """Set-bit values as int64 integers, ascending."""
        return self.positions().astype(np.int64) + self.base


def plan_segments(limit: int, segment_len: int = DEFAULT_SEGMENT_LEN,
                  kind: SequenceKind = SequenceKind.PRIMES) -> SegmentPlan:
    """Validate and build a segment tiling of [1, limit]."""
    if limit < 2:
        raise InvalidRangeError(f"limit must be >= 2, got {limit}")
    if limit >= 1 << 63:
        raise InvalidRangeError(f"limit must be < 2^63, got {limit}")
    if segment_len < 64 or segment_len % 64 != 0:
        raise InvalidConfigError(
            f"segment_len must be a positive multiple of 64, got {segment_len}"
        )
    return SegmentPlan(limit=int(limit), segment_len=int(segment_len), kind=kind)


def base_primes(limit: int) -> np.ndarray:
    """Primes up to isqrt(limit) via one small unsegmented sieve."""
    top = math.isqrt(limit)
    if top < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(top + 1, dtype=np.bool_)
    is_prime[:2] = False
    for p in range(2, math.isqrt(top) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_mask(plan: SegmentPlan, index: int, primes: np.ndarray) -> np.ndarray:
    lo = plan.segment_base(index)
    length = plan.segment_len
    hi = lo + length - 1  # last integer physically covered
    mask = np.ones(length, dtype=np.bool_)

    if plan.kind is SequenceKind.PRIMES:
        if lo == 1:
            mask[0] = False
        for p in primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start > hi:
                continue
            mask[start - lo :: p] = False
    else:
        for q in primes:
            step = int(q) * int(q)
            start = ((lo + step - 1) // step) * step
            if start > hi:
                continue
            mask[start - lo :: step] = False

    if hi > plan.limit:  # logical truncation of the last segment
        mask[plan.limit - lo + 1 :] = False
    return mask


def sieve_segment(plan: SegmentPlan, index: int,
                  primes: Optional[np.ndarray] = None) -> TermSegment:
    """Sieve one segment. Pure and deterministic for fixed (plan, index)."""
    if primes is None:
        primes = base_primes(plan.limit)
    mask = _sieve_mask(plan, index, primes)
    packed = np.packbits(mask, bitorder="little")
    words = packed.view(np.dtype("<u8"))
    return TermSegment(base=plan.segment_base(index),
                       words=words,
                       count=int(np.count_nonzero(mask)))


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit count, else GAPLAB_THREADS, else available parallelism."""
    if threads is not None:
        n = int(threads)
    else:
        env = os.environ.get(THREADS_ENV_VAR)
        n = int(env) if env else (os.cpu_count() or 1)
    if n < 1:
        raise InvalidConfigError(f"thread count must be >= 1, got {n}")
    return n


def iter_segments(plan: SegmentPlan, threads: Optional[int] = None,
                  start: int = 0, stop: Optional[int] = None) -> Iterator[TermSegment]:
    """Yield segments [start, stop) in index order regardless of worker count.

    A bounded submission window keeps memory flat on long runs; results are
    consumed strictly in index order so downstream folds see a deterministic
    stream.
    """
    total = plan.num_segments
    stop = total if stop is None else min(stop, total)
    if start < 0 or start > stop:
        raise InvalidArgumentError(f"bad segment window [{start}, {stop})")
    primes = base_primes(plan.limit)
    workers = resolve_threads(threads)
    if workers == 1 or stop - start <= 1:
        for i in range(start, stop):
            yield sieve_segment(plan, i, primes)
        return

    window = workers * 2
    pool = ThreadPoolExecutor(max_workers=workers)
    try:
        pending: deque = deque()
        nxt = start
        while nxt < stop and len(pending) < window:
            pending.append(pool.submit(sieve_segment, plan, nxt, primes))
            nxt += 1
        while pending:
            seg = pending.popleft().result()
            if nxt < stop:
                pending.append(pool.submit(sieve_segment, plan, nxt, primes))
                nxt += 1
            yield seg
    finally:
        pool.shutdown(wait=False, cancel_futures=True)


def count_terms(plan: SegmentPlan, threads: Optional[int] = None) -> int:
    """pi(limit) for primes, S(limit) for squarefree numbers."""
    return sum(seg.count for seg in iter_segments(plan, threads=threads))


def write_term_dump(plan: SegmentPlan, path: str, threads: Optional[int] = None) -> None:
    """Binary dump: 'GAPL', version byte, kind byte, limit (u64 LE), then the
    raw little-endian uint64 bitset words of every segment in order."""
    header = TERM_DUMP_MAGIC + struct.pack("<BBQ", TERM_DUMP_VERSION,
                                           plan.kind.code, plan.limit)
    with open(path, "wb") as fh:
        fh.write(header)
        for seg in iter_segments(plan, threads=threads):
            fh.write(seg.words.tobytes())


def read_term_dump(path: str) -> tuple[SequenceKind, int, np.ndarray]:
    """Load a term dump; returns (kind, limit, mask) with mask[i] <=> i+1 is a term."""
    with open(path, "rb") as fh:
        head = fh.read(14)
        if len(head) < 14 or head[:4] != TERM_DUMP_MAGIC:
            raise InvalidArgumentError(f"{path}: not a term dump (bad magic)")
        version, kind_code, limit = struct.unpack("<BBQ", head[4:])
        if version != TERM_DUMP_VERSION:
            raise InvalidArgumentError(f"{path}: unsupported term dump version {version}")
        words = np.frombuffer(fh.read(), dtype=np.dtype("<u8"))
    mask = np.unpackbits(words.view(np.uint8), bitorder="little").view(np.bool_)
    return SequenceKind.from_code(kind_code), int(limit), mask
