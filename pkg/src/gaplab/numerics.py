"""Small numeric helpers shared by the streaming folds."""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import InvalidArgumentError


class CompensatedSum:
    """Neumaier compensated accumulator.

    Per-segment partials are already exactly rounded (math.fsum); this keeps
    the cross-segment merge error at one ulp regardless of run length. State
    is two doubles so it round-trips through run checkpoints bit-exactly.
    """

    __slots__ = ("total", "comp")

    def __init__(self, total: float = 0.0, comp: float = 0.0):
        self.total = total
        self.comp = comp

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


def validate_checkpoints(checkpoints: Sequence[int], limit: int,
                         minimum: int = 1, allow_empty: bool = False) -> list[int]:
    """Check a checkpoint list is strictly increasing within [minimum, limit]."""
    cps = [int(x) for x in checkpoints]
    if not cps:
        if allow_empty:
            return cps
        raise InvalidArgumentError("checkpoint list must not be empty")
    for a, b in zip(cps, cps[1:]):
        if b <= a:
            raise InvalidArgumentError(f"checkpoints must be strictly increasing, got {a} then {b}")
    if cps[0] < minimum:
        raise InvalidArgumentError(f"checkpoint {cps[0]} below minimum {minimum}")
    if cps[-1] > limit:
        raise InvalidArgumentError(f"checkpoint {cps[-1]} exceeds limit {limit}")
    return cps
