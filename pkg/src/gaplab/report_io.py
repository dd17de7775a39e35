"""Report serialization: CSV, JSON, and the binary run-checkpoint format.

Output is deterministic: field order is fixed per report type, reals are
written with shortest round-trip formatting (at most 17 significant digits),
decimals always use '.', and checkpoint files are written atomically.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import struct
import sys
import tempfile
import zlib
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

from .census import CensusCheckpoint, CensusSummary, GapEvent
from .density import ChainReport, DensityReport
from .errors import CorruptCheckpointError, InvalidArgumentError, UnsupportedVersionError
from .sequence import SequenceKind
from .summation import AbelCheck, KeyAsymptoticPoint, SweepState

CHECKPOINT_MAGIC = b"GAPC"
CHECKPOINT_VERSION = 1

# magic, version, kind, limit, last_completed_segment, carried_last_term,
# 8 doubles of partial sums, gap_sum, term_count; crc32 appended separately
_CHECKPOINT_BODY = struct.Struct("<4sBBQQQ8dQQ")


def fmt(value: Any) -> str:
    """Stable scalar formatting: shortest round-trip floats, plain ints."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, SequenceKind):
        return value.value
    if value is None:
        return ""
    return str(value)


def _abel_row(c: AbelCheck) -> list:
    return [c.x, c.lhs, c.rhs, c.abs_diff, c.gap_recip_sum, c.harmonic,
            c.gap_recip_sum / math.log(c.x)]


_CSV_SCHEMAS = {
    GapEvent: ("kind,term,prev,gap,index",
               lambda e, kind: [kind, e.term, e.prev, e.gap, e.index]),
    CensusCheckpoint: ("x,max_gap,max_cramer_ratio,max_bhp_ratio",
                       lambda c, kind: [c.x, c.max_gap, c.max_cramer_ratio, c.max_bhp_ratio]),
    AbelCheck: ("x,lhs,rhs,abs_diff,gap_recip_sum,harmonic,ratio_to_logx",
                lambda c, kind: _abel_row(c)),
}

DENSITY_CSV_HEADER = ("x,epsilon,kind,total,n_eps,delta,violator_count,"
                      "boundary_term,integral_term,m_eps_estimate")


def density_csv_row(report: DensityReport, chain: Optional[ChainReport] = None) -> list:
    row = [report.x, report.epsilon, report.kind, report.total, report.n_eps,
           report.delta, report.violator_count]
    if chain is not None:
        row += [chain.boundary_term, chain.integral_term, chain.m_eps_estimate]
    else:
        row += [None, None, None]
    return row


def render_csv(reports: Union[Any, Sequence[Any]], kind: Optional[SequenceKind] = None) -> str:
    """CSV text for a report or a homogeneous report sequence."""
    items = list(reports) if isinstance(reports, (list, tuple)) else [reports]
    if not items:
        raise InvalidArgumentError("cannot infer CSV schema from an empty report list")
    schema = _CSV_SCHEMAS.get(type(items[0]))
    if schema is None:
        raise InvalidArgumentError(f"no CSV schema for {type(items[0]).__name__}")
    header, row_fn = schema
    lines = [header]
    for item in items:
        lines.append(",".join(fmt(v) for v in row_fn(item, kind)))
    return "\n".join(lines) + "\n"


def render_density_csv(rows: Sequence[tuple[DensityReport, Optional[ChainReport]]]) -> str:
    lines = [DENSITY_CSV_HEADER]
    for report, chain in rows:
        lines.append(",".join(fmt(v) for v in density_csv_row(report, chain)))
    return "\n".join(lines) + "\n"


def empty_csv(header: str) -> str:
    return header + "\n"


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline="\n"), True


def write_text(text: str, path: str) -> None:
    out, close = _open_out(path)
    try:
        out.write(text)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot write {path}: {exc}") from exc
    finally:
        if close:
            out.close()


def write_csv(reports, path: str, kind: Optional[SequenceKind] = None) -> None:
    write_text(render_csv(reports, kind=kind), path)


def _jsonable(value: Any) -> Any:
    if isinstance(value, SequenceKind):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name))
                for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):  # numpy scalar
        return value.item()
    return value


def render_json(report: Any) -> str:
    return json.dumps(_jsonable(report), indent=2) + "\n"


def write_json(report: Any, path: str) -> None:
    write_text(render_json(report), path)


@dataclass(frozen=True)
class RunCheckpoint:
    """Wire image of a resumable run, restartable at a segment boundary."""

    kind: SequenceKind
    limit: int
    last_completed_segment: int
    carried_last_term: int
    partial_sums: tuple[float, ...]  # 8 doubles, see checkpoint_from_state
    gap_sum: int
    term_count: int


def checkpoint_from_state(state: SweepState) -> RunCheckpoint:
    """Snapshot a sweep state. Valid only at a segment boundary."""
    if state.next_segment < 1:
        raise InvalidArgumentError("no completed segment to checkpoint")
    sums = (state.gap_recip_sum, state.harmonic_sum, state.integral_sum,
            state.gap_recip_comp, state.harmonic_comp, 0.0, 0.0, 0.0)
    return RunCheckpoint(kind=state.kind, limit=state.limit,
                         last_completed_segment=state.next_segment - 1,
                         carried_last_term=state.carried_last_term,
                         partial_sums=sums, gap_sum=state.gap_sum,
                         term_count=state.term_count)


def state_from_checkpoint(cp: RunCheckpoint) -> SweepState:
    s = cp.partial_sums
    return SweepState(kind=cp.kind, limit=cp.limit,
                      next_segment=cp.last_completed_segment + 1,
                      carried_last_term=cp.carried_last_term,
                      term_count=cp.term_count, gap_sum=cp.gap_sum,
                      gap_recip_sum=s[0], gap_recip_comp=s[3],
                      harmonic_sum=s[1], harmonic_comp=s[4], integral_sum=s[2])


def checkpoint_save(cp: Union[RunCheckpoint, SweepState], path: str) -> None:
    """Atomically persist a checkpoint (write to temp, then rename)."""
    if isinstance(cp, SweepState):
        cp = checkpoint_from_state(cp)
    body = _CHECKPOINT_BODY.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
                                 cp.kind.code, cp.limit,
                                 cp.last_completed_segment, cp.carried_last_term,
                                 *cp.partial_sums, cp.gap_sum, cp.term_count)
    blob = body + struct.pack("<I", zlib.crc32(body))
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gapc-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def checkpoint_load(path: str) -> RunCheckpoint:
    """Load and validate a checkpoint; never returns a partial read."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise CorruptCheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    expected = _CHECKPOINT_BODY.size + 4
    if len(blob) != expected:
        raise CorruptCheckpointError(
            f"{path}: checkpoint is {len(blob)} bytes, expected {expected}")
    body, crc_bytes = blob[:-4], blob[-4:]
    if body[:4] != CHECKPOINT_MAGIC:
        raise CorruptCheckpointError(f"{path}: bad magic {body[:4]!r}")
    if struct.unpack("<I", crc_bytes)[0] != zlib.crc32(body):
        raise CorruptCheckpointError(f"{path}: crc32 mismatch")
    fields = _CHECKPOINT_BODY.unpack(body)
    (_, version, kind_code, limit, last_seg, carried, *rest) = fields
    if version != CHECKPOINT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: checkpoint version {version} not supported (expected {CHECKPOINT_VERSION})")
    sums = tuple(rest[:8])
    gap_sum, term_count = rest[8], rest[9]
    return RunCheckpoint(kind=SequenceKind.from_code(kind_code), limit=limit,
                         last_completed_segment=last_seg, carried_last_term=carried,
                         partial_sums=sums, gap_sum=gap_sum, term_count=term_count)
