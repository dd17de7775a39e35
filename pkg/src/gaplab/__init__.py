"""gaplab: prime and squarefree gap statistics at scale.

Segmented bitset sieving of the two sequences, gap censuses with record and
ratio tracking, exact integer ledgers with a partial-summation identity
checker, gap-threshold density reports, and deterministic CSV/JSON/binary
reporting with resumable run checkpoints.
"""

from .census import (CensusCheckpoint, CensusSummary, GapChunk, GapEvent,
                     census, census_series, cramer_ratio_series,
                     gaps_from_terms, iter_gap_chunks)
from .density import (ChainReport, DensityReport, ThresholdCurve, chain_report,
                      chain_sweep, delta_series, density_report, density_series,
                      threshold)
from .errors import (CheckpointError, CorruptCheckpointError, GaplabError,
                     InvalidArgumentError, InvalidConfigError,
                     InvalidRangeError, UnsupportedVersionError)
from .report_io import (RunCheckpoint, checkpoint_from_state, checkpoint_load,
                        checkpoint_save, state_from_checkpoint, write_csv,
                        write_json)
from .sequence import (DEFAULT_SEGMENT_LEN, SegmentPlan, SequenceKind,
                       TermSegment, count_terms, iter_segments, plan_segments,
                       read_term_dump, sieve_segment, write_term_dump)
from .summation import (AbelCheck, KeyAsymptoticPoint, LedgerBoundsReport,
                        LedgerPoint, SweepState, abel_check, abel_sweep,
                        key_asymptotic_series, ledger_at, ledger_bounds_check)

__version__ = "0.1.0"
