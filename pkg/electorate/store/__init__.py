"""Snapshot persistence and diffing."""
import typing as t

from .codec import decode_snapshot, decode_varints, encode_snapshot, encode_varints
from .setops import SEARCH_RATIO, difference, intersect_count, membership
from .store import SnapshotStore, diff, export_csv, growth_series, load_snapshot, save_snapshot

__all__: t.Tuple[str, ...] = (
    "decode_snapshot",
    "decode_varints",
    "encode_snapshot",
    "encode_varints",
    "SEARCH_RATIO",
    "difference",
    "intersect_count",
    "membership",
    "SnapshotStore",
    "diff",
    "export_csv",
    "growth_series",
    "load_snapshot",
    "save_snapshot",
)
