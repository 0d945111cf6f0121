import struct
import typing as t

import numpy as np

from electorate.constants import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from electorate.exceptions import CorruptSnapshot, UnsortedPayload
from electorate.models import Snapshot

__all__: t.Tuple[str, ...] = (
    "encode_varints",
    "decode_varints",
    "encode_snapshot",
    "decode_snapshot",
)

_VERSION = struct.Struct("<HH")
_TAIL = struct.Struct("<qQ")
_MAX_GROUPS = 10
_CHUNK = 1 << 18
_SHIFTS = np.arange(_MAX_GROUPS, dtype=np.uint64) * np.uint64(7)


def encode_varints(values: np.ndarray) -> bytes:
    """LEB128-encode unsigned 64-bit integers.

    Parameters
    ----------
    values: numpy.ndarray
        The integers.

    Returns
    -------
    bytes
        Seven bits per byte, least significant group first, high bit set on all but the last byte.
    """
    values = np.asarray(values, dtype=np.uint64)
    return b"".join(_encode_chunk(values[i : i + _CHUNK]) for i in range(0, values.size, _CHUNK))


def _encode_chunk(values: np.ndarray) -> bytes:
    groups = (values[:, None] >> _SHIFTS[None, :]) & np.uint64(0x7F)
    lengths = 1 + np.count_nonzero((values[:, None] >> _SHIFTS[None, 1:]) != 0, axis=1)
    column = np.arange(_MAX_GROUPS)[None, :]
    keep = column < lengths[:, None]
    more = column < (lengths - 1)[:, None]
    encoded = groups.astype(np.uint8) | (more.astype(np.uint8) << np.uint8(7))
    return encoded[keep].tobytes()


def decode_varints(data: bytes, count: int) -> np.ndarray:
    """Decode exactly ``count`` LEB128 integers spanning all of ``data``.

    Raises
    ------
    electorate.exceptions.CorruptSnapshot
        The stream is truncated, has trailing bytes or overflows 64 bits.
    """
    raw = np.frombuffer(data, dtype=np.uint8)
    if count == 0:
        if raw.size:
            raise CorruptSnapshot(f"{raw.size} trailing payload bytes")
        return np.empty(0, dtype=np.uint64)
    last = (raw & 0x80) == 0
    ends = np.flatnonzero(last)
    if ends.size < count:
        raise CorruptSnapshot(f"Truncated payload: {ends.size} of {count} IDs")
    if ends.size > count or ends[-1] != raw.size - 1:
        raise CorruptSnapshot("Trailing bytes after the last ID")
    starts = np.empty(count, dtype=np.int64)
    starts[0] = 0
    starts[1:] = ends[:-1] + 1
    lengths = ends - starts + 1
    if int(lengths.max()) > _MAX_GROUPS:
        raise CorruptSnapshot("Varint longer than 64 bits")
    position = np.arange(raw.size) - np.repeat(starts, lengths)
    top = raw[position == _MAX_GROUPS - 1] & 0x7F
    if top.size and int(top.max()) > 1:
        raise CorruptSnapshot("Varint overflows 64 bits")
    parts = (raw & 0x7F).astype(np.uint64) << _SHIFTS[position]
    return np.bitwise_or.reduceat(parts, starts)


def encode_snapshot(snapshot: Snapshot) -> bytes:
    """Serialize a snapshot to the binary snapshot format.

    The header is the magic, u16 version, u16 label length, UTF-8 label, i64 epoch and u64 count, all little-endian.
    The payload is the varint stream of gaps between consecutive IDs, the first gap measured from zero.
    """
    label = snapshot.candidate.encode("utf-8")
    if len(label) > 0xFFFF:
        raise CorruptSnapshot("Candidate label longer than 65535 bytes", snapshot.candidate)
    gaps = np.diff(snapshot.ids, prepend=np.uint64(0))
    return b"".join(
        (
            SNAPSHOT_MAGIC,
            _VERSION.pack(SNAPSHOT_VERSION, len(label)),
            label,
            _TAIL.pack(snapshot.epoch, len(snapshot)),
            encode_varints(gaps),
        )
    )


def decode_snapshot(data: bytes, source: str = "") -> Snapshot:
    """Parse the binary snapshot format.

    Parameters
    ----------
    data: bytes
        File contents.
    source: str
        Where the bytes came from, for error context.

    Returns
    -------
    Snapshot
        The snapshot.

    Raises
    ------
    electorate.exceptions.CorruptSnapshot
        Bad magic, unsupported version or truncated data.
    electorate.exceptions.UnsortedPayload
        The decoded IDs are not strictly increasing.
    """
    offset = len(SNAPSHOT_MAGIC)
    if data[:offset] != SNAPSHOT_MAGIC:
        raise CorruptSnapshot("Not a snapshot file: bad magic", source)
    if len(data) < offset + _VERSION.size:
        raise CorruptSnapshot("Truncated header", source)
    version, label_size = _VERSION.unpack_from(data, offset)
    if version != SNAPSHOT_VERSION:
        raise CorruptSnapshot(f"Unsupported snapshot version {version}", source)
    offset += _VERSION.size
    if len(data) < offset + label_size + _TAIL.size:
        raise CorruptSnapshot("Truncated header", source)
    try:
        candidate = data[offset : offset + label_size].decode("utf-8")
    except UnicodeDecodeError as error:
        raise CorruptSnapshot("Candidate label is not UTF-8", source) from error
    offset += label_size
    epoch, count = _TAIL.unpack_from(data, offset)
    offset += _TAIL.size
    try:
        gaps = decode_varints(data[offset:], count)
    except CorruptSnapshot as error:
        raise CorruptSnapshot(error.message, source) from error
    # Cumulative sum wraps on overflow, which the ordering check rejects.
    ids = np.cumsum(gaps, dtype=np.uint64)
    if ids.size > 1 and not bool(np.all(ids[1:] > ids[:-1])):
        raise UnsortedPayload("unsorted payload", source)
    return Snapshot(candidate=candidate, captured_at=epoch, ids=ids)
