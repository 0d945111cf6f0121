import datetime
import typing as t

import attrs
import numpy as np

from electorate.exceptions import ConfigError, UnsortedPayload

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "Snapshot",
    "DiffResult",
    "GrowthPoint",
    "as_id_array",
    "to_utc",
)

IdArray = np.ndarray


def to_utc(value: t.Union[datetime.datetime, int, float, str]) -> datetime.datetime:
    """Normalize a timestamp to an aware UTC datetime with seconds precision.

    Naive datetimes are taken as UTC. Integers and floats are epoch seconds; strings are ISO-8601 and raise
    :class:`~electorate.exceptions.ConfigError` when they do not parse.
    """
    if isinstance(value, str):
        try:
            value = datetime.datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError as error:
            raise ConfigError(f"Invalid timestamp {value!r}") from error
    if isinstance(value, (int, float)):
        value = datetime.datetime.fromtimestamp(int(value), tz=datetime.timezone.utc)
    if value.tzinfo is None:
        value = value.replace(tzinfo=datetime.timezone.utc)
    return value.astimezone(datetime.timezone.utc).replace(microsecond=0)


def as_id_array(ids: t.Union[IdArray, t.Iterable[int]]) -> IdArray:
    """Coerce user IDs into a contiguous unsigned 64-bit array."""
    if isinstance(ids, np.ndarray):
        if ids.dtype != np.uint64:
            if ids.size and np.issubdtype(ids.dtype, np.signedinteger) and int(ids.min()) < 0:
                raise ValueError("User IDs must be non-negative")
            ids = ids.astype(np.uint64)
        return np.ascontiguousarray(ids)
    return np.fromiter((int(i) for i in ids), dtype=np.uint64)


def _owned_ids(ids: t.Union[IdArray, t.Iterable[int]]) -> IdArray:
    array = as_id_array(ids)
    return array.copy() if array is ids else array


def _check_sorted(instance: "Snapshot", attribute: "attrs.Attribute[IdArray]", value: IdArray) -> None:
    if value.ndim != 1:
        raise UnsortedPayload("Snapshot IDs must be one-dimensional", instance.candidate)
    if value.size > 1 and not bool(np.all(value[1:] > value[:-1])):
        raise UnsortedPayload("unsorted payload", instance.candidate)


@attrs.define(slots=True, frozen=True, kw_only=True, eq=False)
class Snapshot(BaseModel):
    """A candidate's follower-ID set at one instant.

    Attributes
    ----------
    candidate: str
        The candidate label.
    captured_at: datetime.datetime
        UTC capture time, seconds precision.
    ids: numpy.ndarray
        Strictly increasing unsigned 64-bit user IDs. The array is made read-only.
    """

    candidate: str
    captured_at: datetime.datetime = attrs.field(converter=to_utc)
    ids: IdArray = attrs.field(converter=_owned_ids, validator=_check_sorted, repr=False)

    def __attrs_post_init__(self) -> None:
        self.ids.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (
            self.candidate == other.candidate
            and self.captured_at == other.captured_at
            and np.array_equal(self.ids, other.ids)
        )

    def __hash__(self) -> int:
        return hash((self.candidate, self.captured_at, len(self)))

    def __len__(self) -> int:
        return int(self.ids.size)

    def __repr__(self) -> str:
        return f"Snapshot(candidate={self.candidate!r}, captured_at={self.captured_at.isoformat()}, count={len(self)})"

    @property
    def count(self) -> int:
        """Number of followers."""
        return len(self)

    @property
    def epoch(self) -> int:
        """Capture time as epoch seconds."""
        return int(self.captured_at.timestamp())

    @classmethod
    def from_unsorted(
        cls, candidate: str, captured_at: t.Union[datetime.datetime, int, str], ids: t.Iterable[int]
    ) -> "Snapshot":
        """Build a snapshot from IDs in any order, dropping duplicates."""
        return cls(candidate=candidate, captured_at=captured_at, ids=np.unique(as_id_array(ids)))

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {"candidate": self.candidate, "captured_at": self.captured_at.isoformat(), "count": self.count}


@attrs.define(slots=True, frozen=True, kw_only=True, eq=False)
class DiffResult(BaseModel):
    """New followers and unfollowers between two snapshots of one candidate.

    Attributes
    ----------
    candidate: str
        The candidate label.
    older_at: datetime.datetime
        Capture time of the older snapshot.
    newer_at: datetime.datetime
        Capture time of the newer snapshot.
    new_followers: numpy.ndarray
        IDs in the newer snapshot only, ascending.
    unfollowers: numpy.ndarray
        IDs in the older snapshot only, ascending.
    """

    candidate: str
    older_at: datetime.datetime
    newer_at: datetime.datetime
    new_followers: IdArray = attrs.field(repr=False)
    unfollowers: IdArray = attrs.field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffResult):
            return NotImplemented
        return np.array_equal(self.new_followers, other.new_followers) and np.array_equal(
            self.unfollowers, other.unfollowers
        )

    @property
    def net_gain(self) -> int:
        """#(new followers) - #(unfollowers)."""
        return int(self.new_followers.size) - int(self.unfollowers.size)

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            "candidate": self.candidate,
            "older_at": self.older_at.isoformat(),
            "newer_at": self.newer_at.isoformat(),
            "new_followers": int(self.new_followers.size),
            "unfollowers": int(self.unfollowers.size),
            "net_gain": self.net_gain,
        }


@attrs.define(slots=True, frozen=True, kw_only=True)
class GrowthPoint(BaseModel):
    """One row of a follower growth series.

    Attributes
    ----------
    captured_at: datetime.datetime
        Capture time of the snapshot.
    follower_count: int
        Followers at that time.
    new_followers: int
        Followers gained since the previous snapshot.
    unfollowers: int
        Followers lost since the previous snapshot.
    """

    captured_at: datetime.datetime
    follower_count: int
    new_followers: int = 0
    unfollowers: int = 0

    @property
    def net_gain(self) -> int:
        return self.new_followers - self.unfollowers

    def to_row(self) -> t.List[t.Union[str, int]]:
        return [self.captured_at.isoformat(), self.follower_count, self.new_followers, self.unfollowers, self.net_gain]
