import asyncio
import pathlib
import typing as t

import aiofiles

from electorate.exceptions import CandidateMismatch, NonIncreasingTimestamps
from electorate.logger import get_logger
from electorate.models import DiffResult, GrowthPoint, Snapshot

from .codec import decode_snapshot, encode_snapshot
from .setops import difference

__all__: t.Tuple[str, ...] = (
    "SnapshotStore",
    "diff",
    "growth_series",
    "save_snapshot",
    "load_snapshot",
    "export_csv",
)

PathLike = t.Union[str, pathlib.Path]


def diff(older: Snapshot, newer: Snapshot) -> DiffResult:
    """New followers and unfollowers between two snapshots of one candidate.

    Parameters
    ----------
    older: Snapshot
        The earlier snapshot.
    newer: Snapshot
        The later snapshot.

    Returns
    -------
    DiffResult
        ``newer - older`` as new followers, ``older - newer`` as unfollowers.

    Raises
    ------
    electorate.exceptions.CandidateMismatch
        The snapshots belong to different candidates.
    electorate.exceptions.NonIncreasingTimestamps
        ``older`` was not captured strictly before ``newer``.

    Examples
    --------

    >>> older = Snapshot(candidate="c", captured_at=0, ids=[1, 2, 3, 5])
    >>> newer = Snapshot(candidate="c", captured_at=60, ids=[2, 3, 6, 7])
    >>> diff(older, newer).net_gain
    0
    """
    if older.candidate != newer.candidate:
        raise CandidateMismatch(f"Cannot diff {older.candidate!r} against {newer.candidate!r}")
    if older.captured_at >= newer.captured_at:
        raise NonIncreasingTimestamps(
            f"Older snapshot ({older.captured_at.isoformat()}) is not before newer ({newer.captured_at.isoformat()})",
            older.candidate,
        )
    return DiffResult(
        candidate=older.candidate,
        older_at=older.captured_at,
        newer_at=newer.captured_at,
        new_followers=difference(newer.ids, older.ids),
        unfollowers=difference(older.ids, newer.ids),
    )


def growth_series(snapshots: t.Iterable[Snapshot]) -> t.List[GrowthPoint]:
    """Follower count and churn of one candidate over time.

    Snapshots are ordered by capture time first. The first point carries no churn.

    Raises
    ------
    electorate.exceptions.CandidateMismatch
        The snapshots belong to different candidates.
    electorate.exceptions.NonIncreasingTimestamps
        Two snapshots share a capture time.
    """
    ordered = sorted(snapshots, key=lambda s: s.captured_at)
    if not ordered:
        return []
    points = [GrowthPoint(captured_at=ordered[0].captured_at, follower_count=len(ordered[0]))]
    for older, newer in zip(ordered, ordered[1:]):
        result = diff(older, newer)
        points.append(
            GrowthPoint(
                captured_at=newer.captured_at,
                follower_count=len(newer),
                new_followers=int(result.new_followers.size),
                unfollowers=int(result.unfollowers.size),
            )
        )
    return points


async def save_snapshot(snapshot: Snapshot, path: PathLike) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "wb") as f:
        await f.write(encode_snapshot(snapshot))
    return path


async def load_snapshot(path: PathLike) -> Snapshot:
    path = pathlib.Path(path)
    async with aiofiles.open(path, "rb") as f:
        data = await f.read()
    return decode_snapshot(data, str(path))


async def export_csv(snapshot: Snapshot, path: PathLike) -> pathlib.Path:
    """Write one decimal ID per line under a ``user_id`` header."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(map(str, snapshot.ids.tolist()))
    async with aiofiles.open(path, "w", encoding="utf-8", newline="\n") as f:
        await f.write("user_id\n")
        if body:
            await f.write(body + "\n")
    return path


class SnapshotStore(t.MutableMapping[pathlib.Path, Snapshot]):
    """Snapshot files with a bounded cache of recently used snapshots.

    Parameters
    ----------
    max_size: int
        Most snapshots held in memory; the least recently used one is evicted first. Zero disables caching.

    Attributes
    ----------
    _max_size: int
        The maximum size of the cache.
    _cache: typing.Dict[pathlib.Path, Snapshot]
        Cached snapshots, least recently used first.
    _locks: typing.Dict[pathlib.Path, asyncio.Lock]
        One writer per path.

    Examples
    --------

    >>> import asyncio
    >>> store = SnapshotStore(max_size=8)
    >>> snapshot = Snapshot(candidate="sanders", captured_at="2016-04-26T00:00:00Z", ids=[1, 2, 3])
    >>> path = asyncio.run(store.save(snapshot, "out/sanders-0426.elss"))
    >>> asyncio.run(store.load("out/sanders-0426.elss")) == snapshot
    True
    """

    def __init__(self, max_size: int = 16) -> None:
        if max_size < 0:
            raise ValueError(f"max_size must not be negative, got {max_size}")
        self._max_size = max_size
        self._cache: t.Dict[pathlib.Path, Snapshot] = {}
        self._locks: t.Dict[pathlib.Path, asyncio.Lock] = {}
        self._logger = get_logger()

    @staticmethod
    def _key(path: PathLike) -> pathlib.Path:
        return pathlib.Path(path).resolve()

    def __getitem__(self, key: pathlib.Path) -> Snapshot:
        key = self._key(key)
        self._cache[key] = self._cache.pop(key)
        return self._cache[key]

    def __setitem__(self, key: pathlib.Path, value: Snapshot) -> None:
        key = self._key(key)
        if key in self._cache:
            self._cache.pop(key)
        elif self._cache and len(self._cache) >= self._max_size:
            self._cache.pop(next(iter(self._cache)))
        if self._max_size > 0:
            self._cache[key] = value

    def __delitem__(self, key: pathlib.Path) -> None:
        del self._cache[self._key(key)]

    def __contains__(self, key: object) -> bool:
        return isinstance(key, (str, pathlib.Path)) and self._key(key) in self._cache

    def __len__(self) -> int:
        return len(self._cache)

    def __iter__(self) -> t.Iterator[pathlib.Path]:
        return iter(self._cache)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({list(self._cache.values())})"

    def _lock(self, path: pathlib.Path) -> asyncio.Lock:
        return self._locks.setdefault(path, asyncio.Lock())

    async def save(self, snapshot: Snapshot, path: PathLike) -> pathlib.Path:
        """Write a snapshot to ``path`` and cache it.

        Parameters
        ----------
        snapshot: Snapshot
            The snapshot.
        path: str | pathlib.Path
            Destination file. Parent folders are created.

        Returns
        -------
        pathlib.Path
            The written path.
        """
        key = self._key(path)
        async with self._lock(key):
            await save_snapshot(snapshot, key)
            self[key] = snapshot
        self._logger.debug(f"Saved {snapshot!r} to {path}")
        return pathlib.Path(path)

    async def load(self, path: PathLike) -> Snapshot:
        """Read a snapshot, from the cache when possible.

        Raises
        ------
        electorate.exceptions.CorruptSnapshot
            The file is not a valid snapshot.
        electorate.exceptions.UnsortedPayload
            The stored IDs are not strictly increasing.
        FileNotFoundError
            The file does not exist.
        """
        key = self._key(path)
        if key in self._cache:
            return self[key]
        async with self._lock(key):
            snapshot = await load_snapshot(key)
        self[key] = snapshot
        self._logger.debug(f"Loaded {snapshot!r} from {path}")
        return snapshot

    async def load_many(self, paths: t.Iterable[PathLike]) -> t.List[Snapshot]:
        return list(await asyncio.gather(*(self.load(p) for p in paths)))

    async def export_csv(self, path: PathLike, destination: PathLike) -> pathlib.Path:
        """Mirror a stored snapshot as CSV."""
        return await export_csv(await self.load(path), destination)

    async def diff(self, older: PathLike, newer: PathLike) -> DiffResult:
        return diff(await self.load(older), await self.load(newer))
