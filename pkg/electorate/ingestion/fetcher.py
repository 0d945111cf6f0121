import asyncio
import datetime
import typing as t

import numpy as np

from electorate.exceptions import MalformedPage, SourceUnavailable
from electorate.logger import get_logger
from electorate.models import Snapshot

from .sources import Clock, FetchCursor, PagedSource, RateLimiter, SystemClock

__all__: t.Tuple[str, ...] = (
    "RETRY_DELAYS",
    "Fetcher",
    "fetch_all_ids",
    "capture_snapshot",
    "capture_snapshots",
)

# Waits before the first, second and third retry of a page.
RETRY_DELAYS: t.Tuple[float, ...] = (1.0, 2.0, 4.0)
TRANSIENT_ERRORS: t.Tuple[t.Type[BaseException], ...] = (SourceUnavailable, OSError, TimeoutError)


class Fetcher:
    """Runs one fetch job over a paged source.

    Parameters
    ----------
    source: PagedSource
        The source to fetch.
    clock: Clock
        Time source for rate limiting and backoff. Defaults to the system clock.

    Attributes
    ----------
    cursor: FetchCursor
        Progress of the job.
    """

    def __init__(self, source: PagedSource, clock: t.Optional[Clock] = None) -> None:
        self.source = source
        self.clock = clock or SystemClock()
        self.cursor = FetchCursor(source_id=source.source_id)
        self._limiter = RateLimiter(source.rate_limit, self.clock)
        self._logger = get_logger()

    async def _request(self) -> t.Tuple[np.ndarray, t.Optional[str]]:
        attempts = 0
        while True:
            await self._limiter.acquire()
            attempts += 1
            self.cursor.requests += 1
            try:
                return await self.source.client.get_page(self.cursor.next_page_token)
            except MalformedPage as error:
                if error.page_index < 0:
                    error.page_index = self.cursor.pages_seen
                raise
            except TRANSIENT_ERRORS as error:
                if attempts > len(RETRY_DELAYS):
                    self._logger.error(f"Giving up on {self.source.source_id} page {self.cursor.pages_seen}")
                    raise SourceUnavailable(
                        f"Page {self.cursor.pages_seen} unavailable: {error}", self.source.source_id, attempts
                    ) from error
                delay = RETRY_DELAYS[attempts - 1]
                self._logger.warning(
                    f"Request {attempts} for {self.source.source_id} page {self.cursor.pages_seen} failed, "
                    f"retrying in {delay:g}s"
                )
                await self.clock.sleep(delay)

    async def run(self) -> np.ndarray:
        """Fetch every page.

        Returns
        -------
        numpy.ndarray
            All IDs in arrival order, duplicates included.
        """
        pages: t.List[np.ndarray] = []
        while not self.cursor.done:
            ids, next_token = await self._request()
            pages.append(np.asarray(ids, dtype=np.uint64))
            self.cursor.advance(len(ids), next_token)
            self._logger.debug(f"{self.source.source_id}: page {self.cursor.pages_seen} with {len(ids)} IDs")
        self._logger.info(
            f"Fetched {self.cursor.ids_seen} IDs from {self.source.source_id} "
            f"in {self.cursor.pages_seen} pages ({self.cursor.requests} requests)"
        )
        return np.concatenate(pages) if pages else np.empty(0, dtype=np.uint64)


async def fetch_all_ids(source: PagedSource, *, clock: t.Optional[Clock] = None) -> np.ndarray:
    """Fetches all follower IDs of a source.

    Parameters
    ----------
    source: PagedSource
        The source to fetch.
    clock: typing.Optional[Clock]
        Time source. Tests pass a ``VirtualClock``.

    Returns
    -------
    numpy.ndarray
        IDs of every page in arrival order; duplicates across pages are kept.

    Raises
    ------
    electorate.exceptions.SourceUnavailable
        A page still failed after three retries.
    electorate.exceptions.MalformedPage
        A page could not be parsed.

    Examples
    --------

    >>> import asyncio
    >>> from electorate.ingestion import PagedSource, fetch_all_ids
    >>> source = PagedSource.from_fixture("sanders", "tests/fixtures")
    >>> ids = asyncio.run(fetch_all_ids(source))
    """
    return await Fetcher(source, clock).run()


async def capture_snapshot(
    source: PagedSource,
    candidate: str,
    captured_at: t.Union[datetime.datetime, int, str],
    *,
    clock: t.Optional[Clock] = None,
) -> Snapshot:
    """Fetches a source and materializes its sorted, deduplicated snapshot.

    Parameters
    ----------
    source: PagedSource
        The source to fetch.
    candidate: str
        The candidate label.
    captured_at: datetime.datetime | int | str
        Capture time (datetime, epoch seconds or ISO-8601), stored in UTC.
    clock: typing.Optional[Clock]
        Time source.

    Returns
    -------
    Snapshot
        The snapshot.
    """
    ids = await fetch_all_ids(source, clock=clock)
    return Snapshot.from_unsorted(candidate, captured_at, ids)


async def capture_snapshots(
    sources: t.Mapping[str, PagedSource],
    captured_at: t.Union[datetime.datetime, int, str],
    *,
    clock_factory: t.Optional[t.Callable[[], Clock]] = None,
) -> t.Dict[str, Snapshot]:
    """Fetches several sources concurrently, one job per source.

    Parameters
    ----------
    sources: typing.Mapping[str, PagedSource]
        Candidate label to source.
    captured_at: datetime.datetime | int | str
        Shared capture time.
    clock_factory: typing.Optional[typing.Callable[[], Clock]]
        Builds a separate clock per job.

    Returns
    -------
    typing.Dict[str, Snapshot]
        Candidate label to snapshot, in the order of ``sources``.
    """
    labels = list(sources)
    snapshots = await asyncio.gather(
        *(
            capture_snapshot(sources[label], label, captured_at, clock=clock_factory() if clock_factory else None)
            for label in labels
        )
    )
    return dict(zip(labels, snapshots))
