import asyncio
import collections
import os
import pathlib
import time
import typing as t

import aiofiles
import attrs
import numpy as np

from electorate.constants import DEFAULT_PAGE_SIZE, FIXTURE_DIR_ENV
from electorate.exceptions import ConfigError, MalformedPage, SourceUnavailable

__all__: t.Tuple[str, ...] = (
    "Clock",
    "SystemClock",
    "VirtualClock",
    "PageClient",
    "FixtureClient",
    "PagedSource",
    "FetchCursor",
    "RateLimiter",
    "fixture_root",
    "parse_page",
)

Page = t.Tuple[np.ndarray, t.Optional[str]]
MAX_ID: int = 2**64 - 1
WINDOW_SECONDS: float = 60.0


@t.runtime_checkable
class Clock(t.Protocol):
    """Time source used for rate limiting and retry backoff."""

    def now(self) -> float:
        ...

    async def sleep(self, seconds: float) -> None:
        ...


class SystemClock:
    """Wall-clock time with real sleeps."""

    def now(self) -> float:
        return time.monotonic()

    async def sleep(self, seconds: float) -> None:
        await asyncio.sleep(seconds)


class VirtualClock:
    """A clock that advances instantly when slept on.

    Attributes
    ----------
    sleeps: typing.List[float]
        Every requested sleep, in order.
    """

    def __init__(self, start: float = 0.0) -> None:
        self._now = start
        self.sleeps: t.List[float] = []

    def now(self) -> float:
        return self._now

    async def sleep(self, seconds: float) -> None:
        self.sleeps.append(seconds)
        self._now += max(seconds, 0.0)
        await asyncio.sleep(0)


@t.runtime_checkable
class PageClient(t.Protocol):
    """A paged follower-ID backend.

    ``get_page(None)`` returns the first page. The returned token is ``None`` after the last page.
    """

    async def get_page(self, token: t.Optional[str]) -> Page:
        ...


def fixture_root(path: t.Optional[t.Union[str, pathlib.Path]] = None) -> pathlib.Path:
    """Resolves the fixture root from an explicit path or ``ELECTORATE_FIXTURE_DIR``.

    Raises
    ------
    electorate.exceptions.ConfigError
        Neither is set.
    """
    if path is not None:
        return pathlib.Path(path)
    env = os.environ.get(FIXTURE_DIR_ENV)
    if not env:
        raise ConfigError(f"No fixture directory given and {FIXTURE_DIR_ENV} is not set")
    return pathlib.Path(env)


def parse_page(text: str, source_id: str, page_index: int) -> np.ndarray:
    """Parses a newline-delimited page of decimal IDs.

    Raises
    ------
    electorate.exceptions.MalformedPage
        A line is not an unsigned 64-bit decimal integer.
    """
    values: t.List[int] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if not (line.isascii() and line.isdigit()) or int(line) > MAX_ID:
            raise MalformedPage(f"Line {number} is not a 64-bit user ID: {line[:32]!r}", source_id, page_index)
        values.append(int(line))
    return np.array(values, dtype=np.uint64)


class FixtureClient:
    """Serves pages from ``<root>/<source_id>.page<k>.txt`` files, k from 0.

    Parameters
    ----------
    source_id: str
        The source whose pages to serve.
    root: pathlib.Path | str | None
        Fixture root. Defaults to ``ELECTORATE_FIXTURE_DIR``.
    """

    def __init__(self, source_id: str, root: t.Optional[t.Union[str, pathlib.Path]] = None) -> None:
        self.source_id = source_id
        self.root = fixture_root(root)

    def page_path(self, index: int) -> pathlib.Path:
        return self.root / f"{self.source_id}.page{index}.txt"

    async def get_page(self, token: t.Optional[str]) -> Page:
        index = 0 if token is None else int(token)
        path = self.page_path(index)
        try:
            async with aiofiles.open(path, "r", encoding="utf-8") as f:
                text = await f.read()
        except FileNotFoundError as error:
            raise SourceUnavailable(f"Page file {path.name} not found", self.source_id) from error
        except UnicodeDecodeError as error:
            raise MalformedPage("Page is not UTF-8 text", self.source_id, index) from error
        ids = parse_page(text, self.source_id, index)
        next_token = str(index + 1) if self.page_path(index + 1).exists() else None
        return ids, next_token


@attrs.define(slots=True, kw_only=True)
class PagedSource:
    """A paged follower-ID source.

    Attributes
    ----------
    source_id: str
        Opaque source identifier.
    client: PageClient
        Backend serving the pages.
    page_size: int
        Nominal IDs per page.
    rate_limit: int
        Maximum requests per rolling minute, 0 for unlimited.
    """

    source_id: str
    client: PageClient = attrs.field(repr=False)
    page_size: int = attrs.field(default=DEFAULT_PAGE_SIZE, validator=attrs.validators.gt(0))
    rate_limit: int = attrs.field(default=0, validator=attrs.validators.ge(0))

    @classmethod
    def from_fixture(
        cls,
        source_id: str,
        root: t.Optional[t.Union[str, pathlib.Path]] = None,
        *,
        page_size: int = DEFAULT_PAGE_SIZE,
        rate_limit: int = 0,
    ) -> "PagedSource":
        return cls(
            source_id=source_id,
            client=FixtureClient(source_id, root),
            page_size=page_size,
            rate_limit=rate_limit,
        )


@attrs.define(slots=True, kw_only=True)
class FetchCursor:
    """Progress of one fetch job.

    Attributes
    ----------
    source_id: str
        The source being fetched.
    next_page_token: typing.Optional[str]
        Token of the next page; ``None`` once the end is reached.
    ids_seen: int
        IDs received so far.
    pages_seen: int
        Pages received so far.
    requests: int
        Requests issued, retries included.
    done: bool
        Whether the last page has been received.
    """

    source_id: str
    next_page_token: t.Optional[str] = None
    ids_seen: int = 0
    pages_seen: int = 0
    requests: int = 0
    done: bool = False
    _visited: t.Set[t.Optional[str]] = attrs.field(factory=set, repr=False)

    def advance(self, received: int, next_token: t.Optional[str]) -> None:
        """Record a received page and move to ``next_token``.

        Raises
        ------
        electorate.exceptions.MalformedPage
            The source handed back a token that was already fetched.
        """
        self._visited.add(self.next_page_token)
        self.ids_seen += received
        self.pages_seen += 1
        if next_token is None:
            self.next_page_token = None
            self.done = True
            return
        if next_token in self._visited:
            raise MalformedPage(f"Page token {next_token!r} was already fetched", self.source_id, self.pages_seen)
        self.next_page_token = next_token


class RateLimiter:
    """Keeps requests within ``limit`` per rolling 60-second window.

    Parameters
    ----------
    limit: int
        Requests per window, 0 for unlimited.
    clock: Clock
        Time source.
    """

    def __init__(self, limit: int, clock: Clock) -> None:
        self.limit = limit
        self.clock = clock
        self._issued: t.Deque[float] = collections.deque()

    def _expire(self, now: float) -> None:
        while self._issued and now - self._issued[0] >= WINDOW_SECONDS:
            self._issued.popleft()

    async def acquire(self) -> None:
        """Wait until one more request fits in the window, then record it."""
        if self.limit == 0:
            return
        self._expire(self.clock.now())
        while len(self._issued) >= self.limit:
            await self.clock.sleep(self._issued[0] + WINDOW_SECONDS - self.clock.now())
            self._expire(self.clock.now())
        self._issued.append(self.clock.now())
