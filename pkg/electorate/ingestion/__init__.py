"""Paged follower-ID ingestion."""
import typing as t

from .fetcher import RETRY_DELAYS, Fetcher, capture_snapshot, capture_snapshots, fetch_all_ids
from .sources import (
    Clock,
    FetchCursor,
    FixtureClient,
    PageClient,
    PagedSource,
    RateLimiter,
    SystemClock,
    VirtualClock,
    fixture_root,
    parse_page,
)

__all__: t.Tuple[str, ...] = (
    "RETRY_DELAYS",
    "Fetcher",
    "capture_snapshot",
    "capture_snapshots",
    "fetch_all_ids",
    "Clock",
    "FetchCursor",
    "FixtureClient",
    "PageClient",
    "PagedSource",
    "RateLimiter",
    "SystemClock",
    "VirtualClock",
    "fixture_root",
    "parse_page",
)
