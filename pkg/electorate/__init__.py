"""Gender effects in candidate follower dynamics.

Snapshots of candidates' follower IDs are diffed into new followers and unfollowers,
their profile faces are classified by a small convolutional network trained on
name-derived weak labels, and pooled two-sample z-tests compare the gender
composition of those cohorts around an event.
"""
__version__ = "0.1.0"
__author__ = "electorate developers"

import typing as t

from .constants import Gender
from .exceptions import ElectorateException
from .logger import get_logger

__all__: t.Tuple[str, ...] = (
    "Gender",
    "ElectorateException",
    "get_logger",
)
