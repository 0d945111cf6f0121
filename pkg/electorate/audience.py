"""Set analytics over follower snapshots."""
import typing as t

import numpy as np

from electorate.models import DestinationRates, GroupPartition, Snapshot, as_id_array
from electorate.store import intersect_count, membership

__all__: t.Tuple[str, ...] = (
    "contains",
    "partition_groups",
    "destination_rates",
)


def contains(snapshot: Snapshot, user_id: int) -> bool:
    """Binary-searches a snapshot for one user ID.

    Examples
    --------

    >>> snapshot = Snapshot(candidate="c", captured_at=0, ids=[3, 9, 27])
    >>> contains(snapshot, 9), contains(snapshot, 10)
    (True, False)
    """
    if not 0 <= user_id < 2**64 or len(snapshot) == 0:
        return False
    probe = np.uint64(user_id)
    position = int(np.searchsorted(snapshot.ids, probe))
    return position < len(snapshot) and snapshot.ids[position] == probe


def partition_groups(focal: Snapshot, a: Snapshot, b: Snapshot) -> GroupPartition:
    """Splits the focal candidate's followers by whether they also follow ``a`` and ``b``.

    Parameters
    ----------
    focal: Snapshot
        The candidate whose followers are partitioned.
    a: Snapshot
        Candidate A.
    b: Snapshot
        Candidate B.

    Returns
    -------
    GroupPartition
        Four disjoint ascending groups covering the focal snapshot.
    """
    in_a = membership(focal.ids, a.ids)
    in_b = membership(focal.ids, b.ids)
    return GroupPartition(
        focal=focal.candidate,
        a=a.candidate,
        b=b.candidate,
        group_a_only=focal.ids[in_a & ~in_b],
        group_b_only=focal.ids[in_b & ~in_a],
        group_both=focal.ids[in_a & in_b],
        group_focal_only=focal.ids[~(in_a | in_b)],
    )


def destination_rates(
    cohort: t.Union[np.ndarray, t.Iterable[int]],
    destinations: t.Union[t.Mapping[str, Snapshot], t.Iterable[Snapshot]],
) -> DestinationRates:
    """Fraction of a cohort found in each destination snapshot.

    Parameters
    ----------
    cohort: numpy.ndarray
        Ascending IDs, e.g. a candidate's unfollowers.
    destinations: typing.Mapping[str, Snapshot] | typing.Iterable[Snapshot]
        Destination snapshots, keyed by label or labelled by their candidate.

    Returns
    -------
    DestinationRates
        ``|cohort & d| / |cohort|`` per destination, 0 for an empty cohort.
    """
    ids = as_id_array(cohort)
    named = destinations.items() if isinstance(destinations, t.Mapping) else ((s.candidate, s) for s in destinations)
    rates = {label: (intersect_count(ids, snapshot.ids) / ids.size if ids.size else 0.0) for label, snapshot in named}
    return DestinationRates(cohort_size=int(ids.size), rates=rates)
