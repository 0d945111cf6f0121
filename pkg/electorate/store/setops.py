import typing as t

import numpy as np

__all__: t.Tuple[str, ...] = (
    "SEARCH_RATIO",
    "membership",
    "difference",
    "intersect_count",
)

# Above this size ratio the smaller set is binary-searched into the larger one.
SEARCH_RATIO: int = 32


def _merge_membership(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    merged = np.concatenate((values, reference))
    # Stable sort merges the two sorted runs; an equal pair always lists the ``values`` element first.
    order = np.argsort(merged, kind="stable")
    ordered = merged[order]
    equal = ordered[1:] == ordered[:-1]
    mask = np.zeros(values.size, dtype=bool)
    mask[order[:-1][equal]] = True
    return mask


def _search_membership(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    if values.size <= reference.size:
        position = np.searchsorted(reference, values)
        found = position < reference.size
        found[found] = reference[position[found]] == values[found]
        return found
    position = np.searchsorted(values, reference)
    inside = position < values.size
    position, probes = position[inside], reference[inside]
    mask = np.zeros(values.size, dtype=bool)
    mask[position[values[position] == probes]] = True
    return mask


def membership(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Marks which of ``values`` are present in ``reference``.

    Parameters
    ----------
    values: numpy.ndarray
        Strictly increasing IDs to test.
    reference: numpy.ndarray
        Strictly increasing IDs to test against.

    Returns
    -------
    numpy.ndarray
        Boolean mask aligned with ``values``.
    """
    if values.size == 0 or reference.size == 0:
        return np.zeros(values.size, dtype=bool)
    small, large = sorted((values.size, reference.size))
    if large > SEARCH_RATIO * small:
        return _search_membership(values, reference)
    return _merge_membership(values, reference)


def difference(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """IDs of ``values`` missing from ``reference``, ascending."""
    return values[~membership(values, reference)]


def intersect_count(values: np.ndarray, reference: np.ndarray) -> int:
    return int(np.count_nonzero(membership(values, reference)))
