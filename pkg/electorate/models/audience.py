import typing as t

import attrs
import numpy as np

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "GroupPartition",
    "DestinationRates",
    "GROUP_NAMES",
)

GROUP_NAMES: t.Tuple[str, ...] = ("group_a_only", "group_b_only", "group_both", "group_focal_only")


@attrs.define(slots=True, frozen=True, kw_only=True, eq=False)
class GroupPartition(BaseModel):
    """The four-group partition of a focal candidate's followers by cross-following.

    Attributes
    ----------
    focal: str
        Label of the focal candidate.
    a: str
        Label of candidate A.
    b: str
        Label of candidate B.
    group_a_only: numpy.ndarray
        Follow focal and A, not B.
    group_b_only: numpy.ndarray
        Follow focal and B, not A.
    group_both: numpy.ndarray
        Follow focal, A and B.
    group_focal_only: numpy.ndarray
        Follow focal only.
    """

    focal: str
    a: str
    b: str
    group_a_only: np.ndarray = attrs.field(repr=False)
    group_b_only: np.ndarray = attrs.field(repr=False)
    group_both: np.ndarray = attrs.field(repr=False)
    group_focal_only: np.ndarray = attrs.field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupPartition):
            return NotImplemented
        return all(np.array_equal(self.group(name), other.group(name)) for name in GROUP_NAMES)

    def group(self, name: str) -> np.ndarray:
        """Gets a group by its field name."""
        if name not in GROUP_NAMES:
            raise ValueError(f"Invalid group: {name}, valid groups: {GROUP_NAMES}")
        return t.cast(np.ndarray, getattr(self, name))

    @property
    def total(self) -> int:
        return sum(int(self.group(name).size) for name in GROUP_NAMES)

    def counts(self) -> t.Dict[str, int]:
        return {name: int(self.group(name).size) for name in GROUP_NAMES}

    def shares(self) -> t.Dict[str, float]:
        """Share of the focal followers in each group; zeros for an empty focal snapshot."""
        total = self.total
        return {name: (count / total if total else 0.0) for name, count in self.counts().items()}

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {"focal": self.focal, "a": self.a, "b": self.b, "counts": self.counts(), "shares": self.shares()}


@attrs.define(slots=True, frozen=True, kw_only=True)
class DestinationRates(BaseModel):
    """Fraction of a cohort present in each destination snapshot.

    Attributes
    ----------
    cohort_size: int
        Size of the cohort.
    rates: typing.Dict[str, float]
        Destination label to fraction in [0, 1]. Fractions need not sum to 1.
    """

    cohort_size: int
    rates: t.Dict[str, float] = attrs.field(factory=dict)

    def __getitem__(self, destination: str) -> float:
        return self.rates[destination]
