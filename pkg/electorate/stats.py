"""Pooled two-sample z-tests of proportions."""
import math
import typing as t

import numpy as np

from electorate.affinity import phi
from electorate.constants import Gender
from electorate.exceptions import EmptyCohort, InfeasiblePooledProportion
from electorate.models import DegenerateTest, GenderComposition, GroupPartition, TestOutcome, ZTestResult

__all__: t.Tuple[str, ...] = (
    "two_sided_p",
    "proportion_z",
    "two_sample_z",
    "group_share_test",
    "invert_pooled_variance",
    "composition_from_predictions",
)


def two_sided_p(z: float) -> float:
    """``2 * (1 - Phi(|z|))``, computed as ``2 * Phi(-|z|)``."""
    return min(1.0, 2.0 * phi(-abs(z)))


def proportion_z(
    x1: int,
    n1: int,
    x2: int,
    n2: int,
    *,
    tested_class: str = "",
    labels: t.Tuple[str, str] = ("", ""),
) -> TestOutcome:
    """Pooled z-test of ``x2/n2`` against ``x1/n1``.

    Parameters
    ----------
    x1: int
        Successes in the first sample.
    n1: int
        Size of the first sample.
    x2: int
        Successes in the second sample.
    n2: int
        Size of the second sample.
    tested_class: str
        What the successes count, for the report.
    labels: typing.Tuple[str, str]
        Sample labels, for the report.

    Returns
    -------
    ZTestResult | DegenerateTest
        The statistic, or a degenerate outcome when every member of both samples is in the same class.

    Raises
    ------
    electorate.exceptions.EmptyCohort
        A sample is empty.
    """
    if n1 <= 0 or n2 <= 0:
        empty = labels[0] if n1 <= 0 else labels[1]
        raise EmptyCohort("Cannot test an empty cohort", empty)
    p1, p2 = x1 / n1, x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return DegenerateTest(
            reason=f"pooled proportion is {pooled:g}",
            p1=p1,
            p2=p2,
            pooled_p=pooled,
            n1=n1,
            n2=n2,
            tested_class=tested_class,
            labels=labels,
        )
    z = (p2 - p1) / math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    return ZTestResult(
        z=z,
        p_value=two_sided_p(z),
        p1=p1,
        p2=p2,
        pooled_p=pooled,
        n1=n1,
        n2=n2,
        tested_class=tested_class,
        labels=labels,
    )


def two_sample_z(
    before: GenderComposition, after: GenderComposition, tested_class: Gender = Gender.MALE
) -> TestOutcome:
    """Tests whether the ``tested_class`` share changed from ``before`` to ``after``.

    Examples
    --------

    >>> result = two_sample_z(
    ...     GenderComposition(male_count=20012, female_count=20076),
    ...     GenderComposition(male_count=22388, female_count=12533),
    ... )
    >>> round(result.z, 1)
    39.1
    """
    tested_class = Gender.parse(tested_class)
    return proportion_z(
        before.count(tested_class),
        before.total,
        after.count(tested_class),
        after.total,
        tested_class=tested_class.value,
        labels=(before.label, after.label),
    )


def group_share_test(earlier: GroupPartition, later: GroupPartition, group: str) -> TestOutcome:
    """Tests whether one cross-following group's share of the focal followers changed."""
    return proportion_z(
        int(earlier.group(group).size),
        earlier.total,
        int(later.group(group).size),
        later.total,
        tested_class=group,
        labels=("earlier", "later"),
    )


def invert_pooled_variance(delta_p: float, z: float, n1: int, n2: int) -> t.List[float]:
    """Pooled proportions consistent with a published share change and z value.

    Solves ``p (1 - p) = (delta_p / z)^2 / (1/n1 + 1/n2)`` and keeps the roots in (0, 1).

    Returns
    -------
    typing.List[float]
        Ascending roots; one root when the discriminant is zero.

    Raises
    ------
    ValueError
        ``z`` is zero.
    electorate.exceptions.InfeasiblePooledProportion
        No pooled proportion reproduces the numbers.
    """
    if z == 0:
        raise ValueError("z must be non-zero")
    c = (delta_p / z) ** 2 / (1.0 / n1 + 1.0 / n2)
    discriminant = 1.0 - 4.0 * c
    if discriminant < 0.0:
        raise InfeasiblePooledProportion(
            "No pooled proportion fits these numbers", f"delta_p={delta_p} z={z} n1={n1} n2={n2}"
        )
    root = math.sqrt(discriminant)
    roots = sorted({(1.0 - root) / 2.0, (1.0 + root) / 2.0})
    feasible = [r for r in roots if 0.0 < r < 1.0]
    if not feasible:
        raise InfeasiblePooledProportion("Pooled proportion falls outside (0, 1)", f"delta_p={delta_p} z={z}")
    return feasible


def composition_from_predictions(predicted: np.ndarray, label: str = "") -> GenderComposition:
    """Counts class-index predictions (0 male, 1 female)."""
    predicted = np.asarray(predicted)
    male = int(np.count_nonzero(predicted == Gender.MALE.index))
    return GenderComposition(male_count=male, female_count=int(predicted.size) - male, label=label)
