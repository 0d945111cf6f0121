"""Probit gender-affinity model and its population simulator."""
import concurrent.futures
import math
import typing as t

import numpy as np
from scipy import special

from electorate.constants import Gender
from electorate.exceptions import DivergentRatio
from electorate.logger import get_logger
from electorate.models import AffinityParams, SimOutcome

__all__: t.Tuple[str, ...] = (
    "PARTITION_SIZE",
    "phi",
    "utility_index",
    "follow_probability",
    "gender_ratio",
    "disturbance",
    "simulate",
)

PARTITION_SIZE: int = 1 << 16
_SQRT2 = math.sqrt(2.0)

Real = t.Union[float, np.ndarray]


@t.overload
def phi(x: float) -> float:
    ...


@t.overload
def phi(x: np.ndarray) -> np.ndarray:
    ...


def phi(x: Real) -> Real:
    """Standard normal CDF through the complementary error function.

    ``erfc`` keeps the lower tail accurate where ``1 + erf`` would cancel.

    Examples
    --------

    >>> phi(0.0)
    0.5
    >>> round(phi(1.96), 10)
    0.9750021049
    """
    value = 0.5 * special.erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)
    return float(value) if np.ndim(value) == 0 else value


def utility_index(params: AffinityParams, gender: Gender, event: bool) -> float:
    """``baseline_g + lambda_g * [event]``."""
    if gender is Gender.MALE:
        return params.baseline_m + (params.lambda_m if event else 0.0)
    if gender is Gender.FEMALE:
        return params.baseline_w + (params.lambda_w if event else 0.0)
    raise ValueError("The affinity model has no unknown gender")


def follow_probability(params: AffinityParams, gender: Gender, event: bool) -> float:
    """Probability that a prospective follower of ``gender`` follows."""
    return phi(utility_index(params, gender, event))


def gender_ratio(params: AffinityParams, event: bool) -> float:
    """Expected male-to-female ratio of new followers before or after the event.

    Raises
    ------
    electorate.exceptions.DivergentRatio
        The female term underflows to zero.
    """
    men, women = params.populations(event)
    numerator = men * follow_probability(params, Gender.MALE, event)
    denominator = women * follow_probability(params, Gender.FEMALE, event)
    if denominator == 0.0:
        raise DivergentRatio(
            "Female follow probability underflows to zero",
            f"index={utility_index(params, Gender.FEMALE, event)} event={event}",
        )
    return numerator / denominator


def disturbance(params: AffinityParams) -> float:
    """Ratio after the event minus ratio before it.

    Negative values mean the event tilted new followers towards women.
    """
    return gender_ratio(params, True) - gender_ratio(params, False)


def _count_partition(index: float, size: int, entropy: t.Sequence[int], complement: bool) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(list(entropy)))
    noise = special.ndtri(rng.random(size))
    utility = index + noise
    return int(np.count_nonzero(utility < 0.0 if complement else utility > 0.0))


def _count(
    index: float,
    population: int,
    seed: int,
    gender: Gender,
    complement: bool,
    pool: t.Optional[concurrent.futures.Executor],
) -> int:
    jobs = [
        (index, min(PARTITION_SIZE, population - start), (seed, gender.index, number), complement)
        for number, start in enumerate(range(0, population, PARTITION_SIZE))
    ]
    if pool is None:
        return sum(_count_partition(*job) for job in jobs)
    return sum(pool.map(lambda job: _count_partition(*job), jobs))


def simulate(
    params: AffinityParams,
    event: bool,
    seed: int,
    *,
    complement: bool = False,
    workers: t.Optional[int] = None,
) -> SimOutcome:
    """Simulates every prospective follower's decision.

    Each individual draws ``eps ~ Normal(0, 1)`` by inverse-CDF from a seeded generator and follows when
    ``index + eps > 0``. Individuals are split into fixed partitions of 65,536, each seeded with
    ``(seed, gender, partition)``, so counts do not depend on ``workers``.

    Parameters
    ----------
    params: AffinityParams
        Model parameters.
    event: bool
        Whether the event has happened; selects the population and the lambda terms.
    seed: int
        Non-negative seed.
    complement: bool
        Count individuals whose utility is negative instead, i.e. unfollowers.
    workers: typing.Optional[int]
        Thread count for partitions. Inline when ``None`` or 1.

    Returns
    -------
    SimOutcome
        Follow counts and draws per gender.
    """
    men, women = params.populations(event)
    index_m = utility_index(params, Gender.MALE, event)
    index_w = utility_index(params, Gender.FEMALE, event)
    if workers is None or workers <= 1:
        followed_m = _count(index_m, men, seed, Gender.MALE, complement, None)
        followed_w = _count(index_w, women, seed, Gender.FEMALE, complement, None)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            followed_m = _count(index_m, men, seed, Gender.MALE, complement, pool)
            followed_w = _count(index_w, women, seed, Gender.FEMALE, complement, pool)
    get_logger().debug(f"Simulated {men} men and {women} women (event={event}, seed={seed})")
    return SimOutcome(followed_m=followed_m, followed_w=followed_w, draws_m=men, draws_w=women)
