import datetime

import numpy as np
import pytest
from statsmodels.stats.proportion import proportions_ztest

from electorate.audience import partition_groups
from electorate.constants import Gender
from electorate.exceptions import EmptyCohort, InfeasiblePooledProportion
from electorate.models import DegenerateTest, GenderComposition, Snapshot, ZTestResult
from electorate.stats import (
    composition_from_predictions,
    group_share_test,
    invert_pooled_variance,
    proportion_z,
    two_sample_z,
    two_sided_p,
)

T0 = datetime.datetime(2016, 3, 1, tzinfo=datetime.timezone.utc)


def test_published_male_share_shift() -> None:
    before = GenderComposition(male_count=20012, female_count=20076, label="before")
    after = GenderComposition(male_count=22388, female_count=12533, label="after")
    result = two_sample_z(before, after)
    assert isinstance(result, ZTestResult), "Test came out degenerate."
    assert result.z == pytest.approx(39.10, abs=0.01), f"z is {result.z}."
    assert result.p_value < 1e-10, "p-value is not negligible."
    assert result.labels == ("before", "after") and result.tested_class == "male", "Labels were lost."
    female = two_sample_z(before, after, Gender.FEMALE)
    assert female.z == pytest.approx(-result.z), "Female test is not the mirror image."


def test_textbook_case() -> None:
    result = proportion_z(30, 100, 50, 100)
    assert isinstance(result, ZTestResult), "Test came out degenerate."
    assert result.z == pytest.approx(2.88675, abs=1e-5), "z is wrong."
    assert result.p_value == pytest.approx(0.0039, abs=1e-4), "p-value is wrong."
    assert result.pooled_p == pytest.approx(0.4), "Pooled proportion is wrong."
    assert result.rejects(0.05) and not result.rejects(0.001), "Rejection threshold is wrong."
    assert proportion_z(50, 100, 30, 100).z == pytest.approx(-result.z), "Sign does not follow p2 - p1."


@pytest.mark.parametrize(("x1", "n1", "x2", "n2"), [(30, 100, 50, 100), (7, 40, 3, 65), (812, 1500, 640, 1300)])
def test_matches_statsmodels(x1: int, n1: int, x2: int, n2: int) -> None:
    z, p_value = proportions_ztest([x2, x1], [n2, n1])
    result = proportion_z(x1, n1, x2, n2)
    assert result.z == pytest.approx(z, rel=1e-9), "z differs from statsmodels."
    assert result.p_value == pytest.approx(p_value, rel=1e-7), "p-value differs from statsmodels."


def test_identical_samples() -> None:
    result = proportion_z(40, 100, 40, 100)
    assert result.z == 0.0 and result.p_value == 1.0, "Identical samples are not a null result."


def test_degenerate_samples() -> None:
    result = proportion_z(0, 10, 0, 5, tested_class="female", labels=("x", "y"))
    assert isinstance(result, DegenerateTest), "All-zero samples produced a statistic."
    assert not result.rejects(0.05), "Degenerate test rejected."
    record = result.to_dict()
    assert record["z"] is None and record["p_value"] is None and record["degenerate"], "Record is wrong."
    assert record["labels"] == ["x", "y"], "Labels were lost."
    assert isinstance(proportion_z(5, 5, 9, 9), DegenerateTest), "All-one samples produced a statistic."


def test_empty_cohort() -> None:
    with pytest.raises(EmptyCohort) as info:
        proportion_z(0, 0, 3, 10, labels=("before", "after"))
    assert "before" in str(info.value), "Empty cohort is not named."
    with pytest.raises(EmptyCohort):
        two_sample_z(GenderComposition(male_count=3, female_count=1), GenderComposition(male_count=0, female_count=0))


def test_two_sided_p() -> None:
    assert two_sided_p(0.0) == 1.0, "p(0) is not one."
    assert two_sided_p(1.959963985) == pytest.approx(0.05, abs=1e-9), "p(1.96) is not 0.05."
    assert two_sided_p(-2.5) == two_sided_p(2.5), "p is not symmetric."
    assert 0.0 < two_sided_p(12.0) < 1e-30, "Far tail lost precision."


def test_invert_pooled_variance() -> None:
    roots = invert_pooled_variance(0.016, 2.597, 14504, 11147)
    assert roots == pytest.approx([0.3963, 0.6037], abs=5e-4), f"Roots are {roots}."
    assert sum(roots) == pytest.approx(1.0), "Roots are not symmetric about one half."
    near = invert_pooled_variance(0.01611, 2.597, 14504, 11147)
    assert abs(near[0] - 0.4133) < 0.005, "Published pooled proportion is not recovered."
    assert invert_pooled_variance(0.5, 1.0, 2, 2) == [0.5], "Tangent case did not give one root."


def test_invert_pooled_variance_errors() -> None:
    with pytest.raises(InfeasiblePooledProportion):
        invert_pooled_variance(0.5, 1.0, 10, 10)
    with pytest.raises(ValueError):
        invert_pooled_variance(0.1, 0.0, 10, 10)


def test_inversion_recovers_forward_test() -> None:
    result = proportion_z(300, 1000, 380, 1200)
    roots = invert_pooled_variance(result.p2 - result.p1, result.z, 1000, 1200)
    assert min(abs(r - result.pooled_p) for r in roots) < 1e-9, "Forward pooled proportion is not a root."


def test_group_share_test() -> None:
    a = Snapshot.from_unsorted("clinton", T0, range(0, 60))
    b = Snapshot.from_unsorted("trump", T0, range(1000, 1010))
    earlier = partition_groups(Snapshot.from_unsorted("sanders", T0, range(0, 100)), a, b)
    later = partition_groups(Snapshot.from_unsorted("sanders", T0, range(20, 120)), a, b)
    result = group_share_test(earlier, later, "group_a_only")
    assert (result.p1, result.p2) == (0.6, 0.4), "Group shares are wrong."
    assert result.tested_class == "group_a_only" and result.labels == ("earlier", "later"), "Labels are wrong."
    assert result.z == pytest.approx(proportion_z(60, 100, 40, 100).z), "z is wrong."
    assert isinstance(group_share_test(earlier, later, "group_both"), DegenerateTest), "Empty group gave a z."


def test_composition_from_predictions() -> None:
    composition = composition_from_predictions(np.array([0, 1, 1, 0, 0]), "cohort")
    assert (composition.male_count, composition.female_count) == (3, 2), "Counts are wrong."
    assert composition.share(Gender.FEMALE) == 0.4 and composition.label == "cohort", "Share or label is wrong."
    assert composition_from_predictions(np.array([], dtype=int)).total == 0, "Empty predictions are not empty."
