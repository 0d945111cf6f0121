import typing as t

import attrs

from electorate.constants import Gender

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "GenderComposition",
    "ZTestResult",
    "DegenerateTest",
    "TestOutcome",
)


@attrs.define(slots=True, frozen=True, kw_only=True)
class GenderComposition(BaseModel):
    """Classified gender counts of a follower cohort.

    Attributes
    ----------
    male_count: int
        Members classified male.
    female_count: int
        Members classified female.
    label: str
        Name of the cohort.
    """

    male_count: int = attrs.field(converter=int, validator=attrs.validators.ge(0))
    female_count: int = attrs.field(converter=int, validator=attrs.validators.ge(0))
    label: str = ""

    @property
    def total(self) -> int:
        return self.male_count + self.female_count

    def count(self, gender: Gender) -> int:
        if gender is Gender.MALE:
            return self.male_count
        if gender is Gender.FEMALE:
            return self.female_count
        raise ValueError("A composition has no unknown class")

    def share(self, gender: Gender) -> float:
        """Share of ``gender`` in the cohort, 0 for an empty cohort."""
        return self.count(gender) / self.total if self.total else 0.0

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            "label": self.label,
            "male_count": self.male_count,
            "female_count": self.female_count,
            "total": self.total,
            "male_share": self.share(Gender.MALE),
        }


@attrs.define(slots=True, frozen=True, kw_only=True)
class ZTestResult(BaseModel):
    """Pooled two-sample z-test of proportions.

    Attributes
    ----------
    z: float
        (p2 - p1) over the pooled standard error.
    p_value: float
        Two-sided p-value.
    p1: float
        Tested-class share in the first sample.
    p2: float
        Tested-class share in the second sample.
    pooled_p: float
        (n1 p1 + n2 p2) / (n1 + n2).
    n1: int
        First sample size.
    n2: int
        Second sample size.
    tested_class: str
        What the shares count.
    labels: typing.Tuple[str, str]
        Labels of the two samples.
    """

    z: float
    p_value: float
    p1: float
    p2: float
    pooled_p: float
    n1: int
    n2: int
    tested_class: str = ""
    labels: t.Tuple[str, str] = ("", "")

    degenerate: t.ClassVar[bool] = False

    def rejects(self, alpha: float) -> bool:
        return self.p_value < alpha

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {**super().to_dict(), "labels": list(self.labels), "degenerate": False}


@attrs.define(slots=True, frozen=True, kw_only=True)
class DegenerateTest(BaseModel):
    """A z-test whose pooled proportion is 0 or 1, so z is undefined.

    Attributes
    ----------
    reason: str
        Why no statistic exists.
    p1: float
    p2: float
    pooled_p: float
    n1: int
    n2: int
    tested_class: str
    labels: typing.Tuple[str, str]
    """

    reason: str
    p1: float
    p2: float
    pooled_p: float
    n1: int
    n2: int
    tested_class: str = ""
    labels: t.Tuple[str, str] = ("", "")

    degenerate: t.ClassVar[bool] = True

    def rejects(self, alpha: float) -> bool:
        return False

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {**super().to_dict(), "labels": list(self.labels), "degenerate": True, "z": None, "p_value": None}


TestOutcome = t.Union[ZTestResult, DegenerateTest]
