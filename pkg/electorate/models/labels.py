import typing as t

import attrs

from electorate.constants import Gender
from electorate.exceptions import LexiconError

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "NameLexicon",
    "WeakLabel",
)


def _check_disjoint(
    instance: "NameLexicon", attribute: "attrs.Attribute[t.FrozenSet[str]]", value: t.FrozenSet[str]
) -> None:
    overlap = instance.male_names & value
    if overlap:
        raise LexiconError(f"{len(overlap)} names are listed as both male and female", ", ".join(sorted(overlap)[:10]))


@attrs.define(slots=True, frozen=True, kw_only=True)
class NameLexicon(BaseModel):
    """Given names with a known gender.

    Attributes
    ----------
    male_names: typing.FrozenSet[str]
        Normalized male given names.
    female_names: typing.FrozenSet[str]
        Normalized female given names. Disjoint from ``male_names``.
    """

    male_names: t.FrozenSet[str] = attrs.field(converter=frozenset)
    female_names: t.FrozenSet[str] = attrs.field(converter=frozenset, validator=_check_disjoint)

    def __len__(self) -> int:
        return len(self.male_names) + len(self.female_names)

    def lookup(self, name: str) -> Gender:
        """Gender of an already normalized name, unknown on a miss."""
        if name in self.male_names:
            return Gender.MALE
        if name in self.female_names:
            return Gender.FEMALE
        return Gender.UNKNOWN


@attrs.define(slots=True, frozen=True, kw_only=True)
class WeakLabel(BaseModel):
    """A gender label inferred from a display name.

    Attributes
    ----------
    user_id: int
        Owner of the display name.
    label: electorate.constants.Gender
        Male or female on a lexicon hit, unknown otherwise.
    """

    user_id: int = attrs.field(converter=int)
    label: Gender = attrs.field(converter=Gender.parse)
