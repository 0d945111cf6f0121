import pathlib
import typing as t

import attrs

from electorate.constants import Gender
from electorate.exceptions import ConfigError

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "CandidateStudy",
    "CaseStudyConfig",
)


def _pair(value: t.Sequence[t.Union[str, pathlib.Path]]) -> t.Tuple[pathlib.Path, pathlib.Path]:
    if len(value) != 2:
        raise ConfigError(f"Expected an [older, newer] snapshot pair, got {list(value)}")
    return pathlib.Path(value[0]), pathlib.Path(value[1])


def _paths(value: t.Dict[str, t.Union[str, pathlib.Path]]) -> t.Dict[str, pathlib.Path]:
    return {str(k): pathlib.Path(v) for k, v in value.items()}


@attrs.define(slots=True, frozen=True, kw_only=True)
class CandidateStudy(BaseModel):
    """One candidate's snapshot pairs around the event.

    Attributes
    ----------
    label: str
        The candidate label.
    before: typing.Tuple[pathlib.Path, pathlib.Path]
        Snapshots bracketing the week before the event.
    after: typing.Tuple[pathlib.Path, pathlib.Path]
        Snapshots bracketing the week after the event.
    destinations: typing.Dict[str, pathlib.Path]
        Other candidates' snapshots, for unfollower destination rates.
    """

    label: str
    before: t.Tuple[pathlib.Path, pathlib.Path] = attrs.field(converter=_pair)
    after: t.Tuple[pathlib.Path, pathlib.Path] = attrs.field(converter=_pair)
    destinations: t.Dict[str, pathlib.Path] = attrs.field(factory=dict, converter=_paths)

    def paths(self) -> t.List[pathlib.Path]:
        return [*self.before, *self.after, *self.destinations.values()]


@attrs.define(slots=True, frozen=True, kw_only=True)
class CaseStudyConfig(BaseModel):
    """Inputs of an event study.

    Attributes
    ----------
    event: str
        Label of the event, e.g. its date.
    candidates: typing.Tuple[CandidateStudy, ...]
        The candidates to study.
    model: pathlib.Path
        Trained classifier file.
    faces: pathlib.Path
        Tensor bundle holding the cohorts' faces (with its ``.ids`` sidecar).
    output: pathlib.Path
        Output root directory.
    tested_class: electorate.constants.Gender
        Which share the z-tests compare. Defaults to female.
    """

    event: str
    candidates: t.Tuple[CandidateStudy, ...]
    model: pathlib.Path = attrs.field(converter=pathlib.Path)
    faces: pathlib.Path = attrs.field(converter=pathlib.Path)
    output: pathlib.Path = attrs.field(default=pathlib.Path("out"), converter=pathlib.Path)
    tested_class: Gender = attrs.field(default=Gender.FEMALE, converter=Gender.parse)

    @classmethod
    def from_payload(cls, data: t.Dict[str, t.Any], base: t.Optional[pathlib.Path] = None) -> "CaseStudyConfig":
        """Create a config from its JSON payload.

        Relative paths are resolved against ``base`` (the config file's folder) when given.
        """

        def resolve(path: t.Union[str, pathlib.Path]) -> pathlib.Path:
            path = pathlib.Path(path)
            return path if base is None or path.is_absolute() else base / path

        try:
            candidates = tuple(
                CandidateStudy(
                    label=str(c["label"]),
                    before=[resolve(p) for p in c["before"]],
                    after=[resolve(p) for p in c["after"]],
                    destinations={k: resolve(v) for k, v in (c.get("destinations") or {}).items()},
                )
                for c in data["candidates"]
            )
            return cls(
                event=str(data.get("event", "")),
                candidates=candidates,
                model=resolve(data["model"]),
                faces=resolve(data["faces"]),
                output=resolve(data.get("output", "out")),
                tested_class=data.get("tested_class", Gender.FEMALE.value),
            )
        except (KeyError, TypeError) as error:
            raise ConfigError(f"Invalid case study config: missing or malformed {error}") from error
        except ValueError as error:
            raise ConfigError(f"Invalid case study config: {error}") from error

    def missing_paths(self) -> t.List[pathlib.Path]:
        """Referenced inputs that do not exist."""
        paths = [self.model, self.faces, self.faces.with_name(self.faces.name + ".ids")]
        for candidate in self.candidates:
            paths.extend(candidate.paths())
        return [p for p in paths if not p.exists()]
