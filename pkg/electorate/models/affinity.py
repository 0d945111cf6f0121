import math
import typing as t

import attrs

from electorate.exceptions import ConfigError

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "AffinityParams",
    "SimOutcome",
)


def _finite(instance: t.Any, attribute: "attrs.Attribute[float]", value: float) -> None:
    if not math.isfinite(value):
        raise ConfigError(f"{attribute.name} must be finite, got {value}")


def _population(instance: t.Any, attribute: "attrs.Attribute[int]", value: int) -> None:
    if value < 1:
        raise ConfigError(f"{attribute.name} must be at least 1, got {value}")


@attrs.define(slots=True, frozen=True, kw_only=True)
class AffinityParams(BaseModel):
    """Parameters of the probit gender-affinity model.

    The covariate index of each gender is collapsed into one scalar baseline.

    Attributes
    ----------
    baseline_m: float
        Following index of men without the event.
    baseline_w: float
        Following index of women without the event.
    lambda_m: float
        Event effect on men.
    lambda_w: float
        Event effect on women.
    n_prime_m: int
        Prospective male followers before the event.
    n_prime_w: int
        Prospective female followers before the event.
    n_dprime_m: int
        Prospective male followers after the event.
    n_dprime_w: int
        Prospective female followers after the event.
    """

    baseline_m: float = attrs.field(default=0.0, converter=float, validator=_finite)
    baseline_w: float = attrs.field(default=0.0, converter=float, validator=_finite)
    lambda_m: float = attrs.field(default=0.0, converter=float, validator=_finite)
    lambda_w: float = attrs.field(default=0.0, converter=float, validator=_finite)
    n_prime_m: int = attrs.field(default=1000, converter=int, validator=_population)
    n_prime_w: int = attrs.field(default=1000, converter=int, validator=_population)
    n_dprime_m: int = attrs.field(default=1000, converter=int, validator=_population)
    n_dprime_w: int = attrs.field(default=1000, converter=int, validator=_population)

    def populations(self, event: bool) -> t.Tuple[int, int]:
        """(men, women) prospective followers for the period before or after the event."""
        return (self.n_dprime_m, self.n_dprime_w) if event else (self.n_prime_m, self.n_prime_w)

    def to_text(self) -> str:
        """Render as the flat ``key = value`` config format."""
        return "".join(f"{a.name} = {getattr(self, a.name)!r}\n" for a in attrs.fields(AffinityParams))

    @classmethod
    def from_text(cls, text: str) -> "AffinityParams":
        """Parse the flat ``key = value`` config format.

        Blank lines and ``#`` comments are ignored; unknown keys are an error.
        """
        names = {a.name for a in attrs.fields(cls)}
        values: t.Dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ConfigError(f"Invalid affinity config line: {raw!r}", f"line {number}")
            values[key] = value.strip()
        try:
            return cls(**values)  # type: ignore[arg-type]
        except ValueError as error:
            raise ConfigError(f"Invalid affinity config value: {error}") from error


@attrs.define(slots=True, frozen=True, kw_only=True)
class SimOutcome(BaseModel):
    """Simulated follow (or unfollow) counts.

    Attributes
    ----------
    followed_m: int
        Men whose utility crossed zero.
    followed_w: int
        Women whose utility crossed zero.
    draws_m: int
        Men simulated.
    draws_w: int
        Women simulated.
    """

    followed_m: int
    followed_w: int
    draws_m: int
    draws_w: int

    @property
    def rate_m(self) -> float:
        return self.followed_m / self.draws_m

    @property
    def rate_w(self) -> float:
        return self.followed_w / self.draws_w
