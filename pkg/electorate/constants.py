from __future__ import annotations

import enum
import typing as t

import attrs

__all__: t.Tuple[str, ...] = (
    "BaseEnum",
    "Gender",
    "RejectionReason",
    "Architecture",
    "DEFAULT_ARCHITECTURE",
    "SNAPSHOT_MAGIC",
    "SNAPSHOT_VERSION",
    "MODEL_MAGIC",
    "MODEL_VERSION",
    "FACE_SIZE",
    "FACE_CHANNELS",
    "DEFAULT_MIN_BYTES",
    "DEFAULT_ALPHA",
    "DEFAULT_PAGE_SIZE",
    "FIXTURE_DIR_ENV",
    "LOG_DIR_ENV",
)


SNAPSHOT_MAGIC: bytes = b"ELSS"
SNAPSHOT_VERSION: int = 1
MODEL_MAGIC: bytes = b"ELCNN"
MODEL_VERSION: int = 1

FACE_SIZE: int = 28
FACE_CHANNELS: int = 3
# "18kb" read as binary kilobytes.
DEFAULT_MIN_BYTES: int = 18 * 1024
DEFAULT_ALPHA: float = 0.05
DEFAULT_PAGE_SIZE: int = 5000

FIXTURE_DIR_ENV: str = "ELECTORATE_FIXTURE_DIR"
LOG_DIR_ENV: str = "ELECTORATE_LOG_DIR"


class BaseEnum(enum.Enum):
    """
    Base enum class for all enums in the library.
    """

    def __str__(self) -> str:
        return str(self.value)

    @classmethod
    def parse(cls, value: t.Union[str, "BaseEnum"]) -> t.Any:
        """
        Look a member up by value or by name, case-insensitively.
        """
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (str(member.value).lower(), member.name.lower()):
                return member
        raise ValueError(f"Invalid {cls.__name__}: {value!r}, valid values: {[m.value for m in cls]}")


class Gender(BaseEnum):
    """
    Gender classes in class-index order of the network's output layer.
    """

    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"

    @property
    def index(self) -> int:
        """The output-layer class index. Unknown has none."""
        if self is Gender.UNKNOWN:
            raise ValueError("Unknown gender has no class index")
        return 0 if self is Gender.MALE else 1

    @classmethod
    def from_index(cls, index: int) -> "Gender":
        return cls.MALE if int(index) == 0 else cls.FEMALE


class RejectionReason(BaseEnum):
    """
    Why a profile image produced no face tensor.
    """

    NO_FACE = "no-face"
    TOO_SMALL = "too-small"
    EMPTY_CROP = "empty-crop"


@attrs.define(slots=True, frozen=True)
class Architecture:
    """
    Shape constants of the 2CONV-1FC network.

    Attributes
    ----------
    conv1_channels : int
        Output channels of the first convolution.
    conv2_channels : int
        Output channels of the second convolution.
    kernel_size : int
        Square kernel size of both convolutions.
    padding : int
        Zero padding of both convolutions.
    input_size : int
        Height and width of the input faces.
    input_channels : int
        Channels of the input faces.
    classes : int
        Output classes.
    """

    conv1_channels: int = 8
    conv2_channels: int = 16
    kernel_size: int = 5
    padding: int = 2
    input_size: int = FACE_SIZE
    input_channels: int = FACE_CHANNELS
    classes: int = 2

    @property
    def pooled_size(self) -> int:
        """Spatial size after both 2x2 max pools."""
        return self.input_size // 4

    @property
    def fc_inputs(self) -> int:
        return self.conv2_channels * self.pooled_size * self.pooled_size

    def as_tuple(self) -> t.Tuple[int, ...]:
        return attrs.astuple(self)


DEFAULT_ARCHITECTURE: Architecture = Architecture()
