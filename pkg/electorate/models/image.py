import typing as t

import attrs
import numpy as np

from electorate.constants import FACE_CHANNELS, FACE_SIZE, RejectionReason
from electorate.exceptions import MalformedImage

from ._base import BaseModel

__all__: t.Tuple[str, ...] = (
    "FaceBox",
    "RawProfileImage",
    "FaceTensor",
    "Rejection",
    "PreprocessWarning",
    "BatchResult",
    "as_face_boxes",
)


@attrs.define(slots=True, frozen=True)
class FaceBox:
    """An axis-aligned face box from an external detector.

    Attributes
    ----------
    x: int
        Left column.
    y: int
        Top row.
    w: int
        Width in pixels.
    h: int
        Height in pixels.
    """

    x: int = attrs.field(converter=int)
    y: int = attrs.field(converter=int)
    w: int = attrs.field(converter=int)
    h: int = attrs.field(converter=int)

    @property
    def area(self) -> int:
        return max(self.w, 0) * max(self.h, 0)

    @classmethod
    def from_payload(cls, data: t.Union[t.Sequence[int], t.Dict[str, int]]) -> "FaceBox":
        if isinstance(data, dict):
            return cls(data["x"], data["y"], data["w"], data["h"])
        x, y, w, h = data
        return cls(x, y, w, h)


def as_face_boxes(boxes: t.Iterable[t.Any]) -> t.Tuple[FaceBox, ...]:
    """Coerce boxes or their mapping payloads into a tuple of :class:`FaceBox`."""
    return tuple(b if isinstance(b, FaceBox) else FaceBox.from_payload(b) for b in boxes)


def _check_pixels(instance: "RawProfileImage", attribute: "attrs.Attribute[np.ndarray]", value: np.ndarray) -> None:
    if not isinstance(value, np.ndarray) or value.ndim != 3 or value.shape[2] != 3:
        shape = getattr(value, "shape", None)
        raise MalformedImage(f"Pixel buffer must be H x W x 3, got {shape}", str(instance.user_id))
    if value.dtype != np.uint8:
        raise MalformedImage(f"Pixel buffer must hold 8-bit values, got {value.dtype}", str(instance.user_id))
    if value.shape[0] < 1 or value.shape[1] < 1:
        raise MalformedImage("Pixel buffer is empty", str(instance.user_id))


@attrs.define(slots=True, frozen=True, kw_only=True, eq=False)
class RawProfileImage(BaseModel):
    """A profile image with externally detected face boxes.

    Attributes
    ----------
    user_id: int
        Owner of the profile image.
    byte_size: int
        Size of the original image file in bytes.
    pixels: numpy.ndarray
        H x W x 3 array of 8-bit RGB values.
    faces: typing.Tuple[FaceBox, ...]
        Detected faces, possibly none.
    """

    user_id: int = attrs.field(converter=int)
    byte_size: int = attrs.field(converter=int)
    pixels: np.ndarray = attrs.field(validator=_check_pixels, repr=False)
    faces: t.Tuple[FaceBox, ...] = attrs.field(factory=tuple, converter=as_face_boxes)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


def _as_float64(data: t.Any) -> np.ndarray:
    return np.asarray(data, dtype=np.float64)


def _check_face(instance: "FaceTensor", attribute: "attrs.Attribute[np.ndarray]", value: np.ndarray) -> None:
    if value.shape != (FACE_SIZE, FACE_SIZE, FACE_CHANNELS):
        raise MalformedImage(f"Face tensor must be {(FACE_SIZE, FACE_SIZE, FACE_CHANNELS)}, got {value.shape}")
    if value.size and (float(value.min()) < 0.0 or float(value.max()) > 1.0):
        raise MalformedImage("Face tensor values must lie in [0, 1]", str(instance.user_id))


@attrs.define(slots=True, frozen=True, kw_only=True, eq=False)
class FaceTensor(BaseModel):
    """A normalized 28 x 28 x 3 face crop.

    Attributes
    ----------
    user_id: int
        Owner of the face.
    data: numpy.ndarray
        (28, 28, 3) float64 values in [0, 1], row-major (row, column, channel).
    """

    user_id: int = attrs.field(converter=int)
    data: np.ndarray = attrs.field(converter=_as_float64, validator=_check_face, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FaceTensor):
            return NotImplemented
        return self.user_id == other.user_id and np.array_equal(self.data, other.data)


@attrs.define(slots=True, frozen=True, kw_only=True)
class Rejection(BaseModel):
    """A profile image that produced no tensor.

    Attributes
    ----------
    user_id: int
        Owner of the image.
    reason: electorate.constants.RejectionReason
        Why it was rejected.
    """

    user_id: int
    reason: RejectionReason


@attrs.define(slots=True, frozen=True, kw_only=True)
class PreprocessWarning(BaseModel):
    """A tensor that was emitted but deserves a second look.

    Attributes
    ----------
    user_id: int
        Owner of the image.
    message: str
        What is suspicious about it.
    """

    user_id: int
    message: str


@attrs.define(slots=True, kw_only=True)
class BatchResult(BaseModel):
    """Outcome of preprocessing a batch of images.

    Attributes
    ----------
    tensors: typing.List[FaceTensor]
        Emitted tensors, in input order.
    rejections: typing.List[Rejection]
        One entry per image that produced no tensor, in input order.
    warnings: typing.List[PreprocessWarning]
        Warnings for emitted tensors.
    """

    tensors: t.List[FaceTensor] = attrs.field(factory=list)
    rejections: t.List[Rejection] = attrs.field(factory=list)
    warnings: t.List[PreprocessWarning] = attrs.field(factory=list)

    def rejection_counts(self) -> t.Dict[str, int]:
        counts = {reason.value: 0 for reason in RejectionReason}
        for rejection in self.rejections:
            counts[rejection.reason.value] += 1
        return counts
