"""Face crops to normalized tensors."""
import concurrent.futures
import json
import pathlib
import struct
import typing as t

import aiofiles
import attrs
import numpy as np
from PIL import Image, UnidentifiedImageError

from electorate.constants import DEFAULT_MIN_BYTES, FACE_CHANNELS, FACE_SIZE, RejectionReason
from electorate.exceptions import ConfigError, MalformedImage
from electorate.logger import get_logger
from electorate.models import BatchResult, FaceBox, FaceTensor, PreprocessWarning, RawProfileImage, Rejection
from electorate.models.image import as_face_boxes

__all__: t.Tuple[str, ...] = (
    "MAX_ASPECT",
    "ManifestEntry",
    "largest_face",
    "clamp_box",
    "bilinear_resize",
    "preprocess",
    "batch_preprocess",
    "encode_tensors",
    "decode_tensors",
    "write_tensor_bundle",
    "read_tensor_bundle",
    "ids_path",
    "read_manifest",
    "load_image",
)

MAX_ASPECT: float = 2.0
_COUNT = struct.Struct("<I")
_FACE_VALUES = FACE_SIZE * FACE_SIZE * FACE_CHANNELS


def largest_face(faces: t.Sequence[FaceBox]) -> t.Optional[FaceBox]:
    """The box with the largest area; the first one wins ties."""
    best: t.Optional[FaceBox] = None
    for box in faces:
        if best is None or box.area > best.area:
            best = box
    return best


def clamp_box(box: FaceBox, height: int, width: int) -> t.Tuple[int, int, int, int]:
    """Clip a box to the image, as ``(top, bottom, left, right)`` with exclusive ends."""
    top, left = max(box.y, 0), max(box.x, 0)
    bottom, right = min(box.y + box.h, height), min(box.x + box.w, width)
    return top, max(bottom, top), left, max(right, left)


def _sample_grid(source: int, target: int) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    centers = (np.arange(target, dtype=np.float64) + 0.5) * (source / target) - 0.5
    centers = np.clip(centers, 0.0, source - 1)
    low = np.floor(centers).astype(np.intp)
    high = np.minimum(low + 1, source - 1)
    return low, high, centers - low


def bilinear_resize(pixels: np.ndarray, size: int = FACE_SIZE) -> np.ndarray:
    """Resize an H x W x C array to size x size x C with pixel-center aligned bilinear sampling.

    Parameters
    ----------
    pixels: numpy.ndarray
        The image, any numeric dtype.
    size: int
        Output height and width.

    Returns
    -------
    numpy.ndarray
        float64 values on the input scale. A constant image stays exactly constant.
    """
    values = np.asarray(pixels, dtype=np.float64)
    y0, y1, fy = _sample_grid(values.shape[0], size)
    x0, x1, fx = _sample_grid(values.shape[1], size)
    fx = fx[None, :, None]
    fy = fy[:, None, None]
    upper = values[y0][:, x0] + fx * (values[y0][:, x1] - values[y0][:, x0])
    lower = values[y1][:, x0] + fx * (values[y1][:, x1] - values[y1][:, x0])
    return t.cast(np.ndarray, upper + fy * (lower - upper))


def _crop(image: RawProfileImage, min_bytes: int) -> t.Union[Rejection, t.Tuple[np.ndarray, FaceBox]]:
    box = largest_face(image.faces)
    if box is None:
        return Rejection(user_id=image.user_id, reason=RejectionReason.NO_FACE)
    if image.byte_size < min_bytes:
        return Rejection(user_id=image.user_id, reason=RejectionReason.TOO_SMALL)
    top, bottom, left, right = clamp_box(box, image.height, image.width)
    if bottom == top or right == left:
        return Rejection(user_id=image.user_id, reason=RejectionReason.EMPTY_CROP)
    return image.pixels[top:bottom, left:right], box


def _to_tensor(user_id: int, crop: np.ndarray) -> FaceTensor:
    data = np.clip(bilinear_resize(crop) / 255.0, 0.0, 1.0)
    return FaceTensor(user_id=user_id, data=data)


def preprocess(image: RawProfileImage, min_bytes: int = DEFAULT_MIN_BYTES) -> t.Union[FaceTensor, Rejection]:
    """Turns a profile image into a face tensor or a rejection.

    Parameters
    ----------
    image: RawProfileImage
        The image and its detected faces.
    min_bytes: int
        Files smaller than this are rejected as too small.

    Returns
    -------
    FaceTensor | Rejection
        The largest face resized to 28 x 28 and scaled to [0, 1], or why there is none.
        No-face is checked before size.
    """
    outcome = _crop(image, min_bytes)
    if isinstance(outcome, Rejection):
        return outcome
    return _to_tensor(image.user_id, outcome[0])


def _preprocess_one(
    image: RawProfileImage, min_bytes: int
) -> t.Tuple[t.Union[FaceTensor, Rejection], t.Optional[PreprocessWarning]]:
    outcome = _crop(image, min_bytes)
    if isinstance(outcome, Rejection):
        return outcome, None
    crop, _ = outcome
    height, width = crop.shape[:2]
    warning = None
    if max(height, width) > MAX_ASPECT * min(height, width):
        warning = PreprocessWarning(
            user_id=image.user_id, message=f"aspect ratio {width}x{height} exceeds {MAX_ASPECT:g}:1"
        )
    return _to_tensor(image.user_id, crop), warning


def batch_preprocess(
    images: t.Iterable[RawProfileImage],
    min_bytes: int = DEFAULT_MIN_BYTES,
    *,
    workers: t.Optional[int] = None,
) -> BatchResult:
    """Preprocesses a batch, keeping input order.

    Parameters
    ----------
    images: typing.Iterable[RawProfileImage]
        The images.
    min_bytes: int
        Size threshold passed to :func:`preprocess`.
    workers: typing.Optional[int]
        Thread count. Runs inline when ``None`` or 1.

    Returns
    -------
    BatchResult
        Tensors, one rejection per image without a tensor, and aspect warnings.
    """
    images = list(images)
    logger = get_logger()
    if workers is None or workers <= 1:
        outcomes = [_preprocess_one(image, min_bytes) for image in images]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda image: _preprocess_one(image, min_bytes), images))
    result = BatchResult()
    for outcome, warning in outcomes:
        if isinstance(outcome, Rejection):
            result.rejections.append(outcome)
        else:
            result.tensors.append(outcome)
        if warning is not None:
            result.warnings.append(warning)
    logger.progress("preprocess", len(images), len(images))
    logger.info(f"Preprocessed {len(images)} images: {len(result.tensors)} tensors, {result.rejection_counts()}")
    return result


def encode_tensors(tensors: t.Sequence[FaceTensor]) -> bytes:
    """u32 count, then little-endian float32 values in (row, column, channel) order per tensor."""
    body = np.stack([face.data for face in tensors]).astype("<f4") if tensors else np.empty(0, dtype="<f4")
    return _COUNT.pack(len(tensors)) + body.tobytes()


def decode_tensors(data: bytes, user_ids: t.Optional[t.Sequence[int]] = None) -> t.List[FaceTensor]:
    """Parse a tensor bundle.

    Raises
    ------
    electorate.exceptions.MalformedImage
        The payload size does not match the count, or the ID list has the wrong length.
    """
    if len(data) < _COUNT.size:
        raise MalformedImage("Truncated tensor bundle header")
    (count,) = _COUNT.unpack_from(data)
    expected = _COUNT.size + count * _FACE_VALUES * 4
    if len(data) != expected:
        raise MalformedImage(f"Tensor bundle holds {len(data)} bytes, expected {expected} for {count} tensors")
    if user_ids is None:
        user_ids = range(count)
    if len(user_ids) != count:
        raise MalformedImage(f"{len(user_ids)} user IDs for {count} tensors")
    values = np.frombuffer(data, dtype="<f4", offset=_COUNT.size).reshape(count, FACE_SIZE, FACE_SIZE, FACE_CHANNELS)
    return [FaceTensor(user_id=uid, data=values[i]) for i, uid in enumerate(user_ids)]


def ids_path(path: t.Union[str, pathlib.Path]) -> pathlib.Path:
    """The ``.ids`` sidecar of a tensor bundle."""
    path = pathlib.Path(path)
    return path.with_name(path.name + ".ids")


async def write_tensor_bundle(tensors: t.Sequence[FaceTensor], path: t.Union[str, pathlib.Path]) -> pathlib.Path:
    """Write a tensor bundle and its ``.ids`` sidecar."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "wb") as f:
        await f.write(encode_tensors(tensors))
    async with aiofiles.open(ids_path(path), "w", encoding="utf-8") as f:
        await f.write("".join(f"{face.user_id}\n" for face in tensors))
    return path


async def read_tensor_bundle(path: t.Union[str, pathlib.Path]) -> t.List[FaceTensor]:
    """Read a tensor bundle, taking user IDs from its sidecar when present."""
    path = pathlib.Path(path)
    async with aiofiles.open(path, "rb") as f:
        data = await f.read()
    user_ids: t.Optional[t.List[int]] = None
    if ids_path(path).exists():
        async with aiofiles.open(ids_path(path), "r", encoding="utf-8") as f:
            user_ids = [int(line) for line in (await f.read()).split()]
    try:
        return decode_tensors(data, user_ids)
    except MalformedImage as error:
        raise MalformedImage(error.message, str(path)) from error


@attrs.define(slots=True, frozen=True, kw_only=True)
class ManifestEntry:
    """One line of an image manifest.

    Attributes
    ----------
    user_id: int
        Owner of the profile.
    path: pathlib.Path
        Profile image file.
    faces: typing.Tuple[FaceBox, ...]
        Boxes from the external face detector.
    display_name: str
        Profile display name.
    """

    user_id: int = attrs.field(converter=int)
    path: pathlib.Path = attrs.field(converter=pathlib.Path)
    faces: t.Tuple[FaceBox, ...] = attrs.field(factory=tuple, converter=as_face_boxes)
    display_name: str = ""


async def read_manifest(path: t.Union[str, pathlib.Path]) -> t.List[ManifestEntry]:
    """Read a JSON Lines manifest of ``{"user_id", "path", "faces", "display_name"}`` records.

    Relative image paths are resolved against the manifest's folder.

    Raises
    ------
    electorate.exceptions.ConfigError
        A line is not a valid record.
    """
    path = pathlib.Path(path)
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        lines = (await f.read()).splitlines()
    entries = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            entry = ManifestEntry(
                user_id=record["user_id"],
                path=path.parent / record.get("path", ""),
                faces=record.get("faces") or (),
                display_name=record.get("display_name") or "",
            )
        except (ValueError, KeyError, TypeError) as error:
            raise ConfigError(f"Invalid manifest record: {error}", f"{path}:{number}") from error
        entries.append(entry)
    return entries


def load_image(entry: ManifestEntry) -> RawProfileImage:
    """Decode a manifest entry's image file into RGB pixels.

    Raises
    ------
    electorate.exceptions.MalformedImage
        The file is not a readable image.
    """
    try:
        with Image.open(entry.path) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as error:
        raise MalformedImage(f"Cannot decode image: {error}", str(entry.path)) from error
    return RawProfileImage(
        user_id=entry.user_id,
        byte_size=entry.path.stat().st_size,
        pixels=pixels,
        faces=entry.faces,
    )
