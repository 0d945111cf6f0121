import pathlib
import struct
import typing as t

import aiofiles
import numpy as np

from electorate.constants import MODEL_MAGIC, MODEL_VERSION, Architecture
from electorate.exceptions import CorruptModel, ShapeMismatch
from electorate.models import NetworkParams
from electorate.models.network import expected_shapes

__all__: t.Tuple[str, ...] = (
    "encode_params",
    "decode_params",
    "save_model",
    "load_model",
)

_VERSION = struct.Struct("<H")
_ARCH = struct.Struct("<7H")


def encode_params(params: NetworkParams) -> bytes:
    """Magic, u16 version, the seven u16 architecture constants, then every parameter as little-endian float64."""
    body = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in params.arrays())
    return MODEL_MAGIC + _VERSION.pack(MODEL_VERSION) + _ARCH.pack(*params.arch.as_tuple()) + body


def _check_architecture(arch: Architecture, source: str) -> None:
    problems = []
    if arch.kernel_size % 2 == 0:
        problems.append(f"kernel_size {arch.kernel_size} is not odd")
    if arch.padding != arch.kernel_size // 2:
        problems.append(f"padding {arch.padding} does not keep the size for kernel_size {arch.kernel_size}")
    if arch.input_size == 0 or arch.input_size % 4:
        problems.append(f"input_size {arch.input_size} is not a positive multiple of 4")
    if arch.classes != 2:
        problems.append(f"classes is {arch.classes}, expected 2")
    if 0 in (arch.conv1_channels, arch.conv2_channels, arch.input_channels):
        problems.append("a layer has zero channels")
    if problems:
        raise CorruptModel(f"Unsupported architecture: {'; '.join(problems)}", source)


def decode_params(data: bytes, source: str = "") -> NetworkParams:
    """Parse a model file.

    Raises
    ------
    electorate.exceptions.CorruptModel
        Bad magic, unsupported version or architecture, or a payload that does not fit the architecture.
    """
    offset = len(MODEL_MAGIC)
    if data[:offset] != MODEL_MAGIC:
        raise CorruptModel("Not a model file: bad magic", source)
    if len(data) < offset + _VERSION.size + _ARCH.size:
        raise CorruptModel("Truncated header", source)
    (version,) = _VERSION.unpack_from(data, offset)
    if version != MODEL_VERSION:
        raise CorruptModel(f"Unsupported model version {version}", source)
    offset += _VERSION.size
    arch = Architecture(*_ARCH.unpack_from(data, offset))
    offset += _ARCH.size
    _check_architecture(arch, source)
    shapes = list(expected_shapes(arch).values())
    expected = sum(int(np.prod(shape)) for shape in shapes) * 8
    if len(data) - offset != expected:
        raise CorruptModel(f"Payload holds {len(data) - offset} bytes, expected {expected} for {arch}", source)
    arrays = []
    for shape in shapes:
        size = int(np.prod(shape))
        arrays.append(np.frombuffer(data, dtype="<f8", count=size, offset=offset).reshape(shape).astype(np.float64))
        offset += size * 8
    try:
        params = NetworkParams.from_arrays(arch, arrays)
    except ShapeMismatch as error:
        raise CorruptModel(error.message, source) from error
    if not params.is_finite():
        raise CorruptModel("Model holds non-finite parameters", source)
    return params


async def save_model(params: NetworkParams, path: t.Union[str, pathlib.Path]) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "wb") as f:
        await f.write(encode_params(params))
    return path


async def load_model(path: t.Union[str, pathlib.Path]) -> NetworkParams:
    path = pathlib.Path(path)
    async with aiofiles.open(path, "rb") as f:
        data = await f.read()
    return decode_params(data, str(path))
