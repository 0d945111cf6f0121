import datetime
import json
import pathlib
import typing as t

import numpy as np
import pytest
import pytest_asyncio

from electorate.constants import Architecture, Gender
from electorate.imaging import write_tensor_bundle
from electorate.models import FaceTensor, NetworkParams, Snapshot
from electorate.network import save_model
from electorate.store import save_snapshot

WEEK = datetime.timedelta(days=7)
START = datetime.datetime(2016, 4, 21, tzinfo=datetime.timezone.utc)
BRIGHTNESS_ARCH = Architecture(conv1_channels=1, conv2_channels=1)

SnapshotWriter = t.Callable[[str, str, datetime.datetime, t.Iterable[int]], t.Awaitable[pathlib.Path]]
FaceMaker = t.Callable[[int, Gender], FaceTensor]


def write_pages(root: pathlib.Path, source_id: str, pages: t.Sequence[t.Sequence[int]]) -> pathlib.Path:
    """Lay out fixture pages ``<source>.page<k>.txt``."""
    root.mkdir(parents=True, exist_ok=True)
    for index, page in enumerate(pages):
        (root / f"{source_id}.page{index}.txt").write_text("".join(f"{i}\n" for i in page), encoding="utf-8")
    return root


def brightness_params() -> NetworkParams:
    """A hand-set network that calls faces with a bright top half male and a bright bottom half female."""
    arch = BRIGHTNESS_ARCH
    params = NetworkParams.zeros(arch)
    params.conv1_w[0, :, 2, 2] = 1.0 / 3.0
    params.conv2_w[0, 0, 2, 2] = 1.0
    pooled = arch.pooled_size
    top = slice(0, 3 * pooled)
    bottom = slice(4 * pooled, 7 * pooled)
    params.fc_w[0, top] = 1.0
    params.fc_w[0, bottom] = -1.0
    params.fc_w[1] = -params.fc_w[0]
    return params


def make_face(user_id: int, gender: Gender, noise: t.Optional[np.random.Generator] = None) -> FaceTensor:
    """A synthetic face, bright on top for men and at the bottom for women."""
    data = np.zeros((28, 28, 3))
    if gender is Gender.MALE:
        data[:14] = 1.0
    else:
        data[14:] = 1.0
    if noise is not None:
        data = np.clip(data + noise.normal(0.0, 0.05, size=data.shape), 0.0, 1.0)
    return FaceTensor(user_id=user_id, data=data)


@pytest.fixture
def face_maker() -> FaceMaker:
    return make_face


@pytest.fixture
def brightness_model() -> NetworkParams:
    return brightness_params()


@pytest.fixture
def fixture_dir(tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch) -> pathlib.Path:
    root = tmp_path / "fixtures"
    root.mkdir()
    monkeypatch.setenv("ELECTORATE_FIXTURE_DIR", str(root))
    return root


@pytest_asyncio.fixture
async def snapshot_writer(tmp_path: pathlib.Path) -> SnapshotWriter:
    folder = tmp_path / "snapshots"

    async def write(name: str, candidate: str, captured_at: datetime.datetime, ids: t.Iterable[int]) -> pathlib.Path:
        snapshot = Snapshot.from_unsorted(candidate, captured_at, np.array(sorted(set(ids)), dtype=np.uint64))
        return await save_snapshot(snapshot, folder / f"{name}.elss")

    return write


@pytest_asyncio.fixture
async def model_file(tmp_path: pathlib.Path, brightness_model: NetworkParams) -> pathlib.Path:
    return await save_model(brightness_model, tmp_path / "model.elcnn")


async def write_faces(path: pathlib.Path, genders: t.Mapping[int, Gender]) -> pathlib.Path:
    """A tensor bundle holding one synthetic face per user."""
    return await write_tensor_bundle([make_face(uid, g) for uid, g in genders.items()], path)


def write_study(
    path: pathlib.Path,
    *,
    model: pathlib.Path,
    faces: pathlib.Path,
    before: t.Sequence[pathlib.Path],
    after: t.Sequence[pathlib.Path],
    destinations: t.Optional[t.Mapping[str, pathlib.Path]] = None,
    tested_class: str = "female",
) -> pathlib.Path:
    payload = {
        "event": "2016-04-28",
        "model": str(model),
        "faces": str(faces),
        "tested_class": tested_class,
        "candidates": [
            {
                "label": "hillary",
                "before": [str(p) for p in before],
                "after": [str(p) for p in after],
                "destinations": {k: str(v) for k, v in (destinations or {}).items()},
            }
        ],
    }
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path
