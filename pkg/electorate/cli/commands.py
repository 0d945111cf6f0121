import csv
import datetime
import io
import pathlib
import typing as t

import aiofiles
import numpy as np

from electorate import network
from electorate.affinity import disturbance, follow_probability, gender_ratio, simulate
from electorate.audience import destination_rates, partition_groups
from electorate.constants import DEFAULT_ALPHA, DEFAULT_MIN_BYTES, DEFAULT_PAGE_SIZE, Gender
from electorate.exceptions import ConfigError, DivergentRatio, EmptyCohort
from electorate.imaging import batch_preprocess, load_image, read_manifest, read_tensor_bundle, write_tensor_bundle
from electorate.ingestion import PagedSource, capture_snapshots
from electorate.labeler import balance, label_many, load_lexicon
from electorate.logger import get_logger
from electorate.models import (
    GROUP_NAMES,
    AffinityParams,
    CaseStudyConfig,
    DegenerateTest,
    FaceTensor,
    GenderComposition,
    TestOutcome,
    TrainConfig,
    WeakLabel,
    to_utc,
)
from electorate.stats import composition_from_predictions, group_share_test, two_sample_z
from electorate.store import SnapshotStore, diff, growth_series

from .reports import Report, Table

__all__: t.Tuple[str, ...] = (
    "FaceIndex",
    "cmd_ingest",
    "cmd_snapshot_diff",
    "cmd_snapshot_series",
    "cmd_snapshot_export",
    "cmd_preprocess",
    "cmd_label",
    "cmd_train",
    "cmd_evaluate",
    "cmd_classify",
    "cmd_event_study",
    "cmd_crossfollow",
    "cmd_simulate",
)

PathLike = t.Union[str, pathlib.Path]
TEST_HEADERS = ["candidate", "cohort", "p1", "p2", "pooled_p", "n1", "n2", "z", "p_value", "rejects"]
COMPOSITION_HEADERS = ["candidate", "cohort", "period", "male", "female", "total", "male_share"]


class FaceIndex:
    """Classifier predictions looked up by user ID.

    Parameters
    ----------
    user_ids: numpy.ndarray
        Owner of each classified face.
    predicted: numpy.ndarray
        Class index of each face. The first face wins for repeated IDs.
    """

    def __init__(self, user_ids: np.ndarray, predicted: np.ndarray) -> None:
        order = np.argsort(np.asarray(user_ids, dtype=np.uint64), kind="stable")
        self._ids = np.asarray(user_ids, dtype=np.uint64)[order]
        self._predicted = np.asarray(predicted)[order]

    def __len__(self) -> int:
        return int(self._ids.size)

    def predictions(self, cohort: np.ndarray) -> np.ndarray:
        """Predictions of the cohort members that have a face, in cohort order."""
        cohort = np.asarray(cohort, dtype=np.uint64)
        if not self._ids.size or not cohort.size:
            return np.empty(0, dtype=np.intp)
        position = np.minimum(np.searchsorted(self._ids, cohort), self._ids.size - 1)
        found = self._ids[position] == cohort
        return t.cast(np.ndarray, self._predicted[position[found]])

    def composition(self, cohort: np.ndarray, label: str = "") -> GenderComposition:
        return composition_from_predictions(self.predictions(cohort), label)

    @classmethod
    async def from_files(cls, model: PathLike, faces: PathLike, jobs: t.Optional[int] = None) -> "FaceIndex":
        params = await network.load_model(model)
        tensors = await read_tensor_bundle(faces)
        user_ids = np.array([face.user_id for face in tensors], dtype=np.uint64)
        if not tensors:
            return cls(user_ids, np.empty(0, dtype=np.intp))
        predicted, _ = network.classify(params, tensors, jobs=jobs)
        get_logger().info(f"Classified {len(tensors)} faces from {faces}")
        return cls(user_ids, predicted)


def _test(before: GenderComposition, after: GenderComposition, tested_class: Gender) -> TestOutcome:
    try:
        return two_sample_z(before, after, tested_class)
    except EmptyCohort:
        return DegenerateTest(
            reason="empty cohort",
            p1=before.share(tested_class),
            p2=after.share(tested_class),
            pooled_p=0.0,
            n1=before.total,
            n2=after.total,
            tested_class=tested_class.value,
            labels=(before.label, after.label),
        )


def _test_record(test: TestOutcome, alpha: float) -> t.Dict[str, t.Any]:
    return {**test.to_dict(), "rejects": test.rejects(alpha)}


def _test_row(candidate: str, cohort: str, test: TestOutcome, alpha: float) -> t.List[t.Any]:
    z = p_value = None
    if isinstance(test, DegenerateTest):
        rejects = f"degenerate: {test.reason}"
    else:
        z, p_value, rejects = test.z, test.p_value, "yes" if test.rejects(alpha) else "no"
    return [candidate, cohort, test.p1, test.p2, test.pooled_p, test.n1, test.n2, z, p_value, rejects]


def _composition_row(candidate: str, period: str, composition: GenderComposition) -> t.List[t.Any]:
    return [
        candidate,
        composition.label,
        period,
        composition.male_count,
        composition.female_count,
        composition.total,
        composition.share(Gender.MALE),
    ]


def _id_table(title: str, ids: np.ndarray, csv_name: str) -> Table:
    return Table(title=title, headers=["user_id"], rows=[[i] for i in ids.tolist()], csv_name=csv_name, text=False)


async def _read_text(path: PathLike) -> str:
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        return await f.read()


async def _read_labels(path: PathLike) -> t.Dict[int, Gender]:
    reader = csv.DictReader(io.StringIO(await _read_text(path)))
    try:
        return {int(row["user_id"]): Gender.parse(row["label"]) for row in reader}
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigError(f"Invalid labels file: {error}", str(path)) from error


def _labeled_faces(
    tensors: t.Sequence[FaceTensor], labels: t.Mapping[int, Gender]
) -> t.Tuple[t.List[FaceTensor], t.List[Gender]]:
    kept = [face for face in tensors if labels.get(face.user_id, Gender.UNKNOWN) is not Gender.UNKNOWN]
    return kept, [labels[face.user_id] for face in kept]


async def cmd_ingest(
    sources: t.Sequence[str],
    directory: pathlib.Path,
    *,
    captured_at: str,
    fixture_dir: t.Optional[PathLike] = None,
    page_size: int = DEFAULT_PAGE_SIZE,
    rate_limit: int = 0,
) -> Report:
    """Fetch every source concurrently and store one snapshot per source."""
    stamp = to_utc(captured_at)
    paged = {
        source: PagedSource.from_fixture(source, fixture_dir, page_size=page_size, rate_limit=rate_limit)
        for source in sources
    }
    snapshots = await capture_snapshots(paged, stamp)
    store = SnapshotStore(max_size=len(snapshots))
    table = Table(title="Snapshots", headers=["candidate", "captured_at", "followers", "file"])
    results: t.Dict[str, t.Any] = {}
    for label, snapshot in snapshots.items():
        name = f"{label}.elss"
        await store.save(snapshot, directory / name)
        results[label] = {**snapshot.to_dict(), "file": name}
        table.rows.append([label, snapshot.captured_at.isoformat(), len(snapshot), name])
    return Report(
        command="ingest",
        inputs={"sources": list(sources), "captured_at": captured_at, "page_size": page_size},
        results={"snapshots": results},
        tables=[table],
    )


async def cmd_snapshot_diff(older: PathLike, newer: PathLike) -> Report:
    result = await SnapshotStore().diff(older, newer)
    table = Table(
        title=f"Follower flows of {result.candidate}",
        headers=["older", "newer", "new_followers", "unfollowers", "net_gain"],
        rows=[
            [
                result.older_at.isoformat(),
                result.newer_at.isoformat(),
                int(result.new_followers.size),
                int(result.unfollowers.size),
                result.net_gain,
            ]
        ],
    )
    return Report(
        command="snapshot-diff",
        inputs={"older": older, "newer": newer},
        results={"diff": result.to_dict()},
        tables=[
            table,
            _id_table("New followers", result.new_followers, "new_followers.csv"),
            _id_table("Unfollowers", result.unfollowers, "unfollowers.csv"),
        ],
    )


async def cmd_snapshot_series(paths: t.Sequence[PathLike]) -> Report:
    """Growth series of one candidate over any number of snapshots."""
    if not paths:
        raise ConfigError("A growth series needs at least one snapshot")
    snapshots = await SnapshotStore(max_size=len(paths)).load_many(paths)
    points = growth_series(snapshots)
    table = Table(
        title=f"Follower growth of {snapshots[0].candidate}",
        headers=["captured_at", "followers", "new_followers", "unfollowers", "net_gain"],
        rows=[list(point.to_row()) for point in points],
        csv_name="growth.csv",
    )
    return Report(
        command="snapshot-series",
        inputs={"snapshots": list(paths)},
        results={"candidate": snapshots[0].candidate, "series": [point.to_dict() for point in points]},
        tables=[table],
    )


async def cmd_snapshot_export(path: PathLike, directory: pathlib.Path) -> Report:
    store = SnapshotStore()
    snapshot = await store.load(path)
    name = f"{pathlib.Path(path).stem}.csv"
    await store.export_csv(path, directory / name)
    return Report(
        command="snapshot-export",
        inputs={"snapshot": path},
        results={"snapshot": snapshot.to_dict(), "file": name},
    )


async def cmd_preprocess(
    manifest: PathLike,
    directory: pathlib.Path,
    *,
    min_bytes: int = DEFAULT_MIN_BYTES,
    jobs: t.Optional[int] = None,
) -> Report:
    """Decode manifest images, crop the largest faces and write a tensor bundle."""
    entries = await read_manifest(manifest)
    result = batch_preprocess((load_image(entry) for entry in entries), min_bytes, workers=jobs)
    await write_tensor_bundle(result.tensors, directory / "faces.bin")
    counts = result.rejection_counts()
    summary = Table(
        title="Preprocessing",
        headers=["images", "tensors", *counts, "warnings"],
        rows=[[len(entries), len(result.tensors), *counts.values(), len(result.warnings)]],
    )
    rejections = Table(
        title="Rejections",
        headers=["user_id", "reason"],
        rows=[[r.user_id, r.reason.value] for r in result.rejections],
        csv_name="rejections.csv",
        text=False,
    )
    warnings = Table(
        title="Warnings",
        headers=["user_id", "message"],
        rows=[[w.user_id, w.message] for w in result.warnings],
        csv_name="warnings.csv",
    )
    return Report(
        command="preprocess",
        inputs={"manifest": manifest, "min_bytes": min_bytes},
        results={
            "images": len(entries),
            "tensors": len(result.tensors),
            "rejections": counts,
            "warnings": len(result.warnings),
            "bundle": "faces.bin",
        },
        tables=[summary, rejections, warnings],
    )


async def cmd_label(
    manifest: PathLike, *, lexicon_dir: t.Optional[PathLike] = None, strict: bool = False
) -> Report:
    entries = await read_manifest(manifest)
    lexicon = await load_lexicon(lexicon_dir, strict=strict)
    labels = label_many(((e.user_id, e.display_name) for e in entries), lexicon)
    counts = {gender.value: 0 for gender in Gender}
    for weak in labels:
        counts[weak.label.value] += 1
    return Report(
        command="label",
        inputs={"manifest": manifest, "lexicon_dir": lexicon_dir, "lexicon_size": len(lexicon)},
        results={"labels": counts},
        tables=[
            Table(title="Weak labels", headers=list(counts), rows=[list(counts.values())]),
            Table(
                title="Labels",
                headers=["user_id", "label"],
                rows=[[w.user_id, w.label.value] for w in labels],
                csv_name="labels.csv",
                text=False,
            ),
        ],
    )


async def cmd_train(
    faces: PathLike,
    labels: PathLike,
    directory: pathlib.Path,
    *,
    config: TrainConfig,
) -> Report:
    """Balance the weakly labeled faces 1:1 and train a model on them."""
    tensors = await read_tensor_bundle(faces)
    kept, genders = _labeled_faces(tensors, await _read_labels(labels))
    weak = [WeakLabel(user_id=face.user_id, label=gender) for face, gender in zip(kept, genders)]
    balanced = balance(list(zip(kept, weak)), config.seed)
    result = network.train([face for face, _ in balanced], [weak.label for _, weak in balanced], config)
    await network.save_model(result.params, directory / "model.elcnn")
    loss = Table(
        title="Training loss",
        headers=["epoch", "loss"],
        rows=[[epoch + 1, value] for epoch, value in enumerate(result.loss_trace)],
        csv_name="loss.csv",
    )
    return Report(
        command="train",
        inputs={"faces": faces, "labels": labels, "config": config.to_dict()},
        results={
            "labeled": len(kept),
            "balanced_per_class": len(balanced) // 2,
            "loss_trace": result.loss_trace,
            "model": "model.elcnn",
        },
        tables=[loss],
    )


async def cmd_evaluate(
    model: PathLike, faces: PathLike, labels: PathLike, *, jobs: t.Optional[int] = None
) -> Report:
    params = await network.load_model(model)
    kept, genders = _labeled_faces(await read_tensor_bundle(faces), await _read_labels(labels))
    metrics = network.evaluate(params, kept, genders, jobs=jobs)
    table = Table(
        title=f"Evaluation (positive class: {metrics.positive_class})",
        headers=["precision", "recall", "f1", "accuracy", "tp", "fp", "fn", "tn"],
        rows=[
            [
                metrics.precision,
                metrics.recall,
                metrics.f1,
                metrics.accuracy,
                metrics.tp,
                metrics.fp,
                metrics.fn,
                metrics.tn,
            ]
        ],
    )
    return Report(
        command="evaluate",
        inputs={"model": model, "faces": faces, "labels": labels},
        results={"metrics": metrics.to_dict(), "examples": len(kept)},
        tables=[table],
    )


async def cmd_classify(model: PathLike, faces: PathLike, *, jobs: t.Optional[int] = None) -> Report:
    params = await network.load_model(model)
    tensors = await read_tensor_bundle(faces)
    predicted, probabilities = network.classify(params, tensors, jobs=jobs)
    composition = composition_from_predictions(predicted, "classified")
    male_share = composition.share(Gender.MALE)
    rows = [
        [face.user_id, Gender.from_index(int(p)).value, float(prob[0]), float(prob[1])]
        for face, p, prob in zip(tensors, predicted, probabilities)
    ]
    return Report(
        command="classify",
        inputs={"model": model, "faces": faces},
        results={"composition": composition.to_dict()},
        tables=[
            Table(
                title="Composition",
                headers=["male", "female", "total", "male_share"],
                rows=[[composition.male_count, composition.female_count, composition.total, male_share]],
            ),
            Table(
                title="Predictions",
                headers=["user_id", "label", "p_male", "p_female"],
                rows=rows,
                csv_name="predictions.csv",
                text=False,
            ),
        ],
    )


async def cmd_event_study(
    config: CaseStudyConfig, *, alpha: float = DEFAULT_ALPHA, jobs: t.Optional[int] = None
) -> Report:
    """Gender composition of new followers and unfollowers in the weeks around an event.

    For every candidate both snapshot pairs are diffed, the cohorts' faces are classified, and the
    before/after shares of ``config.tested_class`` are z-tested for new followers and for unfollowers.

    Parameters
    ----------
    config: CaseStudyConfig
        Snapshot pairs, model and faces.
    alpha: float
        Significance level.
    jobs: typing.Optional[int]
        Classification threads.

    Returns
    -------
    Report
        Flows, compositions, tests and destination rates.

    Raises
    ------
    electorate.exceptions.ConfigError
        An input is missing or a before pair does not precede its after pair.
    """
    missing = config.missing_paths()
    if missing:
        raise ConfigError("Missing inputs", ", ".join(str(p) for p in missing))
    index = await FaceIndex.from_files(config.model, config.faces, jobs)
    store = SnapshotStore(max_size=8)
    tested = config.tested_class
    flows = Table(
        title="Follower flows",
        headers=["candidate", "period", "older", "newer", "new_followers", "unfollowers", "net_gain"],
        csv_name="flows.csv",
    )
    compositions = Table(title="Classified compositions", headers=COMPOSITION_HEADERS, csv_name="compositions.csv")
    tests = Table(title=f"Two-sample z-tests of the {tested} share", headers=TEST_HEADERS, csv_name="tests.csv")
    rates = Table(title="Unfollower destinations", headers=["candidate", "period", "destination", "rate"])
    candidates: t.Dict[str, t.Any] = {}
    for study in config.candidates:
        before_old, before_new, after_old, after_new = await store.load_many([*study.before, *study.after])
        if before_new.captured_at > after_old.captured_at:
            raise ConfigError("The before pair must precede the after pair", study.label)
        periods = {"before": diff(before_old, before_new), "after": diff(after_old, after_new)}
        record: t.Dict[str, t.Any] = {"flows": {}, "compositions": {}, "tests": {}, "destinations": {}}
        for period, result in periods.items():
            record["flows"][period] = result.to_dict()
            flows.rows.append(
                [
                    study.label,
                    period,
                    result.older_at.isoformat(),
                    result.newer_at.isoformat(),
                    int(result.new_followers.size),
                    int(result.unfollowers.size),
                    result.net_gain,
                ]
            )
        for cohort in ("new_followers", "unfollowers"):
            before = index.composition(getattr(periods["before"], cohort), f"{cohort}_before")
            after = index.composition(getattr(periods["after"], cohort), f"{cohort}_after")
            record["compositions"][cohort] = {"before": before.to_dict(), "after": after.to_dict()}
            compositions.rows.append(_composition_row(study.label, "before", before))
            compositions.rows.append(_composition_row(study.label, "after", after))
            test = _test(before, after, tested)
            record["tests"][cohort] = _test_record(test, alpha)
            tests.rows.append(_test_row(study.label, cohort, test, alpha))
        if study.destinations:
            labels = list(study.destinations)
            snapshots = await store.load_many(study.destinations[label] for label in labels)
            named = dict(zip(labels, snapshots))
            for period, result in periods.items():
                destination = destination_rates(result.unfollowers, named)
                record["destinations"][period] = destination.to_dict()
                rates.rows.extend([study.label, period, name, rate] for name, rate in destination.rates.items())
        candidates[study.label] = record
    tables = [flows, compositions, tests] + ([rates] if rates.rows else [])
    return Report(
        command="event-study",
        inputs={
            "event": config.event,
            "model": config.model,
            "faces": config.faces,
            "tested_class": tested.value,
            "alpha": alpha,
            "candidates": [c.to_dict() for c in config.candidates],
        },
        results={"classified_faces": len(index), "candidates": candidates},
        tables=tables,
    )


async def cmd_crossfollow(
    focal: PathLike,
    a: PathLike,
    b: PathLike,
    *,
    model: t.Optional[PathLike] = None,
    faces: t.Optional[PathLike] = None,
    earlier: t.Optional[t.Sequence[PathLike]] = None,
    alpha: float = DEFAULT_ALPHA,
    jobs: t.Optional[int] = None,
) -> Report:
    """Four-group partition of the focal candidate's followers by cross-following.

    With a model and faces, every group's male share is tested against all classified focal followers.
    With an earlier (focal, a, b) triple, every group's share of the focal followers is tested for change.
    """
    if (model is None) != (faces is None):
        raise ConfigError("--model and --faces must be given together")
    if earlier is not None and len(earlier) != 3:
        raise ConfigError("--earlier takes the focal, a and b snapshots")
    store = SnapshotStore(max_size=6)
    focal_snapshot, a_snapshot, b_snapshot = await store.load_many([focal, a, b])
    partition = partition_groups(focal_snapshot, a_snapshot, b_snapshot)
    counts, shares = partition.counts(), partition.shares()
    groups = Table(
        title=f"Followers of {partition.focal} by cross-following ({partition.a}, {partition.b})",
        headers=["group", "count", "share"],
        rows=[[name, counts[name], shares[name]] for name in GROUP_NAMES],
        csv_name="groups.csv",
    )
    results: t.Dict[str, t.Any] = {"partition": partition.to_dict()}
    tables = [groups]
    if model is not None and faces is not None:
        index = await FaceIndex.from_files(model, faces, jobs)
        overall = index.composition(focal_snapshot.ids, "focal")
        period = focal_snapshot.captured_at.isoformat()
        compositions = Table(title="Classified compositions", headers=COMPOSITION_HEADERS, csv_name="compositions.csv")
        tests = Table(title="Male share of each group against all focal followers", headers=TEST_HEADERS)
        results["compositions"] = {"focal": overall.to_dict()}
        results["gender_tests"] = {}
        compositions.rows.append(_composition_row(partition.focal, period, overall))
        for name in GROUP_NAMES:
            composition = index.composition(partition.group(name), name)
            results["compositions"][name] = composition.to_dict()
            compositions.rows.append(_composition_row(partition.focal, period, composition))
            test = _test(overall, composition, Gender.MALE)
            results["gender_tests"][name] = _test_record(test, alpha)
            tests.rows.append(_test_row(partition.focal, name, test, alpha))
        tables.extend([compositions, tests])
    if earlier is not None:
        earlier_partition = partition_groups(*await store.load_many(earlier))
        shifts = Table(title="Change of each group's share since the earlier snapshots", headers=TEST_HEADERS)
        results["share_tests"] = {}
        for name in GROUP_NAMES:
            test = group_share_test(earlier_partition, partition, name)
            results["share_tests"][name] = _test_record(test, alpha)
            shifts.rows.append(_test_row(partition.focal, name, test, alpha))
        tables.append(shifts)
    return Report(
        command="crossfollow",
        inputs={"focal": focal, "a": a, "b": b, "model": model, "faces": faces, "earlier": earlier, "alpha": alpha},
        results=results,
        tables=tables,
    )


async def cmd_simulate(
    params: AffinityParams,
    *,
    trials: int,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    tested_class: Gender = Gender.FEMALE,
    jobs: t.Optional[int] = None,
) -> Report:
    """Calibration of the z-test on populations simulated from the affinity model.

    Trial ``i`` simulates the periods before and after the event with the ``2i``-th and ``2i+1``-th
    32-bit words generated from ``seed``, then tests the followers' ``tested_class`` share.
    """
    if trials < 1:
        raise ConfigError(f"trials must be positive, got {trials}")
    logger = get_logger()
    seeds = np.random.SeedSequence(seed).generate_state(2 * trials).tolist()
    workers = jobs if max(params.populations(False) + params.populations(True)) > 1 << 16 else None
    per_trial = Table(
        title="Trials",
        headers=["trial", "followed_m_before", "followed_w_before", "followed_m_after", "followed_w_after", "z", "p"],
        csv_name="trials.csv",
        text=False,
    )
    rejections = 0
    rates = np.zeros(4)
    for trial in range(trials):
        before = simulate(params, False, seeds[2 * trial], workers=workers)
        after = simulate(params, True, seeds[2 * trial + 1], workers=workers)
        test = _test(
            GenderComposition(male_count=before.followed_m, female_count=before.followed_w, label="before"),
            GenderComposition(male_count=after.followed_m, female_count=after.followed_w, label="after"),
            tested_class,
        )
        rejections += test.rejects(alpha)
        rates += (before.rate_m, before.rate_w, after.rate_m, after.rate_w)
        z = None if isinstance(test, DegenerateTest) else test.z
        p = None if isinstance(test, DegenerateTest) else test.p_value
        per_trial.rows.append(
            [trial, before.followed_m, before.followed_w, after.followed_m, after.followed_w, z, p]
        )
        if (trial + 1) % max(1, trials // 10) == 0:
            logger.progress("simulate", trial + 1, trials)
    try:
        ratios: t.Dict[str, t.Optional[float]] = {
            "before": gender_ratio(params, False),
            "after": gender_ratio(params, True),
        }
        effect: t.Optional[float] = disturbance(params)
    except DivergentRatio as error:
        logger.warning(f"Gender ratio diverges: {error}")
        ratios, effect = {"before": None, "after": None}, None
    rates /= trials
    results = {
        "trials": trials,
        "rejections": rejections,
        "rejection_rate": rejections / trials,
        "disturbance": effect,
        "gender_ratio": ratios,
        "follow_probability": {
            "male_before": follow_probability(params, Gender.MALE, False),
            "female_before": follow_probability(params, Gender.FEMALE, False),
            "male_after": follow_probability(params, Gender.MALE, True),
            "female_after": follow_probability(params, Gender.FEMALE, True),
        },
        "mean_follow_rate": dict(zip(("male_before", "female_before", "male_after", "female_after"), rates.tolist())),
    }
    summary = Table(
        title=f"Calibration of the {tested_class} share test at alpha={alpha:g}",
        headers=["trials", "rejections", "rejection_rate", "disturbance"],
        rows=[[trials, rejections, rejections / trials, effect]],
    )
    return Report(
        command="simulate",
        inputs={
            "params": params.to_dict(),
            "trials": trials,
            "seed": seed,
            "alpha": alpha,
            "tested_class": tested_class.value,
        },
        results=results,
        tables=[summary, per_trial],
    )


def default_run_id() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
