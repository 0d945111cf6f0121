import json
import pathlib
import typing as t

import jsonschema
import pytest
from PIL import Image

from conftest import START, WEEK, SnapshotWriter, write_faces, write_pages, write_study
from electorate.cli import build_parser, main, run
from electorate.cli.commands import cmd_crossfollow, cmd_event_study, cmd_simulate
from electorate.cli.reports import Report, Table, load_schema, render_table, run_directory
from electorate.constants import Gender
from electorate.exceptions import ConfigError
from electorate.models import AffinityParams, CaseStudyConfig, to_utc

M, F = Gender.MALE, Gender.FEMALE


async def invoke(out: pathlib.Path, run_id: str, *argv: str) -> pathlib.Path:
    return await run(build_parser().parse_args([*argv, "--out", str(out), "--run-id", run_id]))


def report_of(directory: pathlib.Path) -> t.Dict[str, t.Any]:
    """Load a run's ``report.json`` and check it against the report schema."""
    report = json.loads((directory / "report.json").read_text(encoding="utf-8"))
    jsonschema.Draft202012Validator(load_schema()).validate(report)
    assert (directory / "report.txt").exists(), "Text report is missing."
    return t.cast(t.Dict[str, t.Any], report)


def test_render_table() -> None:
    text = render_table("Counts", ["cohort", "n", "share"], [["new", 12, 0.5], ["lost", 3, None]])
    assert text.splitlines() == [
        "Counts",
        "cohort   n  share",
        "------  --  ------",
        "new     12  0.5000",
        "lost     3  -",
    ], "Table layout is wrong."


def test_report_files_and_run_directory(tmp_path: pathlib.Path) -> None:
    first = run_directory(tmp_path, "classify", "r1")
    second = run_directory(tmp_path, "classify", "r1")
    assert (first.name, second.name) == ("r1", "r1-2"), "Run directories collided."
    report = Report(command="classify", tables=[Table(title="T", headers=["a"], rows=[[1]], csv_name="t.csv")])
    assert report.to_text() == "electorate classify\n\nT\na\n-\n1\n", "Text report is wrong."
    assert report.tables[0].to_csv() == "a\n1\n", "CSV series is wrong."


def test_parser_defaults() -> None:
    args = build_parser().parse_args(["simulate", "params.txt"])
    assert (args.seed, args.alpha, args.trials, args.tested_class) == (0, 0.05, 1000, "female"), "Bad defaults."
    assert args.min_bytes == 18432 and args.out == pathlib.Path("out"), "Bad shared defaults."
    nested = build_parser().parse_args(["snapshot", "diff", "a.elss", "b.elss", "-q"])
    assert (nested.command, nested.snapshot_command, nested.quiet) == ("snapshot", "diff", True), "Bad nesting."
    with pytest.raises(SystemExit):
        build_parser().parse_args(["simulate", "p.txt", "-v", "-q"])


async def event_study_inputs(
    tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path
) -> pathlib.Path:
    """A week of 100m/100f new followers, then a week of 100m/160f, with balanced unfollowers."""
    base = set(range(1_000_000, 1_000_050))
    week_one = (base - set(range(1_000_000, 1_000_010))) | set(range(0, 200))
    week_two = (week_one - set(range(1_000_010, 1_000_030))) | set(range(200, 460))
    before = [
        await snapshot_writer("b0", "hillary", START, base),
        await snapshot_writer("b1", "hillary", START + WEEK, week_one),
    ]
    after = [
        await snapshot_writer("a0", "hillary", START + WEEK, week_one),
        await snapshot_writer("a1", "hillary", START + 2 * WEEK, week_two),
    ]
    trump = await snapshot_writer("trump", "trump", START + 2 * WEEK, [*range(1_000_000, 1_000_005), 1_000_010])
    genders = {uid: M if uid < 100 or 200 <= uid < 300 else F for uid in range(460)}
    genders.update({uid: M for uid in [*range(1_000_000, 1_000_005), *range(1_000_010, 1_000_020)]})
    genders.update({uid: F for uid in [*range(1_000_005, 1_000_010), *range(1_000_020, 1_000_030)]})
    faces = await write_faces(tmp_path / "faces.bin", genders)
    return write_study(
        tmp_path / "study.json",
        model=model_file,
        faces=faces,
        before=before,
        after=after,
        destinations={"trump": trump},
    )


@pytest.mark.asyncio
async def test_event_study(tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path) -> None:
    config = await event_study_inputs(tmp_path, snapshot_writer, model_file)
    directory = await invoke(tmp_path / "out", "r1", "event-study", str(config))
    assert directory == tmp_path / "out" / "event-study" / "r1", "Run directory is wrong."
    report = report_of(directory)
    assert report["results"]["classified_faces"] == 490, "Not every face was classified."
    hillary = report["results"]["candidates"]["hillary"]
    assert hillary["flows"]["before"]["new_followers"] == 200, "New followers before are wrong."
    assert hillary["flows"]["after"]["unfollowers"] == 20, "Unfollowers after are wrong."
    after = hillary["compositions"]["new_followers"]["after"]
    assert (after["male_count"], after["female_count"]) == (100, 160), "Composition after is wrong."
    new = hillary["tests"]["new_followers"]
    assert new["tested_class"] == "female" and new["labels"] == ["new_followers_before", "new_followers_after"]
    assert new["z"] == pytest.approx(2.47, abs=0.01), f"z is {new['z']}."
    assert new["rejects"] and new["p_value"] < 0.05, "Shift was not detected."
    lost = hillary["tests"]["unfollowers"]
    assert lost["z"] == 0.0 and not lost["rejects"], "Balanced unfollowers moved."
    assert hillary["destinations"]["before"]["rates"]["trump"] == 0.5, "Destination rate before is wrong."
    assert hillary["destinations"]["after"]["rates"]["trump"] == 0.05, "Destination rate after is wrong."
    tests_csv = (directory / "tests.csv").read_text(encoding="utf-8").splitlines()
    assert tests_csv[0] == "candidate,cohort,p1,p2,pooled_p,n1,n2,z,p_value,rejects", "CSV header is wrong."
    assert tests_csv[1].startswith("hillary,new_followers,0.5,") and tests_csv[1].endswith(",yes"), "Bad row."
    assert (directory / "flows.csv").exists() and (directory / "compositions.csv").exists(), "Series missing."


@pytest.mark.asyncio
async def test_event_study_is_reproducible(
    tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path
) -> None:
    config = await event_study_inputs(tmp_path, snapshot_writer, model_file)
    first = await invoke(tmp_path / "out", "r1", "event-study", str(config))
    second = await invoke(tmp_path / "out", "r2", "event-study", str(config), "--jobs", "4")
    for name in ("report.json", "report.txt", "tests.csv", "compositions.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), f"{name} differs between runs."


@pytest.mark.asyncio
async def test_event_study_counts_without_faces(
    tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path
) -> None:
    base = set(range(10_000_000, 10_020_000))
    later = (base - set(range(10_000_000, 10_009_572))) | set(range(72_266))
    before = [
        await snapshot_writer("b0", "hillary", START, base),
        await snapshot_writer("b1", "hillary", START + WEEK, later),
    ]
    after = [
        await snapshot_writer("a0", "hillary", START + WEEK, later),
        await snapshot_writer("a1", "hillary", START + 2 * WEEK, later | {99_999_999}),
    ]
    faces = await write_faces(tmp_path / "faces.bin", {})
    config = write_study(tmp_path / "study.json", model=model_file, faces=faces, before=before, after=after)
    report = report_of(await invoke(tmp_path / "out", "r1", "event-study", str(config)))
    flows = report["results"]["candidates"]["hillary"]["flows"]["before"]
    assert (flows["new_followers"], flows["unfollowers"], flows["net_gain"]) == (72_266, 9_572, 62_694), "Bad flows."
    test = report["results"]["candidates"]["hillary"]["tests"]["new_followers"]
    assert test["degenerate"] and test["reason"] == "empty cohort" and test["z"] is None, "Empty cohort gave a z."


@pytest.mark.asyncio
async def test_event_study_input_errors(
    tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path
) -> None:
    first = await snapshot_writer("b0", "hillary", START, [1])
    second = await snapshot_writer("b1", "hillary", START + WEEK, [1, 2])
    third = await snapshot_writer("a0", "hillary", START + 2 * WEEK, [1, 2])
    fourth = await snapshot_writer("a1", "hillary", START + 3 * WEEK, [1, 2, 3])
    faces = await write_faces(tmp_path / "faces.bin", {1: M})
    swapped = write_study(
        tmp_path / "swapped.json", model=model_file, faces=faces, before=[third, fourth], after=[first, second]
    )
    payload = json.loads(swapped.read_text(encoding="utf-8"))
    with pytest.raises(ConfigError):
        await cmd_event_study(CaseStudyConfig.from_payload(payload))
    payload["faces"] = str(tmp_path / "nowhere.bin")
    with pytest.raises(ConfigError) as info:
        await cmd_event_study(CaseStudyConfig.from_payload(payload))
    assert "nowhere.bin" in str(info.value), "Missing input is not named."


def test_main_exit_codes(tmp_path: pathlib.Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["event-study", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2, "Missing config."
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    assert main(["event-study", str(tmp_path / "broken.json"), "--out", str(tmp_path)]) == 2, "Broken config."
    (tmp_path / "params.txt").write_text("gamma = 1\n", encoding="utf-8")
    assert main(["simulate", str(tmp_path / "params.txt"), "--out", str(tmp_path)]) == 2, "Bad params."
    assert capsys.readouterr().out == "", "A failed run printed a directory."


def test_unparsable_timestamp_is_a_user_error(
    tmp_path: pathlib.Path, fixture_dir: pathlib.Path, capsys: pytest.CaptureFixture[str]
) -> None:
    write_pages(fixture_dir, "sanders", [[3, 1]])
    argv = ["ingest", "--source", "sanders", "--captured-at", "yesterday", "--out", str(tmp_path / "out")]
    assert main(argv) == 2, "Bad timestamp did not exit with the input-error code."
    assert capsys.readouterr().out == "", "A failed ingest printed a directory."
    with pytest.raises(ConfigError, match="yesterday"):
        to_utc("yesterday")


def test_simulate_is_reproducible(tmp_path: pathlib.Path, capsys: pytest.CaptureFixture[str]) -> None:
    params = tmp_path / "params.txt"
    params.write_text(AffinityParams(lambda_w=0.1, n_prime_w=800, n_dprime_w=900).to_text(), encoding="utf-8")
    for run_id, jobs in (("a", "1"), ("b", "3")):
        argv = ["simulate", str(params), "--trials", "25", "--seed", "7", "--out", str(tmp_path), "--jobs", jobs]
        assert main([*argv, "--run-id", run_id]) == 0, "Simulation failed."
    printed = capsys.readouterr().out.split()
    assert printed == [str(tmp_path / "simulate" / "a"), str(tmp_path / "simulate" / "b")], "Directories not printed."
    first, second = (tmp_path / "simulate" / "a", tmp_path / "simulate" / "b")
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes(), "Reports differ."
    assert (first / "trials.csv").read_bytes() == (second / "trials.csv").read_bytes(), "Trials differ."
    report = report_of(first)
    assert report["results"]["trials"] == 25, "Trial count is wrong."
    assert report["results"]["disturbance"] == pytest.approx(-0.2209, abs=1e-4), "Disturbance is wrong."
    assert len((first / "trials.csv").read_text(encoding="utf-8").splitlines()) == 26, "Missing trial rows."


@pytest.mark.asyncio
async def test_simulate_reports_divergent_ratio() -> None:
    report = await cmd_simulate(AffinityParams(lambda_w=-40.0, n_dprime_w=50), trials=3, seed=1)
    assert report.results["disturbance"] is None, "Divergent ratio was not nulled."
    assert report.results["gender_ratio"] == {"before": None, "after": None}, "Ratios were not nulled."
    with pytest.raises(ConfigError):
        await cmd_simulate(AffinityParams(), trials=0, seed=1)


@pytest.mark.asyncio
async def test_crossfollow(tmp_path: pathlib.Path, snapshot_writer: SnapshotWriter, model_file: pathlib.Path) -> None:
    focal = await snapshot_writer("sanders", "sanders", START, [1, 2, 3, 4])
    a = await snapshot_writer("clinton", "clinton", START, [2, 3, 9])
    b = await snapshot_writer("trump", "trump", START, [3, 4, 8])
    earlier = [
        await snapshot_writer("sanders0", "sanders", START - WEEK, [1, 2, 3]),
        await snapshot_writer("clinton0", "clinton", START - WEEK, [2, 3]),
        await snapshot_writer("trump0", "trump", START - WEEK, [3]),
    ]
    faces = await write_faces(tmp_path / "faces.bin", {1: M, 2: F, 3: M, 4: F})
    argv = ["crossfollow", str(focal), str(a), str(b), "--model", str(model_file), "--faces", str(faces)]
    directory = await invoke(tmp_path / "out", "r1", *argv, "--earlier", *map(str, earlier))
    results = report_of(directory)["results"]
    assert results["partition"]["counts"] == {
        "group_a_only": 1,
        "group_b_only": 1,
        "group_both": 1,
        "group_focal_only": 1,
    }, "Groups are wrong."
    assert results["compositions"]["focal"]["male_count"] == 2, "Focal composition is wrong."
    assert results["compositions"]["group_a_only"]["female_count"] == 1, "Group composition is wrong."
    assert results["gender_tests"]["group_a_only"]["labels"] == ["focal", "group_a_only"], "Test labels are wrong."
    shift = results["share_tests"]["group_b_only"]
    assert (shift["p1"], shift["p2"]) == (0.0, 0.25), "Share test is wrong."
    groups = (directory / "groups.csv").read_text(encoding="utf-8").splitlines()
    assert groups[0] == "group,count,share" and groups[1] == "group_a_only,1,0.25", "groups.csv is wrong."
    compositions = (directory / "compositions.csv").read_text(encoding="utf-8").splitlines()
    assert len(compositions) == 6, "Expected the focal row and one row per group."
    assert all(row.split(",")[2] == START.isoformat() for row in compositions[1:]), "Period is not the capture time."
    assert compositions[1].startswith("sanders,focal,"), "Focal composition row is missing."
    with pytest.raises(ConfigError):
        await cmd_crossfollow(focal, a, b, model=model_file)


@pytest.mark.asyncio
async def test_ingest_and_snapshot_tools(tmp_path: pathlib.Path, fixture_dir: pathlib.Path) -> None:
    out = tmp_path / "out"
    write_pages(fixture_dir, "sanders", [[3, 1], [2]])
    write_pages(fixture_dir, "trump", [[8]])
    later_dir = write_pages(tmp_path / "later", "sanders", [[2, 5, 3]])
    first = await invoke(
        out, "t0", "ingest", "--source", "sanders", "--source", "trump", "--captured-at", "2016-04-21T00:00:00Z"
    )
    assert report_of(first)["results"]["snapshots"]["sanders"]["count"] == 3, "Ingested count is wrong."
    second = await invoke(
        out,
        "t1",
        "ingest",
        "--source",
        "sanders",
        "--captured-at",
        "2016-04-28T00:00:00Z",
        "--fixture-dir",
        str(later_dir),
    )
    older, newer = first / "sanders.elss", second / "sanders.elss"
    diffed = await invoke(out, "d", "snapshot", "diff", str(older), str(newer))
    assert report_of(diffed)["results"]["diff"]["net_gain"] == 0, "Net gain is wrong."
    assert (diffed / "new_followers.csv").read_text(encoding="utf-8") == "user_id\n5\n", "New followers are wrong."
    assert (diffed / "unfollowers.csv").read_text(encoding="utf-8") == "user_id\n1\n", "Unfollowers are wrong."
    series = await invoke(out, "s", "snapshot", "series", str(newer), str(older))
    growth = (series / "growth.csv").read_text(encoding="utf-8").splitlines()
    assert len(growth) == 3 and growth[1].startswith("2016-04-21"), "Series is not in time order."
    exported = await invoke(out, "e", "snapshot", "export", str(newer))
    assert (exported / "sanders.csv").read_text(encoding="utf-8") == "user_id\n2\n3\n5\n", "Export is wrong."


def write_profile(path: pathlib.Path, gender: Gender) -> None:
    image = Image.new("RGB", (56, 56), (0, 0, 0))
    bright = (0, 0, 56, 28) if gender is M else (0, 28, 56, 56)
    image.paste((255, 255, 255), bright)
    image.save(path)


@pytest.mark.asyncio
async def test_face_pipeline(tmp_path: pathlib.Path, model_file: pathlib.Path) -> None:
    out = tmp_path / "out"
    records = []
    for uid, (name, gender) in enumerate([("David A", M), ("Maria B", F)] * 3 + [("xX_Xx", M)]):
        write_profile(tmp_path / f"{uid}.png", gender)
        records.append({"user_id": uid, "path": f"{uid}.png", "faces": [[0, 0, 56, 56]], "display_name": name})
    write_profile(tmp_path / "blank.png", M)
    records.append({"user_id": 99, "path": "blank.png", "faces": [], "display_name": "Luke"})
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")

    prepared = await invoke(out, "p", "preprocess", str(manifest), "--min-bytes", "0")
    summary = report_of(prepared)["results"]
    assert (summary["tensors"], summary["rejections"]["no-face"]) == (7, 1), "Preprocessing counts are wrong."
    assert (prepared / "rejections.csv").read_text(encoding="utf-8") == "user_id,reason\n99,no-face\n"
    faces = prepared / "faces.bin"

    labeled = await invoke(out, "l", "label", str(manifest))
    assert report_of(labeled)["results"]["labels"] == {"male": 4, "female": 3, "unknown": 1}, "Label counts."
    labels = labeled / "labels.csv"

    trained = await invoke(
        out, "t", "train", "--faces", str(faces), "--labels", str(labels), "--epochs", "2", "--batch-size", "4"
    )
    results = report_of(trained)["results"]
    assert (results["labeled"], results["balanced_per_class"]) == (6, 3), "Training set is wrong."
    assert len(results["loss_trace"]) == 2 and (trained / "model.elcnn").exists(), "Model was not trained."

    evaluated = await invoke(
        out, "e", "evaluate", "--model", str(model_file), "--faces", str(faces), "--labels", str(labels)
    )
    assert report_of(evaluated)["results"]["metrics"]["accuracy"] == 1.0, "Hand-set model misclassified."

    classified = await invoke(out, "c", "classify", "--model", str(model_file), "--faces", str(faces))
    composition = report_of(classified)["results"]["composition"]
    assert (composition["male_count"], composition["female_count"]) == (4, 3), "Composition is wrong."
    rows = (classified / "predictions.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "user_id,label,p_male,p_female" and rows[2].startswith("1,female,"), "Predictions are wrong."


@pytest.mark.slow
@pytest.mark.asyncio
async def test_null_model_rejects_at_alpha() -> None:
    params = AffinityParams(n_prime_m=20000, n_prime_w=20000, n_dprime_m=20000, n_dprime_w=20000)
    report = await cmd_simulate(params, trials=2000, seed=2016, jobs=1)
    assert abs(report.results["rejection_rate"] - 0.05) <= 0.02, f"Rate is {report.results['rejection_rate']}."


@pytest.mark.slow
@pytest.mark.asyncio
async def test_small_female_effect_is_detected() -> None:
    params = AffinityParams(lambda_w=0.1, n_prime_m=50000, n_prime_w=50000, n_dprime_m=50000, n_dprime_w=50000)
    report = await cmd_simulate(params, trials=200, seed=2016, jobs=1)
    assert report.results["rejection_rate"] >= 0.99, f"Power is {report.results['rejection_rate']}."
