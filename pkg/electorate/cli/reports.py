import csv
import io
import json
import pathlib
import typing as t

import aiofiles
import attrs

from electorate import __version__
from electorate.models import to_builtin

__all__: t.Tuple[str, ...] = (
    "SCHEMA_PATH",
    "Table",
    "Report",
    "render_table",
    "run_directory",
    "write_report",
    "load_schema",
)

SCHEMA_PATH: pathlib.Path = pathlib.Path(__file__).parent.parent / "data" / "report.schema.json"

Cell = t.Union[str, int, float, None]


def _format(cell: Cell) -> str:
    if cell is None:
        return "-"
    if isinstance(cell, float):
        return f"{cell:.4f}"
    return str(cell)


def render_table(title: str, headers: t.Sequence[str], rows: t.Sequence[t.Sequence[Cell]]) -> str:
    """Render rows as an aligned plain-text table.

    Text columns are left aligned, numbers right aligned, floats to four decimals.

    Examples
    --------

    >>> print(render_table("Counts", ["cohort", "n"], [["new", 12], ["lost", 3]]))
    Counts
    cohort   n
    ------  --
    new     12
    lost     3
    """
    cells = [[_format(c) for c in row] for row in rows]
    widths = [max([len(h)] + [len(row[i]) for row in cells]) for i, h in enumerate(headers)]
    numeric = [bool(rows) and all(isinstance(row[i], (int, float)) for row in rows) for i in range(len(headers))]

    def line(values: t.Sequence[str]) -> str:
        parts = [v.rjust(w) if num else v.ljust(w) for v, w, num in zip(values, widths, numeric)]
        return "  ".join(parts).rstrip()

    body = [line(headers), "  ".join("-" * w for w in widths)] + [line(row) for row in cells]
    return "\n".join([title, *body])


@attrs.define(slots=True, kw_only=True)
class Table:
    """A titled table shared by the text report and a CSV series.

    Attributes
    ----------
    title: str
        Heading in the text report.
    headers: typing.List[str]
        Column names.
    rows: typing.List[typing.List[Cell]]
        The rows.
    csv_name: typing.Optional[str]
        Also written as this CSV file when set.
    text: bool
        Whether the table appears in ``report.txt``.
    """

    title: str
    headers: t.List[str]
    rows: t.List[t.List[Cell]] = attrs.field(factory=list)
    csv_name: t.Optional[str] = None
    text: bool = True

    def render(self) -> str:
        return render_table(self.title, self.headers, self.rows)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.headers)
        writer.writerows(["" if c is None else c for c in row] for row in self.rows)
        return buffer.getvalue()


@attrs.define(slots=True, kw_only=True)
class Report:
    """Everything a subcommand emits.

    Attributes
    ----------
    command: str
        The subcommand, e.g. ``"event-study"``.
    inputs: typing.Dict[str, typing.Any]
        Input paths and flags that determine the results.
    results: typing.Dict[str, typing.Any]
        Machine-readable results.
    tables: typing.List[Table]
        Human-readable tables and CSV series.
    notes: typing.List[str]
        Free-form lines appended to the text report.
    """

    command: str
    inputs: t.Dict[str, t.Any] = attrs.field(factory=dict)
    results: t.Dict[str, t.Any] = attrs.field(factory=dict)
    tables: t.List[Table] = attrs.field(factory=list)
    notes: t.List[str] = attrs.field(factory=list)

    def to_dict(self) -> t.Dict[str, t.Any]:
        return t.cast(
            t.Dict[str, t.Any],
            to_builtin(
                {"command": self.command, "version": __version__, "inputs": self.inputs, "results": self.results}
            ),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        sections = [f"electorate {self.command}"]
        sections.extend(table.render() for table in self.tables if table.text)
        sections.extend(self.notes)
        return "\n\n".join(sections) + "\n"


def run_directory(out: t.Union[str, pathlib.Path], command: str, run_id: str) -> pathlib.Path:
    """Create ``<out>/<command>/<run_id>``, suffixing ``-2``, ``-3``... when it already exists."""
    base = pathlib.Path(out) / command
    base.mkdir(parents=True, exist_ok=True)
    candidate, number = base / run_id, 1
    while True:
        try:
            candidate.mkdir()
            return candidate
        except FileExistsError:
            number += 1
            candidate = base / f"{run_id}-{number}"


async def _write(path: pathlib.Path, text: str) -> None:
    async with aiofiles.open(path, "w", encoding="utf-8", newline="\n") as f:
        await f.write(text)


async def write_report(report: Report, directory: pathlib.Path) -> pathlib.Path:
    """Write ``report.json``, ``report.txt`` and the CSV series into ``directory``.

    Returns
    -------
    pathlib.Path
        The ``report.json`` path.
    """
    await _write(directory / "report.json", report.to_json())
    await _write(directory / "report.txt", report.to_text())
    for table in report.tables:
        if table.csv_name:
            await _write(directory / table.csv_name, table.to_csv())
    return directory / "report.json"


def load_schema() -> t.Dict[str, t.Any]:
    """The JSON schema every ``report.json`` follows."""
    return t.cast(t.Dict[str, t.Any], json.loads(SCHEMA_PATH.read_text(encoding="utf-8")))
