"""
Result files of a run.

- <out>/<command>-<run id prefix>.json: the exact result document.
- <out>/summary.csv: one appended row per run (wall time lives here).
- <out>/<command>-<run id prefix>.tex: optional LaTeX table.
"""

import csv
from datetime import datetime, timezone
from pathlib import Path
from loguru import logger
from nilbohr.logging_decorator import log_decorator as log
from nilbohr.serialization import dumps

RUN_ID_PREFIX = 12
SUMMARY_FILE = "summary.csv"
SUMMARY_FIELDS = (
    "run_id",
    "command",
    "status",
    "found",
    "value",
    "value_approx",
    "sets_examined",
    "wall_time",
    "timestamp",
)


@log
def result_paths(out, command, run_id):
    """
    :return: (json path, tex path) for a run
    """
    stem = f"{command}-{run_id[:RUN_ID_PREFIX]}"
    out = Path(out)
    return out / f"{stem}.json", out / f"{stem}.tex"


@log
def write_json(path, document):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document), encoding="utf-8")
    logger.info("WRITE SUCCESS: {}", path)
    return path


def _approximate(value):
    """Decimal rendering of a "p/q" string; marked approximate in the summary."""
    if value is None:
        return ""
    numerator, _, denominator = str(value).partition("/")
    return f"{int(numerator) / int(denominator or 1):.6f}"


@log
def append_summary(out, row, wall_time):
    """
    Appends one summary row, writing the header on first use.

    :param row: dict with the keys of SUMMARY_FIELDS except wall_time/timestamp
    :param wall_time: seconds, float
    """
    path = Path(out) / SUMMARY_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists()
    record = {name: row.get(name, "") for name in SUMMARY_FIELDS}
    record["value_approx"] = _approximate(row.get("value"))
    record["wall_time"] = f"{wall_time:.3f}"
    record["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with open(path, "a", encoding="utf-8", newline="") as summary_file:
        writer = csv.DictWriter(summary_file, fieldnames=SUMMARY_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerow(record)
    logger.debug("Summary row appended to {}", path)
    return path


def _latex_escape(text):
    return str(text).replace("_", r"\_").replace("%", r"\%").replace("&", r"\&")


def _latex_value(value):
    if isinstance(value, str) and "/" in value:
        numerator, denominator = value.split("/")
        if denominator == "1":
            return f"${numerator}$"
        return rf"$\frac{{{numerator}}}{{{denominator}}}$"
    if isinstance(value, (list, dict)):
        return r"\texttt{" + _latex_escape(value) + "}"
    return _latex_escape(value)


def render_latex(document):
    """
    A two-column tabular of the scalar result fields.

    :param document: the result document as written to JSON
    :return: str
    """
    result = document.get("result") or {}
    scalars = result.get("outcome", result)
    lines = [
        r"\begin{tabular}{ll}",
        r"\hline",
        rf"command & {_latex_escape(document['command'])} \\",
        rf"run & \texttt{{{document['run_id'][:RUN_ID_PREFIX]}}} \\",
        r"\hline",
    ]
    for key in sorted(scalars):
        value = scalars[key]
        if isinstance(value, (list, dict)) and len(str(value)) > 60:
            continue
        lines.append(rf"{_latex_escape(key)} & {_latex_value(value)} \\")
    lines += [r"\hline", r"\end{tabular}", ""]
    return "\n".join(lines)


@log
def write_latex(path, document):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_latex(document), encoding="utf-8")
    logger.info("WRITE SUCCESS: {}", path)
    return path
