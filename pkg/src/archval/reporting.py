"""CSV and text report emission. Files are written atomically."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

from archval.mplus import ValuePoint
from archval.renewal import TrajectoryPoint
from archval.sensitivity import SweepTable, find_zero_crossing

SUMMARY_COLUMNS = ["mean", "sd", "q05", "q25", "q50", "q75", "q95"]


def fmt(x: float) -> str:
    """Fixed 6-significant-digit rendering used in every CSV."""
    s = f"{float(x):.6g}"
    return "0" if s == "-0" else s


def write_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trajectory_csv(trajectories: dict[str, list[TrajectoryPoint]]) -> str:
    """Columns year, architecture, then summary statistics; grid-major order."""
    rows = []
    names = list(trajectories)
    grid = [p.time for p in trajectories[names[0]]] if names else []
    for i, t in enumerate(grid):
        for name in names:
            s = trajectories[name][i].distribution.summary
            rows.append([fmt(t), name, *(fmt(v) for v in s.as_row())])
    return _csv(["year", "architecture", *SUMMARY_COLUMNS], rows)


def value_csv(points: list[ValuePoint]) -> str:
    rows = [[fmt(p.time), *(fmt(v) for v in p.distribution.summary.as_row())] for p in points]
    return _csv(["year", *SUMMARY_COLUMNS], rows)


def sweep_csv(table: SweepTable, statistic: str = "mean") -> str:
    rows = []
    for row in table.rows:
        s = row.summary
        rows.append([*(fmt(v) for v in row.point), fmt(s.mean), fmt(s.sd), fmt(s.q05), fmt(s.q95)])
    text = _csv([*table.axes, "mean", "sd", "q05", "q95"], rows)
    for key, group in table.groups().items():
        crossing = find_zero_crossing(group, statistic) if len(group.rows) >= 2 else None
        shown = "none" if crossing is None else fmt(crossing)
        label = "zero_crossing" if key is None else f"zero_crossing[{table.axes[1]}={fmt(key)}]"
        text += f"# {label}={shown}\n"
    return text
