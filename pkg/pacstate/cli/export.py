"""Plot-ready CSV and JSON tables.

Numbers are written with 12 significant digits and missing values as an
empty CSV cell or JSON null. Nothing run-dependent (dates, hosts) is
written, so identical inputs give identical bytes.
"""
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, TextIO

import numpy as np

NUMBER_FORMAT = "%.12g"
FORMATS = ("csv", "json")

UNITS: dict[str, str] = {
    "tau": "1/Omega",
    "t": "1/Omega",
    "t1": "1/Omega",
    "t2": "1/Omega",
    "start": "1/Omega",
    "lab_start": "1/Omega",
    "duration": "1/Omega",
    "omega1": "Omega",
    "omega0": "Omega",
    "L": "um",
    "k_i": "1/um",
    "k_r": "1/um",
    "v_g": "um*Omega",
    "lo_phase": "rad",
    "phase_offset": "rad",
}


def unit_of(column: str) -> str:
    if column.startswith("L_"):
        return UNITS["L"]
    return UNITS.get(column, "1")


@dataclass
class Table:
    columns: list[str]
    rows: list[Sequence[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def units(self) -> list[str]:
        return [unit_of(column) for column in self.columns]

    def column(self, name: str) -> list[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


@dataclass
class GridTable:
    """Square matrix on two axes, written row-major along the first."""
    axis_names: tuple[str, str]
    first_axis: np.ndarray
    second_axis: np.ndarray
    values: np.ndarray
    value_name: str = "g2"
    meta: dict[str, Any] = field(default_factory=dict)

    def as_table(self) -> Table:
        table = Table([*self.axis_names, self.value_name], meta=self.meta)
        for i, first in enumerate(self.first_axis):
            for j, second in enumerate(self.second_axis):
                table.rows.append((first, second, self.values[i, j]))
        return table


def format_number(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, str):
        return value
    if value is None or math.isnan(value):
        return ""
    return NUMBER_FORMAT % value


def json_value(value: Any) -> Any:
    """JSON-safe copy: NaN becomes null and floats keep 12 digits."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, str) or value is None:
        return value
    if isinstance(value, (list, tuple, np.ndarray)):
        return [json_value(item) for item in value]
    if isinstance(value, dict):
        return {key: json_value(item) for key, item in value.items()}
    if isinstance(value, (int, np.integer)):
        return int(value)
    if math.isnan(value):
        return None
    if math.isinf(value):
        return NUMBER_FORMAT % value
    return float(NUMBER_FORMAT % value)


def write_csv(table: Table, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        f"{column} [{unit}]"
        for column, unit in zip(table.columns, table.units)
    )
    for row in table.rows:
        writer.writerow(format_number(value) for value in row)


def table_document(table: Table) -> dict[str, Any]:
    return {
        "layout": "table",
        "columns": table.columns,
        "units": table.units,
        "meta": json_value(table.meta),
        "rows": [[json_value(value) for value in row] for row in table.rows],
    }


def grid_document(grid: GridTable) -> dict[str, Any]:
    first, second = grid.axis_names
    return {
        "layout": "grid",
        "axes": {
            first: json_value(grid.first_axis),
            second: json_value(grid.second_axis),
        },
        "units": {
            first: unit_of(first),
            second: unit_of(second),
            grid.value_name: "1",
        },
        "meta": json_value(grid.meta),
        "values": json_value(grid.values),
    }


def render(result: Table | GridTable, fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}")
    if fmt == "json":
        if isinstance(result, GridTable):
            document = grid_document(result)
        else:
            document = table_document(result)
        return json.dumps(document, indent=1, sort_keys=True) + "\n"
    table = result.as_table() if isinstance(result, GridTable) else result
    buffer = io.StringIO()
    write_csv(table, buffer)
    return buffer.getvalue()


def write_result(
    result: Table | GridTable,
    output: Path | str | None = None,
    fmt: str = "csv",
) -> None:
    text = render(result, fmt)
    if output is None or str(output) == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_document(document: dict[str, Any], output: Path | str) -> None:
    text = json.dumps(
        json_value(document), indent=1, sort_keys=True, allow_nan=False,
    )
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")
