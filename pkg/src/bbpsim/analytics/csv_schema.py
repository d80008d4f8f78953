#! /usr/bin/env python3
"""
Strict schemas of every CSV the simulator writes
Date: Mar 15, 2025
"""
# Standard Library Imports
import csv
import re
from pathlib import Path

# Local Imports
from bbpsim.analytics.models import MODEL_COLUMNS
from bbpsim.analytics.report import REPORT_COLUMNS
from bbpsim.errors import TraceError
from bbpsim.netsim.trace import BLOCKS_COLUMNS, COMMITS_COLUMNS, MESSAGES_COLUMNS, STALE_COLUMNS, SYNC_COLUMNS

_HEX = re.compile(r"[0-9a-f]{64}")


def _int(value: str) -> bool:
    return re.fullmatch(r"-?\d+", value) is not None


def _float(value: str) -> bool:
    try:
        float(value)
    except ValueError:
        return False
    return True


CHECKS = {
    "hex": lambda v: _HEX.fullmatch(v) is not None,
    "int": _int,
    "float": _float,
    "opt_int": lambda v: v == "" or _int(v),
    "opt_float": lambda v: v == "" or _float(v),
    "str": lambda v: True,
}

SCHEMAS: dict[str, dict[str, str]] = {
    "blocks": dict(zip(BLOCKS_COLUMNS, ("hex", "int", "int", "float", "opt_float", "opt_float", "opt_float"))),
    "messages": dict(zip(MESSAGES_COLUMNS, ("float", "int", "int", "str", "int"))),
    "sync": dict(zip(SYNC_COLUMNS, ("int", "int", "int"))),
    "stale": dict(zip(STALE_COLUMNS, ("str", "int", "int"))),
    "commits": dict(zip(COMMITS_COLUMNS, ("hex", "int", "float", "str", "int", "int", "float", "int", "int",
                                          "int"))),
    "report": {name: {"protocol": "str", "error": "str", "n_t": "int", "seed": "int", "stale_tx": "opt_int"}
               .get(name, "opt_float") for name in REPORT_COLUMNS},
    "model": dict(zip(MODEL_COLUMNS, ("str", "opt_int", "float", "opt_float", "opt_float", "float"))),
}


def check_csv(path: str | Path, schema: str | None = None) -> int:
    """
    Check a CSV file against its schema
    :param path: File to check
    :param schema: Schema name, the file stem by default
    :return: Number of data rows
    """
    path = Path(path)
    name = schema or path.stem
    if name not in SCHEMAS:
        raise TraceError(f"{path}: no schema named '{name}'")
    columns = SCHEMAS[name]
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(columns):
            raise TraceError(f"{path}: header {header} does not match {list(columns)}")
        n_rows = 0
        for line, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise TraceError(f"{path}:{line}: expected {len(columns)} fields, got {len(row)}")
            for (column, kind), value in zip(columns.items(), row):
                if not CHECKS[kind](value):
                    raise TraceError(f"{path}:{line}: column '{column}' is not {kind}: {value!r}")
            n_rows += 1
    return n_rows
