"""Structured reports with canonical, byte-reproducible serialization.

Every numeric result leaves the package through a :class:`Report`.  The
JSON form is canonical: object keys sorted, floats rendered with 17
significant digits, complex numbers as two-element ``[re, im]`` arrays.
Identical inputs therefore serialize to identical bytes.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _render(obj, out: io.StringIO, indent: int, level: int):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        keys = sorted(obj, key=str)
        for i, k in enumerate(keys):
            out.write(pad_in)
            out.write(json.dumps(str(k)))
            out.write(": ")
            _render(obj[k], out, indent, level + 1)
            out.write(",\n" if i + 1 < len(keys) else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.write("[]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad_in)
            _render(v, out, indent, level + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(pad + "]")
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, (bool, np.bool_)):
        out.write("true" if obj else "false")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite float in report payload: {x}")
        out.write(format(x, ".17g"))
    elif isinstance(obj, (complex, np.complexfloating)):
        _render([float(obj.real), float(obj.imag)], out, indent, level)
    elif isinstance(obj, np.ndarray):
        _render(obj.tolist(), out, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj)!r} canonically")


def canonical_dumps(obj: Any, indent: int = 2) -> str:
    """Canonical JSON text for ``obj`` (sorted keys, fixed float format)."""
    out = io.StringIO()
    _render(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def complex_matrix_payload(m) -> list:
    """Nested [re, im] pairs for a complex matrix."""
    arr = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def real_matrix_payload(m) -> list:
    arr = np.asarray(m, dtype=float)
    return [[float(x) for x in row] for row in arr]


@dataclass
class Report:
    """A named result tree plus reproducibility metadata."""

    kind: str
    payload: dict
    metadata: dict = field(default_factory=dict)

    def to_tree(self) -> dict:
        return {"kind": self.kind, "metadata": self.metadata, "payload": self.payload}

    def to_json(self) -> str:
        return canonical_dumps(self.to_tree())

    def main_table(self):
        """(header, rows) for the report's principal table, or None.

        Used by the CSV output mode; floats are rendered with the same
        17-significant-digit rule as the JSON form.
        """
        p = self.payload
        if self.kind == "born":
            header = ["from\\to"] + list(p["to_values"])
            rows = [[p["from_values"][k]] + list(map(_fmt, row))
                    for k, row in enumerate(p["matrix"])]
            return header, rows
        if self.kind == "validation":
            header = ["id", "status", "details"]
            rows = [[a["id"], a["status"], a["details"]] for a in p["assumptions"]]
            return header, rows
        if self.kind == "simulation":
            header = ["step", "experiment", "table", "key", "frequency"]
            rows = []
            for step in p["steps"]:
                for table in ("value_frequencies", "outcome_frequencies"):
                    for key in sorted(step[table]):
                        rows.append([
                            step["index"], step["experiment"], table, key,
                            _fmt(step[table][key]),
                        ])
            return header, rows
        if self.kind == "bell":
            header = ["pair", "correlation", "standard_error"]
            rows = []
            for name in sorted(p["correlations"]):
                se = p.get("standard_errors", {}).get(name)
                rows.append([name, _fmt(p["correlations"][name]),
                             "" if se is None else _fmt(se)])
            rows.append(["S", _fmt(p["S"]), ""])
            return header, rows
        return None

    def to_csv(self) -> str:
        table = self.main_table()
        if table is None:
            raise ValueError(f"report kind {self.kind!r} has no CSV form")
        header, rows = table
        lines = [",".join(str(c) for c in header)]
        for row in rows:
            lines.append(",".join(str(c) for c in row))
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return format(float(x), ".17g")
