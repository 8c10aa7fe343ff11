"""Result files: RFC-4180 CSV, JSON reports, and the run MANIFEST.

Floats in CSV bodies are written with 17 significant digits so values
round-trip bit-exactly; identical config + seed therefore reproduces
byte-identical CSV bodies (the MANIFEST carries wall time and is the one
file allowed to differ between reruns).
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path
from typing import Any, Iterable, Sequence

import yaml

__all__ = ["format_float", "write_csv", "write_json", "Manifest"]


def format_float(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """RFC-4180 CSV (CRLF line endings, minimal quoting), 17-digit floats."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) for v in row])


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class Manifest:
    """Run manifest: config echo, version, seed, wall time, output status."""

    def __init__(self, out_dir: Path, kind: str, config_echo: dict, version: str):
        self.out_dir = Path(out_dir)
        self.kind = kind
        self.config_echo = config_echo
        self.version = version
        self.outputs: list[str] = []
        self.status = "INCOMPLETE: run not finished"
        self._t0 = time.monotonic()

    def add_output(self, name: str) -> None:
        self.outputs.append(name)

    def finish(self, status: str = "OK") -> None:
        self.status = status

    def fail(self, reason: str) -> None:
        self.status = f"INCOMPLETE: {reason}"

    def write(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        wall = time.monotonic() - self._t0
        lines = [
            f"kind: {self.kind}",
            f"library_version: {self.version}",
            f"seed: {self.config_echo.get('seed')}",
            f"status: {self.status}",
            f"wall_time_s: {wall:.3f}",
            "outputs:",
        ]
        lines += [f"  - {name}" for name in self.outputs] or ["  []"]
        lines.append("config: |")
        echo = yaml.safe_dump(self.config_echo, sort_keys=True).rstrip("\n")
        lines += ["  " + ln for ln in echo.split("\n")]
        path = self.out_dir / "MANIFEST"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
