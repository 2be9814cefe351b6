"""Experiment records and their CSV / JSON-lines encoding."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

FIELDS = ("experiment", "n", "sample_index", "seed_used", "estimator", "value", "elapsed_ms")


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    n: int
    sample_index: int
    seed_used: int
    estimator: str
    value: float
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite value for {self.estimator} (n={self.n}, i={self.sample_index})")


def derive_seed(master: int, experiment: str, n: int, index: int) -> int:
    """64-bit seed from (master, experiment, n, index), independent of run order."""
    key = f"{int(master)}|{experiment}|{int(n)}|{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def _num(x: float) -> str:
    return f"{float(x):.17g}"


def to_text(records, fmt: str = "csv") -> str:
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(",".join(FIELDS) + "\n")
        for r in records:
            buf.write(
                f"{r.experiment},{r.n},{r.sample_index},{r.seed_used},{r.estimator},{_num(r.value)},{_num(r.elapsed_ms)}\n"
            )
    elif fmt == "json":
        for r in records:
            parts = [
                f'"experiment": {json.dumps(r.experiment)}',
                f'"n": {r.n}',
                f'"sample_index": {r.sample_index}',
                f'"seed_used": {r.seed_used}',
                f'"estimator": {json.dumps(r.estimator)}',
                f'"value": {_num(r.value)}',
                f'"elapsed_ms": {_num(r.elapsed_ms)}',
            ]
            buf.write("{" + ", ".join(parts) + "}\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue()


def emit(records, fmt: str, path) -> None:
    """Write records as UTF-8 with LF endings; ``path=None`` is not accepted here."""
    Path(path).write_text(to_text(records, fmt), encoding="utf-8", newline="\n")


def _coerce(row: dict) -> ExperimentRecord:
    return ExperimentRecord(
        experiment=str(row["experiment"]),
        n=int(row["n"]),
        sample_index=int(row["sample_index"]),
        seed_used=int(row["seed_used"]),
        estimator=str(row["estimator"]),
        value=float(row["value"]),
        elapsed_ms=float(row["elapsed_ms"]),
    )


def parse(text: str, fmt: str = "csv") -> list:
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != FIELDS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [_coerce(row) for row in reader]
    if fmt == "json":
        return [_coerce(json.loads(ln)) for ln in text.splitlines() if ln.strip()]
    raise ValueError(f"unknown format {fmt!r}")


def read(path, fmt: str = "csv") -> list:
    return parse(Path(path).read_text(encoding="utf-8"), fmt)
