# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

FORMAT_VERSION = 1

# slot, iteration, choice per device, gain per device, min_rate, opt_min,
# distance_pct, combined probability per network
FLOAT_FORMAT = "{:.6f}"


@dataclass(frozen=True)
class StepRecord:
    slot: int
    iteration: int
    # network id chosen by each device
    choices: tuple[str, ...]
    gains: tuple[float, ...]
    min_rate: float
    opt_min: float
    distance_pct: float
    combined: tuple[float, ...]


def csv_header(device_ids: Sequence[str], network_ids: Sequence[str]) -> list[str]:
    return (
        ["slot", "iteration"]
        + [f"choice_{device}" for device in device_ids]
        + [f"gain_{device}" for device in device_ids]
        + ["min_rate", "opt_min", "distance_pct"]
        + [f"prob_{network}" for network in network_ids]
    )


def _fmt(value: float) -> str:
    return FLOAT_FORMAT.format(value)


def csv_row(record: StepRecord) -> list[str]:
    return (
        [str(record.slot), str(record.iteration)]
        + list(record.choices)
        + [_fmt(gain) for gain in record.gains]
        + [_fmt(record.min_rate), _fmt(record.opt_min), _fmt(record.distance_pct)]
        + [_fmt(p) for p in record.combined]
    )


def write_records(
    stream: TextIO,
    records: Iterable[StepRecord],
    device_ids: Sequence[str],
    network_ids: Sequence[str],
) -> int:
    """Write the header and one row per record; returns the number of rows."""
    writer = csv.writer(stream, lineterminator="\n")
    header = csv_header(device_ids, network_ids)
    writer.writerow(header)
    rows = 0
    for record in records:
        row = csv_row(record)
        if len(row) != len(header):
            raise ValueError(
                f"record for slot {record.slot} has {len(row)} columns, header has {len(header)}"
            )
        writer.writerow(row)
        rows += 1
    return rows


def write_records_csv(
    path: Path,
    records: Iterable[StepRecord],
    device_ids: Sequence[str],
    network_ids: Sequence[str],
) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        return write_records(stream, records, device_ids, network_ids)
