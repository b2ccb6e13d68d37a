"""Telemetry records and their CSV serialization.

One row per agent per tick.  Floats are printed with 9 significant digits;
two runs with the same seed produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .so3 import Vec3

CSV_HEADER = "t,id,x,y,z,xd,yd,zd,phi,omega_zdi,flags"


@dataclass(frozen=True)
class TelemetryRecord:
    t: float
    agent_id: int
    x: Vec3  # true position at the start of the tick
    x_d: Vec3  # target generated this tick
    phi: float  # broadcast (measured) phase
    omega_zdi: float  # commanded angular rate (nan on a held tick)
    flags: str = ""


def _f(v: float) -> str:
    return format(v, ".9g")


def write_csv(records: list[TelemetryRecord], path: str | Path) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(CSV_HEADER + "\n")
        for r in records:
            f.write(
                f"{_f(r.t)},{r.agent_id},"
                f"{_f(r.x.x)},{_f(r.x.y)},{_f(r.x.z)},"
                f"{_f(r.x_d.x)},{_f(r.x_d.y)},{_f(r.x_d.z)},"
                f"{_f(r.phi)},{_f(r.omega_zdi)},{r.flags}\n"
            )


def read_csv(path: str | Path) -> list[TelemetryRecord]:
    records = []
    with open(path, "r") as f:
        header = f.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected telemetry header: {header!r}")
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 11:
                raise ValueError(f"malformed telemetry row: {line!r}")
            records.append(
                TelemetryRecord(
                    t=float(parts[0]),
                    agent_id=int(parts[1]),
                    x=Vec3(float(parts[2]), float(parts[3]), float(parts[4])),
                    x_d=Vec3(float(parts[5]), float(parts[6]), float(parts[7])),
                    phi=float(parts[8]),
                    omega_zdi=float(parts[9]),
                    flags=parts[10],
                )
            )
    return records
