"""Telemetry CSV parsing.

Expected header: t,id,x,y,z,xd,yd,zd,phi,omega_zdi,flags
One row per agent per tick.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

REQUIRED_COLUMNS = ("t", "id", "x", "y", "z", "xd", "yd", "zd", "phi", "omega_zdi", "flags")


class SchemaError(ValueError):
    """Input CSV does not match the telemetry schema."""


@dataclass
class Telemetry:
    t: np.ndarray  # float, per row
    agent_id: np.ndarray  # int, per row
    pos: np.ndarray  # (rows, 3) actual position
    target: np.ndarray  # (rows, 3) desired position
    phi: np.ndarray
    omega: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.unique(self.t)

    @property
    def agent_ids(self) -> np.ndarray:
        return np.unique(self.agent_id)

    def rows_at(self, t: float) -> np.ndarray:
        return np.nonzero(self.t == t)[0]

    def agent(self, agent_id: int) -> "Telemetry":
        m = self.agent_id == agent_id
        if not np.any(m):
            raise SchemaError(f"no rows for agent {agent_id}")
        return Telemetry(
            self.t[m], self.agent_id[m], self.pos[m], self.target[m], self.phi[m], self.omega[m]
        )


def read_telemetry(path: str | Path) -> Telemetry:
    try:
        f = open(path, "r", newline="")
    except OSError as e:
        raise SchemaError(f"cannot open {path}: {e}") from None
    with f:
        reader = csv.DictReader(f)
        cols = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in cols]
        if missing:
            raise SchemaError(f"missing columns: {', '.join(missing)}")
        t, ids, pos, tgt, phi, omega = [], [], [], [], [], []
        for row in reader:
            try:
                t.append(float(row["t"]))
                ids.append(int(row["id"]))
                pos.append((float(row["x"]), float(row["y"]), float(row["z"])))
                tgt.append((float(row["xd"]), float(row["yd"]), float(row["zd"])))
                phi.append(float(row["phi"]))
                omega.append(float(row["omega_zdi"]))
            except (TypeError, ValueError) as e:
                raise SchemaError(f"bad row {reader.line_num}: {e}") from None
    if not t:
        raise SchemaError("no data rows")
    return Telemetry(
        np.asarray(t),
        np.asarray(ids, dtype=int),
        np.asarray(pos),
        np.asarray(tgt),
        np.asarray(phi),
        np.asarray(omega),
    )
