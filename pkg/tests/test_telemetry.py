import math

import pytest

from ringswarm.so3 import Vec3
from ringswarm.telemetry import CSV_HEADER, TelemetryRecord, read_csv, write_csv


def sample_records():
    return [
        TelemetryRecord(
            t=0.1 * k,
            agent_id=k % 3,
            x=Vec3(1.123456789123 + k, -2.0, 3.5e-7),
            x_d=Vec3(0.0, 10.0 / 3.0, -0.25),
            phi=math.pi / (k + 1),
            omega_zdi=1.5,
            flags="overtake" if k == 2 else "",
        )
        for k in range(6)
    ]


def test_roundtrip(tmp_path):
    path = tmp_path / "telemetry.csv"
    recs = sample_records()
    write_csv(recs, path)
    back = read_csv(path)
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        assert b.agent_id == a.agent_id
        assert b.flags == a.flags
        # 9 significant digits survive the roundtrip to that precision
        assert b.x.x == pytest.approx(a.x.x, rel=1e-8)
        assert b.phi == pytest.approx(a.phi, rel=1e-8)


def test_format_is_nine_significant_digits(tmp_path):
    path = tmp_path / "telemetry.csv"
    write_csv(sample_records(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("0,0,1.12345679,")


def test_read_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_read_rejects_malformed_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(CSV_HEADER + "\n1,2,3\n")
    with pytest.raises(ValueError):
        read_csv(path)
