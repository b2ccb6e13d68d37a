import math
import random

import pytest

from ringswarm.metrics import (
    convergence_time,
    default_band_deg,
    max_pairwise_distance,
    min_pairwise_distance,
    separations,
    spacing_energy,
    summarize,
)
from ringswarm.so3 import Vec3
from ringswarm.telemetry import TelemetryRecord


def test_separations_uniform_50():
    phases = [2 * math.pi * i / 50 - math.pi for i in range(50)]
    seps = separations(phases)
    assert len(seps) == 50
    for s in seps:
        assert s == pytest.approx(7.2, abs=1e-9)


def test_separations_uniform_3():
    seps = separations([0.0, 2 * math.pi / 3, -2 * math.pi / 3])
    for s in seps:
        assert s == pytest.approx(120.0, abs=1e-9)


def test_separations_two_antipodal():
    seps = separations([0.0, math.pi])
    assert seps == pytest.approx([180.0, 180.0])


def test_separations_sum_is_360():
    rng = random.Random(51)
    for _ in range(200):
        n = rng.randint(2, 40)
        phases = [rng.uniform(-math.pi, math.pi) for _ in range(n)]
        seps = separations(phases)
        assert sum(seps) == pytest.approx(360.0, abs=1e-6)
        assert all(0.0 <= s < 360.0 for s in seps)


def test_min_pairwise_direct():
    assert min_pairwise_distance([Vec3(0, 0, 0), Vec3(0.54, 0, 0)]) == pytest.approx(0.54)


def test_min_pairwise_coincident():
    assert min_pairwise_distance([Vec3(1, 1, 1), Vec3(1, 1, 1)]) == 0.0


def test_min_pairwise_equilateral():
    pts = [
        Vec3(math.cos(2 * math.pi * k / 3), math.sin(2 * math.pi * k / 3), 0.0)
        for k in range(3)
    ]
    assert min_pairwise_distance(pts) == pytest.approx(math.sqrt(3.0), abs=1e-12)


def test_pairwise_invariances():
    rng = random.Random(52)
    pts = [Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(8)]
    d0 = min_pairwise_distance(pts)
    shuffled = list(pts)
    rng.shuffle(shuffled)
    assert min_pairwise_distance(shuffled) == d0
    shift = Vec3(3.0, -1.0, 2.0)
    assert min_pairwise_distance([p + shift for p in pts]) == pytest.approx(d0, abs=1e-12)
    assert max_pairwise_distance([p + shift for p in pts]) == pytest.approx(
        max_pairwise_distance(pts), abs=1e-12
    )


def test_spacing_energy_uniform_is_zero():
    # quarter phases have exactly representable, bitwise-equal gaps
    phases = [-math.pi, -math.pi / 2, 0.0, math.pi / 2]
    assert spacing_energy(phases) == 0.0
    # a generic uniform ring is zero up to last-ulp gap differences
    generic = [2 * math.pi * i / 6 - math.pi for i in range(6)]
    assert spacing_energy(generic) < 1e-25


def test_convergence_time_already_uniform():
    times = [0.1 * k for k in range(100)]
    series = [[120.0, 120.0, 120.0]] * 100
    assert convergence_time(times, series, 3, band_deg=5.0, hold_s=2.0) == 0.0


def test_convergence_time_enters_band():
    times = [0.1 * k for k in range(100)]
    series = [[90.0, 150.0, 120.0]] * 30 + [[119.0, 121.0, 120.0]] * 70
    got = convergence_time(times, series, 3, band_deg=5.0, hold_s=2.0)
    assert got == pytest.approx(3.0)


def test_convergence_time_requires_hold():
    times = [0.1 * k for k in range(100)]
    series = (
        [[90.0, 150.0, 120.0]] * 30
        + [[119.0, 121.0, 120.0]] * 10  # 1 s only
        + [[90.0, 150.0, 120.0]] * 10
        + [[119.0, 121.0, 120.0]] * 50
    )
    got = convergence_time(times, series, 3, band_deg=5.0, hold_s=2.0)
    assert got == pytest.approx(5.0)


def test_convergence_time_none_when_never():
    times = [0.1 * k for k in range(50)]
    series = [[90.0, 150.0, 120.0]] * 50
    assert convergence_time(times, series, 3, band_deg=5.0, hold_s=2.0) is None


def test_default_band():
    assert default_band_deg(3) == 5.0
    assert default_band_deg(50) == 1.0


def synthetic_records(n=4, ticks=60, dt=0.1, insert_at=None):
    recs = []
    for k in range(ticks):
        t = k * dt
        live = n if insert_at is None or t < insert_at else n + 1
        for i in range(live):
            phi = 2 * math.pi * i / live - math.pi + 0.3 * t
            phi = (phi + math.pi) % (2 * math.pi) - math.pi
            pos = Vec3(math.cos(phi), math.sin(phi), 1.0)
            recs.append(
                TelemetryRecord(t=t, agent_id=i, x=pos, x_d=pos, phi=phi, omega_zdi=1.0)
            )
    return recs


def test_summarize_single_epoch():
    s = summarize(synthetic_records())
    assert len(s.epochs) == 1
    e = s.epochs[0]
    assert e.n_agents == 4
    assert e.convergence_time_s == 0.0
    assert e.steady_oscillation_deg == pytest.approx(0.0, abs=1e-6)
    assert s.separations_deg[-1] == pytest.approx([90.0] * 4, abs=1e-6)


def test_summarize_epochs_split_on_agent_set_change():
    s = summarize(synthetic_records(insert_at=3.0))
    assert len(s.epochs) == 2
    assert s.epochs[0].n_agents == 4
    assert s.epochs[1].n_agents == 5
    assert s.epochs[1].t_start == pytest.approx(3.0)
    assert s.epochs[1].target_separation_deg == pytest.approx(72.0)


def test_summary_dict_keys():
    d = summarize(synthetic_records()).to_dict()
    for key in (
        "convergence_time_s",
        "steady_oscillation_deg",
        "min_distance_m",
        "max_distance_m",
        "final_separations_deg",
        "lyapunov_final",
        "epochs",
    ):
        assert key in d
