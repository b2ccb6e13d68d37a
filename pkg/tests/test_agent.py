import math
import statistics

import pytest

from ringswarm.agent import (
    AgentRuntime,
    AgentState,
    ControlGains,
    SensorModel,
    agent_tick,
    held_tick,
    settle_phase,
    step_plant,
)
from ringswarm.deformation import DeformationSpec, parse, preset
from ringswarm.embedding import DegeneratePhase, EmbeddingConfig, circle_point, to_world
from ringswarm.phase_control import PhaseGains, wrap_to_pi
from ringswarm.reference import PositionGains
from ringswarm.so3 import Vec3

S0 = DeformationSpec(parse("0"), parse("0"), 0.0)


def make_gains(k_phi=0.5, omega_zd=1.0, **kw):
    return ControlGains(
        position=PositionGains(),
        phase=PhaseGains(k_phi=k_phi, omega_zd=omega_zd),
        **kw,
    )


def test_measure_exact_when_sigma_zero():
    s = SensorModel(0.0, 42)
    st = AgentState(Vec3(1.0, 2.0, 3.0), Vec3(0, 0, 0))
    assert s.measure(st) == Vec3(1.0, 2.0, 3.0)


def test_measure_noise_statistics():
    s = SensorModel(0.03, 7)
    st = AgentState(Vec3(0.0, 0.0, 0.0), Vec3(0, 0, 0))
    xs, ys, zs = [], [], []
    for _ in range(100_000):
        m = s.measure(st)
        xs.append(m.x)
        ys.append(m.y)
        zs.append(m.z)
    for axis in (xs, ys, zs):
        assert 0.029 <= statistics.pstdev(axis) <= 0.031


def test_measure_replay_determinism():
    st = AgentState(Vec3(5.0, -1.0, 2.0), Vec3(0, 0, 0))
    a = SensorModel(0.1, 99)
    b = SensorModel(0.1, 99)
    seq_a = [a.measure(st) for _ in range(50)]
    seq_b = [b.measure(st) for _ in range(50)]
    assert seq_a == seq_b


def test_step_plant_at_rest():
    st = AgentState(Vec3(1, 2, 3), Vec3(0, 0, 0))
    assert step_plant(st, Vec3(0, 0, 0), 0.1) == st


def test_step_plant_single_step():
    st = step_plant(AgentState(Vec3(0, 0, 0), Vec3(0, 0, 0)), Vec3(1, 0, 0), 0.1)
    assert st.v == Vec3(0.1, 0.0, 0.0)
    assert st.x == Vec3(0.010000000000000002, 0.0, 0.0)


def test_step_plant_matches_analytic_solution():
    # constant acceleration: semi-implicit Euler error is 0.5*|u|*dt*t exactly
    u = Vec3(2.0, -1.0, 0.5)
    dt = 0.1
    st = AgentState(Vec3(0, 0, 0), Vec3(0, 0, 0))
    for k in range(1, 201):
        st = step_plant(st, u, dt)
        t = k * dt
        analytic = u * (0.5 * t * t)
        bound = 0.5 * u.norm() * dt * t
        assert (st.x - analytic).norm() <= bound * (1 + 1e-9)


def test_settle_phase_exact_for_undistorted_circle():
    cfg = EmbeddingConfig(r_d=2.0, omega_zd=1.0, center=Vec3(0, 0, 5.0), deformation=S0)
    phi = settle_phase(Vec3(0.0, 2.0, 5.0), cfg)
    assert phi == pytest.approx(math.pi / 2, abs=1e-12)


def test_settle_phase_recovers_constructed_phase():
    d = preset("eq23")
    cfg = EmbeddingConfig(r_d=10.0, omega_zd=1.5, center=Vec3(0, 0, 10.0), deformation=d)
    for phi0 in (-2.5, -1.0, 0.3, 1.7, 3.0):
        x = to_world(Vec3(12.0 * math.cos(phi0), 12.0 * math.sin(phi0), 3.0), phi0, cfg)
        got = settle_phase(x, cfg)
        assert wrap_to_pi(got - phi0) == pytest.approx(0.0, abs=1e-9)


def test_agent_tick_equilibrium():
    # on the reference with uniform neighbors: commanded rate is exactly the
    # nominal one and the target sits on the analytic curve
    d = preset("eq23")
    cfg = EmbeddingConfig(r_d=10.0, omega_zd=1.5, center=Vec3(0, 0, 10.0), deformation=d)
    gains = make_gains(k_phi=0.02, omega_zd=1.5)
    phi = 0.4
    pos = to_world(circle_point(phi, 10.0), phi, cfg)
    rt = AgentRuntime(id=0, lead_id=1, lag_id=2, phi=phi, last_broadcast_phi=phi)
    gap = 2 * math.pi / 3
    res = agent_tick(rt, pos, (phi + gap, phi - gap), cfg, gains, 0.1)
    assert res.omega_zdi == 1.5
    want = to_world(circle_point(res.runtime.phi, 10.0), res.runtime.phi, cfg)
    assert (res.target - want).norm() < 1e-9


def test_agent_tick_first_tick_pull_is_proportional():
    # stationary agent 1 m outside a static undistorted circle: first-tick
    # command is k_x * error, pointing inward along -x
    cfg = EmbeddingConfig(r_d=10.0, omega_zd=0.0, center=Vec3(0, 0, 10.0), deformation=S0)
    gains = ControlGains(
        position=PositionGains(k_x=6.0, k_v=6.5 * math.sqrt(2.0)),
        phase=PhaseGains(k_phi=0.02, omega_zd=0.0, omega_cap=1.0),
    )
    pos = Vec3(11.0, 0.0, 10.0)
    rt = AgentRuntime(id=0, lead_id=1, lag_id=2, phi=0.0, last_broadcast_phi=0.0)
    gap = 2 * math.pi / 3
    res = agent_tick(rt, pos, (gap, -gap), cfg, gains, 0.1)
    assert res.u.x == pytest.approx(-6.0, abs=1e-9)
    assert abs(res.u.y) < 1e-9 and abs(res.u.z) < 1e-9
    assert res.u.norm() == pytest.approx(6.0 * 1.0, abs=1e-9)


def test_agent_tick_degenerate_raises():
    d = preset("eq23")
    cfg = EmbeddingConfig(r_d=10.0, omega_zd=1.5, center=Vec3(0, 0, 10.0), deformation=d)
    gains = make_gains(k_phi=0.02, omega_zd=1.5)
    rt = AgentRuntime(id=0, lead_id=1, lag_id=2, phi=0.0, last_broadcast_phi=0.0)
    with pytest.raises(DegeneratePhase):
        agent_tick(rt, Vec3(0.0, 0.0, 10.0), (1.0, -1.0), cfg, gains, 0.1)


def test_held_tick_keeps_target_and_broadcast():
    gains = make_gains()
    rt = AgentRuntime(
        id=0, lead_id=1, lag_id=2, phi=0.3, last_broadcast_phi=0.25,
        last_target=Vec3(1.0, 0.0, 0.0),
    )
    res = held_tick(rt, Vec3(0.5, 0.0, 0.0), gains, 0.1)
    assert res.target == Vec3(1.0, 0.0, 0.0)
    assert res.phi_broadcast == 0.25
    assert math.isnan(res.omega_zdi)
    assert res.runtime.phi == 0.3


def test_agent_tick_reads_only_two_neighbor_scalars():
    # locality is structural: the signature takes exactly (lead, lag) phases
    import inspect

    sig = inspect.signature(agent_tick)
    assert "neighbor_phis" in sig.parameters


def test_noise_free_static_fixpoint():
    # static ring (zero nominal rate): an agent placed exactly on its target
    # stays there to machine precision for 1000 ticks
    cfg = EmbeddingConfig(r_d=5.0, omega_zd=0.0, center=Vec3(0, 0, 2.0), deformation=S0)
    gains = ControlGains(
        position=PositionGains(),
        phase=PhaseGains(k_phi=0.1, omega_zd=0.0, omega_cap=1.0),
    )
    phi = 0.9
    pos = to_world(circle_point(phi, 5.0), phi, cfg)
    state = AgentState(pos, Vec3(0, 0, 0))
    rt = AgentRuntime(id=0, lead_id=1, lag_id=2, phi=phi, last_broadcast_phi=phi)
    gap = 2 * math.pi / 3
    for _ in range(1000):
        res = agent_tick(rt, state.x, (wrap_to_pi(phi + gap), wrap_to_pi(phi - gap)), cfg, gains, 0.1)
        state = step_plant(state, res.u, 0.1)
        rt = res.runtime
        assert (state.x - pos).norm() < 1e-6


def test_control_gains_validation():
    with pytest.raises(ValueError):
        make_gains(phase_blend=0.0)
    with pytest.raises(ValueError):
        make_gains(phase_gate=-1.0)
