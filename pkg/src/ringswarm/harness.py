"""Scenario orchestration: spawn, ring topology, synchronous rounds, events.

The run loop is a synchronous-round simulation: every tick snapshots all
broadcast phases, runs each agent's tick against that snapshot, then steps
every plant.  Agent errors within a round are flagged in telemetry and the
agent holds its previous target; they never abort the run.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, replace
from pathlib import Path

from . import deformation, metrics
from .agent import (
    AgentRuntime,
    AgentState,
    ControlGains,
    SensorModel,
    agent_tick,
    held_tick,
    settle_phase,
    step_plant,
)
from .deformation import DeformationSpec, EvaluationError, parse
from .embedding import (
    DegeneratePhase,
    EmbeddingConfig,
    circle_point,
    to_embedding,
    to_world,
)
from .phase_control import CoincidentPhase, PhaseGains, wrap_to_pi
from .reference import PositionGains
from .so3 import Vec3
from .telemetry import TelemetryRecord


class ScenarioError(ValueError):
    """Scenario file is structurally or semantically invalid."""


def capacity(r_d: float, r_a: float) -> int:
    """How many agents of effective radius r_a fit on a circle of radius r_d."""
    if r_d <= 0.0 or r_a <= 0.0:
        raise ValueError("radii must be positive")
    return math.floor(2.0 * math.pi * r_d / r_a)


# ---------------------------------------------------------------------------
# Scenario description


@dataclass(frozen=True)
class SpawnSpec:
    """Initial placement of agents.

    kind is one of:
      explicit   -- positions lists world coordinates, one per agent
      box        -- per-axis uniform ranges
      near_curve -- evenly spread phases with bounded jitter, plus a random
                    offset of up to max_offset in the plane normal to the
                    curve (radial/vertical in embedding coordinates)
      on_curve   -- exactly uniform spacing on the deformed curve
    """

    kind: str
    positions: tuple[Vec3, ...] = ()
    box: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] = (
        (0.0, 0.0),
        (0.0, 0.0),
        (0.0, 0.0),
    )
    max_offset: float = 0.0
    phase_jitter: float = 0.4  # fraction of the nominal gap
    phase_offset: float = 0.0
    # "matched": start with the curve point's velocity at the agent's phase
    # (a throw-in); "rest": start motionless.  Starting 50 agents at rest
    # makes every agent sprint up to orbit speed, which writes a large
    # slow-to-heal long-wavelength pattern into the ring gaps.
    velocity: str = "matched"


@dataclass(frozen=True)
class TimedEvent:
    t: float
    kind: str  # "insert" | "remove"
    position: Vec3 | None = None  # insert
    agent_id: int | None = None  # remove


@dataclass(frozen=True)
class Scenario:
    name: str
    embedding: EmbeddingConfig
    n_agents: int
    gains: ControlGains
    sigma: float
    dt: float
    duration: float
    seed: int
    spawn: SpawnSpec
    events: tuple[TimedEvent, ...] = ()
    description: str = ""

    def __post_init__(self):
        if self.n_agents < 2:
            raise ScenarioError(f"n_agents must be >= 2, got {self.n_agents}")
        if not (self.dt > 0.0):
            raise ScenarioError(f"dt must be positive, got {self.dt}")
        if not (self.duration > 0.0):
            raise ScenarioError(f"duration must be positive, got {self.duration}")
        for ev in self.events:
            if not (0.0 <= ev.t <= self.duration):
                raise ScenarioError(f"event time {ev.t} outside [0, duration]")


def _require(d: dict, key: str, ctx: str):
    if key not in d:
        raise ScenarioError(f"missing key {key!r} in {ctx}")
    return d[key]


def _deformation_from_dict(d: dict) -> DeformationSpec:
    if "preset" in d:
        try:
            return deformation.preset(d["preset"])
        except deformation.UnknownPreset:
            raise ScenarioError(f"unknown deformation preset {d['preset']!r}") from None
    try:
        return DeformationSpec(
            parse(_require(d, "omega_x", "deformation")),
            parse(_require(d, "omega_y", "deformation")),
            float(_require(d, "s", "deformation")),
        )
    except deformation.ExprError as e:
        raise ScenarioError(f"bad deformation expression: {e}") from None


def _spawn_from_dict(d: dict) -> SpawnSpec:
    velocity = d.get("velocity", "matched")
    if velocity not in ("matched", "rest"):
        raise ScenarioError(f"spawn.velocity must be 'matched' or 'rest', got {velocity!r}")
    if "positions" in d:
        pts = tuple(Vec3(float(p[0]), float(p[1]), float(p[2])) for p in d["positions"])
        return SpawnSpec(kind="explicit", positions=pts, velocity=velocity)
    if "box" in d:
        b = d["box"]
        ranges = []
        for axis in ("x", "y", "z"):
            lo, hi = _require(b, axis, "spawn.box")
            ranges.append((float(lo), float(hi)))
        return SpawnSpec(kind="box", box=(ranges[0], ranges[1], ranges[2]), velocity=velocity)
    if "near_curve" in d:
        nc = d["near_curve"]
        return SpawnSpec(
            kind="near_curve",
            max_offset=float(_require(nc, "max_offset", "spawn.near_curve")),
            phase_jitter=float(nc.get("phase_jitter", 0.4)),
            velocity=velocity,
        )
    if "on_curve" in d:
        oc = d["on_curve"] if isinstance(d["on_curve"], dict) else {}
        return SpawnSpec(
            kind="on_curve",
            phase_offset=float(oc.get("phase_offset", 0.0)),
            velocity=velocity,
        )
    raise ScenarioError("spawn must contain one of: positions, box, near_curve, on_curve")


def scenario_from_dict(doc: dict, name: str = "") -> Scenario:
    emb = _require(doc, "embedding", "scenario")
    dfm = _deformation_from_dict(_require(doc, "deformation", "scenario"))
    center = _require(emb, "center", "embedding")
    try:
        cfg = EmbeddingConfig(
            r_d=float(_require(emb, "r_d", "embedding")),
            omega_zd=float(_require(emb, "omega_zd", "embedding")),
            center=Vec3(float(center[0]), float(center[1]), float(center[2])),
            deformation=dfm,
        )
    except ValueError as e:
        raise ScenarioError(str(e)) from None
    try:
        dfm.check_finite()
    except EvaluationError as e:
        raise ScenarioError(f"deformation not finite on [0, 2pi): {e}") from None

    agents = _require(doc, "agents", "scenario")
    gains_d = _require(doc, "gains", "scenario")
    sim = _require(doc, "sim", "scenario")
    try:
        gains = ControlGains(
            position=PositionGains(
                k_x=float(_require(gains_d, "k_x", "gains")),
                k_v=float(_require(gains_d, "k_v", "gains")),
            ),
            phase=PhaseGains(
                k_phi=float(_require(gains_d, "k_phi", "gains")),
                omega_zd=cfg.omega_zd,
                eps_clamp=float(gains_d.get("eps_clamp", 1e-3)),
                omega_cap=float(gains_d["omega_cap"]) if "omega_cap" in gains_d else None,
            ),
            phase_blend=float(gains_d.get("phase_blend", 0.05)),
            phase_gate=float(gains_d.get("phase_gate", 0.1)),
        )
    except ValueError as e:
        raise ScenarioError(str(e)) from None

    events = []
    for ev in doc.get("events", []):
        kind = _require(ev, "kind", "event")
        if kind == "insert":
            p = _require(ev, "position", "insert event")
            events.append(
                TimedEvent(
                    t=float(_require(ev, "t", "event")),
                    kind="insert",
                    position=Vec3(float(p[0]), float(p[1]), float(p[2])),
                )
            )
        elif kind == "remove":
            events.append(
                TimedEvent(
                    t=float(_require(ev, "t", "event")),
                    kind="remove",
                    agent_id=int(_require(ev, "id", "remove event")),
                )
            )
        else:
            raise ScenarioError(f"unknown event kind {kind!r}")

    noise = doc.get("noise", {})
    return Scenario(
        name=name or doc.get("name", ""),
        embedding=cfg,
        n_agents=int(_require(agents, "n", "agents")),
        gains=gains,
        sigma=float(noise.get("sigma", 0.0)),
        dt=float(_require(sim, "dt", "sim")),
        duration=float(_require(sim, "duration", "sim")),
        seed=int(_require(sim, "seed", "sim")),
        spawn=_spawn_from_dict(_require(agents, "spawn", "agents")),
        events=tuple(sorted(events, key=lambda e: e.t)),
        description=doc.get("description", ""),
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{p}: invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"{p}: scenario must be a JSON object")
    return scenario_from_dict(doc, name=doc.get("name", p.stem))


# ---------------------------------------------------------------------------
# Ring topology


def assign_ring(phases: list[tuple[int, float]]) -> list[int]:
    """Return agent ids in ring order (ascending phase, ties by id).

    The lead of the agent at rank r is the agent at rank (r+1) mod n.
    """
    if len(phases) < 2:
        raise ValueError("need at least two agents for a ring")
    return [i for i, _ in sorted(phases, key=lambda p: (p[1], p[0]))]


def _sensor_seed(seed: int, agent_id: int) -> int:
    return (seed * 1_000_003 + 7919 * (agent_id + 1)) & 0x7FFFFFFF


# ---------------------------------------------------------------------------
# Spawning


def spawn_positions(sc: Scenario, rng: random.Random) -> list[Vec3]:
    sp = sc.spawn
    cfg = sc.embedding
    n = sc.n_agents
    if sp.kind == "explicit":
        if len(sp.positions) != n:
            raise ScenarioError(
                f"spawn.positions has {len(sp.positions)} entries for n={n}"
            )
        return list(sp.positions)
    if sp.kind == "box":
        (x0, x1), (y0, y1), (z0, z1) = sp.box
        return [
            Vec3(rng.uniform(x0, x1), rng.uniform(y0, y1), rng.uniform(z0, z1))
            for _ in range(n)
        ]
    if sp.kind == "on_curve":
        out = []
        for i in range(n):
            phi = wrap_to_pi(sp.phase_offset + 2.0 * math.pi * i / n)
            out.append(to_world(circle_point(phi, cfg.r_d), phi, cfg))
        return out
    if sp.kind == "near_curve":
        gap = 2.0 * math.pi / n
        out = []
        for i in range(n):
            phi = wrap_to_pi(gap * i + sp.phase_jitter * gap * rng.uniform(-1.0, 1.0))
            # Offset in the plane normal to the curve's sweep: radial and
            # vertical in embedding coordinates.  Keeps measured distance
            # from the trajectory <= max_offset without scrambling phases.
            while True:
                mag = rng.uniform(0.0, sp.max_offset)
                beta = rng.uniform(0.0, 2.0 * math.pi)
                dr = mag * math.cos(beta)
                dz = mag * math.sin(beta)
                if cfg.r_d + dr > 0.2 * cfg.r_d:
                    break
            x_hat = Vec3((cfg.r_d + dr) * math.cos(phi), (cfg.r_d + dr) * math.sin(phi), dz)
            out.append(to_world(x_hat, phi, cfg))
        return out
    raise ScenarioError(f"unknown spawn kind {sp.kind!r}")


def corotating_velocity(x: Vec3, phi: float, cfg: EmbeddingConfig) -> Vec3:
    """Velocity of x if its embedding offset pattern swept at omega_zd.

    The point's embedding coordinates are held fixed in a frame rotating
    about the embedding axis; differentiating the world image by phase gives
    the velocity of a throw-in that already orbits at the nominal rate.  For
    a point on the curve this is the curve velocity itself.
    """
    x_hat = to_embedding(x, phi, cfg)
    h = 1e-6

    def world_at(p: float) -> Vec3:
        c, s = math.cos(p - phi), math.sin(p - phi)
        rotated = Vec3(
            c * x_hat.x - s * x_hat.y,
            s * x_hat.x + c * x_hat.y,
            x_hat.z,
        )
        return to_world(rotated, p, cfg)

    return (world_at(phi + h) - world_at(phi - h)) * (cfg.omega_zd / (2.0 * h))


# ---------------------------------------------------------------------------
# Run loop


@dataclass
class _LiveAgent:
    state: AgentState
    runtime: AgentRuntime
    sensor: SensorModel


@dataclass
class RunResult:
    scenario: Scenario
    records: list[TelemetryRecord]
    summary: metrics.MetricsSummary
    wall_time_s: float = 0.0
    overtake_ticks: int = 0


def _splice_into_ring(
    agents: dict[int, _LiveAgent], new_id: int, new_phi: float
) -> None:
    """Insert new_id between the ring pair whose forward arc contains new_phi."""
    ids = list(agents)
    # Walk the existing cycle via lead links.
    start = ids[0] if ids[0] != new_id else ids[1]
    cycle = [start]
    cur = agents[start].runtime.lead_id
    while cur != start:
        cycle.append(cur)
        cur = agents[cur].runtime.lead_id
    best = None
    for a in cycle:
        b = agents[a].runtime.lead_id
        pa = agents[a].runtime.last_broadcast_phi
        arc = (agents[b].runtime.last_broadcast_phi - pa) % (2.0 * math.pi)
        off = (new_phi - pa) % (2.0 * math.pi)
        if 0.0 < off <= arc or (arc == 0.0 and best is None):
            best = (a, b)
            break
    if best is None:  # numerically possible only with coincident phases
        best = (cycle[-1], cycle[0])
    a, b = best
    ra, rb = agents[a].runtime, agents[b].runtime
    agents[a].runtime = _replace_links(ra, lead_id=new_id)
    agents[b].runtime = _replace_links(rb, lag_id=new_id)
    rt = agents[new_id].runtime
    agents[new_id].runtime = _replace_links(rt, lead_id=b, lag_id=a)


def _replace_links(rt: AgentRuntime, lead_id: int | None = None, lag_id: int | None = None):
    kw = {}
    if lead_id is not None:
        kw["lead_id"] = lead_id
    if lag_id is not None:
        kw["lag_id"] = lag_id
    return replace(rt, **kw)


def _remove_from_ring(agents: dict[int, _LiveAgent], rid: int) -> None:
    rt = agents[rid].runtime
    before, after = rt.lag_id, rt.lead_id
    agents[before].runtime = _replace_links(agents[before].runtime, lead_id=after)
    agents[after].runtime = _replace_links(agents[after].runtime, lag_id=before)
    del agents[rid]


def run(sc: Scenario) -> RunResult:
    """Execute a scenario and summarize its telemetry."""
    t_wall = time.perf_counter()
    cfg = sc.embedding
    rng = random.Random(sc.seed)
    positions = spawn_positions(sc, rng)

    agents: dict[int, _LiveAgent] = {}
    init_phases: list[tuple[int, float]] = []
    for i, pos in enumerate(positions):
        try:
            phi = settle_phase(pos, cfg)
        except DegeneratePhase:
            raise ScenarioError(f"agent {i} spawns on the embedding axis at {pos}")
        init_phases.append((i, phi))
        v0 = corotating_velocity(pos, phi, cfg) if sc.spawn.velocity == "matched" else Vec3(0.0, 0.0, 0.0)
        agents[i] = _LiveAgent(
            state=AgentState(pos, v0),
            runtime=AgentRuntime(
                id=i, lead_id=-1, lag_id=-1, phi=phi, last_broadcast_phi=phi
            ),
            sensor=SensorModel(sc.sigma, _sensor_seed(sc.seed, i)),
        )
    ring = assign_ring(init_phases)
    n0 = len(ring)
    for r, i in enumerate(ring):
        agents[i].runtime = _replace_links(
            agents[i].runtime, lead_id=ring[(r + 1) % n0], lag_id=ring[(r - 1) % n0]
        )

    next_id = sc.n_agents
    events = list(sc.events)
    ev_idx = 0
    n_ticks = round(sc.duration / sc.dt)
    records: list[TelemetryRecord] = []
    overtake_ticks = 0

    for k in range(n_ticks):
        t = k * sc.dt

        # Apply events due at or before this tick.
        while ev_idx < len(events) and events[ev_idx].t <= t + 1e-9:
            ev = events[ev_idx]
            ev_idx += 1
            if ev.kind == "insert":
                aid = next_id
                next_id += 1
                try:
                    phi = settle_phase(ev.position, cfg)
                except DegeneratePhase:
                    raise ScenarioError(
                        f"inserted agent spawns on the embedding axis at {ev.position}"
                    )
                v0 = (
                    corotating_velocity(ev.position, phi, cfg)
                    if sc.spawn.velocity == "matched"
                    else Vec3(0.0, 0.0, 0.0)
                )
                agents[aid] = _LiveAgent(
                    state=AgentState(ev.position, v0),
                    runtime=AgentRuntime(
                        id=aid, lead_id=-1, lag_id=-1, phi=phi, last_broadcast_phi=phi
                    ),
                    sensor=SensorModel(sc.sigma, _sensor_seed(sc.seed, aid)),
                )
                _splice_into_ring(agents, aid, phi)
            else:
                if ev.agent_id not in agents:
                    raise ScenarioError(f"remove event for unknown agent {ev.agent_id}")
                if len(agents) <= 2:
                    raise ScenarioError("removal would leave fewer than two agents")
                _remove_from_ring(agents, ev.agent_id)

        # Synchronous round: all ticks read the same snapshot.
        snapshot = {i: a.runtime.last_broadcast_phi for i, a in agents.items()}
        results = {}
        flags = {}
        for i in sorted(agents):
            a = agents[i]
            meas = a.sensor.measure(a.state)
            neighbor = (snapshot[a.runtime.lead_id], snapshot[a.runtime.lag_id])
            try:
                res = agent_tick(a.runtime, meas, neighbor, cfg, sc.gains, sc.dt)
                flag = ""
            except DegeneratePhase:
                res = held_tick(a.runtime, meas, sc.gains, sc.dt)
                flag = "degenerate"
            except CoincidentPhase:
                res = held_tick(a.runtime, meas, sc.gains, sc.dt)
                flag = "coincident"
            except EvaluationError:
                res = held_tick(a.runtime, meas, sc.gains, sc.dt)
                flag = "eval_error"
            results[i] = res
            flags[i] = flag

        # Detect overtakes against the current ring.
        tick_overtake = False
        for aid in sorted(agents):
            lead = agents[aid].runtime.lead_id
            gap = wrap_to_pi(results[lead].phi_broadcast - results[aid].phi_broadcast)
            if gap <= 0.0:
                flags[aid] = (flags[aid] + "|overtake").lstrip("|")
                tick_overtake = True

        # Record, then advance every plant.
        for i in sorted(agents):
            a = agents[i]
            res = results[i]
            records.append(
                TelemetryRecord(
                    t=t,
                    agent_id=i,
                    x=a.state.x,
                    x_d=res.target,
                    phi=res.phi_broadcast,
                    omega_zdi=res.omega_zdi,
                    flags=flags[i],
                )
            )
            a.runtime = res.runtime
            a.state = step_plant_checked(a.state, res.u, sc.dt)

        # If any crossing occurred, rebuild the ring from the new phases.
        # Keeping links frozen (or only patching locally) across a crossing
        # is unstable: an inverted link pushes its pair further out of order
        # and strands near-coincident agents without mutual repulsion.
        if tick_overtake:
            overtake_ticks += 1
            ring = assign_ring(
                [(i, a.runtime.last_broadcast_phi) for i, a in agents.items()]
            )
            n_live = len(ring)
            for r, i in enumerate(ring):
                agents[i].runtime = _replace_links(
                    agents[i].runtime,
                    lead_id=ring[(r + 1) % n_live],
                    lag_id=ring[(r - 1) % n_live],
                )

    summary = metrics.summarize(records)
    return RunResult(
        scenario=sc,
        records=records,
        summary=summary,
        wall_time_s=time.perf_counter() - t_wall,
        overtake_ticks=overtake_ticks,
    )


def step_plant_checked(state: AgentState, u: Vec3, dt: float) -> AgentState:
    nxt = step_plant(state, u, dt)
    if not (nxt.x.is_finite() and nxt.v.is_finite()):
        raise ScenarioError("plant state diverged to non-finite values")
    return nxt
