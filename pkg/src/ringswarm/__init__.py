"""Deterministic swarm simulator on deformed circular orbits.

Agents track a virtual circle through a phase-dependent rotation of the
plane; a decentralized inverse-difference controller spaces them uniformly
around the ring using only the two neighboring phases.
"""

__version__ = "0.1.0"

from .so3 import Mat3, Rotation, Vec3, exp_so3, hat, vee
from .deformation import DeformationSpec, evaluate, parse, preset, to_text
from .embedding import EmbeddingConfig, circle_point, phase_of, to_embedding, to_world
from .phase_control import PhaseGains, PhaseView, lyapunov_value, phase_rate, wrap_to_pi
from .reference import PositionGains, advance_phase, next_target, pd_accel
from .agent import AgentRuntime, AgentState, SensorModel, agent_tick, step_plant
from .harness import Scenario, capacity, load_scenario, run, scenario_from_dict
from .metrics import min_pairwise_distance, separations, summarize

__all__ = [
    "Mat3",
    "Rotation",
    "Vec3",
    "exp_so3",
    "hat",
    "vee",
    "DeformationSpec",
    "evaluate",
    "parse",
    "preset",
    "to_text",
    "EmbeddingConfig",
    "circle_point",
    "phase_of",
    "to_embedding",
    "to_world",
    "PhaseGains",
    "PhaseView",
    "lyapunov_value",
    "phase_rate",
    "wrap_to_pi",
    "PositionGains",
    "advance_phase",
    "next_target",
    "pd_accel",
    "AgentRuntime",
    "AgentState",
    "SensorModel",
    "agent_tick",
    "step_plant",
    "Scenario",
    "capacity",
    "load_scenario",
    "run",
    "scenario_from_dict",
    "min_pairwise_distance",
    "separations",
    "summarize",
]
