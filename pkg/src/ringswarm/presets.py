"""Bundled scenario presets (JSON documents shipped with the package)."""

from __future__ import annotations

import json
from importlib import resources

from .harness import Scenario, scenario_from_dict

_SCENARIO_DESCRIPTIONS = {
    "sim50": "50 agents, 10 m deformed orbit at 10 m height, noisy sensing",
    "insert4": "3 agents on a 3 m orbit; a 4th joins at t=15 s",
    "physical5": "5 agents, 1 m orbit at 0.9 m height (indoor-scale property run)",
}


def scenario_preset_names() -> list[str]:
    return list(_SCENARIO_DESCRIPTIONS)


def scenario_description(name: str) -> str:
    return _SCENARIO_DESCRIPTIONS.get(name, "")


def load_preset(name: str) -> Scenario:
    if name not in _SCENARIO_DESCRIPTIONS:
        raise KeyError(name)
    doc = json.loads(resources.files("ringswarm").joinpath(f"presets/{name}.json").read_text())
    return scenario_from_dict(doc, name=name)


def preset_document(name: str) -> dict:
    if name not in _SCENARIO_DESCRIPTIONS:
        raise KeyError(name)
    return json.loads(resources.files("ringswarm").joinpath(f"presets/{name}.json").read_text())
