"""Quantum reference frames, screens and free-energy alignment."""

import json

from ._core import (
    QfepError,
    chsh,
    dissipation_time,
    entanglement_entropy,
    leggett_garg,
    minimal_bit_time,
    scenario_names,
)
from ._core import _feasibility_json, _run

__all__ = [
    "QfepError",
    "chsh",
    "dissipation_time",
    "entanglement_entropy",
    "feasibility",
    "leggett_garg",
    "minimal_bit_time",
    "run",
    "scenario_names",
]


def feasibility(path):
    """Joint-distribution feasibility report for a context CSV file."""
    return json.loads(_feasibility_json(str(path)))


def run(scenario, config_text="", seed=0, shots=None):
    """Run a registered scenario in memory; returns {file name: bytes}."""
    return _run(scenario, config_text, seed, shots)
