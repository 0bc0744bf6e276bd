"""Non-Hermitian tight-binding lattice simulator."""

import json

from ._core import (
    Error,
    InvalidArgument,
    NumericalError,
    __version__,
    adiabatic_reduce,
    chain_hamiltonian,
    config_hash,
    dispersion,
    evolve,
    fit_gaussian,
    group_velocity,
    parse_phase,
    preset_names,
    sandwich_hamiltonian,
    sawtooth_hamiltonian,
)
from . import _core


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def preset(name):
    return json.loads(_core.preset_config(name))


def resolve(config):
    return json.loads(_core.resolve_config(_text(config)))


def run(config, out_dir=None, format="csv+svg"):
    """Run a config (dict, JSON text or manifest) and return metrics, warnings and trajectory."""
    result = _core.run_experiment(_text(config), "" if out_dir is None else str(out_dir), format)
    result["config"] = json.loads(result["config"])
    return result


__all__ = [
    "Error",
    "InvalidArgument",
    "NumericalError",
    "__version__",
    "adiabatic_reduce",
    "chain_hamiltonian",
    "config_hash",
    "dispersion",
    "evolve",
    "fit_gaussian",
    "group_velocity",
    "parse_phase",
    "preset",
    "preset_names",
    "resolve",
    "run",
    "sandwich_hamiltonian",
    "sawtooth_hamiltonian",
]
