"""Encircling exceptional points of a dissipative qubit.

Thin wrappers over the C++ core. Configurations are dicts with the same
layout as the JSON files read by the ``epdyn`` command-line tool.
"""

import json

from . import _epdyn
from ._epdyn import NumericError

__all__ = [
    "NumericError",
    "preset_names",
    "preset",
    "run",
    "trajectory",
    "vorticity",
    "sweep",
    "table",
    "riemann",
]


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def preset_names():
    return list(_epdyn.preset_names())


def preset(name):
    """Configuration dict of a built-in trajectory."""
    return json.loads(_epdyn.preset_config(name))


def run(config):
    """Summary dict: fidelities, tau_crit, crossings, vorticity, classification."""
    return json.loads(_epdyn.summary(_dump(config)))


def trajectory(config):
    return _epdyn.trajectory(_dump(config))


def vorticity(config):
    return json.loads(_epdyn.vorticity(_dump(config)))


def sweep(spec, workers=1):
    """CSV text, rows sorted by the axis values."""
    return _epdyn.sweep(_dump(spec), workers)


def table(samples=1001):
    return json.loads(_epdyn.table(samples))


def riemann(gamma=0.06, resolution=65):
    return _epdyn.riemann(gamma, resolution)
