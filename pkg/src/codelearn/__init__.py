"""Simulation laboratory for learning transitions of measured surface codes."""

__version__ = "0.1.0"

from . import duality, floquet, lattice, majorana, protocol, runner, sphere, statevector

__all__ = [
    "duality",
    "floquet",
    "lattice",
    "majorana",
    "protocol",
    "runner",
    "sphere",
    "statevector",
    "__version__",
]
