"""Numerical toolkit for relaxation rates of GKLS (Lindblad) generators.

Builds and canonicalizes generators, computes relaxation spectra, checks
the universal bound Gamma_max <= (1/d) sum Gamma_l, reduces trajectories to
classical Pauli rate equations, estimates Lyapunov exponents of the
associated flows, and witnesses non-Markovianity of time-dependent
generators through bound violation.
"""

from . import classical, generator, lyapunov, matcore, pauli, ratelang, spectra, witness
from .errors import GklsError

__all__ = [
    "classical",
    "generator",
    "lyapunov",
    "matcore",
    "pauli",
    "ratelang",
    "spectra",
    "witness",
    "GklsError",
]

__version__ = "0.1.0"
