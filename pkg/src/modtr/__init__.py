"""Volumes of moduli spaces of bordered surfaces by topological recursion.

Modules: coeffring (exact coefficients), kernels (initial data and moment
transforms), trengine (recursion, Airy tensors), stablegraphs (twisted
volumes as graph sums), hyperbolic (one-holed torus and pants geometry),
tqft (Frobenius algebras and conformal blocks), cli.
"""

from .coeffring import CoeffElem, EvenPoly
from .kernels import BetaScaled, Kontsevich, Mirzakhani, Twisted, twist
from .trengine import airy_tensors, check_airy_relations, ks_recursion, psi_intersections, twisted_volume, volume

__version__ = "0.1.0"
