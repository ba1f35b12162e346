"""Critical Ising model on periodic isoradial graphs via dimers.

Library surface: isoradial graph construction and torus quotients, the
decorated (Fisher) dimer graph with its critical weights, Kasteleyn/Pfaffian
partition functions and Boltzmann probabilities, Fourier symbols and
bivariate characteristic polynomials, free energy, Gibbs edge correlations,
the critical Laplacian / double-graph identity suite, and brute-force
oracles for all of the above at desk scale.
"""

from .elliptic import complete_elliptic_k, coupling, dual_parameter, jacobi_sn_cn
from .fisher import FisherGraph, critical_weights, fisher_graph, matchings_of_contour
from .graphs import (
    PeriodicGraph,
    PeriodicIsoradialGraph,
    ToroidalGraph,
    dual,
    load_graph,
    quotient,
    skewed_honeycomb,
    standard_lattice,
)
from .kasteleyn import KasteleynSystem, orient, pfaffian
from .laurent import LaurentPoly2, newton_polygon
from .spectral import TorusSymbol, characteristic_polynomial, free_energy, zero_at_one_one

__all__ = [
    "PeriodicGraph",
    "PeriodicIsoradialGraph",
    "ToroidalGraph",
    "FisherGraph",
    "KasteleynSystem",
    "LaurentPoly2",
    "TorusSymbol",
    "characteristic_polynomial",
    "complete_elliptic_k",
    "coupling",
    "critical_weights",
    "dual",
    "dual_parameter",
    "fisher_graph",
    "free_energy",
    "jacobi_sn_cn",
    "load_graph",
    "matchings_of_contour",
    "newton_polygon",
    "orient",
    "pfaffian",
    "quotient",
    "skewed_honeycomb",
    "standard_lattice",
    "zero_at_one_one",
]
