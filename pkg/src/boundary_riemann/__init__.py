"""Self-similar solutions of boundary Riemann problems for viscous conservation laws.

Ships compressible Navier-Stokes and plane-wave MHD in symmetrized form,
the boundary-layer and wave-curve constructions that assemble the
solution, and a finite-volume viscous reference solver.
"""

from .envelope import monotone_concave_envelope, monotone_convex_envelope
from .model_core import BoundaryRegime, beta_map, check_hypotheses, make_mhd, make_navier_stokes
from .riemann import RiemannOptions, SelfSimilarSolution, admissibility_report, solve_boundary_riemann, zeta_tot
from .spectral import eig_EA, pencil_roots
from .viscous_ref import PdeRun, evolve, steady_layer_oracle

__version__ = "0.1.0"

__all__ = [
    "BoundaryRegime",
    "PdeRun",
    "RiemannOptions",
    "SelfSimilarSolution",
    "admissibility_report",
    "beta_map",
    "check_hypotheses",
    "eig_EA",
    "evolve",
    "make_mhd",
    "make_navier_stokes",
    "monotone_concave_envelope",
    "monotone_convex_envelope",
    "pencil_roots",
    "solve_boundary_riemann",
    "steady_layer_oracle",
    "zeta_tot",
]
