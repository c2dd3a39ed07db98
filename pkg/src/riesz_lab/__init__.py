"""riesz-lab: Riesz and log gas energies at desk scale.

Interaction kernels with their extension parameters, closed-form
equilibrium measures, the exact splitting of the n-point energy,
gradient-descent minimizers, renormalized energies of periodic
configurations (Epstein zeta / torus Green functions), and Metropolis
sampling of the Gibbs measure.
"""

from ._backend import BACKEND
from .equilibrium import (EquilibriumModel, circular_law_model, frostman_residual,
                          model_by_name, potential, predicted_next_order_constant,
                          semicircle_model, zeta)
from .errors import DomainError, NumericError, RieszLabError
from .hamiltonian import (Configuration, SplitReport, discrepancy, gradient,
                          hamiltonian, next_order_scaled, split)
from .kernels import KernelSpec, f_eta, g_eval, g_truncated, make_kernel
from .lattice import (Lattice2D, LatticeEnergyReport, TorusConfig,
                      epstein_zeta_cs, epstein_zeta_cs_diff, epstein_zeta_direct,
                      green_1d, periodic_W, relative_lattice_W,
                      renormalized_self_energy_1d, scale_W,
                      scan_fundamental_domain, truncated_periodic_energy,
                      unscale_W, xi_1d)
from .minimize import (MinimizeOptions, MinimizeResult, SeparationReport,
                       fit_expansion, minimize_local, minimize_periodic,
                       multistart, sample_initial, separation_report)
from .sampler import ChainState, SamplerStats, anneal, mh_step, run_chain
from .specfun import bessel_k, gamma_fn, riemann_zeta, sigma_div

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
