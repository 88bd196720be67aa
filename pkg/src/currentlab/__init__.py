"""Numerical laboratory for polyhedral currents.

Simplicial chains with mass, boundary and flat-norm computations;
eigenvalue functionals of chain mass measures through ambient function
systems; intrinsic FEM spectra on curves and surfaces; and scenario
families for convergence studies.
"""

__version__ = "0.1.0"

from . import kernels
from .chains import (Chain, SimplexSet, SimplicialComplex, boundary,
                     build_complex, chain_from_json, chain_to_json,
                     chain_union, load_chain, lower_density, mass,
                     save_chain, set_of, simplex_volume, zero_chain)
from .measure import (GridReport, MassMeasure, integrate, mass_on_grid,
                      measure_to_csv, quadrature_measure, weak_gap)
from .basis import (RBFBasis, SplineBasis, default_basis_for_chain,
                    filter_dirichlet, gram_rank, make_rbf_basis,
                    make_spline_basis)
from .spectral import (MatrixPair, SpectralResult, ambient_lambda,
                       ambient_lambda_dirichlet, analytic_spectrum,
                       assemble, generalized_eigs, intrinsic_curve_spectrum,
                       intrinsic_surface_spectrum, merge_spectra)
from .flatnorm import (FlatNormCertificate, flat_distance, flat_norm,
                       verify_certificate)
from .scenarios import (OmegaMesh, ScenarioSpec, generate, poincare_check,
                        scenario_names)
from .acceptance import run_all
from . import errors
