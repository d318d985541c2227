"""Numerical laboratory for coherent spin states, their fluctuation
operators, and the large-spin boson limit."""

from .bounds import BoundReport, fit_decay_exponent
from .correlators import (
    CoherentState,
    char_closed_form,
    classical_limit_check,
    covariance,
    mean,
    truncated_cumulant,
)
from .errors import ConfigError, ContractViolationError, ResourceLimitError
from .fluctuations import (
    bch_defect,
    build_fluctuation,
    clt_multi_check,
    clt_single_check,
    commutator_bounds,
    fluctuation_char,
    poly_char_spin,
    weyl_product_expectation,
)
from .fock import (
    FockSpace,
    SectorVector,
    boson_field,
    build_fock,
    convergence_product,
    convergence_single,
    dyson_fluctuation,
    dyson_spin_ops,
    moments_check,
    petz_bound_check,
    petz_j_bound_check,
    poly_char_boson,
)
from .bosonization import (
    BosonHamiltonian,
    SpinHamiltonianSpec,
    build_boson_limit,
    perturbed_evolution,
    renormalize,
    rotate_hamiltonian,
    spectral_compare,
)
from .ensemble import EnsembleConfig, collective_char, ensemble_fluctuation_check, kuperberg_clt
from .polynomials import NoncommPoly, anticommutator
from .spincore import (
    Direction,
    HalfInt,
    Lattice,
    TangentField,
    Vec3Field,
    coherent_vector,
    project_tangent,
    rotated_frame,
    rotated_spin_ops,
    spin_matrices,
)

__version__ = "0.1.0"
