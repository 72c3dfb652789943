"""Autonomous quantum-thermodynamics simulator.

Exact evolution of a bath / system / memory / work composite under a
time-independent Hamiltonian, catalytic-work-source verification,
heat/work/entropy ledgers with the erasure-cost identities, and
Schatten-norm speed limits validated against closed-form oracles.
"""

from .catalysis import CatalysisReport, verify
from .dynamics import (Evolution, Trajectory, compute_trajectory, evolution_for,
                       reduced_state, state_derivative, total_state,
                       weak_coupling_reference, write_trajectory_csv)
from .errors import (AutothermError, ContractError, DomainError, LayoutError,
                     ParameterError, QuadratureError, ScenarioError,
                     ScenarioParseError)
from .hamiltonian import (BlockTerm, BuiltHamiltonians, PauliTerm, Scenario,
                          build, builtin_scenario, check_energy_conservation,
                          check_ideal_memory, swap_counterexample)
from .layout import (BATH, CANONICAL_ORDER, MEMORY, SYSTEM, WORK,
                     CompositeOperator, SubsystemLayout)
from .quadrature import QuadratureConfig, adaptive_gauss
from .scenario_io import (parse_scenario_file, parse_scenario_text,
                          write_scenario_file, write_scenario_text)
from .speed_limits import (QtslReport, bekenstein_bound, dynamical_landauer_audit,
                           fannes_audit, hypothesis_testing_bound, qsl_time,
                           qtsl_time, schatten_distance, time_averaged_norm)
from .states import (DensityMatrix, WernerBasis, cmaybe_state, gibbs_state,
                     pure_state_from_amplitudes, relative_entropy,
                     von_neumann_entropy, werner_like_state,
                     werner_separability_edge)
from .tensor import (SchmidtTerm, commutator, evolution_operator, hermitian_eig,
                     operator_schmidt, partial_trace, partial_transpose,
                     permute_subsystems, schatten_norm, tensor_product)
from .thermo import (ThermoLedger, entropy_changes, first_law_residual, heat,
                     initial_mutual_information, internal_energy_change,
                     landauer_quantities, ledger, memory_energy_change,
                     second_law_residual, work)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
