"""Fluctuation-theorem engine for heat exchange between two thermal qubits."""

from ._version import __version__  # noqa: F401

from .dynamics import (  # noqa: F401
    ExchangeCoupling,
    TimeGrid,
    build_exchange,
    certify_energy_conservation,
    evolve,
    propagator_at,
)
from .functionals import (  # noqa: F401
    HeatHistogram,
    PathFunctionals,
    assemble_heat_histogram,
    detailed_ft_ratio,
    heat_of_path,
    integral_ft_averages,
    mutual_informations,
    relative_entropies,
)
from .ingest import (  # noqa: F401
    StateSnapshot,
    UncertaintyConfig,
    load_snapshots,
    monte_carlo_uncertainty,
    psd_project,
    save_snapshots,
)
from .linalg import (  # noqa: F401
    SpectralEnsemble,
    hermitian_eig,
    partial_trace,
    propagator_from_hermitian,
    validate_density_matrix,
)
from .report import (  # noqa: F401
    FtReport,
    RunConfig,
    compare_runs,
    evaluate_run,
    export_snapshots,
    simulate_states,
    write_outputs,
)
from .states import (  # noqa: F401
    PLANCK_H_PEV_S,
    QubitHamiltonian,
    ThermalParameters,
    alpha_bound,
    correlated_initial_state,
    effective_local_beta,
    gibbs_state,
    preset,
)
from .trajectories import (  # noqa: F401
    BasisAssignment,
    PathRecord,
    assign_bases,
    forward_path_probabilities,
    gamma_of_path,
    reverse_path_probabilities,
)
