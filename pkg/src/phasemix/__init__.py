"""Phase-mixing laboratory for 1D transport in a confining quartic potential."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .action_angle import (
    ActionAngle,
    AngleEnergy,
    ChartError,
    ChartRangeError,
    OrbitChart,
    build_chart,
    chart_range_for_support,
    compute_c,
    compute_c_prime,
    from_action_angle,
    from_angle_energy,
    rate_a,
    to_action_angle,
    to_angle_energy,
)
from .flow import FlowError, FlowSpec, flow_map, orbit_period
from .mixing import (
    DecayReport,
    FitError,
    SpectrumEntry,
    VectorFieldProbe,
    fit_decay,
    q_fourier_spectrum,
    solution_bar,
    sup_phi_t,
    vector_field_norms,
)
from .moments import MomentCalculator, MomentSeries, cumulative_from_zero, spatial_grid
from .potential import (
    PhasePoint,
    PotentialParams,
    dphi,
    hamiltonian,
    invert_phi,
    phi,
)
from .transport import (
    InitialData,
    actionangle_evaluator,
    characteristic_evaluator,
    evaluate_f_actionangle,
    evaluate_f_characteristic,
    make_initial_data,
)

__version__ = "0.1.0"
