"""gridgsp: graph-signal state estimation for electric power networks.

Smoothness-regularized WLS estimation on the DC and AC power-flow models,
estimation-bound-driven sensor placement, and a Monte-Carlo experiment
harness, built on the susceptance-Laplacian graph view of the grid.
"""

__version__ = "0.1.0"

from .cases import load_case
from .netcase import (
    Branch,
    Bus,
    LaplacianMatrix,
    Network,
    build_laplacian,
    merged_edge_pairs,
    network_to_json,
    parse_case,
    parse_json_case,
    parse_matpower_case,
    validate_connectivity,
)
from .spectral import (
    GraphSpectrum,
    LowPassAnalysis,
    SmoothnessReport,
    apply_graph_filter,
    default_c2,
    dirichlet_energy,
    eig_laplacian,
    gft,
    igft,
    lowpass_analysis,
    smoothness_report,
)
from .dcmodel import (
    DCMeasurementModel,
    DCState,
    SensorIndex,
    build_dc_model,
    generate_dc_measurements,
    is_observable,
    wls_estimate,
)
from .gspdc import (
    GspConfig,
    PriorModel,
    gsp_wls,
    pm_wls,
    reconstruct_missing_power,
)
from .placement import (
    BusSelection,
    CRBReport,
    crb,
    edesign_selection,
    exhaustive_selection,
    greedy_selection,
    induced_sensor_rows,
    random_selection,
)
from .acmodel import (
    ACMeasurementModel,
    ACState,
    ac_gain,
    ac_is_observable,
    ac_jacobian,
    ac_measure,
    build_ac_model,
    generate_ac_measurements,
    induced_ac_rows,
)
from .gaussnewton import (
    GNConfig,
    GNTrace,
    gauss_newton_wls,
    pm_gauss_newton,
    regularized_gauss_newton,
)
from .harness import (
    ExperimentConfig,
    ResultRecord,
    emit_report,
    run_mse_experiment,
    run_observability_sweep,
)
from .powerflow import solve_power_flow
