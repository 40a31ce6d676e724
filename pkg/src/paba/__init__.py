"""Joint parameter and bandwidth allocation for partitioned edge learning."""

from .core_model import (
    ChannelState,
    GroupTopology,
    RateTable,
    SystemParams,
    WorkerProfile,
    learning_latency,
    round_latency,
    spectral_efficiency,
)
from .errors import InfeasibleError, InvalidArgumentError, PabaError, SolverFailure
from .simulator import Scenario, build_instance, run_rounds, sample_channels, sweep
from .solvers import (
    SCHEMES,
    Allocation,
    Instance,
    SolverOptions,
    baseline_allocation,
    bw_aware_param_alloc,
    joint_paba,
    model_size_max,
    param_aware_bw_alloc,
    single_worker_special,
    solve,
    uniform_group_special,
)

__version__ = "0.1.0"
