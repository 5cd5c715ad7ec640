"""Statevector QAOA for Max k-SAT with symmetric X-product and Grover mixers,
objective and threshold phase separators, and basin-hopping angle finding."""

from .engine import (
    GROVER_OBJ,
    GROVER_TH,
    TRANSVERSE_OBJ,
    AngleSchedule,
    Implementation,
    MetricsRecord,
    approximation_ratio,
    ground_state_probability,
    parse_implementation,
    run_qaoa,
)
from .errors import QaoaSatError
from .mixers import MixerSpec, apply_mixer, krawtchouk, parse_mixer, phase_profile
from .optimizer import (
    OptimizationResult,
    OptimizerConfig,
    basin_hop,
    extrapolate_schedule,
    local_optimize,
    optimize_rounds,
    rounds_to_optimal,
    scan_thresholds,
)
from .sat import (
    CostTable,
    Literal,
    SatInstance,
    brute_force_oracle,
    evaluate,
    generate_random_instance,
    parse_dimacs,
    write_dimacs,
)
from .separators import SeparatorSpec, apply_separator, build_separator, parse_separator
from .statevector import (
    Statevector,
    apply_diagonal_phase,
    expectation_diagonal,
    fwht_in_place,
    probability_of_set,
    uniform_state,
)

__version__ = "0.1.0"
