"""Sequential Bell scenarios with unsharp measurements: bounds, chains, certification, incompatibility."""

from .bell import bell_value, local_bound, pnc_bound, seesaw_max, sos_diagnose
from .certification import BellTuple, certify_ranges, invert_tuple, surface_sweep
from .chain import ChainConfig, max_fourth_value, predicted_values, run_chain, verify_theorem_conditions
from .incompatibility import degree_pair, degree_triple, degree_trine, equal_incompatibility_point
from .quantum import ObservableTriple, QuantumState, UnsharpSetting, canonical_realization, luders_update

__version__ = "0.1.0"

__all__ = [
    "BellTuple",
    "ChainConfig",
    "ObservableTriple",
    "QuantumState",
    "UnsharpSetting",
    "bell_value",
    "canonical_realization",
    "certify_ranges",
    "degree_pair",
    "degree_triple",
    "degree_trine",
    "equal_incompatibility_point",
    "invert_tuple",
    "local_bound",
    "luders_update",
    "max_fourth_value",
    "pnc_bound",
    "predicted_values",
    "run_chain",
    "seesaw_max",
    "sos_diagnose",
    "surface_sweep",
    "verify_theorem_conditions",
]
