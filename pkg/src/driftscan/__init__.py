"""Offline control-flow drift detection for event logs."""

from .conformance import pc_precision, precision_from_sets, rt_fitness
from .detector import (
    ConformanceDriftDetector,
    DetectorConfig,
    DriftReport,
    WindowMeasurement,
    confirm_drift,
    detect,
    identify_drift,
)
from .discovery import InductiveMiner, discover, mine_tree
from .evaluation import EvalResult, GroundTruth, classify, fscore
from .event_log import (
    Event,
    EventLog,
    SlidingWindow,
    Trace,
    extract_dfr,
    parse_log,
    read_log,
    serialize_log,
    window_at,
    write_log,
)
from .exceptions import (
    ConfigurationError,
    DegenerateModelError,
    DriftScanError,
    InputTooSmallError,
    LogParseError,
    NetStructureError,
    PatternError,
    ReplayBudgetExceeded,
    TransitionNotEnabled,
    TreeSyntaxError,
    WindowBoundsError,
)
from .loggen import LOAN_MODEL, PATTERNS, apply_pattern, generate_entry, play_out, splice
from .petri_net import Marking, PetriNet, Transition, enabled, extract_olp, fire, from_pnml, is_replayable, to_pnml
from .process_tree import ProcessTree, format_tree, parse_tree, to_petri_net
from .stats import RegressionResult, slope_test

__all__ = [
    "apply_pattern",
    "classify",
    "ConfigurationError",
    "confirm_drift",
    "ConformanceDriftDetector",
    "DegenerateModelError",
    "detect",
    "DetectorConfig",
    "discover",
    "DriftReport",
    "DriftScanError",
    "enabled",
    "EvalResult",
    "Event",
    "EventLog",
    "extract_dfr",
    "extract_olp",
    "fire",
    "format_tree",
    "from_pnml",
    "fscore",
    "generate_entry",
    "GroundTruth",
    "identify_drift",
    "InductiveMiner",
    "InputTooSmallError",
    "is_replayable",
    "LOAN_MODEL",
    "LogParseError",
    "Marking",
    "mine_tree",
    "NetStructureError",
    "parse_log",
    "parse_tree",
    "PatternError",
    "PATTERNS",
    "pc_precision",
    "PetriNet",
    "play_out",
    "precision_from_sets",
    "ProcessTree",
    "read_log",
    "RegressionResult",
    "ReplayBudgetExceeded",
    "rt_fitness",
    "serialize_log",
    "SlidingWindow",
    "slope_test",
    "splice",
    "to_petri_net",
    "to_pnml",
    "Trace",
    "Transition",
    "TransitionNotEnabled",
    "TreeSyntaxError",
    "window_at",
    "WindowBoundsError",
    "WindowMeasurement",
    "write_log",
]

__version__ = "0.1.0"
