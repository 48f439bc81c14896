"""Minimum sensor placement for uniquely identifying failing grid transformers.

The pipeline: parse a grid description (``ingest``), enumerate candidate
sensor sites and build the k-hop bipartite observation graph (``construct``),
reduce to set cover and solve exactly (``solver``), label the chosen sites
and decode alarm patterns (``codes``); ``snr`` supplies the alarm metric the
sensors would compute in the field.
"""

from .graphs import (
    Bus, GridGraph, Line, MonitorInstance, SimpleGraph, Transformer,
    closed_neighbors, khop, neighbors,
)
from .ingest import (
    CaseFile, TransformerRule, build_grid, parse_case, read_grid, write_grid,
)
from .construct import (
    BUS_DISTANCE, NODE_DISTANCE, ReachRule, SensorSite,
    build_ics_instance, build_monitor, enumerate_sites, read_monitor, write_monitor,
)
from .solver import (
    Element, FeasibilityReport, SetCoverInstance, Solution, VerifyReport,
    check_feasible, enumerate_optima, export_lp, solve_bruteforce, solve_exact,
    solve_greedy, to_set_cover, verify,
)
from .codes import (
    AlarmPattern, DecodeResult, Placement, assign_codes, decode,
    read_placement, signature_csv, signature_table, write_placement,
)
from .snr import (
    SignalSpec, SignalWindow, SnrSeries, alarm, read_signal_csv,
    read_signal_spec, snr_db, snr_series, synth_signal, write_signal_csv,
    write_snr_csv,
)
from . import errors, fixtures

__all__ = [
    "Bus", "GridGraph", "Line", "MonitorInstance", "SimpleGraph", "Transformer",
    "closed_neighbors", "khop", "neighbors",
    "CaseFile", "TransformerRule", "build_grid", "parse_case", "read_grid", "write_grid",
    "BUS_DISTANCE", "NODE_DISTANCE", "ReachRule", "SensorSite",
    "build_ics_instance", "build_monitor", "enumerate_sites", "read_monitor", "write_monitor",
    "Element", "FeasibilityReport", "SetCoverInstance", "Solution", "VerifyReport",
    "check_feasible", "enumerate_optima", "export_lp", "solve_bruteforce", "solve_exact",
    "solve_greedy", "to_set_cover", "verify",
    "AlarmPattern", "DecodeResult", "Placement", "assign_codes", "decode",
    "read_placement", "signature_csv", "signature_table", "write_placement",
    "SignalSpec", "SignalWindow", "SnrSeries", "alarm", "read_signal_csv",
    "read_signal_spec", "snr_db", "snr_series", "synth_signal", "write_signal_csv",
    "write_snr_csv",
    "errors", "fixtures",
]

__version__ = "0.1.0"
