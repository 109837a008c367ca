"""scanfreeze: gate-level scan-DFT shift-power toolkit.

Parses small sequential netlists (BENCH / structural Verilog subset),
inserts scan chains, generates stuck-at test patterns, measures switching
activity during scan shifting, ranks power-sensitive scan cells and
inserts freeze gates to cut shift power.
"""

__version__ = "0.1.0"

from .netlist import (Cell, Diagnostic, Net, Netlist, NetlistError,
                      PrimitiveKind, canonical_name, fanin_cone, fanout_cone,
                      levelize, validate)
from .logic import Logic3, eval_gate
from .bench import ParseError, parse_bench, parse_bench_file
from .vlog import emit_vlog, parse_vlog, parse_vlog_file
from .iso import find_isomorphism, isomorphic, structurally_equal
from .scan import (Chain, ChainMap, Partition, ScanConfig, Stitch,
                   insert_scan, partition_chains)
from .sim import (Mismatch, Pattern, PatternResult, RunResult, ScanRunner,
                  SimState, ToggleStats, compensate_load, compensate_unload,
                  run_chain_test, run_pattern, run_patterns, settle,
                  shift_cycle, test_clocks)
from .scanpat import read_scanpat, write_scanpat
from .faults import Fault, collapse_faults, enumerate_faults
from .faultsim import fault_simulate, fault_simulate_serial
from .podem import PodemOutcome, PodemStatus, podem
from .atpg import FaultReport, fill_expected, generate_patterns
from .power import (FreezeEntry, FreezePlan, PairToggleRow, path_gates,
                    rank_cells, render_toggle_table, sensitivity,
                    sensitivity_virtual, structural_score, toggle_table,
                    total_shift_toggles)
from .freeze import AreaModel, FreezeLog, area, insert_freeze
from .randgen import exhaustive_patterns, random_netlist

__all__ = [name for name in dir() if not name.startswith("_")]
