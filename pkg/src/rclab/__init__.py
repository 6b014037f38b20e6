"""Random-circuit laboratory: graph-state Clifford engine and dense statevector tools."""
from .graph_state import GraphState, MeasurementOutcome, new_zero_state
from .pauli_clifford import CliffordOne, CliffordTables, CliffordTwo, Pauli, build_tables, get_tables

__all__ = [
    "GraphState",
    "MeasurementOutcome",
    "new_zero_state",
    "Pauli",
    "CliffordOne",
    "CliffordTwo",
    "CliffordTables",
    "build_tables",
    "get_tables",
]
