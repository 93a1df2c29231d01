"""Circuit IR, metrics, simulation and structural sub-circuits."""
from .builders import (
    copy_circuit,
    decompose_mcx,
    multiplexed_rotation_gates,
    multiplexor_angles,
    parallel_controlled,
    prepare_state,
)
from .core import (
    CNOT,
    H,
    MCX,
    RY,
    RZ,
    U2,
    Circuit,
    Gate,
    Phase,
    Register,
    RegisterLayout,
    Toffoli,
    X,
)
from .metrics import Metrics, layers, metrics
from .qasm import from_qasm, read_qasm_meta, to_qasm
from .simulate import (
    MAX_SIM_QUBITS,
    SimulationTooLarge,
    apply_circuit,
    basis_state,
    extract_block,
    project_output,
    simulate,
    unitary,
)

__all__ = [
    "CNOT",
    "H",
    "MCX",
    "RY",
    "RZ",
    "U2",
    "Circuit",
    "Gate",
    "Phase",
    "Register",
    "RegisterLayout",
    "Toffoli",
    "X",
    "Metrics",
    "layers",
    "metrics",
    "copy_circuit",
    "decompose_mcx",
    "multiplexed_rotation_gates",
    "multiplexor_angles",
    "parallel_controlled",
    "prepare_state",
    "from_qasm",
    "read_qasm_meta",
    "to_qasm",
    "MAX_SIM_QUBITS",
    "SimulationTooLarge",
    "apply_circuit",
    "basis_state",
    "extract_block",
    "project_output",
    "simulate",
    "unitary",
]
