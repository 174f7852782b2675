"""Qudit statevector simulation of multiparty quantum information splitting,
with an exhaustive dense-matrix verification oracle and a CLI harness."""

from .register import (
    ALGEBRAIC_TOL,
    DEFAULT_SIZE_CAP,
    Operator,
    QuditRegister,
    SecretAmplitudes,
    SizeCapError,
    align_phase,
    apply_local,
    basis_state,
    digits_of_index,
    fidelity,
    index_of_digits,
    inner_product,
    tensor,
)
from .gates import (
    aggregated_phase_correction,
    bob1_correction,
    bob_mu_correction,
    phase_correction,
    qft_operator,
    unit_phase,
    xor_apply,
    xor_operator,
)
from .measurement import (
    MeasurementRecord,
    ZeroProbabilityError,
    collapse,
    enumerate_branches,
    measure,
    outcome_distribution,
    sample_outcome_counts,
    trial_stream,
)
from .density import (
    DensityMatrix,
    expected_marginal,
    is_diagonal,
    partial_trace,
    reduced_density,
)
from .protocol import (
    FIDELITY_TOL,
    MODES,
    PARALLEL,
    SEQUENTIAL,
    ProtocolTranscript,
    apply_corrections,
    encode,
    prepare_ghz,
    prepare_joint,
    qss_register,
    reconstruct_parallel,
    reconstruct_sequential,
    reconstruct_step,
    run_protocol,
    split,
)
from .oracle import (
    ORACLE_SIZE_CAP,
    dense_protocol_check,
    marginal_sweep,
    qubit_fixture_check,
)

__version__ = "0.1.0"
