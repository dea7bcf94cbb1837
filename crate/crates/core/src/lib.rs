//! Quantum channels in their three equivalent forms (Kraus operators, Choi
//! matrix, system-ancilla unitary model) together with a simulated
//! ancilla-assisted process tomography pipeline.
//!
//! Tensor products everywhere use the order (reference, system) with
//! row-major flattening, so block `(i, j)` of a bipartite matrix is indexed by
//! the first factor. The Choi matrix of a channel `E` on an `n₁`-dimensional
//! input is stored unnormalized:
//!
//! ```text
//! J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)
//! ```
//!
//! so that a trace-preserving channel has `Tr J = n₁`.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod tomography;

pub use channels::{
    apply_kraus, apply_stinespring, check_cp_tp, check_cp_tp_choi, choi_to_kraus,
    choi_to_kraus_with_threshold, kraus_equivalent, kraus_to_choi, zoo_channel, ChoiMatrix,
    CpTpVerdict, KrausSet, StinespringModel, ZooName,
};
pub use error::{Error, Result};
pub use linalg::{
    c64, frobenius_distance, hermitian_eig, partial_trace, schmidt_decompose, ComplexMatrix,
    HermitianEigenDecomposition, SchmidtDecomposition, Subsystem, C64,
};
pub use metrics::{choi_distance, process_fidelity, resource_report, ResourceReport};
pub use tomography::{
    joint_output_state, prepare_max_entangled, prepare_schmidt_input, project_to_psd,
    reconstruct_from_max_entangled, reconstruct_from_schmidt, run_tomography,
    simulate_state_tomography, InputKind, OpaqueChannel, SchmidtInput, Shots, TomographyConfig,
    TomographyResult,
};
