//! Simulation of six-photon polarization entanglement from third-order
//! down-conversion: bosonic mode algebra, linear optics, post-selection onto
//! six qubits, measurement statistics and entanglement witnesses.
//!
//! ```
//! use singlet_core::{run_pipeline, PipelineConfig};
//!
//! let run = run_pipeline(&PipelineConfig::default()).unwrap();
//! assert!((run.singlet_fidelity - 1.0).abs() < 1e-10);
//! assert!((run.success_probability - 9.0 / 256.0).abs() < 1e-12);
//! ```

pub mod counting;
pub mod density;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod optics;
pub mod pauli;
pub mod pdc;
pub mod pipeline;
pub mod postselect;
pub mod qubit;
pub mod report;
pub mod rng;
pub mod witness;

pub use counting::{
    correlation, estimate_correlation, estimate_fidelity_white_noise, outcome_distribution,
    sample_counts, Basis, CorrelationEstimate, CountsTable, FidelityEstimate, MeasurementSetting,
    OutcomeDistribution,
};
pub use density::{add_white_noise, fidelity, DensityOperator};
pub use eigen::{hermitian_eigenvalues, max_eigenvalue, min_eigenvalue};
pub use error::{Error, Result};
pub use fock::{CreationPolynomial, FockKet, FockVector, Pol, PolMode, Spatial};
pub use optics::{beamsplitter, three_way_split, waveplate, JonesMatrix, ModeMap, WaveplateKind};
pub use pauli::{pauli_decompose, Pauli, PauliString, PauliSum, PauliWord};
pub use pdc::{pdc_state, PdcSpec};
pub use pipeline::{run_pipeline, ArmSplit, PipelineConfig, PipelineRun, SplitConfig};
pub use postselect::{conditional_reference, postselect_one_per_mode, project_qubit};
pub use qubit::{letter_ket, named_state, psi6_minus, LetterBasis, NamedState, QubitState};
pub use witness::{
    noise_tolerance, reduce_witness, witness_expectation_from_counts, witness_max_overlap,
    BootstrapConfig, Verdict, WitnessKind, WitnessOperator, WitnessReport,
};
