//! Finite orthomodular-lattice probability toolkit.
//!
//! Builds classical (Boolean) and quantum-logical (orthomodular) event
//! structures, puts exact-rational probability measures on them, detects
//! correlations, searches exhaustively for Reichenbachian common causes,
//! decides common-cause closedness, and runs the associated structure
//! results as falsifiable properties over generated finite instances.
//!
//! Modules:
//! - [`lattice`]: finite bounded ortholattices and the law checks.
//! - [`greechie`]: the block-diagram language and the pasting construction.
//! - [`states`]: exact-rational measures, phi-atoms, Q-decomposition.
//! - [`causality`]: correlations, common causes, closedness.
//! - [`theorems`]: the property suite over generated instances.
//! - [`extend`]: measure-preserving dyadic refinement of Boolean spaces.

pub mod causality;
pub mod extend;
pub mod greechie;
pub mod lattice;
pub mod ratio;
pub mod states;
pub mod theorems;

pub use causality::{
    anticorrelated_pairs, check_common_cause, correlated_pairs, correlation_from_atoms,
    find_common_causes, is_common_cause_closed, Closedness, CommonCauseCertificate,
    CommonCauseFailure, CorrelationWitness,
};
pub use extend::{
    dyadic_refine, explain_in_extension, parse_split_table, verify_embedding, Embedding,
    EmbeddingViolation, ExtendError, Refinement, SplitTable,
};
pub use greechie::{parse_diagram, paste, GreechieDiagram, GreechieError};
pub use lattice::{
    DistributivityViolation, ElementId, Lattice, LatticeError, OrthomodularViolation,
    BOOLEAN_ATOM_CAP, TABLE_ELEMENT_CAP,
};
pub use ratio::{format_ratio, parse_ratio, ratio, ratio_json};
pub use states::{
    classify_atomicity, is_faithful, measure_from_atom_weights, measure_from_labeled_weights,
    parse_measure_file, phi_atoms, q_decompose, random_state, validate_measure, Atomicity, Measure,
    MeasureError, QDecomposeError, QDecomposition,
};
pub use theorems::{
    has_failures, parse_suite_config, run_suite, Fault, PropertyReport, SuiteConfig, Verdict,
};
