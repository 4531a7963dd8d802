//! Borel invariants of measurable cocycles into `PSL(n,C)`.
//!
//! The crate evaluates the Borel cocycle `B_n` on 4-tuples of complete flags,
//! estimates the Borel invariant of a finite measurable cocycle over a
//! lattice action, and reconstructs the measurable trivialization promised by
//! rigidity when the invariant is maximal.

// Tolerance checks are written `!(tol > 0.0)` on purpose: the negation also
// rejects NaN, which `tol <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod cocycle;
pub mod dilog;
pub mod doc;
pub mod error;
pub mod invariant;
pub(crate) mod linalg;
pub mod projflag;
pub mod rigidity;

pub use crate::borel::{
    borel_bound, borel_from_complete, borel_value, is_maximal, strat_value, MultiIndex, StratClass,
};
pub use crate::cocycle::{
    BoundaryMap, Cocycle, FiniteGammaSpace, GroupPresentation, TableEntry, TwistMap, Word,
};
pub use crate::dilog::{bloch_wigner, ideal_volume, nu3};
pub use crate::doc::{
    load_experiment, parse_eval_input, parse_experiment, EvalBorelInput, ExperimentDocument,
    LoadedExperiment,
};
pub use crate::error::{Error, Result};
pub use crate::invariant::{
    block_cocycle, empirical_borel_ratio, normalized_integrands, parabolic_bound,
    representation_borel_ratio, EstimatorParams, EstimatorReport, Partition, PullbackCochain,
};
pub use crate::projflag::{
    block_flag, mobius_normalize, sym_power, veronese, AffineFlag, CompleteFlag, GroupElement,
    ProjPoint, RANK_TOL,
};
pub use crate::rigidity::{
    align_to_veronese, maximality_certificate, trivialize, AlignmentResult, AlignmentStatus,
    Branch, CertificateReport, SliceAlignment, SliceCertificate, Trivialization, TrivializeParams,
};
