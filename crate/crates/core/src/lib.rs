//! Finite Gabor systems in general linear position.
//!
//! * [`scalar`]: exact residue and floating-point backends
//! * [`gabor`]: time-frequency shifts, Gabor matrices, STFT
//! * [`window`]: the root-of-unity power window and other windows
//! * [`glp`]: certification that every `N` shifts are independent
//! * [`monomial`]: the monomial structure of Gabor determinants
//! * [`erasure`]: erasure recovery and operator identification

pub mod erasure;
pub mod error;
pub mod gabor;
pub mod glp;
pub mod monomial;
pub mod scalar;
pub mod window;

pub use error::{Error, Result};
pub use gabor::{format_support, parse_support, Provenance, TimeFreqIndex, TimeFrequencyPlane, Window};
pub use glp::{
    check_support, checker_for, verify_glp, Backend, BackendKind, GlpVerdict, SupportChecker,
    SupportEnumeration, VerificationReport, Verdict, Witness,
};
pub use monomial::{ColumnProfile, Monomial, PartitionClass};
pub use scalar::{CyclotomicContext, CyclotomicElement, SparseCyclotomic};
pub use window::{construct, AnyWindow, ConstructionParams, WindowSpec};
