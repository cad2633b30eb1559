//! Orbit-equivalence data between shifts of finite type and its verification.

mod bundle_file;
mod family;
mod flip;
mod map;
mod verify;

use thiserror::Error;

use crate::cocycles::CocycleError;
use crate::sft::Symbol;

pub use bundle_file::{load_bundle, parse_bundle, BundleError, LoadedBundle};
pub use family::{Family, FamilyDescriptor, SUBSTITUTION_LEN, WINDOW_WORD_CAP};
pub use flip::{
    asymptotic_flip_check, bracket_transport_check, build_varphi, check_periodic_preserving, first_non_periodic_image,
    flip_from_ppacoe, is_conjugacy, AsymptoticFlipReport, Classification, FlipReport, LevelCheck, Varphi,
};
pub use map::{PointMap, SlidingBlockCode};
pub use verify::{
    verify_acoe, AcoeBundle, Certificate, ConditionOutcome, FamilySummary, LevelStep, VerificationReport, Verifier,
    CONDITIONS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcoeError {
    #[error("block rule has no entry for {word:?}")]
    MissingRuleWord { word: Vec<Symbol> },
    #[error("inadmissible image: {0}")]
    InadmissibleImage(String),
    #[error("matrix mismatch: {0}")]
    MatrixMismatch(String),
    #[error("not a groupoid element: {0}")]
    InvalidElement(String),
    #[error("periodic point {0} has a non-periodic image")]
    NotPeriodicPreserving(String),
    #[error("verification failed on {0}")]
    VerificationFailed(String),
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}
