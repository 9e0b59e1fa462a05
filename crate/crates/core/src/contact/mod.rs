//! Contact systems on jet spaces and their Kumpera-Ruiz normal forms.

pub mod classify;
pub mod jet;
pub mod mobius;
pub mod reduce;

pub use classify::{
    classify_contact, classify_contact_detailed, classify_pfaffian, classify_pfaffian_detailed, kr_signature_at_point,
    Classification, ClassificationStatus, ClassificationVerdict, FailureReason, KrSignature, LevelEvidence, WitnessMethod,
};
pub use jet::{
    canonical_contact_system, canonical_family, generate_kumpera_ruiz, kr_family, lift_vector_field, prolong, KrFamily,
    LetterKind, ProlongationLetter, ProlongationWord,
};
pub use mobius::{mobius_is_diffeo, MobiusMap};
pub use reduce::{is_admissible_remix, kr_reduce, remix, KrReduction, MuMatrix, ReductionStep};
