//! Type D and type F witnesses, exhaustive refutations, and the classifier
//! combining them into a verdict.

mod class;
mod classify;
mod scan;
mod witness;

pub use class::ClassRack;
pub use classify::{classify, Budget, Classification, Hints, Verdict};
pub use scan::{
    find_d, local_f, refute_d, refute_f, Basis, CertKind, Certificate, Checkpoint, DSearch, Refutation, ScanLog,
    ScanOptions, ScanProgress, Strategy, CENTRALIZER_GENS, CHECKPOINT_EVERY,
};
pub use witness::{
    check_f_family, conj_orbit, d_pair, distinct_generated_orbits, triple_conjugation_fixes, f_edge, squares_agree, DPair, DWitness,
    FBuilder, FFailure, FWitness, SubrackSet, SUBGROUP_CAP,
};
