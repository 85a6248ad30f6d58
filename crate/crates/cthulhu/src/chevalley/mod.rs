//! Root systems of type `C_n` and `A_{n-1}`, their matrix realizations, the
//! commutator calculus and torus witness constructions.

mod calc;
mod realize;
mod roots;
mod suite;
mod witness;

pub use calc::{ab_property, commutator_data, support_factorize, ChevalleyWord, CommutatorData, CommutatorTerm};
pub use realize::Realization;
pub use suite::{chevalley_suite, orthogonal_short_pair, PairCheck, SuiteReport};
pub use roots::{ordering, root_system, root_system_a, Root, RootKind, RootSystem};
pub use witness::{
    character_by_conjugation, torus_pair_witness, torus_family, Collision, TorusPairWitness, FamilyCase, TorusFamily,
    FamilyOutcome, FamilyRefusal, TorusElt, WitnessCase, CHEVALLEY_EXCLUDED, SU3_EXCLUDED,
};
