//! Unipotent class labels of `Sp_{2n}(q)`, their representatives, the
//! expected verdict table and the verification of table rows.

mod build;
mod label;
mod special;
mod split;
mod table;
mod verify;

pub use build::{decomposition_type, gl_embed, label_of, representative, split_representatives, summand_coords};
pub use label::{enumerate_labels, Term, UnipotentLabel};
pub use special::{
    gu3_witness, mixed_involution_pair, odd_w_pair, regular_f_family, regular_pairs, transvection_isomorphism,
    two_two_pair, unipotent_generators, ExplicitPair, Gu3Report, PairKind, RackIsomorphism, RegularFamily, RegularPair,
};
pub use split::{split_label, unipotent_census, unipotent_radical, SplitClass, UnipotentCensus, RADICAL_CAP};
pub use table::*;
pub use verify::{class_of_split, classify_class, compare, hints_for, verify_row, ClassRecord, RowReport, RowStatus};

pub(crate) fn ser_mat<S: serde::Serializer>(m: &crate::matgroup::Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.to_text())
}
