//! Matrices over finite fields, classical groups, Steinberg endomorphisms,
//! Jordan data and orbit computations.

mod group;
mod jordan;
mod key;
mod mat;
mod orbit;

pub use group::{apply_endo, group_spec, order_formula, symplectic_form, Endo, Family, GroupSpec, ENUMERATION_LIMIT};
pub use jordan::{jordan_block, jordan_partition, Partition};
pub use key::{Key, Packer};
pub use mat::Mat;
pub use orbit::{class_orbit, orbit_under, split_classes, subgroup_closure, ClassInfo, Closure, Orbit, SplitMode};
