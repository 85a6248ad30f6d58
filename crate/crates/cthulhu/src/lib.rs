//! Finite classical groups over small fields, their unipotent conjugacy
//! classes viewed as racks, and the type D / type F / cthulhu classification.

pub mod catalog;
pub mod chevalley;
pub mod cli;
pub mod detect;
pub mod error;
pub mod ffield;
pub mod matgroup;
pub mod perm;
pub mod rack;

pub use error::{Error, Result};
