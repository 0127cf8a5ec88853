//! Certify uniqueness of canonical polyadic decompositions of third-order
//! tensors from their factor matrices.

pub mod certify;
pub mod conditions;
pub mod generic;
pub mod linalg;
pub mod suite;
pub mod tensor;
