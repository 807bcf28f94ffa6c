//! Finsler geometry of a metric `L` and its generalized Randers perturbation
//! `L* = L + b_i(x) y^i`, with residual checks relating the two structures.

pub mod expr;
pub mod geometry;
pub mod jet;
pub mod tensor;
pub mod randers;
pub mod catalog;
pub mod verify;
pub mod geodesics;
