//! Verification laboratory for first-order integrals of motion of
//! Schrödinger operators with position-dependent mass, `H = p f p − V`.

pub mod casimir;
pub mod catalog;
pub mod conformal;
pub mod diffop;
pub mod report;
pub mod spectral;
pub mod symkernel;
