//! Exact operator calculus on the Fock space of a graded Frobenius algebra:
//! Lehn and Calogero–Sutherland operators, Dunkl–Cherednik operators with
//! algebra-valued couplings, Chern-character operators, and cup-product
//! structure constants of Hilbert schemes of points in Fock coordinates.

pub mod cherednik;
pub mod cli;
pub mod fock;
pub mod frobenius;
pub mod heisenberg;
pub mod integrals;
pub mod linalg;
pub mod report;
pub mod ring;
pub mod scalar;
