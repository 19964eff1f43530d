//! Simplicial cochains with integer, mod-p and real coefficients.

pub mod complex;
pub mod group;
pub mod matrix;
mod modp;
pub mod real;

pub use complex::{faces, product_complex, FundamentalCycle, Simplex, SimplicialComplex};
pub use group::{
    bockstein_z2, bockstein_z2_with_lift, classify, cohomology, cohomology_group, evaluate,
    nontrivial_bockstein_source, AbelianGroup, BocksteinClass, ClassCoords, Cochain, Cohomology, Ring,
};
pub use matrix::{snf, IntMatrix, Snf};
pub use real::{classify_real, evaluate_real, solve_real_coboundary, RealCochain};
