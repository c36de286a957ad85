//! Jack polynomials, hypergeometric functions of matrix argument and central
//! Wishart eigenvalue distributions over the real, complex, quaternion and
//! octonion division algebras (`beta = 1, 2, 4, 8`).
//!
//! Matrix arguments enter the series only through their eigenvalues, see
//! [`SpectralArgument`]. Random-matrix sampling (Wishart draws, Haar
//! matrices, cone samplers) is available for `beta = 1, 2, 4`.

// `!(x < y)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod hypergeom;
pub mod jack;
pub mod linalg;
mod mc;
pub mod partition;
pub mod quad;
pub mod special;
pub mod verify;
pub mod wishart;

pub use algebra::DivisionAlgebra;
pub use error::{Error, Result};
pub use hypergeom::{
    euler_2f1, kummer_1f1, pfq, pfq_two, truncated_pfq_restricted, HypergeomSpec, SeriesResult, SeriesTruncation,
};
pub use jack::{jack_c, jack_c_at_identity, jack_j, JackTable, SpectralArgument};
pub use partition::{conjugate, dominance_leq, enumerate_partitions, hook_product, HookData, Partition};
pub use wishart::{
    cdf_lambda_max, cdf_lambda_min, cdf_wishart_region, joint_eigen_density, sample_wishart, EigenSample, WishartModel,
};
