//! Singular values of the weighted logarithmic potential transform restricted
//! to the bound-state eigenspaces of the Landau Hamiltonian on the Poincaré disk.
//!
//! Every numerical routine is generic over the scalar type through [`Real`];
//! the aliases at the crate root fix it to `f64` or `f32`.

pub mod basis;
pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod specfun;
pub mod spectrum;
pub mod transform;

pub use basis::{
    eigen_residual, gram_matrix, norm_sq, normalized_phi, phi, BasisFunction, BasisIndex,
    EigenReport, EnergyMatch, GramMatrix, SpectralParams,
};
pub use error::{Error, Result};
pub use quadrature::{
    angular_log_integral_numeric, angular_log_kernel, build_disk_rule, integrate,
    transform_numeric, transform_tensor_naive, weighted_inner_product, DiskFunction,
    DiskQuadrature,
};
pub use scalar::Real;
pub use specfun::{
    digamma, gamma, gamma_sign, gauss_2f1, hyp_3f2, jacobi_p, ln_gamma, pochhammer,
    reciprocal_gamma, TruncationPolicy,
};

pub type SpectralParams64 = SpectralParams<f64>;
pub type SpectralParams32 = SpectralParams<f32>;
pub type DiskQuadrature64 = DiskQuadrature<f64>;
pub type DiskQuadrature32 = DiskQuadrature<f32>;
pub type TruncationPolicy64 = TruncationPolicy<f64>;
pub type TruncationPolicy32 = TruncationPolicy<f32>;
pub type BasisFunction64 = BasisFunction<f64>;
pub type BasisFunction32 = BasisFunction<f32>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
