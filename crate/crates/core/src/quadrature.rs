//! Weighted quadrature on the unit disk and the direct evaluation of the
//! logarithmic potential integral.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::basis::SpectralParams;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// A complex-valued function on the unit disk.
pub trait DiskFunction<T>: Sync {
    fn eval(&self, z: Complex<T>) -> Complex<T>;
}

impl<T, F> DiskFunction<T> for F
where
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    fn eval(&self, z: Complex<T>) -> Complex<T> {
        self(z)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            derivative = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / derivative;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        rule.push((lit(x), lit(w)));
    }
    rule.reverse();
    rule
}

/// Product rule on the disk: Gauss–Legendre in `t = r²` times equispaced angles.
#[derive(Clone)]
pub struct DiskQuadrature<T: Real> {
    radial_nodes: Vec<(T, T)>,
    reference: Vec<(T, T)>,
    n_angular: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for DiskQuadrature<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskQuadrature")
            .field("n_radial", &self.radial_nodes.len())
            .field("n_angular", &self.n_angular)
            .finish()
    }
}

/// Builds a disk rule with `n_radial` radial and `n_angular` angular nodes.
pub fn build_disk_rule<T: Real>(n_radial: usize, n_angular: usize) -> Result<DiskQuadrature<T>> {
    if n_radial < 2 {
        return Err(Error::Size(format!("n_radial={n_radial} < 2")));
    }
    if n_angular < 8 || n_angular % 2 != 0 {
        return Err(Error::Size(format!("n_angular={n_angular} must be even and ≥ 8")));
    }
    let reference = gauss_legendre::<T>(n_radial);
    let half = lit::<T>(0.5);
    let radial_nodes = reference.iter().map(|&(x, w)| (half * (x + T::one()), half * w)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n_angular);
    Ok(DiskQuadrature { radial_nodes, reference, n_angular, fft })
}

impl<T: Real> DiskQuadrature<T> {
    /// Gauss–Legendre pairs `(t_i, w_i)` on `[0, 1]`.
    pub fn radial_nodes(&self) -> &[(T, T)] {
        &self.radial_nodes
    }

    pub fn n_radial(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    /// Angle of the `j`-th angular node.
    pub fn angle(&self, j: usize) -> T {
        T::TAU() * from_usize(j) / from_usize(self.n_angular)
    }

    /// Rule with both resolutions doubled.
    pub fn refined(&self) -> Self {
        build_disk_rule(2 * self.n_radial(), 2 * self.n_angular)
            .expect("doubling a valid rule stays valid")
    }

    /// Visits every node as `(z, weight)` with weights summing to the
    /// weighted measure, in ascending radial then angular order.
    fn for_each_node(&self, params: &SpectralParams<T>, mut visit: impl FnMut(Complex<T>, T)) {
        let dtheta = T::TAU() / from_usize(self.n_angular);
        for &(t, w) in &self.radial_nodes {
            let radial_weight = lit::<T>(0.5) * w * params.weight(t) * dtheta;
            let r = t.sqrt();
            for j in 0..self.n_angular {
                visit(Complex::from_polar(r, self.angle(j)), radial_weight);
            }
        }
    }
}

/// `∫_𝔻 f (1−|ξ|²)^{2ν−2} dμ`.
pub fn integrate<T: Real>(
    f: &impl DiskFunction<T>,
    params: &SpectralParams<T>,
    quad: &DiskQuadrature<T>,
) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    quad.for_each_node(params, |z, w| acc += f.eval(z) * w);
    acc
}

/// `⟨f, g⟩ = ∫_𝔻 f conj(g) (1−|ξ|²)^{2ν−2} dμ`.
pub fn weighted_inner_product<T: Real>(
    f: &impl DiskFunction<T>,
    g: &impl DiskFunction<T>,
    params: &SpectralParams<T>,
    quad: &DiskQuadrature<T>,
) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    quad.for_each_node(params, |z, w| acc += f.eval(z) * g.eval(z).conj() * w);
    acc
}

/// Closed form of `−(1/2π)∫ e^{inθ} log|ρ − r e^{iθ}| dθ`.
pub fn angular_log_kernel<T: Real>(n: i64, rho: T, r: T) -> T {
    let (lo, hi) = if rho < r { (rho, r) } else { (r, rho) };
    if n == 0 {
        return -hi.ln();
    }
    let order = n.unsigned_abs() as usize;
    (lo / hi).powi(order as i32) / (lit::<T>(2.0) * from_usize(order))
}

/// Default number of midpoint nodes in [`angular_log_integral_numeric`].
pub const ANGULAR_LOG_POINTS: usize = 16_384;

/// Midpoint-rule evaluation of `−(1/2π)∫₀^{2π} e^{inθ} log|ρ − r e^{iθ}| dθ`.
pub fn angular_log_integral_numeric<T: Real>(n: i64, rho: T, r: T) -> Complex<T> {
    angular_log_integral_numeric_with(n, rho, r, ANGULAR_LOG_POINTS)
}

/// As [`angular_log_integral_numeric`] with an explicit node count.
pub fn angular_log_integral_numeric_with<T: Real>(
    n: i64,
    rho: T,
    r: T,
    points: usize,
) -> Complex<T> {
    let count = from_usize::<T>(points);
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..points {
        let theta = T::TAU() * (from_usize::<T>(j) + lit(0.5)) / count;
        let distance = (Complex::new(rho, T::zero()) - Complex::from_polar(r, theta)).norm();
        let phase = Complex::from_polar(T::one(), T::from_i64(n).unwrap() * theta);
        acc += phase * distance.ln();
    }
    -acc / count
}

/// Number of geometrically graded panels used when `z = 0`.
const ORIGIN_PANELS: i32 = 16;

/// Panels in `t` with a break at `y = |z|²`. Above the break the panel
/// widths grow geometrically by a factor of 4 up to `t = 1/4`; for `z = 0`
/// the panels are graded geometrically towards `t = 0`.
fn radial_panels<T: Real>(y: T) -> Vec<(T, T)> {
    let ratio = lit::<T>(0.25);
    if y > T::zero() {
        let mut panels = vec![(T::zero(), y)];
        let mut lo = y;
        while lo < ratio {
            panels.push((lo, lo / ratio));
            lo = lo / ratio;
        }
        panels.push((lo, T::one()));
        return panels;
    }
    let mut panels = vec![(T::zero(), ratio.powi(ORIGIN_PANELS))];
    for j in (0..ORIGIN_PANELS).rev() {
        panels.push((ratio.powi(j + 1), ratio.powi(j)));
    }
    panels
}

/// Direct evaluation of `L_ν f(z) = ∫ f(ξ) log(1/|ξ−z|)(1−|ξ|²)^{2ν−2} dμ(ξ)`.
///
/// The radial integral in `t = r²` is split at `|z|²` into Gauss–Legendre
/// panels of the rule's order, so the kink of the
/// kernel falls on a panel edge. On each ring the angular Fourier coefficients of
/// `f` are obtained by FFT and integrated against the logarithmic kernel
/// mode by mode, which is exact for band-limited `f`.
pub fn transform_numeric<T: Real>(
    f: &impl DiskFunction<T>,
    z: Complex<T>,
    params: &SpectralParams<T>,
    quad: &DiskQuadrature<T>,
) -> Result<Complex<T>> {
    let rho = z.norm();
    if !(rho < T::one()) {
        return Err(Error::Domain(rho.to_f64().unwrap_or(f64::NAN)));
    }
    let n = quad.n_angular;
    let half_n = n / 2;
    let phi = if rho > T::zero() { z.arg() } else { T::zero() };
    let phases: Vec<Complex<T>> = (0..=half_n)
        .map(|p| Complex::from_polar(T::one(), from_usize::<T>(p) * phi))
        .collect();
    let y = rho * rho;
    let panels = radial_panels(y);
    let half = lit::<T>(0.5);
    let ring_scale = T::TAU() / from_usize(n);
    let mut buffer = vec![Complex::new(T::zero(), T::zero()); n];
    let mut total = Complex::new(T::zero(), T::zero());
    for (lo, hi) in panels {
        let jacobian = half * (hi - lo);
        for &(x, w) in &quad.reference {
            let t = lo + jacobian * (x + T::one());
            let r = t.sqrt();
            for (j, slot) in buffer.iter_mut().enumerate() {
                *slot = f.eval(Complex::from_polar(r, quad.angle(j)));
            }
            quad.fft.process(&mut buffer);
            let (small, large) = if rho < r { (rho, r) } else { (r, rho) };
            let q = small / large;
            let mut ring = buffer[0] * (-large.ln());
            let mut qp = T::one();
            for p in 1..half_n {
                qp *= q;
                let kernel = qp / (lit::<T>(2.0) * from_usize(p));
                ring += (buffer[p] * phases[p] + buffer[n - p] * phases[p].conj()) * kernel;
            }
            qp *= q;
            let nyquist = qp / from_usize(n);
            ring += buffer[half_n] * (nyquist * phases[half_n].re);
            total += ring * (ring_scale * half * w * jacobian * params.weight(t));
        }
    }
    Ok(total)
}

/// Plain tensor-product evaluation of the transform, without any treatment
/// of the logarithmic singularity beyond keeping `z` off the nodes.
pub fn transform_tensor_naive<T: Real>(
    f: &impl DiskFunction<T>,
    z: Complex<T>,
    params: &SpectralParams<T>,
    quad: &DiskQuadrature<T>,
) -> Result<Complex<T>> {
    let rho = z.norm();
    if !(rho < T::one()) {
        return Err(Error::Domain(rho.to_f64().unwrap_or(f64::NAN)));
    }
    let collision = lit::<T>(1e-12);
    if quad.radial_nodes.iter().any(|&(t, _)| (t.sqrt() - rho).abs() < collision) {
        return Err(Error::Singularity(rho.to_f64().unwrap_or(f64::NAN)));
    }
    let spacing = T::TAU() / from_usize(quad.n_angular);
    let phase = if rho > T::zero() {
        let arg = z.arg();
        arg - (arg / spacing).floor() * spacing
    } else {
        T::one()
    };
    let offset = if phase < lit(1e-9) || spacing - phase < lit(1e-9) {
        spacing * lit(0.5)
    } else {
        T::zero()
    };
    let mut acc = Complex::new(T::zero(), T::zero());
    quad.for_each_node(params, |node, w| {
        let xi = node * Complex::from_polar(T::one(), offset);
        acc += f.eval(xi) * (-(xi - z).norm().ln()) * w;
    });
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(_: Complex<f64>) -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    #[test]
    fn legendre_rule_is_exact_for_monomials() {
        for n in [2usize, 5, 16, 64] {
            let rule = build_disk_rule::<f64>(n, 8).unwrap();
            let total: f64 = rule.radial_nodes().iter().map(|p| p.1).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for d in 0..(2 * n) {
                let s: f64 = rule.radial_nodes().iter().map(|&(t, w)| w * t.powi(d as i32)).sum();
                assert!((s - 1.0 / (d as f64 + 1.0)).abs() < 1e-13, "n={n} d={d}");
            }
            assert!(rule.radial_nodes().windows(2).all(|p| p[0].0 < p[1].0));
        }
    }

    #[test]
    fn disk_rule_examples() {
        let pi = std::f64::consts::PI;
        let flat = SpectralParams::new(1.0, 0).unwrap();
        let rule = build_disk_rule(8, 16).unwrap();
        assert!((integrate(&unit, &flat, &rule).re - pi).abs() < 1e-13);
        let r2 = |z: Complex<f64>| Complex::new(z.norm_sqr(), 0.0);
        assert!((integrate(&r2, &flat, &rule).re - pi / 2.0).abs() < 1e-13);
        let weighted = SpectralParams::new(2.0, 0).unwrap();
        assert!((integrate(&unit, &weighted, &rule).re - pi / 3.0).abs() < 1e-13);
    }

    #[test]
    fn angular_aliasing_is_exact() {
        let flat = SpectralParams::new(1.0, 0).unwrap();
        let rule = build_disk_rule(4, 16).unwrap();
        for l in 1..16 {
            let wave = move |z: Complex<f64>| {
                let arg = z.arg() * l as f64;
                Complex::from_polar(1.0, arg)
            };
            assert!(integrate(&wave, &flat, &rule).norm() < 1e-14, "l={l}");
        }
    }

    #[test]
    fn inner_product_examples() {
        let flat = SpectralParams::new(1.0, 0).unwrap();
        let rule = build_disk_rule(16, 32).unwrap();
        let pi = std::f64::consts::PI;
        assert!((weighted_inner_product(&unit, &unit, &flat, &rule).re - pi).abs() < 1e-13);
        let z1 = |z: Complex<f64>| z;
        let z2 = |z: Complex<f64>| z * z;
        assert!(weighted_inner_product(&z1, &z2, &flat, &rule).norm() < 1e-14);
    }

    #[test]
    fn size_errors() {
        assert!(matches!(build_disk_rule::<f64>(1, 16), Err(Error::Size(_))));
        assert!(matches!(build_disk_rule::<f64>(4, 6), Err(Error::Size(_))));
        assert!(matches!(build_disk_rule::<f64>(4, 9), Err(Error::Size(_))));
    }

    #[test]
    fn angular_log_integral_examples() {
        let half_log = -(0.5f64).ln();
        assert!((angular_log_integral_numeric(0, 0.5, 0.25).re - half_log).abs() < 1e-12);
        assert!((angular_log_integral_numeric(0, 0.25, 0.5).re - half_log).abs() < 1e-12);
        assert!((angular_log_integral_numeric(2, 0.5f64, 0.25).re - 1.0 / 16.0).abs() < 1e-12);
        assert!((angular_log_kernel(2, 0.5f64, 0.25) - 1.0 / 16.0).abs() < 1e-15);
        assert!((angular_log_kernel(-3, 0.25f64, 0.5) - 1.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn angular_log_integral_is_continuous_across_diagonal() {
        for n in 0..4 {
            for &rho in &[0.3, 0.6, 0.9] {
                let below = angular_log_integral_numeric(n, rho, rho - 1e-6);
                let above = angular_log_integral_numeric(n, rho, rho + 1e-6);
                assert!((below - above).norm() < 1e-4, "n={n} rho={rho}");
            }
        }
    }

    #[test]
    fn transform_of_zero_and_domain() {
        let params = SpectralParams::new(1.0, 0).unwrap();
        let rule = build_disk_rule(8, 16).unwrap();
        let zero = |_: Complex<f64>| Complex::new(0.0, 0.0);
        assert_eq!(transform_numeric(&zero, Complex::new(0.3, 0.1), &params, &rule).unwrap().norm(), 0.0);
        assert!(matches!(
            transform_numeric(&zero, Complex::new(1.0, 0.0), &params, &rule),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transform_of_constant_matches_closed_form() {
        // L_1[1](ρ) = (π/2)(1 − ρ²)
        let params = SpectralParams::new(1.0, 0).unwrap();
        let rule = build_disk_rule(16, 16).unwrap();
        for &rho in &[0.0, 0.01, 0.2, 0.5, 0.9] {
            let value = transform_numeric(&unit, Complex::new(rho, 0.0), &params, &rule).unwrap();
            let expected = std::f64::consts::FRAC_PI_2 * (1.0 - rho * rho);
            let tol = if rho == 0.0 { 1e-10 } else { 1e-13 };
            assert!((value.re - expected).abs() < tol, "rho={rho}");
        }
    }

    #[test]
    fn transform_resolution_independent() {
        let params = SpectralParams::new(1.0, 0).unwrap();
        let coarse = build_disk_rule(64, 128).unwrap();
        let fine = build_disk_rule(128, 256).unwrap();
        let xi = |z: Complex<f64>| z;
        let z = Complex::new(0.5, 0.0);
        let a = transform_numeric(&xi, z, &params, &coarse).unwrap();
        let b = transform_numeric(&xi, z, &params, &fine).unwrap();
        assert!((a - b).norm() < 1e-8);
        // (π/k)ρ^k[ρ²/(2k+2) + (1−ρ²)/2] with k = 1
        let expected = std::f64::consts::PI * 0.5 * (0.25 / 4.0 + 0.75 / 2.0);
        assert!((a.re - expected).abs() < 1e-13);
    }

    #[test]
    fn naive_rule_is_a_coarse_cross_check() {
        let params = SpectralParams::new(2.0, 0).unwrap();
        let rule = build_disk_rule(64, 256).unwrap();
        let f = |z: Complex<f64>| z * z + 0.5;
        let z = Complex::from_polar(0.37, 0.4);
        let accurate = transform_numeric(&f, z, &params, &rule).unwrap();
        let naive = transform_tensor_naive(&f, z, &params, &rule).unwrap();
        assert!((accurate - naive).norm() < 1e-3);
        let ring = rule.radial_nodes()[10].0.sqrt();
        assert!(matches!(
            transform_tensor_naive(&f, Complex::new(ring, 0.0), &params, &rule),
            Err(Error::Singularity(_))
        ));
    }
}
