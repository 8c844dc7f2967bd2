//! Closed-form action of the transform on basis elements, and the
//! reconciliation of competing closed forms against the quadrature oracle.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::basis::{norm_sq, BasisFunction, BasisIndex, SpectralParams};
use crate::error::{Error, Result};
use crate::quadrature::{transform_numeric, DiskQuadrature};
use crate::scalar::{from_usize, lit, Real};
use crate::specfun::{digamma, gauss_2f1, hyp_3f2, pochhammer, TruncationPolicy};
use crate::spectrum::coeff_alpha;

/// Samples `(ρ_i, v_i)` of a radial factor, `ρ_i` strictly increasing in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile<T> {
    samples: Vec<(T, T)>,
}

impl<T: Real> RadialProfile<T> {
    pub fn new(samples: Vec<(T, T)>) -> Result<Self> {
        for (i, &(rho, v)) in samples.iter().enumerate() {
            if !(rho > T::zero() && rho < T::one()) {
                return Err(Error::InvalidParams(format!("profile radius {rho} outside (0,1)")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("profile value at radius {rho} not finite")));
            }
            if i > 0 && samples[i - 1].0 >= rho {
                return Err(Error::InvalidParams("profile radii not strictly increasing".into()));
            }
        }
        Ok(Self { samples })
    }

    /// Samples `f` at the given radii.
    pub fn sample(radii: &[T], mut f: impl FnMut(T) -> Result<T>) -> Result<Self> {
        let samples = radii.iter().map(|&rho| Ok((rho, f(rho)?))).collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(T, T)] {
        &self.samples
    }

    /// Least-squares slope of `log|v|` against `log(1−ρ²)`.
    pub fn boundary_exponent(&self) -> Result<T> {
        let points: Vec<(T, T)> = self
            .samples
            .iter()
            .map(|&(rho, v)| ((T::one() - rho * rho).ln(), v.abs().ln()))
            .collect();
        least_squares(&points).map(|(slope, _)| slope)
    }
}

/// Ordinary least-squares line `y = slope·x + intercept`.
pub(crate) fn least_squares<T: Real>(points: &[(T, T)]) -> Result<(T, T)> {
    if points.len() < 2 {
        return Err(Error::Range(format!("{} points, need at least 2", points.len())));
    }
    let n = from_usize::<T>(points.len());
    let mean_x = points.iter().map(|p| p.0).sum::<T>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: T = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if !(sxx > T::zero()) || !sxy.is_finite() {
        return Err(Error::Range("degenerate abscissae or non-finite data".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

/// Offsets `δ = 1−ρ²` used to fit the boundary decay exponent.
pub const BOUNDARY_OFFSETS: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

/// Fits the exponent `e` in `|f(ρ)| ~ (1−ρ²)^e` as `ρ → 1`.
pub fn boundary_decay_exponent<T: Real>(f: impl FnMut(T) -> Result<T>) -> Result<T> {
    let radii: Vec<T> = BOUNDARY_OFFSETS.iter().map(|&d| (T::one() - lit::<T>(d)).sqrt()).collect();
    RadialProfile::sample(&radii, f)?.boundary_exponent()
}

/// Which closed form is used for a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Formulas exactly as printed, hypergeometric argument `ρ²`.
    AsPrinted,
    /// Printed formulas with the argument replaced by `1−ρ²`.
    SwappedArgument,
    /// Rederived formulas, with the printed ones as starting point.
    Rederived,
}

impl Convention {
    pub const ALL: [Convention; 3] =
        [Convention::AsPrinted, Convention::SwappedArgument, Convention::Rederived];

    pub fn label(&self) -> &'static str {
        match self {
            Convention::AsPrinted => "as_printed",
            Convention::SwappedArgument => "swapped_argument",
            Convention::Rederived => "rederived",
        }
    }

    fn slot(&self) -> usize {
        match self {
            Convention::AsPrinted => 0,
            Convention::SwappedArgument => 1,
            Convention::Rederived => 2,
        }
    }

    fn argument<T: Real>(&self, rho: T) -> T {
        match self {
            Convention::SwappedArgument => T::one() - rho * rho,
            _ => rho * rho,
        }
    }
}

/// Closed-form branch selected by the position of `k` relative to `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Diagonal,
    AboveLevel,
    BelowLevel,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Diagonal, Branch::AboveLevel, Branch::BelowLevel];

    pub fn of(m: usize, k: usize) -> Self {
        match k.cmp(&m) {
            std::cmp::Ordering::Equal => Branch::Diagonal,
            std::cmp::Ordering::Greater => Branch::AboveLevel,
            std::cmp::Ordering::Less => Branch::BelowLevel,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Branch::Diagonal => "diagonal",
            Branch::AboveLevel => "above_level",
            Branch::BelowLevel => "below_level",
        }
    }
}

/// Convention fixed per branch by the reconciliation pass.
pub fn reconciled_convention(branch: Branch) -> Convention {
    match branch {
        Branch::Diagonal => Convention::Rederived,
        Branch::AboveLevel => Convention::Rederived,
        Branch::BelowLevel => Convention::Rederived,
    }
}

/// Signed normalization `γ_k = (−1)^{min(m,k)}/√ρ_k`.
fn gamma_k<T: Real>(params: &SpectralParams<T>, k: usize) -> T {
    let sign = if params.m().min(k) % 2 == 0 { T::one() } else { -T::one() };
    sign / norm_sq(params, BasisIndex(k)).sqrt()
}

fn factorial<T: Real>(n: usize) -> T {
    pochhammer(T::one(), n)
}

fn check_radius<T: Real>(rho: T) -> Result<()> {
    if rho >= T::zero() && rho < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(rho.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Radial factor of `L_ν Φ_m`.
pub fn radial_action_diag<T: Real>(
    params: &SpectralParams<T>,
    rho: T,
    convention: Convention,
) -> Result<T> {
    check_radius(rho)?;
    match convention {
        Convention::Rederived => Ok(diagonal_decomposition(params, rho)?.remainder),
        _ => diag_printed(params, rho, convention),
    }
}

fn diag_printed<T: Real>(params: &SpectralParams<T>, rho: T, convention: Convention) -> Result<T> {
    let nu = params.nu();
    let m = from_usize::<T>(params.m());
    let two = lit::<T>(2.0);
    let alpha = coeff_alpha(params)?;
    let x = T::one() - rho * rho;
    let beta_rho = alpha / (two * (two * nu - m + T::one()))
        * (params.beta() / T::PI()).sqrt()
        * x.powf(two * nu - m - T::one());
    let series = hyp_3f2(
        -m + T::one(),
        two * nu - m,
        two * nu - m + T::one(),
        two * (nu - m),
        two * nu - m + two,
        convention.argument(rho),
        &TruncationPolicy::default(),
    )?;
    Ok(beta_rho * series)
}

/// Pieces of the diagonal action `π∫₀¹ g(t) K₀(ρ,√t) dt` with `g` the
/// weighted radial factor of `Φ_m` and `G(t) = ∫₀ᵗ g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalTerms<T> {
    /// `G(ρ²)`.
    pub mass: T,
    /// Logarithmic part `−(π/2) log(ρ²) G(ρ²)` of the integral over `t < ρ²`.
    pub inner_log: T,
    /// Logarithmic part `(π/2) log(ρ²) G(ρ²)` left by integrating the
    /// `t > ρ²` piece by parts.
    pub outer_log: T,
    /// Remaining `(π/2)∫_{ρ²}^1 G(t)/t dt`, the value of the action.
    pub remainder: T,
}

/// Closed form of `G(y) = ∫₀^y g(t) dt` for the diagonal element.
pub fn diagonal_mass<T: Real>(params: &SpectralParams<T>, y: T) -> Result<T> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let two = lit::<T>(2.0);
    let gamma = gamma_k(params, m);
    if m == 0 {
        let p = two * nu - T::one();
        return Ok(gamma * (T::one() - (T::one() - y).powf(p)) / p);
    }
    let series = gauss_2f1(
        T::one() - mf,
        two * nu - mf,
        two,
        y,
        &TruncationPolicy::default(),
    )?;
    Ok(gamma * y * (T::one() - y).powf(two * nu - mf - T::one()) * series)
}

/// Decomposition of the diagonal action into the two logarithmic terms,
/// which cancel, and the remainder.
pub fn diagonal_decomposition<T: Real>(params: &SpectralParams<T>, rho: T) -> Result<DiagonalTerms<T>> {
    check_radius(rho)?;
    let y = rho * rho;
    let half_pi = T::FRAC_PI_2();
    let mass = diagonal_mass(params, y)?;
    let log_y = if y > T::zero() { y.ln() } else { T::zero() };
    let inner_log = -half_pi * log_y * mass;
    let outer_log = half_pi * log_y * mass;
    let remainder = half_pi * diagonal_tail(params, y)?;
    Ok(DiagonalTerms { mass, inner_log, outer_log, remainder })
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `∫_y^1 G(t)/t dt`.
fn diagonal_tail<T: Real>(params: &SpectralParams<T>, y: T) -> Result<T> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let two = lit::<T>(2.0);
    let gamma = gamma_k(params, m);
    let x = T::one() - y;
    if m >= 1 {
        let connection = coeff_alpha(params)? / two;
        let e = two * nu - mf;
        let series = hyp_3f2(
            T::one() - mf,
            e,
            e,
            two * (nu - mf),
            e + T::one(),
            x,
            &TruncationPolicy::default(),
        )?;
        return Ok(gamma * connection * x.powf(e) / e * series);
    }
    let p = two * nu - T::one();
    let policy = TruncationPolicy::<T>::default();
    let q = if y <= lit(0.5) {
        let harmonic = digamma(p + T::one())? + lit(EULER_GAMMA);
        let mut sum = T::zero();
        let mut coeff = T::one();
        let mut power = T::one();
        let mut quiet = 0;
        for j in 1..=policy.max_terms {
            let jf = from_usize::<T>(j);
            coeff *= (-p + jf - T::one()) / jf;
            power *= y;
            let term = coeff * power / jf;
            sum += term;
            if coeff == T::zero() || term.abs() < policy.abs_tol * (T::one() + sum.abs()) {
                quiet += 1;
                if quiet >= 2 || coeff == T::zero() {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        (harmonic + sum) / p
    } else {
        let mut sum = T::zero();
        let mut power = x.powf(p + T::one());
        for j in 0..policy.max_terms {
            let term = power / (p + from_usize::<T>(j) + T::one());
            sum += term;
            if term.abs() < policy.abs_tol * (T::one() + sum.abs()) {
                break;
            }
            power *= x;
        }
        (-y.ln() - sum) / p
    };
    Ok(gamma * q)
}

/// Radial factor of `L_ν Φ_k` for `k ≠ m`.
pub fn radial_action_offdiag<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    rho: T,
    convention: Convention,
) -> Result<T> {
    check_radius(rho)?;
    if k.0 == params.m() {
        return Err(Error::InvalidParams("off-diagonal branch requires k ≠ m".into()));
    }
    match convention {
        Convention::Rederived => offdiag_rederived(params, k.0, rho),
        _ => offdiag_printed(params, k.0, rho, convention),
    }
}

fn offdiag_printed<T: Real>(
    params: &SpectralParams<T>,
    k: usize,
    rho: T,
    convention: Convention,
) -> Result<T> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let kf = from_usize::<T>(k);
    let two = lit::<T>(2.0);
    let n = kf - mf;
    let policy = TruncationPolicy::default();
    let arg = convention.argument(rho);
    let x = T::one() - rho * rho;
    let decay = x.powf(two * nu - mf - T::one());
    if n + T::one() == T::zero() {
        return Err(Error::InvalidParams("prefactor divides by k−m+1 = 0".into()));
    }
    let c3 = pochhammer(T::one() + n, m) / (factorial::<T>(m) * (n + T::one()));
    let i3 = c3
        * rho.powf(n + two)
        * decay
        * gauss_2f1(-mf + T::one(), two * (nu - mf) + kf, two + n, arg, &policy)?;
    let alpha = coeff_alpha(params)?;
    let i4 = alpha / (two * nu - mf - T::one())
        * decay
        * gauss_2f1(-mf + T::one(), two * nu - mf - T::one(), two * (nu - mf), arg, &policy)?;
    Ok(T::PI() * gamma_k(params, k) / (two * n) * (i3 + i4))
}

/// Off-diagonal action via the Jacobi expansion of `Φ_k` integrated term
/// by term against both halves of the kernel; valid on either side of `m`.
fn offdiag_rederived<T: Real>(params: &SpectralParams<T>, k: usize, rho: T) -> Result<T> {
    let m = params.m();
    if rho == T::zero() {
        return Ok(T::zero());
    }
    let nu = params.nu();
    let two = lit::<T>(2.0);
    let d = m.min(k);
    let a = m.abs_diff(k);
    let af = from_usize::<T>(a);
    let df = from_usize::<T>(d);
    let beta = params.beta();
    let p = two * nu - from_usize::<T>(m) - two;
    let shifted = T::one() + af + beta + df;
    let y = rho * rho;
    let x = T::one() - y;
    let policy = TruncationPolicy::default();
    let inner_lead = pochhammer(T::one() + af, d) / factorial::<T>(d);
    let outer_lead = if d % 2 == 0 { T::one() } else { -T::one() } * pochhammer(T::one() + beta, d)
        / factorial::<T>(d);
    let mut inner = T::zero();
    let mut outer = T::zero();
    for j in 0..=d {
        let jf = from_usize::<T>(j);
        let common = pochhammer(-df, j) * pochhammer(shifted, j) / factorial::<T>(j);
        let e = af + jf + T::one();
        inner += inner_lead * common / pochhammer(T::one() + af, j) * y.powf(e) / e
            * gauss_2f1(e, -p, e + T::one(), y, &policy)?;
        let f = p + jf + T::one();
        outer += outer_lead * common / pochhammer(T::one() + beta, j) * x.powf(f) / f;
    }
    let radial = rho.powi(-(a as i32)) * inner + rho.powi(a as i32) * outer;
    Ok(T::PI() * gamma_k(params, k) / (two * af) * radial)
}

/// The two terms of the above-level action in the printed layout, with the
/// second term carrying its corrected prefactor and hypergeometric factor.
pub fn above_level_terms<T: Real>(params: &SpectralParams<T>, k: BasisIndex, rho: T) -> Result<(T, T)> {
    check_radius(rho)?;
    let m = params.m();
    if k.0 <= m {
        return Err(Error::InvalidParams("above-level terms require k > m".into()));
    }
    let nu = params.nu();
    let mf = from_usize::<T>(m);
    let kf = from_usize::<T>(k.0);
    let two = lit::<T>(2.0);
    let n = kf - mf;
    let x = T::one() - rho * rho;
    let policy = TruncationPolicy::default();
    let decay = x.powf(two * nu - mf - T::one());
    let scale = T::PI() * gamma_k(params, k.0) / (two * n);
    let i3 = pochhammer(T::one() + n, m) / (factorial::<T>(m) * (n + T::one()))
        * rho.powf(n + two)
        * decay
        * gauss_2f1(-mf + T::one(), two * (nu - mf) + kf, two + n, rho * rho, &policy)?;
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let i4 = rho.powf(n) * sign * pochhammer(two * (nu - mf), m) / factorial::<T>(m) * decay
        / (two * nu - mf - T::one())
        * hyp_3f2(-mf, two * (nu - mf) + kf, two * nu - mf - T::one(), two * (nu - mf), two * nu - mf, x, &policy)?;
    Ok((scale * i3, scale * i4))
}

/// Radial factor of `L_ν Φ_k`, dispatching on the branch.
pub fn radial_action<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    rho: T,
    convention: Convention,
) -> Result<T> {
    if k.0 == params.m() {
        radial_action_diag(params, rho, convention)
    } else {
        radial_action_offdiag(params, k, rho, convention)
    }
}

/// `L_ν Φ_k(z) = e^{i(k−m) arg z} × radial(|z|)`.
pub fn full_action<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    z: Complex<T>,
    convention: Convention,
) -> Result<Complex<T>> {
    let rho = z.norm();
    check_radius(rho)?;
    let radial = radial_action(params, k, rho, convention)?;
    let mode = params.mode(k);
    if mode == 0 {
        return Ok(Complex::new(radial, T::zero()));
    }
    if rho == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let phase = Complex::from_polar(T::one(), T::from_i64(mode).unwrap() * z.arg());
    Ok(phase * radial)
}

/// Radial factor of `L_ν Φ_k` from the quadrature oracle.
pub fn radial_action_oracle<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    rho: T,
    quad: &DiskQuadrature<T>,
) -> Result<T> {
    let f = BasisFunction::new(params, k);
    Ok(transform_numeric(&f, Complex::new(rho, T::zero()), params, quad)?.re)
}

/// `|closed − oracle| / max(1e−12, |oracle|)`.
pub fn relative_error<T: Real>(closed: T, oracle: T) -> T {
    (closed - oracle).abs() / oracle.abs().max(lit(1e-12))
}

/// Radii of the reconciliation points.
pub const RECONCILIATION_RADII: [f64; 3] = [0.2, 0.5, 0.8];
/// Relative tolerance separating matching from non-matching closed forms.
pub const RECONCILIATION_TOLERANCE: f64 = 1e-6;

/// Indices `m−1` (when it exists), `m`, `m+1` and `m+5`.
pub fn reconciliation_indices(m: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    if m >= 1 {
        ks.push(m - 1);
    }
    ks.extend([m, m + 1, m + 5]);
    ks
}

/// One closed-form versus oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconciliationPoint<T> {
    pub nu: T,
    pub m: usize,
    pub k: usize,
    pub rho: T,
    pub branch: Branch,
    pub oracle: T,
    pub closed: [std::result::Result<T, String>; 3],
}

impl<T: Real> ReconciliationPoint<T> {
    pub fn value(&self, convention: Convention) -> Option<T> {
        self.closed[convention.slot()].as_ref().ok().copied().filter(|v| v.is_finite())
    }

    pub fn relative_error(&self, convention: Convention) -> Option<T> {
        self.value(convention).map(|v| relative_error(v, self.oracle))
    }
}

/// Per-branch, per-convention agreement summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConventionSummary<T> {
    pub points: usize,
    pub evaluation_errors: usize,
    pub failed_points: usize,
    pub max_rel_err: Option<T>,
}

impl<T: Real> ConventionSummary<T> {
    pub fn matches(&self) -> bool {
        self.points > 0 && self.failed_points == 0 && self.evaluation_errors == 0
    }
}

/// Outcome of comparing every convention against the oracle.
#[derive(Debug, Clone)]
pub struct Reconciliation<T> {
    pub points: Vec<ReconciliationPoint<T>>,
    pub tolerance: T,
}

/// Runs every convention at the reconciliation points of each parameter pair.
pub fn reconcile<T: Real>(
    param_set: &[SpectralParams<T>],
    quad: &DiskQuadrature<T>,
) -> Result<Reconciliation<T>> {
    let mut points = Vec::new();
    for params in param_set {
        for k in reconciliation_indices(params.m()) {
            for &rho in &RECONCILIATION_RADII {
                let rho = lit::<T>(rho);
                let oracle = radial_action_oracle(params, BasisIndex(k), rho, quad)?;
                let closed = Convention::ALL.map(|c| {
                    radial_action(params, BasisIndex(k), rho, c).map_err(|e| e.to_string())
                });
                points.push(ReconciliationPoint {
                    nu: params.nu(),
                    m: params.m(),
                    k,
                    rho,
                    branch: Branch::of(params.m(), k),
                    oracle,
                    closed,
                });
            }
        }
    }
    Ok(Reconciliation { points, tolerance: lit(RECONCILIATION_TOLERANCE) })
}

impl<T: Real> Reconciliation<T> {
    pub fn summary(&self, branch: Branch, convention: Convention) -> ConventionSummary<T> {
        let mut summary =
            ConventionSummary { points: 0, evaluation_errors: 0, failed_points: 0, max_rel_err: None };
        for p in self.points.iter().filter(|p| p.branch == branch) {
            summary.points += 1;
            match p.relative_error(convention) {
                None => summary.evaluation_errors += 1,
                Some(e) => {
                    if !(e < self.tolerance) {
                        summary.failed_points += 1;
                    }
                    summary.max_rel_err = Some(summary.max_rel_err.map_or(e, |w: T| w.max(e)));
                }
            }
        }
        summary
    }

    /// First convention, in the order of [`Convention::ALL`], matching the
    /// oracle at every point of the branch.
    pub fn chosen(&self, branch: Branch) -> Option<Convention> {
        Convention::ALL.into_iter().find(|&c| self.summary(branch, c).matches())
    }

    pub fn has_branch(&self, branch: Branch) -> bool {
        self.points.iter().any(|p| p.branch == branch)
    }

    /// True when the hard-coded convention of every exercised branch matches.
    pub fn reconciled_conventions_match(&self) -> bool {
        Branch::ALL
            .iter()
            .filter(|b| self.has_branch(**b))
            .all(|&b| self.summary(b, reconciled_convention(b)).matches())
    }

    /// Worst relative error of the hard-coded conventions.
    pub fn worst_reconciled_error(&self) -> Option<T> {
        self.points
            .iter()
            .map(|p| p.relative_error(reconciled_convention(p.branch)))
            .try_fold(T::zero(), |acc, e| e.map(|e| acc.max(e)))
    }

    /// Plain-text `key = value` ledger.
    pub fn ledger(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# closed-form radial action versus quadrature oracle");
        let _ = writeln!(out, "tolerance = {:.1e}", self.tolerance);
        for branch in Branch::ALL {
            if !self.has_branch(branch) {
                continue;
            }
            let b = branch.label();
            let chosen = self.chosen(branch);
            let _ = writeln!(out, "{b}.chosen = {}", chosen.map_or("none", |c| c.label()));
            let _ = writeln!(out, "{b}.hard_coded = {}", reconciled_convention(branch).label());
            let status = if self.summary(branch, reconciled_convention(branch)).matches() {
                "VALID"
            } else {
                "INVALID"
            };
            let _ = writeln!(out, "{b}.status = {status}");
            for c in Convention::ALL {
                let s = self.summary(branch, c);
                let key = format!("{b}.{}", c.label());
                let _ = writeln!(out, "{key}.points = {}", s.points);
                let _ = writeln!(out, "{key}.evaluation_errors = {}", s.evaluation_errors);
                let _ = writeln!(out, "{key}.failed_points = {}", s.failed_points);
                let worst = s.max_rel_err.map_or("none".to_string(), |e| format!("{e:.3e}"));
                let _ = writeln!(out, "{key}.max_rel_err = {worst}");
                let worst_point = self
                    .points
                    .iter()
                    .filter(|p| p.branch == branch)
                    .filter_map(|p| p.relative_error(c).map(|e| (e, p)))
                    .fold(None, |acc: Option<(T, &ReconciliationPoint<T>)>, (e, p)| match acc {
                        Some((w, _)) if !(e > w) => acc,
                        _ => Some((e, p)),
                    });
                if let Some((_, p)) = worst_point {
                    let _ = writeln!(
                        out,
                        "{key}.worst_point = nu={} m={} k={} rho={} oracle={:.3e}",
                        p.nu, p.m, p.k, p.rho, p.oracle
                    );
                }
                let _ = writeln!(out, "{key}.verdict = {}", if s.matches() { "match" } else { "mismatch" });
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            let mut line = format!(
                "point.{i} = branch={} nu={} m={} k={} rho={} oracle={:.16e}",
                p.branch.label(),
                p.nu,
                p.m,
                p.k,
                p.rho,
                p.oracle
            );
            for c in Convention::ALL {
                match &p.closed[c.slot()] {
                    Ok(v) => {
                        let _ = write!(line, " {}={v:.16e}", c.label());
                    }
                    Err(e) => {
                        let _ = write!(line, " {}=error({})", c.label(), e.replace(' ', "_"));
                    }
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// Gauss–Legendre integral of `f` over `[lo, hi]` with `n` nodes.
#[cfg(test)]
pub(crate) fn integrate_interval<T: Real>(lo: T, hi: T, n: usize, mut f: impl FnMut(T) -> T) -> T {
    let half = lit::<T>(0.5) * (hi - lo);
    crate::quadrature::gauss_legendre::<T>(n)
        .into_iter()
        .map(|(x, w)| w * half * f(lo + half * (x + T::one())))
        .sum()
}
