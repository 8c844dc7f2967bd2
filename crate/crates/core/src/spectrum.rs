//! Singular values `λ_k = ‖L_ν Φ_k‖`: the printed series, the quadrature
//! oracle, tabulation and the power-law fit of the decay.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::basis::{BasisFunction, BasisIndex, GramMatrix, SpectralParams};
use crate::error::{Error, Result};
use crate::quadrature::{build_disk_rule, transform_numeric, DiskQuadrature};
use crate::scalar::{from_usize, is_nonpositive_integer, lit, Real};
use crate::specfun::{gamma_sign, ln_gamma, pochhammer, TruncationPolicy};
use crate::transform::{least_squares, radial_action, relative_error, Convention};

/// `α = 2Γ(2(m−ν)+1) / (m! Γ(2+m−2ν))`, continued to the removable
/// singularity when both Gamma arguments are poles.
pub fn coeff_alpha<T: Real>(params: &SpectralParams<T>) -> Result<T> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let two = lit::<T>(2.0);
    let upper = two * (mf - nu) + T::one();
    let lower = two + mf - two * nu;
    let factorial = pochhammer(T::one(), m);
    match (is_nonpositive_integer(upper), is_nonpositive_integer(lower)) {
        (true, true) => {
            if m == 0 {
                Ok(two / (T::one() - two * nu))
            } else {
                Ok(two * pochhammer(lower, m - 1) / factorial)
            }
        }
        (false, false) => {
            let sign = gamma_sign(upper)? * gamma_sign(lower)?;
            Ok(two * sign * (ln_gamma(upper)? - ln_gamma(lower)?).exp() / factorial)
        }
        (true, false) => Err(Error::Pole(upper.to_f64().unwrap_or(f64::NAN))),
        (false, true) => Err(Error::Pole(lower.to_f64().unwrap_or(f64::NAN))),
    }
}

/// Coefficient of `₂F₁(1−m, 2ν−m; 2ν−2m; 1−t)` in the expansion of
/// `₂F₁(1−m, 2ν−m; 2; t)` about `t = 1`; equals `α/2`.
pub fn connection_coefficient<T: Real>(params: &SpectralParams<T>) -> Result<T> {
    Ok(coeff_alpha(params)? / lit(2.0))
}

fn series_parameters<T: Real>(params: &SpectralParams<T>, k: BasisIndex) -> (T, T, T) {
    let nu = params.nu();
    let mf = from_usize::<T>(params.m());
    let two = lit::<T>(2.0);
    (T::one() - mf, two * (nu - mf) + from_usize(k.0), two * (nu - mf))
}

/// Printed `A_n = (1/n!) Σ_i (a)_i(a)_{n−i}(b)_i(b)_{n−i} / ((c)_i(c)_{n−i})`
/// with `a = 1−m`, `b = 2(ν−m)+k`, `c = 2(ν−m)`.
pub fn series_coefficient_a<T: Real>(params: &SpectralParams<T>, k: BasisIndex, n: usize) -> T {
    let (a, b, c) = series_parameters(params, k);
    let inner: T = (0..=n)
        .map(|i| {
            pochhammer(a, i) * pochhammer(a, n - i) * pochhammer(b, i) * pochhammer(b, n - i)
                / (pochhammer(c, i) * pochhammer(c, n - i))
        })
        .sum();
    inner / pochhammer(T::one(), n)
}

/// Coefficient of `x^n` in `₂F₁(a, b; c; x)²` with the same `a, b, c` as
/// [`series_coefficient_a`].
pub fn cauchy_square_coefficient<T: Real>(params: &SpectralParams<T>, k: BasisIndex, n: usize) -> T {
    let (a, b, c) = series_parameters(params, k);
    let term = |i: usize| pochhammer(a, i) * pochhammer(b, i) / (pochhammer(c, i) * pochhammer(T::one(), i));
    (0..=n).map(|i| term(i) * term(n - i)).sum()
}

/// Validity of a closed-form value against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flag {
    #[serde(rename = "VALID")]
    Valid,
    #[serde(rename = "INVALID")]
    Invalid,
}

impl Flag {
    pub fn label(&self) -> &'static str {
        match self {
            Flag::Valid => "VALID",
            Flag::Invalid => "INVALID",
        }
    }
}

/// Relative agreement with the oracle required for a VALID flag.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-4;

/// Value of the printed series, or the reason it has none.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm<T> {
    /// `√(J₁+J₂+J₃)` with every factor as printed.
    pub value: Option<T>,
    /// Same with `J₁` recomputed from the Beta integral of the printed `I₃²`.
    pub value_beta_j1: Option<T>,
    pub issue: Option<String>,
}

impl<T: Real> ClosedForm<T> {
    fn failed(issue: impl Into<String>) -> Self {
        Self { value: None, value_beta_j1: None, issue: Some(issue.into()) }
    }

    /// VALID when the printed value exists and is within
    /// [`CLOSED_FORM_TOLERANCE`] of the oracle.
    pub fn flag(&self, oracle: T) -> Flag {
        match self.value {
            Some(v) if relative_error(v, oracle) < lit(CLOSED_FORM_TOLERANCE) => Flag::Valid,
            _ => Flag::Invalid,
        }
    }
}

/// `Γ(p₁)⋯/Γ(q₁)⋯` through log-Gamma with sign tracking; a pole in the
/// denominator gives zero.
fn gamma_ratio<T: Real>(num: &[T], den: &[T]) -> Result<T> {
    if den.iter().any(|&q| is_nonpositive_integer(q)) {
        return Ok(T::zero());
    }
    let mut log = T::zero();
    let mut sign = T::one();
    for &p in num {
        log += ln_gamma(p)?;
        sign *= gamma_sign(p)?;
    }
    for &q in den {
        log -= ln_gamma(q)?;
        sign *= gamma_sign(q)?;
    }
    Ok(sign * log.exp())
}

/// Sums `Σ_n term(n)` either up to `last` or under the truncation policy.
fn sum_series<T: Real>(
    policy: &TruncationPolicy<T>,
    last: Option<usize>,
    mut term: impl FnMut(usize) -> Result<T>,
) -> Result<T> {
    let mut sum = T::zero();
    if let Some(last) = last {
        for n in 0..=last {
            sum += term(n)?;
        }
        return finite(sum);
    }
    let mut quiet = 0;
    for n in 0..policy.max_terms {
        let t = term(n)?;
        sum += t;
        if !sum.is_finite() {
            return Err(Error::Divergence(format!("partial sum not finite after {} terms", n + 1)));
        }
        let small = t.abs() < policy.abs_tol || t.abs() < policy.rel_tol * sum.abs();
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok(sum);
        }
    }
    Err(Error::Divergence(format!("no convergence within {} terms", policy.max_terms)))
}

fn finite<T: Real>(x: T) -> Result<T> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Divergence("non-finite sum".into()))
    }
}

/// Evaluates the printed series for `λ_k` and reports why it fails when it does.
pub fn singular_value_closed<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    policy: &TruncationPolicy<T>,
) -> ClosedForm<T> {
    let outcome = if k.0 == params.m() {
        diagonal_closed(params, policy).map(|v| (v, None))
    } else {
        offdiagonal_closed(params, k, policy)
    };
    match outcome {
        Ok((square, beta_square)) => {
            let root = |s: T| if s >= T::zero() { Some(s.sqrt()) } else { None };
            let value = root(square);
            let issue = if value.is_none() { Some("J1+J2+J3 is negative".to_string()) } else { None };
            ClosedForm { value, value_beta_j1: beta_square.and_then(root), issue }
        }
        Err(e) => ClosedForm::failed(e.to_string()),
    }
}

fn diagonal_closed<T: Real>(params: &SpectralParams<T>, policy: &TruncationPolicy<T>) -> Result<T> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let two = lit::<T>(2.0);
    let alpha = coeff_alpha(params)?;
    let upper = [T::one() - mf, two * nu - mf, two * nu - mf + T::one()];
    let lower = [two * (nu - mf), two * nu - mf + two];
    let coefficient = |i: usize| {
        upper.iter().map(|&a| pochhammer(a, i)).fold(T::one(), |acc, x| acc * x)
            / (lower.iter().map(|&b| pochhammer(b, i)).fold(T::one(), |acc, x| acc * x)
                * pochhammer(T::one(), i))
    };
    let last = if m >= 1 { Some(2 * (m - 1)) } else { None };
    let capacity = last.map_or(policy.max_terms, |l| l + 1);
    let coeffs: Vec<T> = (0..capacity).map(coefficient).collect();
    let sum = sum_series(policy, last, |n| {
        let b_n: T = (0..=n).map(|i| coeffs[i] * coeffs[n - i]).sum();
        Ok(b_n / (from_usize::<T>(n) + two * nu - mf))
    })?;
    let prefactor = alpha * (two * (two * nu - mf) - T::one())
        / (lit::<T>(8.0) * T::PI() * (two * nu - mf + T::one()));
    finite(prefactor * sum)
}

fn offdiagonal_closed<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    policy: &TruncationPolicy<T>,
) -> Result<(T, Option<T>)> {
    let nu = params.nu();
    let m = params.m();
    let mf = from_usize::<T>(m);
    let kf = from_usize::<T>(k.0);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let shift = kf - mf + T::one();
    if shift == T::zero() {
        return Err(Error::InvalidParams("prefactor divides by k−m+1 = 0".into()));
    }
    let c3 = pochhammer(shift, m) / (pochhammer(T::one(), m) * shift);
    let alpha = coeff_alpha(params)?;
    let c4 = alpha / (two * nu - mf - T::one());
    let g = four * nu - two * mf - T::one();
    let j3_argument = four * nu - kf - lit::<T>(3.0) * mf;
    if j3_argument <= T::zero() {
        return Err(Error::Pole(j3_argument.to_f64().unwrap_or(f64::NAN)));
    }
    let last = if m >= 1 { Some(2 * m - 2) } else { None };
    let mut j1 = T::zero();
    let mut j1_beta = T::zero();
    let mut j2 = T::zero();
    let mut j3 = T::zero();
    let j3_gamma = gamma_ratio(&[kf - mf + two, g], &[j3_argument])?;
    sum_series(policy, last, |n| {
        let a_n = series_coefficient_a(params, k, n);
        let nf = from_usize::<T>(n);
        let t1 = a_n * gamma_ratio(
            &[two * nf + two * kf - two * mf + lit(5.0), g],
            &[two * nf + two * kf - four * mf + four * nu + lit(6.0)],
        )?;
        let t1_beta = a_n
            * lit::<T>(0.5)
            * gamma_ratio(&[nf + kf - mf + lit(3.0), g], &[nf + kf - lit::<T>(3.0) * mf + four * nu + two])?;
        let t2 = a_n * gamma_ratio(&[g, two * nf + two], &[two * nf + four * nu - two * mf + T::one()])?;
        let t3 = a_n * j3_gamma;
        j1 += t1;
        j1_beta += t1_beta;
        j2 += t2;
        j3 += t3;
        Ok(t1.abs() + t2.abs() + t3.abs())
    })?;
    let tail = c4 * c4 * j2 + c3 * c4 * j3;
    Ok((finite(c3 * c3 * j1 + tail)?, finite(c3 * c3 * j1_beta + tail).ok()))
}

/// Disk rule resolving `L_ν Φ_k`: at least `n_radial` radial and
/// `n_angular` angular nodes, raised for large `|k−m|`.
pub fn adapted_rule<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    n_radial: usize,
    n_angular: usize,
) -> Result<DiskQuadrature<T>> {
    let n_r = n_radial.max(k.0 / 2 + n_radial / 4);
    let needed = 2 * params.m().abs_diff(k.0) + 8;
    let n_a = n_angular.max(needed + needed % 2);
    build_disk_rule(n_r, n_a)
}

/// `π Σ_i w_i |L f(√t_i)|² (1−t_i)^{2ν−2}` over the radial nodes of `quad`,
/// for `f` whose image has rotation-invariant modulus.
pub fn image_norm<T: Real>(
    f: &BasisFunction<T>,
    params: &SpectralParams<T>,
    quad: &DiskQuadrature<T>,
) -> Result<T> {
    let mut sum = T::zero();
    for &(t, w) in quad.radial_nodes() {
        let value = transform_numeric(f, Complex::new(t.sqrt(), T::zero()), params, quad)?;
        sum += w * value.norm_sqr() * params.weight(t);
    }
    Ok((T::PI() * sum).sqrt())
}

/// `λ_k = ‖L_ν Φ_k‖` from the quadrature transform of `Φ_k`.
pub fn singular_value_oracle<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    quad: &DiskQuadrature<T>,
) -> Result<T> {
    image_norm(&BasisFunction::new(params, k), params, quad)
}

/// Oracle `λ_k` on the rule adapted to `k` from the base resolutions.
pub fn singular_value_adaptive<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    n_radial: usize,
    n_angular: usize,
) -> Result<T> {
    singular_value_oracle(params, k, &adapted_rule(params, k, n_radial, n_angular)?)
}

/// `λ_k` from the reconciled closed-form radial action integrated on the
/// radial nodes of `quad`.
pub fn singular_value_rederived<T: Real>(
    params: &SpectralParams<T>,
    k: BasisIndex,
    quad: &DiskQuadrature<T>,
) -> Result<T> {
    let mut sum = T::zero();
    for &(t, w) in quad.radial_nodes() {
        let v = radial_action(params, k, t.sqrt(), Convention::Rederived)?;
        sum += w * v * v * params.weight(t);
    }
    Ok((T::PI() * sum).sqrt())
}

/// `⟨L_ν Φ_j, L_ν Φ_k⟩` for `j, k ≤ kmax` on the nodes of `quad`, with the
/// image at `√t e^{iθ}` obtained from the image at `√t` by rotation.
pub fn image_gram<T: Real>(
    params: &SpectralParams<T>,
    kmax: usize,
    quad: &DiskQuadrature<T>,
) -> Result<GramMatrix<T>> {
    let size = kmax + 1;
    let profiles: Vec<Vec<Complex<T>>> = (0..size)
        .into_par_iter()
        .map(|k| {
            let f = BasisFunction::new(params, BasisIndex(k));
            quad.radial_nodes()
                .iter()
                .map(|&(t, _)| transform_numeric(&f, Complex::new(t.sqrt(), T::zero()), params, quad))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n_angular = quad.n_angular();
    let dtheta = T::TAU() / from_usize(n_angular);
    let entries = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx / size, idx % size);
            let shift = params.mode(BasisIndex(j)) - params.mode(BasisIndex(k));
            let angular: Complex<T> = (0..n_angular)
                .map(|p| Complex::from_polar(T::one(), T::from_i64(shift).unwrap() * quad.angle(p)))
                .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x)
                * dtheta;
            let mut acc = Complex::new(T::zero(), T::zero());
            for (i, &(t, w)) in quad.radial_nodes().iter().enumerate() {
                acc += profiles[j][i] * profiles[k][i].conj() * (lit::<T>(0.5) * w * params.weight(t));
            }
            acc * angular
        })
        .collect();
    Ok(GramMatrix::from_entries(size, entries))
}

/// Change of the oracle `λ_k` under doubling of both resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification<T> {
    pub rows: Vec<(usize, T, T)>,
    pub tolerance: T,
}

/// Relative change that certifies a resolution.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-8;

impl<T: Real> Certification<T> {
    pub fn worst(&self) -> Option<(usize, T)> {
        self.rows
            .iter()
            .map(|&(k, base, fine)| (k, relative_error(base, fine)))
            .fold(None, |acc: Option<(usize, T)>, (k, e)| match acc {
                Some((_, w)) if !(e > w) => acc,
                _ => Some((k, e)),
            })
    }

    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|&(_, b, f)| relative_error(b, f) < self.tolerance)
    }
}

/// Compares oracle singular values at the given and doubled resolutions
/// for `k = 0…kmax`.
pub fn certify_resolution<T: Real>(
    params: &SpectralParams<T>,
    kmax: usize,
    n_radial: usize,
    n_angular: usize,
) -> Result<Certification<T>> {
    let rows = (0..=kmax)
        .into_par_iter()
        .map(|k| {
            let base = singular_value_adaptive(params, BasisIndex(k), n_radial, n_angular)?;
            let fine = singular_value_adaptive(params, BasisIndex(k), 2 * n_radial, 2 * n_angular)?;
            Ok((k, base, fine))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certification { rows, tolerance: lit(CERTIFICATION_TOLERANCE) })
}

/// One row of a [`SpectrumTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow<T> {
    pub k: usize,
    pub lambda_oracle: T,
    pub lambda_closed: Option<T>,
    pub flag: Flag,
    pub rel_residual: Option<T>,
    pub issue: Option<String>,
}

impl<T: Real> SpectrumRow<T> {
    /// Row from an oracle value and the printed series.
    pub fn new(k: usize, lambda_oracle: T, closed: ClosedForm<T>) -> Self {
        let flag = closed.flag(lambda_oracle);
        let rel_residual = closed.value.map(|v| relative_error(v, lambda_oracle));
        let issue = closed.issue.or_else(|| match flag {
            Flag::Valid => None,
            Flag::Invalid => Some("printed series disagrees with oracle".to_string()),
        });
        Self { k, lambda_oracle, lambda_closed: closed.value, flag, rel_residual, issue }
    }
}

/// Power law `λ_k ≈ C k^{slope}` fitted over `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit<T> {
    pub slope: T,
    pub intercept: T,
    pub k_min: usize,
    pub k_max: usize,
}

impl<T: Real> AsymptoticFit<T> {
    pub fn constant(&self) -> T {
        self.intercept.exp()
    }
}

/// Exponent `(m−4ν+1)/2` of the predicted decay.
pub fn expected_slope<T: Real>(params: &SpectralParams<T>) -> T {
    (from_usize::<T>(params.m()) - lit::<T>(4.0) * params.nu() + T::one()) / lit(2.0)
}

/// Oracle singular values with their closed-form comparison.
#[derive(Debug, Clone)]
pub struct SpectrumTable<T> {
    params: SpectralParams<T>,
    rows: Vec<SpectrumRow<T>>,
    fit: Option<AsymptoticFit<T>>,
}

/// Smallest `k_max` for which tables carry a fit.
pub const FIT_MIN_KMAX: usize = 50;
/// Lower end of the fitted range.
pub const FIT_K_MIN: usize = 50;

impl<T: Real> SpectrumTable<T> {
    pub fn from_rows(params: SpectralParams<T>, rows: Vec<SpectrumRow<T>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if !(row.lambda_oracle >= T::zero()) {
                return Err(Error::InvalidParams(format!("negative oracle value at k={}", row.k)));
            }
            if i > 0 && rows[i - 1].k >= row.k {
                return Err(Error::InvalidParams("rows not strictly increasing in k".into()));
            }
        }
        Ok(Self { params, rows, fit: None })
    }

    /// Rows `k = 0…kmax` computed in parallel.
    pub fn compute(
        params: &SpectralParams<T>,
        kmax: usize,
        n_radial: usize,
        n_angular: usize,
        policy: &TruncationPolicy<T>,
    ) -> Result<Self> {
        let rows = (0..=kmax)
            .into_par_iter()
            .map(|k| {
                let oracle = singular_value_adaptive(params, BasisIndex(k), n_radial, n_angular)?;
                Ok(SpectrumRow::new(k, oracle, singular_value_closed(params, BasisIndex(k), policy)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(*params, rows)
    }

    /// Attaches the fit over `[FIT_K_MIN, k_max]` when `k_max ≥ FIT_MIN_KMAX`.
    pub fn with_default_fit(self) -> Result<Self> {
        let k_max = self.rows.last().map_or(0, |r| r.k);
        if k_max < FIT_MIN_KMAX {
            return Ok(self);
        }
        self.with_fit(FIT_K_MIN.min(k_max), k_max)
    }

    pub fn with_fit(mut self, k_min: usize, k_max: usize) -> Result<Self> {
        let (slope, intercept) = asymptotic_fit(&self, k_min, k_max)?;
        self.fit = Some(AsymptoticFit { slope, intercept, k_min, k_max });
        Ok(self)
    }

    pub fn params(&self) -> &SpectralParams<T> {
        &self.params
    }

    pub fn rows(&self) -> &[SpectrumRow<T>] {
        &self.rows
    }

    pub fn fit(&self) -> Option<&AsymptoticFit<T>> {
        self.fit.as_ref()
    }

    pub fn any_invalid(&self) -> bool {
        self.rows.iter().any(|r| r.flag == Flag::Invalid)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda_oracle,lambda_closed,flag,rel_residual\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.k,
                decimal(r.lambda_oracle),
                r.lambda_closed.map_or(String::new(), decimal),
                r.flag.label(),
                r.rel_residual.map_or(String::new(), decimal)
            );
        }
        out
    }

    pub fn fit_csv(&self) -> Option<String> {
        self.fit.map(|f| {
            format!(
                "slope,intercept,constant,expected_slope,k_min,k_max\n{},{},{},{},{},{}\n",
                decimal(f.slope),
                decimal(f.intercept),
                decimal(f.constant()),
                decimal(expected_slope(&self.params)),
                f.k_min,
                f.k_max
            )
        })
    }

    pub fn to_json(&self) -> String {
        let document = JsonTable {
            params: JsonParams { nu: number(self.params.nu()), m: self.params.m() },
            rows: self
                .rows
                .iter()
                .map(|r| JsonRow {
                    k: r.k,
                    lambda_oracle: number(r.lambda_oracle),
                    lambda_closed: r.lambda_closed.and_then(number),
                    flag: r.flag,
                    rel_residual: r.rel_residual.and_then(number),
                    issue: r.issue.clone(),
                })
                .collect(),
            fit: self.fit.map(|f| JsonFit {
                slope: number(f.slope),
                intercept: number(f.intercept),
                constant: number(f.constant()),
                expected_slope: number(expected_slope(&self.params)),
                k_range: [f.k_min, f.k_max],
            }),
        };
        let mut text = serde_json::to_string_pretty(&document).expect("table serializes");
        text.push('\n');
        text
    }
}

/// Decimal with 17 significant digits.
pub fn decimal<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

fn number<T: Real>(x: T) -> Option<Box<RawValue>> {
    if x.is_finite() {
        RawValue::from_string(decimal(x)).ok()
    } else {
        None
    }
}

#[derive(Serialize)]
struct JsonParams {
    nu: Option<Box<RawValue>>,
    m: usize,
}

#[derive(Serialize)]
struct JsonRow {
    k: usize,
    lambda_oracle: Option<Box<RawValue>>,
    lambda_closed: Option<Box<RawValue>>,
    flag: Flag,
    rel_residual: Option<Box<RawValue>>,
    issue: Option<String>,
}

#[derive(Serialize)]
struct JsonFit {
    slope: Option<Box<RawValue>>,
    intercept: Option<Box<RawValue>>,
    constant: Option<Box<RawValue>>,
    expected_slope: Option<Box<RawValue>>,
    k_range: [usize; 2],
}

#[derive(Serialize)]
struct JsonTable {
    params: JsonParams,
    rows: Vec<JsonRow>,
    fit: Option<JsonFit>,
}

/// Least-squares fit of `log λ_k` against `log k` over `k_min ≤ k ≤ k_max`,
/// returning the slope and `exp(intercept)`.
pub fn asymptotic_fit<T: Real>(table: &SpectrumTable<T>, k_min: usize, k_max: usize) -> Result<(T, T)> {
    if k_min < 10 {
        return Err(Error::Range(format!("k_min={k_min} < 10")));
    }
    if k_max <= k_min {
        return Err(Error::Range(format!("empty range [{k_min}, {k_max}]")));
    }
    let points: Vec<(T, T)> = table
        .rows
        .iter()
        .filter(|r| (k_min..=k_max).contains(&r.k))
        .map(|r| (from_usize::<T>(r.k).ln(), r.lambda_oracle.ln()))
        .collect();
    if points.len() != k_max - k_min + 1 {
        return Err(Error::Range(format!(
            "{} of {} rows present in [{k_min}, {k_max}]",
            points.len(),
            k_max - k_min + 1
        )));
    }
    let (slope, intercept) = least_squares(&points)?;
    Ok((slope, intercept.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_2f1;

    fn params(nu: f64, m: usize) -> SpectralParams<f64> {
        SpectralParams::new(nu, m).unwrap()
    }

    fn exact_holomorphic(k: usize) -> f64 {
        let pi = std::f64::consts::PI;
        if k == 0 {
            return pi / 12f64.sqrt();
        }
        let kf = k as f64;
        let a = 1.0 / (2.0 * kf + 2.0);
        let b = 0.5;
        let sq = (kf + 1.0) * pi * pi / (kf * kf)
            * (a * a / (kf + 3.0)
                + 2.0 * a * b / ((kf + 2.0) * (kf + 3.0))
                + 2.0 * b * b / ((kf + 1.0) * (kf + 2.0) * (kf + 3.0)));
        sq.sqrt()
    }

    #[test]
    fn alpha_examples() {
        assert!((coeff_alpha(&params(1.75, 1)).unwrap() - 2.0).abs() < 1e-14);
        assert!((coeff_alpha(&params(1.0, 0)).unwrap() + 2.0).abs() < 1e-14);
        assert!((coeff_alpha(&params(2.0, 1)).unwrap() - 2.0).abs() < 1e-14);
        assert!((coeff_alpha(&params(3.5, 2)).unwrap() + 3.0).abs() < 1e-13);
    }

    #[test]
    fn alpha_matches_connection_identity() {
        let policy = TruncationPolicy::default();
        for &(nu, m) in &[(2.5, 1), (2.0, 1), (3.5, 2), (3.25, 2), (4.0, 3), (1.75, 1)] {
            let p = params(nu, m);
            let mf = m as f64;
            let t = 0.5;
            let lhs = gauss_2f1(1.0 - mf, 2.0 * nu - mf, 2.0, t, &policy).unwrap();
            let rhs = connection_coefficient(&p).unwrap()
                * gauss_2f1(1.0 - mf, 2.0 * nu - mf, 2.0 * nu - 2.0 * mf, 1.0 - t, &policy).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "nu={nu} m={m}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn series_coefficient_examples() {
        let p = params(2.5, 1);
        assert_eq!(series_coefficient_a(&p, BasisIndex(3), 0), 1.0);
        for n in 1..6 {
            assert_eq!(series_coefficient_a(&p, BasisIndex(3), n), 0.0);
        }
        let q = params(2.5, 2);
        let (a, b, c) = (-1.0, 1.0 + 5.0, 1.0);
        let squared = (a * b / c) * (a * b / c);
        assert!((cauchy_square_coefficient(&q, BasisIndex(5), 2) - squared).abs() < 1e-12);
        assert!((series_coefficient_a(&q, BasisIndex(5), 2) - squared / 2.0).abs() < 1e-12);
        assert_eq!(series_coefficient_a(&q, BasisIndex(5), 3), 0.0);
    }

    #[test]
    fn cauchy_coefficient_equals_squared_series() {
        let p = params(3.25, 2);
        let (a, b, c) = series_parameters(&p, BasisIndex(4));
        let x: f64 = 0.3;
        let f = gauss_2f1(a, b, c, x, &TruncationPolicy::default()).unwrap();
        let squared: f64 = (0..=4).map(|n| cauchy_square_coefficient(&p, BasisIndex(4), n) * x.powi(n as i32)).sum();
        assert!((f * f - squared).abs() < 1e-12);
    }

    #[test]
    fn oracle_holomorphic_level_exact_values() {
        let p = params(1.0, 0);
        for k in 0..6 {
            let v = singular_value_adaptive(&p, BasisIndex(k), 64, 256).unwrap();
            assert!((v - exact_holomorphic(k)).abs() < 1e-11, "k={k}: {v}");
        }
        assert!((exact_holomorphic(1) - 1.063_434_140_4).abs() < 1e-10);
        assert!((exact_holomorphic(2) - 0.405_577_867_6).abs() < 1e-10);
        assert!((exact_holomorphic(3) - 0.219_037_082_7).abs() < 1e-10);
    }

    #[test]
    fn oracle_resolution_independent() {
        let p = params(1.0, 0);
        let a = singular_value_oracle(&p, BasisIndex(0), &build_disk_rule(48, 64).unwrap()).unwrap();
        let b = singular_value_oracle(&p, BasisIndex(0), &build_disk_rule(96, 128).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-7 * b);
    }

    #[test]
    fn rederived_singular_values_match_oracle() {
        let quad = build_disk_rule(64, 256).unwrap();
        for &(nu, m) in &[(2.0, 1), (3.5, 2), (2.0, 0)] {
            let p = params(nu, m);
            for k in 0..8 {
                let a = singular_value_oracle(&p, BasisIndex(k), &quad).unwrap();
                let b = singular_value_rederived(&p, BasisIndex(k), &quad).unwrap();
                assert!(relative_error(b, a) < 1e-10, "nu={nu} m={m} k={k}");
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let p = params(2.0, 1);
        let quad = build_disk_rule(32, 64).unwrap();
        let f = BasisFunction::new(&p, BasisIndex(2));
        let base = image_norm(&f, &p, &quad).unwrap();
        for &c in &[-3.0, 0.25, 7.5] {
            let mut sum = 0.0;
            for &(t, w) in quad.radial_nodes() {
                let g = |z: Complex<f64>| crate::quadrature::DiskFunction::eval(&f, z) * c;
                let v = transform_numeric(&g, Complex::new(t.sqrt(), 0.0), &p, &quad).unwrap();
                sum += w * v.norm_sqr() * p.weight(t);
            }
            let scaled = (std::f64::consts::PI * sum).sqrt();
            assert!((scaled - c.abs() * base).abs() < 1e-12 * scaled);
        }
    }

    #[test]
    fn closed_form_flags() {
        let policy = TruncationPolicy::default();
        let p = params(2.5, 1);
        let large = singular_value_closed(&p, BasisIndex(8), &policy);
        assert!(large.value.is_none());
        assert_eq!(large.flag(1.0), Flag::Invalid);
        let small = singular_value_closed(&p, BasisIndex(3), &policy);
        let oracle = singular_value_adaptive(&p, BasisIndex(3), 64, 256).unwrap();
        let flag = small.flag(oracle);
        assert_eq!(flag == Flag::Valid, small.value.is_some_and(|v| relative_error(v, oracle) < 1e-4));
        let diag = singular_value_closed(&params(1.0, 0), BasisIndex(0), &policy);
        assert!(diag.value.is_none() && diag.issue.is_some());
    }

    #[test]
    fn image_gram_is_diagonal() {
        let p = params(2.0, 1);
        let quad = build_disk_rule(32, 64).unwrap();
        let g = image_gram(&p, 4, &quad).unwrap();
        assert!(g.max_offdiag() < 1e-12);
        for k in 0..5 {
            let l = singular_value_oracle(&p, BasisIndex(k), &quad).unwrap();
            assert!((g.get(k, k).re - l * l).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_power_law() {
        let p = params(1.0, 0);
        let rows = (0..=60)
            .map(|k| SpectrumRow::new(k, 7.0 * (k.max(1) as f64).powi(-2), ClosedForm::failed("none")))
            .collect();
        let table = SpectrumTable::from_rows(p, rows).unwrap();
        let (slope, c) = asymptotic_fit(&table, 10, 60).unwrap();
        assert!((slope + 2.0).abs() < 1e-10 && (c - 7.0).abs() < 1e-10);
        assert!(asymptotic_fit(&table, 5, 60).is_err());
        assert!(asymptotic_fit(&table, 10, 80).is_err());
        assert_eq!(expected_slope(&p), -1.5);
        assert_eq!(expected_slope(&params(2.0, 1)), -3.0);
    }

    #[test]
    fn table_serialization() {
        let p = params(2.0, 1);
        let table = SpectrumTable::compute(&p, 3, 32, 64, &TruncationPolicy::default()).unwrap();
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("k,lambda_oracle,lambda_closed,flag,rel_residual\n"));
        let json: serde_json::Value = serde_json::from_str(&table.to_json()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 4);
        assert_eq!(json["params"]["m"], 1);
        assert!(json["fit"].is_null());
        assert!(SpectrumTable::from_rows(p, vec![table.rows()[1].clone(), table.rows()[0].clone()]).is_err());
    }
}
