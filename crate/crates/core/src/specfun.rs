//! Gamma-family functions, Jacobi polynomials and the Gauss and Clausen
//! hypergeometric series.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, is_nonpositive_integer, lit, Real};

/// Stopping rule for non-terminating series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy<T> {
    pub max_terms: usize,
    pub abs_tol: T,
    pub rel_tol: T,
}

impl<T: Real> TruncationPolicy<T> {
    pub fn new(max_terms: usize, abs_tol: T, rel_tol: T) -> Result<Self> {
        if max_terms < 1 {
            return Err(Error::InvalidParams("max_terms ≥ 1 violated".into()));
        }
        if abs_tol < T::zero() || rel_tol < T::zero() || abs_tol.is_nan() || rel_tol.is_nan() {
            return Err(Error::InvalidParams("tolerances must be non-negative".into()));
        }
        if abs_tol <= T::zero() && rel_tol <= T::zero() {
            return Err(Error::InvalidParams(
                "at least one of abs_tol, rel_tol must be positive".into(),
            ));
        }
        Ok(Self { max_terms, abs_tol, rel_tol })
    }

    /// A term is negligible when it is below every enabled tolerance.
    fn negligible(&self, term: T, sum: T) -> bool {
        let term = term.abs();
        let abs_ok = self.abs_tol <= T::zero() || term < self.abs_tol;
        let rel_ok = self.rel_tol <= T::zero() || term < self.rel_tol * sum.abs();
        abs_ok && rel_ok
    }
}

impl<T: Real> Default for TruncationPolicy<T> {
    fn default() -> Self {
        Self { max_terms: 10_000, abs_tol: lit(1e-15), rel_tol: lit(1e-13) }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest integer argument for which Gamma is evaluated as an exact factorial.
const EXACT_FACTORIAL_LIMIT: f64 = 30.0;

fn pole<T: Real>(x: T) -> Error {
    Error::Pole(x.to_f64().unwrap_or(f64::NAN))
}

fn small_factorial<T: Real>(x: T) -> Option<T> {
    if x >= T::one() && x <= lit(EXACT_FACTORIAL_LIMIT) && x == x.round() {
        let n = x.to_usize()? - 1;
        Some((1..=n).fold(T::one(), |acc, j| acc * from_usize(j)))
    } else {
        None
    }
}

/// `log |Γ(x)|`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(pole(x));
    }
    if let Some(f) = small_factorial(x) {
        return Ok(f.ln());
    }
    if x < lit(0.5) {
        let s = (T::PI() * x).sin().abs();
        return Ok(T::PI().ln() - s.ln() - ln_gamma(T::one() - x)?);
    }
    let y = x - T::one();
    let mut acc = lit::<T>(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += lit::<T>(c) / (y + from_usize(i));
    }
    let t = y + lit(LANCZOS_G + 0.5);
    let half = lit::<T>(0.5);
    Ok(half * (T::TAU()).ln() + (y + half) * t.ln() - t + acc.ln())
}

/// Sign of `Γ(x)`; pairs with [`ln_gamma`] for negative arguments.
pub fn gamma_sign<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(pole(x));
    }
    if x > T::zero() {
        return Ok(T::one());
    }
    let f = x.floor();
    let odd = (f / lit(2.0)).floor() * lit(2.0) != f;
    Ok(if odd { -T::one() } else { T::one() })
}

/// `Γ(x)`.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if let Some(f) = small_factorial(x) {
        return Ok(f);
    }
    Ok(gamma_sign(x)? * ln_gamma(x)?.exp())
}

/// `1/Γ(x)`, exactly zero at the poles of Γ.
pub fn reciprocal_gamma<T: Real>(x: T) -> T {
    if is_nonpositive_integer(x) {
        return T::zero();
    }
    if let Some(f) = small_factorial(x) {
        return f.recip();
    }
    match (gamma_sign(x), ln_gamma(x)) {
        (Ok(s), Ok(l)) => s * (-l).exp(),
        _ => T::nan(),
    }
}

/// Rising factorial `(a)_n = a(a+1)⋯(a+n−1)`.
pub fn pochhammer<T: Real>(a: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, j| acc * (a + from_usize(j)))
}

/// Logarithmic derivative of Γ.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(pole(x));
    }
    if x < T::zero() {
        return Ok(digamma(T::one() - x)? - T::PI() / (T::PI() * x).tan());
    }
    let mut x = x;
    let mut acc = T::zero();
    while x < lit(15.0) {
        acc -= x.recip();
        x += T::one();
    }
    let inv2 = (x * x).recip();
    let tail = inv2
        * (lit::<T>(1.0 / 12.0)
            - inv2
                * (lit::<T>(1.0 / 120.0)
                    - inv2
                        * (lit::<T>(1.0 / 252.0)
                            - inv2 * (lit::<T>(1.0 / 240.0) - inv2 * lit::<T>(1.0 / 132.0)))));
    Ok(acc + x.ln() - (lit::<T>(2.0) * x).recip() - tail)
}

/// Jacobi polynomial `P_n^{(α,β)}(x)`.
///
/// Uses the terminating Gauss series in `(1−x)/2`, reflected through
/// `P_n^{(α,β)}(−x) = (−1)^n P_n^{(β,α)}(x)` for negative `x`. When `1+α` is a
/// non-positive integer `−s+1` with `s ≤ n`, the value is obtained from
/// the index-shift identity relating `P_n^{(−s,β)}` to `P_{n−s}^{(s,β)}`.
pub fn jacobi_p<T: Real>(n: usize, alpha: T, beta: T, x: T) -> Result<T> {
    let degenerate = || Error::Parameter {
        n,
        alpha: alpha.to_f64().unwrap_or(f64::NAN),
        beta: beta.to_f64().unwrap_or(f64::NAN),
    };
    if !(alpha.is_finite() && beta.is_finite() && x.is_finite()) {
        return Err(degenerate());
    }
    if n == 0 {
        return Ok(T::one());
    }
    let c = T::one() + alpha;
    if is_nonpositive_integer(c) {
        let s = (-alpha).round().to_usize().ok_or_else(degenerate)?;
        if s <= n {
            let shift = pochhammer(from_usize::<T>(n - s) + beta + T::one(), s)
                / pochhammer(from_usize::<T>(n - s + 1), s);
            let base = ((x - T::one()) / lit(2.0)).powi(s as i32);
            let inner = jacobi_p(n - s, from_usize(s), beta, x).map_err(|_| degenerate())?;
            let value = shift * base * inner;
            return if value.is_finite() { Ok(value) } else { Err(degenerate()) };
        }
    }
    if x < T::zero() {
        return Ok(parity::<T>(n) * jacobi_p(n, beta, alpha, -x)?);
    }
    let nf = from_usize::<T>(n);
    let lead = pochhammer(c, n) / pochhammer(T::one(), n);
    let series = hypergeometric_series(
        &[-nf, c + beta + nf],
        &[c],
        (T::one() - x) / lit(2.0),
        &TruncationPolicy::default(),
    )
    .map_err(|_| degenerate())?;
    Ok(lead * series)
}

fn parity<T: Real>(n: usize) -> T {
    if n % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Generalized hypergeometric series `Σ Π(a_i)_j / Π(b_i)_j · x^j / j!`.
///
/// Terminating series are summed exactly; otherwise the policy decides.
fn hypergeometric_series<T: Real>(
    num: &[T],
    den: &[T],
    x: T,
    policy: &TruncationPolicy<T>,
) -> Result<T> {
    let terms = num
        .iter()
        .filter(|a| is_nonpositive_integer(**a))
        .filter_map(|a| (-*a).round().to_usize())
        .min();
    let step = |j: usize| -> Result<T> {
        let jf = from_usize::<T>(j);
        let mut ratio = x / (jf + T::one());
        for &a in num {
            ratio *= a + jf;
        }
        for &b in den {
            let d = b + jf;
            if d == T::zero() {
                return Err(pole(b));
            }
            ratio /= d;
        }
        Ok(ratio)
    };
    let mut sum = T::one();
    let mut term = T::one();
    if let Some(n) = terms {
        for j in 0..n {
            term *= step(j)?;
            sum += term;
        }
        return Ok(sum);
    }
    if let Some(&b) = den.iter().find(|b| is_nonpositive_integer(**b)) {
        return Err(pole(b));
    }
    let mut quiet = 0;
    for j in 0..policy.max_terms {
        term *= step(j)?;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Divergence(format!("partial sum overflowed at x={x}")));
        }
        if policy.negligible(term, sum) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Divergence(format!(
        "no convergence within {} terms at x={x}",
        policy.max_terms
    )))
}

/// Gauss hypergeometric function `₂F₁(a, b; c; x)`.
pub fn gauss_2f1<T: Real>(a: T, b: T, c: T, x: T, policy: &TruncationPolicy<T>) -> Result<T> {
    if x == T::zero() {
        return Ok(T::one());
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return hypergeometric_series(&[a, b], &[c], x, policy);
    }
    if is_nonpositive_integer(c) {
        return Err(pole(c));
    }
    let s = c - a - b;
    if x == T::one() {
        if s > T::zero() {
            return Ok(gamma(c)? * gamma(s)? * reciprocal_gamma(c - a) * reciprocal_gamma(c - b));
        }
        return Err(Error::Divergence(format!("c−a−b={s} ≤ 0 at x=1")));
    }
    if x.abs() > T::one() {
        return Err(Error::Divergence(format!("|x|={} > 1", x.abs())));
    }
    if x >= lit(0.9) {
        if s == s.round() {
            return Err(Error::Divergence(format!("integer c−a−b={s} near x=1")));
        }
        let y = T::one() - x;
        let first = gamma(c)? * gamma(s)? * reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
        let second = gamma(c)? * gamma(-s)? * reciprocal_gamma(a) * reciprocal_gamma(b);
        let mut value = T::zero();
        if first != T::zero() {
            value += first * hypergeometric_series(&[a, b], &[T::one() - s], y, policy)?;
        }
        if second != T::zero() {
            value += second
                * y.powf(s)
                * hypergeometric_series(&[c - a, c - b], &[s + T::one()], y, policy)?;
        }
        return Ok(value);
    }
    if x <= lit(-0.9) {
        let w = x / (x - T::one());
        return Ok((T::one() - x).powf(-a) * hypergeometric_series(&[a, c - b], &[c], w, policy)?);
    }
    hypergeometric_series(&[a, b], &[c], x, policy)
}

/// Clausen hypergeometric function `₃F₂(a1, a2, a3; b1, b2; x)`.
///
/// When an upper parameter equals a lower one the pair cancels and the
/// value is delegated to [`gauss_2f1`].
pub fn hyp_3f2<T: Real>(
    a1: T,
    a2: T,
    a3: T,
    b1: T,
    b2: T,
    x: T,
    policy: &TruncationPolicy<T>,
) -> Result<T> {
    let num = [a1, a2, a3];
    let den = [b1, b2];
    if x == T::zero() {
        return Ok(T::one());
    }
    if num.iter().any(|a| is_nonpositive_integer(*a)) {
        return hypergeometric_series(&num, &den, x, policy);
    }
    for (i, &a) in num.iter().enumerate() {
        for (j, &b) in den.iter().enumerate() {
            if a == b {
                let rest: Vec<T> =
                    num.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, v)| *v).collect();
                return gauss_2f1(rest[0], rest[1], den[1 - j], x, policy);
            }
        }
    }
    if x.abs() >= T::one() {
        return Err(Error::Divergence(format!("non-terminating ₃F₂ at |x|={}", x.abs())));
    }
    hypergeometric_series(&num, &den, x, policy)
}
