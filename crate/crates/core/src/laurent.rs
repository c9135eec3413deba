//! Truncated Laurent series on annuli.
//!
//! A [`LaurentSeries`] is a Laurent polynomial `f(ζ) = Σ aₙ ζⁿ` with explicit
//! finite support. It is the coefficient function of a k-differential
//! `η = f(ζ)(dζ/ζ)^k`. Coefficients are recovered from samples on a circle by
//! the uniform trapezoid rule, which on a circle is the discrete Fourier
//! transform and is exact for Laurent polynomials the grid resolves.

use std::f64::consts::TAU;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(2πi k/n)` for `k = 0..n`.
pub(crate) fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// A Laurent polynomial with dense coefficient storage over `[n_min, n_max]`.
///
/// The zero series is stored as a single zero coefficient at exponent 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct LaurentSeries {
    n_min: i32,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    n_min: i32,
    n_max: i32,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<SeriesJson> for LaurentSeries {
    type Error = Error;

    fn try_from(raw: SeriesJson) -> Result<Self> {
        if raw.n_max < raw.n_min {
            return Err(Error::Malformed(format!(
                "n_max {} < n_min {}",
                raw.n_max, raw.n_min
            )));
        }
        let expected = (raw.n_max - raw.n_min + 1) as usize;
        if raw.coeffs.len() != expected {
            return Err(Error::Malformed(format!(
                "expected {expected} coefficients for [{}, {}], found {}",
                raw.n_min,
                raw.n_max,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Ok(LaurentSeries::from_dense(raw.n_min, coeffs))
    }
}

impl From<LaurentSeries> for SeriesJson {
    fn from(s: LaurentSeries) -> Self {
        SeriesJson {
            n_min: s.n_min,
            n_max: s.n_max(),
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl LaurentSeries {
    pub fn zero() -> Self {
        LaurentSeries {
            n_min: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        LaurentSeries {
            n_min: 0,
            coeffs: vec![c],
        }
    }

    pub fn monomial(n: i32, c: Complex64) -> Self {
        LaurentSeries {
            n_min: n,
            coeffs: vec![c],
        }
    }

    /// Dense coefficients `coeffs[i]` of `ζ^(n_min + i)`.
    ///
    /// Explicit zeros are kept: the stored range is the declared truncation.
    pub fn from_dense(n_min: i32, coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        LaurentSeries { n_min, coeffs }
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, Complex64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(lo);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (n, c) in terms {
            coeffs[(n - lo) as usize] += c;
        }
        LaurentSeries { n_min: lo, coeffs }
    }

    pub fn n_min(&self) -> i32 {
        self.n_min
    }

    pub fn n_max(&self) -> i32 {
        self.n_min + self.coeffs.len() as i32 - 1
    }

    /// Coefficient of `ζⁿ`, zero outside the stored range.
    pub fn coeff(&self, n: i32) -> Complex64 {
        let i = n - self.n_min;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn dense(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.n_min + i as i32, c))
    }

    /// Exponents carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<i32> {
        self.terms()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|(n, _)| n)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ aₙ pⁿ`, accumulated in ascending exponent order.
    pub fn eval(&self, p: Complex64) -> Result<Complex64> {
        if p.re == 0.0 && p.im == 0.0 {
            if self.n_min < 0 && self.support().iter().any(|&n| n < 0) {
                return Err(Error::PoleAtOrigin { n_min: self.n_min });
            }
            return Ok(self.coeff(0));
        }
        let mut power = p.powi(self.n_min);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc += c * power;
            power *= p;
        }
        Ok(acc)
    }

    /// Evaluation at a point known to be nonzero.
    pub(crate) fn eval_nonzero(&self, p: Complex64) -> Complex64 {
        debug_assert!(p.norm() > 0.0);
        let mut power = p.powi(self.n_min);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc += c * power;
            power *= p;
        }
        acc
    }

    /// Multiplies by `ζ^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        LaurentSeries {
            n_min: self.n_min + shift,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        LaurentSeries {
            n_min: self.n_min,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// The series `g(w) = f(t/w)` in the reciprocal coordinate `w = t/ζ`.
    pub fn substitute_reciprocal(&self, t: Complex64) -> Self {
        LaurentSeries::from_terms(self.terms().map(|(n, c)| (-n, c * t.powi(n))))
    }

    /// Drops stored coefficients with modulus `<= tol` from both ends.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep: Vec<usize> = (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i].norm() > tol)
            .collect();
        match (keep.first(), keep.last()) {
            (Some(&a), Some(&b)) => LaurentSeries {
                n_min: self.n_min + a as i32,
                coeffs: self.coeffs[a..=b].to_vec(),
            },
            _ => Self::zero(),
        }
    }

    /// Largest coefficient discrepancy against `other` over the union of ranges.
    pub fn max_coeff_diff(&self, other: &LaurentSeries) -> f64 {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        (lo..=hi)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }

    /// Sample the series on the circle `|ζ| = radius` at `n` equispaced points.
    pub fn sample(&self, radius: f64, n: usize) -> Result<CircleSamples> {
        CircleSamples::from_fn(radius, n, |p| self.eval_nonzero(p))
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;

    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        LaurentSeries::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;

    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;

    fn neg(self) -> LaurentSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Values of a function at `radius·exp(2πi j/N)`, `j = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSamples {
    radius: f64,
    values: Vec<Complex64>,
}

impl CircleSamples {
    pub fn new(radius: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sampling radius must be positive, got {radius}"
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        Ok(CircleSamples { radius, values })
    }

    pub fn from_fn<F>(radius: f64, n: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let values = roots_of_unity(n)
            .into_iter()
            .map(|u| f(u * radius))
            .collect();
        Self::new(radius, values)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, j: usize) -> Complex64 {
        let (s, c) = (TAU * j as f64 / self.values.len() as f64).sin_cos();
        Complex64::new(c, s) * self.radius
    }
}

/// Checks that `samples` points resolve exponents in `[n_min, n_max]`.
pub(crate) fn check_resolution(samples: usize, n_min: i32, n_max: i32) -> Result<()> {
    let span = (n_max - n_min + 1) as i64;
    let reach = n_min.unsigned_abs().max(n_max.unsigned_abs()) as i64;
    if n_max < n_min || (samples as i64) < span || (samples as i64) <= 2 * reach {
        return Err(Error::Aliasing {
            samples,
            n_min,
            n_max,
        });
    }
    Ok(())
}

/// Trapezoid-rule Laurent coefficients over `[n_min, n_max]`:
/// `aₙ = (1/N) Σⱼ vⱼ (r·ωʲ)^(-n)`.
pub fn coefficients_from_samples(
    cs: &CircleSamples,
    n_min: i32,
    n_max: i32,
) -> Result<LaurentSeries> {
    let n = cs.len();
    check_resolution(n, n_min, n_max)?;
    let roots = roots_of_unity(n);
    let inv_n = 1.0 / n as f64;
    let coeffs = (n_min..=n_max)
        .map(|e| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in cs.values.iter().enumerate() {
                let idx = (-(j as i64) * e as i64).rem_euclid(n as i64) as usize;
                acc += v * roots[idx];
            }
            acc * inv_n * cs.radius.powi(-e)
        })
        .collect();
    Ok(LaurentSeries::from_dense(n_min, coeffs))
}

/// The three-part split `f = f₊ + f₀ + f₋` by sign of exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Exponents `>= 1`; holomorphic inside the outer boundary, zero at 0.
    pub plus: LaurentSeries,
    #[serde(with = "crate::json::complex")]
    pub f0: Complex64,
    /// Exponents `<= -1`; holomorphic outside the inner boundary, zero at ∞.
    pub minus: LaurentSeries,
}

impl Decomposition {
    pub fn reconstruct(&self) -> LaurentSeries {
        let mid = LaurentSeries::constant(self.f0);
        &(&self.minus + &mid) + &self.plus
    }
}

pub fn decompose(s: &LaurentSeries) -> Decomposition {
    let part = |keep: &dyn Fn(i32) -> bool| {
        let terms: Vec<_> = s
            .terms()
            .filter(|&(n, c)| keep(n) && c.norm() > 0.0)
            .collect();
        LaurentSeries::from_terms(terms)
    };
    Decomposition {
        plus: part(&|n| n >= 1),
        f0: s.coeff(0),
        minus: part(&|n| n <= -1),
    }
}

/// Residue of `η = f (dζ/ζ)^k`, i.e. the `ζ⁰` coefficient of `f`.
pub fn residue_f0(s: &LaurentSeries) -> Complex64 {
    s.coeff(0)
}
