//! Complete hyperbolic metric on fibers of the unit family `zw = t`.
//!
//! The density is `λ(ζ) = Θ csc Θ / (|ζ|·|log|ζ||)` with
//! `Θ = π log|ζ| / log|t|`, so the metric is `λ²|dζ|²`. Families with
//! `c, c' ≠ 1` are rescaled by `ζ ↦ ζ/c` before evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::differentials::{circle_sup, ring_radii, AnnulusKDifferential};
use crate::error::{Error, Result};

/// Collar `|t|/ρ <= |ζ| <= ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarSpec {
    #[serde(serialize_with = "ser_complex")]
    t: Complex64,
    rho: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&[z.re, z.im], s)
}

impl CollarSpec {
    pub fn new(t: Complex64, rho: f64) -> Result<Self> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "collar rho must lie in (0, 1), got {rho}"
            )));
        }
        let ta = t.norm();
        if ta == 0.0 || ta > rho * rho {
            return Err(Error::InvalidParameter(format!(
                "collar |t|/rho <= |zeta| <= rho is empty for |t| = {ta}, rho = {rho}"
            )));
        }
        Ok(CollarSpec { t, rho })
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.t.norm() / self.rho, self.rho)
    }
}

fn check_t(t: Complex64) -> Result<f64> {
    let ta = t.norm();
    if !(0.0 < ta && ta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < |t| < 1, got {ta}"
        )));
    }
    Ok(ta)
}

/// `Θ = π log|z| / log|t|`, in `(0, π)` on the fiber.
pub fn theta(z_mag: f64, t: Complex64) -> Result<f64> {
    let ta = check_t(t)?;
    if !(ta < z_mag && z_mag < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "|z| = {z_mag} is outside the fiber ({ta}, 1)"
        )));
    }
    Ok(PI * z_mag.ln() / ta.ln())
}

/// `Θ / sin Θ`, continuous at 0.
pub fn theta_csc_theta(th: f64) -> f64 {
    if th.abs() < 1e-8 {
        1.0 + th * th / 6.0
    } else {
        th / th.sin()
    }
}

/// Hyperbolic density `λ(ζ)`.
pub fn hyperbolic_density(zeta: Complex64, t: Complex64) -> Result<f64> {
    let ta = check_t(t)?;
    let r = zeta.norm();
    if !(ta < r && r < 1.0) {
        return Err(Error::SingularDensity {
            radius: r,
            t_abs: ta,
        });
    }
    let th = PI * r.ln() / ta.ln();
    Ok(theta_csc_theta(th) / (r * r.ln().abs()))
}

/// Density of the punctured-disc metric, the `t → 0` limit.
pub fn punctured_disc_density(zeta: Complex64) -> f64 {
    let r = zeta.norm();
    1.0 / (r * r.ln().abs())
}

/// Taylor coefficients of `(Θ csc Θ)² = Σ cⱼ Θ^(2j)`, `j < terms`.
///
/// `Θ / sin Θ` is the reciprocal of `Σ (−1)ʲ u^j / (2j+1)!` in `u = Θ²`;
/// squaring that series gives the metric factor.
pub fn factor_coefficients(terms: usize) -> Vec<f64> {
    if terms == 0 {
        return Vec::new();
    }
    let mut sinc = Vec::with_capacity(terms);
    let mut fact = 1.0;
    for j in 0..terms {
        if j > 0 {
            fact *= (2 * j) as f64 * (2 * j + 1) as f64;
        }
        sinc.push(if j % 2 == 0 { 1.0 } else { -1.0 } / fact);
    }
    let mut inv = vec![0.0; terms];
    inv[0] = 1.0;
    for n in 1..terms {
        let s: f64 = (1..=n).map(|j| sinc[j] * inv[n - j]).sum();
        inv[n] = -s;
    }
    (0..terms)
        .map(|n| (0..=n).map(|j| inv[j] * inv[n - j]).sum())
        .collect()
}

/// Partial sum `1 + Θ²/3 + Θ⁴/15 + …` with `terms` terms.
pub fn factor_series(th: f64, terms: usize) -> f64 {
    let u = th * th;
    factor_coefficients(terms)
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * u + c)
}

/// `|dζ/ζ|` per unit hyperbolic length at radius `r`:
/// `(1/r)/λ = |log r| / (Θ csc Θ)`.
pub fn log_to_hyperbolic_ratio(r: f64, t: Complex64) -> Result<f64> {
    let lambda = hyperbolic_density(Complex64::new(r, 0.0), t)?;
    Ok(1.0 / (r * lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBounds {
    pub lo: f64,
    pub hi: f64,
}

/// Range of [`log_to_hyperbolic_ratio`] over `grid` radii spanning the collar.
/// The metric is rotation invariant, so only radii are sampled.
pub fn collar_ratio_bounds(collar: &CollarSpec, grid: usize) -> Result<RatioBounds> {
    let (lo_r, hi_r) = collar.radii();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for r in ring_radii(lo_r, hi_r, grid.max(1)) {
        let q = log_to_hyperbolic_ratio(r, collar.t)?;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    // the ratio peaks at |ζ| = |t|^(1/2), Θ = π/2, which lies in every collar
    let mid = collar.t.norm().sqrt();
    if lo_r < mid && mid < hi_r {
        hi = hi.max(log_to_hyperbolic_ratio(mid, collar.t)?);
    }
    Ok(RatioBounds { lo, hi })
}

/// Rows `(r, Θ, λ, ratio)` over the collar, for plotting.
pub fn density_table(collar: &CollarSpec, grid: usize) -> Result<Vec<[f64; 4]>> {
    let (lo_r, hi_r) = collar.radii();
    ring_radii(lo_r, hi_r, grid.max(1))
        .into_iter()
        .map(|r| {
            let th = theta(r, collar.t)?;
            let lambda = hyperbolic_density(Complex64::new(r, 0.0), collar.t)?;
            Ok([r, th, lambda, 1.0 / (r * lambda)])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarComparison {
    /// Sup over the collar of `|f|·ratio^k`, the magnitude of `η` against
    /// the k-th power of the hyperbolic length element.
    pub collar_sup: f64,
    /// Sup of `|f|` over the collar.
    pub f_sup: f64,
    pub bounds: RatioBounds,
    /// `lo^k · f_sup`.
    pub lower: f64,
    /// `hi^k · f_sup`.
    pub upper: f64,
}

impl CollarComparison {
    pub fn consistent(&self, rel_tol: f64) -> bool {
        self.lower * (1.0 - rel_tol) <= self.collar_sup
            && self.collar_sup <= self.upper * (1.0 + rel_tol)
    }
}

const COLLAR_POINTS: usize = 256;

/// Compares `η(dh_t)^(−k)` against `η(dζ/ζ)^(−k) = f` on a collar.
pub fn collar_band_equivalence(
    d: &AnnulusKDifferential,
    collar: &CollarSpec,
    grid: usize,
) -> Result<CollarComparison> {
    let (lo_r, hi_r) = collar.radii();
    if !(lo_r >= d.annulus().r_inner() && hi_r <= d.annulus().r_outer()) {
        return Err(Error::BandOutsideAnnulus {
            lo: lo_r,
            hi: hi_r,
            r_inner: d.annulus().r_inner(),
            r_outer: d.annulus().r_outer(),
        });
    }
    let k = d.k() as i32;
    let bounds = collar_ratio_bounds(collar, grid)?;
    let mut radii = ring_radii(lo_r, hi_r, grid.max(1));
    let mid = collar.t.norm().sqrt();
    if lo_r < mid && mid < hi_r {
        radii.push(mid);
    }
    let mut collar_sup = 0.0f64;
    let mut f_sup = 0.0f64;
    for r in radii {
        let fs = circle_sup(|z| d.f().eval_nonzero(z), r, COLLAR_POINTS);
        let q = log_to_hyperbolic_ratio(r, collar.t)?;
        f_sup = f_sup.max(fs);
        collar_sup = collar_sup.max(fs * q.powi(k));
    }
    Ok(CollarComparison {
        collar_sup,
        f_sup,
        bounds,
        lower: bounds.lo.powi(k) * f_sup,
        upper: bounds.hi.powi(k) * f_sup,
    })
}
