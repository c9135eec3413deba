//! Seeded generators for randomized checks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::extension::TwoVarSeries;
use crate::laurent::LaurentSeries;
use crate::nodal::ChartPoint;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the disc `|z| < radius`.
pub fn in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

/// Log-uniform modulus in `[lo, hi]`, uniform argument.
pub fn in_ring<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    let r = (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

/// Laurent polynomial on `[n_min, n_max]` with coefficients in the disc.
pub fn laurent<R: Rng>(rng: &mut R, n_min: i32, n_max: i32, radius: f64) -> LaurentSeries {
    let coeffs = (n_min..=n_max).map(|_| in_disc(rng, radius)).collect();
    LaurentSeries::from_dense(n_min, coeffs)
}

pub fn two_var<R: Rng>(rng: &mut R, m_deg: usize, n_deg: usize, radius: f64) -> TwoVarSeries {
    let grid = (0..=m_deg)
        .map(|_| (0..=n_deg).map(|_| in_disc(rng, radius)).collect())
        .collect();
    TwoVarSeries::from_grid(grid).expect("rectangular grid")
}

/// A point `(ζ, t/ζ)` on a fiber of the unit family with
/// `t_min <= |t| <= t_max` and `ζ` in the fiber annulus.
pub fn fiber_point<R: Rng>(rng: &mut R, t_min: f64, t_max: f64) -> (ChartPoint, Complex64) {
    let t = in_ring(rng, t_min, t_max);
    let zeta = in_ring(rng, t.norm() * 1.01, 0.99);
    (ChartPoint::zw(zeta, t / zeta), t)
}

/// Point of the bidisc with `floor <= |z|, |w| <= 1`.
pub fn bidisc_point<R: Rng>(rng: &mut R, floor: f64) -> ChartPoint {
    ChartPoint::zw(in_ring(rng, floor, 1.0), in_ring(rng, floor, 1.0))
}
