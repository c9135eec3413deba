//! k-differentials on fiber annuli and on the nodal fiber.
//!
//! On an annulus a k-differential is `η = f(ζ)(dζ/ζ)^k`; the coordinate-free
//! quantity `η(dζ/ζ)^(-k)` is `f` itself, so band bounds are sup bounds of
//! `|f|` on two thin rings near the boundary.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{roots_of_unity, LaurentSeries};
use crate::nodal::{AnnulusSpec, NodalFamilySpec};

/// Power series `Σ cₙ xⁿ`, `n >= 0`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSeries(#[serde(with = "crate::json::complex_vec")] pub Vec<Complex64>);

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        PowerSeries(coeffs)
    }

    pub fn constant(c: Complex64) -> Self {
        PowerSeries(vec![c])
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.0.get(n).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PowerSeries(self.0.iter().map(|c| c * s).collect())
    }

    /// Index of the first coefficient with modulus above `tol`, `None` when
    /// every coefficient is below it.
    pub fn order(&self, tol: f64) -> Option<usize> {
        self.0.iter().position(|c| c.norm() > tol)
    }

    pub fn max_coeff_diff(&self, other: &PowerSeries) -> f64 {
        let n = self.0.len().max(other.0.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_laurent(&self) -> LaurentSeries {
        LaurentSeries::from_dense(0, self.0.clone())
    }
}

/// `η = f(ζ)(dζ/ζ)^k` on a geometric annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KDiffJson", into = "KDiffJson")]
pub struct AnnulusKDifferential {
    k: u32,
    f: LaurentSeries,
    annulus: AnnulusSpec,
}

#[derive(Serialize, Deserialize)]
struct KDiffJson {
    k: u32,
    f: LaurentSeries,
    annulus: AnnulusSpec,
}

impl TryFrom<KDiffJson> for AnnulusKDifferential {
    type Error = Error;

    fn try_from(raw: KDiffJson) -> Result<Self> {
        AnnulusKDifferential::new(raw.k, raw.f, raw.annulus)
    }
}

impl From<AnnulusKDifferential> for KDiffJson {
    fn from(d: AnnulusKDifferential) -> Self {
        KDiffJson {
            k: d.k,
            f: d.f,
            annulus: d.annulus,
        }
    }
}

impl AnnulusKDifferential {
    pub fn new(k: u32, f: LaurentSeries, annulus: AnnulusSpec) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "weight k must be at least 1".into(),
            ));
        }
        Ok(AnnulusKDifferential { k, f, annulus })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn f(&self) -> &LaurentSeries {
        &self.f
    }

    pub fn annulus(&self) -> &AnnulusSpec {
        &self.annulus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Inner,
    Outer,
}

/// Band radii and sup bound for the fiber over `t`.
///
/// Outer band: `ρ₁c <= |ζ| <= ρ₂c`. Inner band: `|t|/(c'ρ₂) <= |ζ| <= |t|/(c'ρ₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    rho1: f64,
    rho2: f64,
    bound: f64,
    family: NodalFamilySpec,
    t: Complex64,
}

impl BandSpec {
    pub fn new(
        rho1: f64,
        rho2: f64,
        bound: f64,
        family: NodalFamilySpec,
        t: Complex64,
    ) -> Result<Self> {
        if !(0.0 < rho1 && rho1 < rho2 && rho2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "band radii need 0 < rho1 < rho2 < 1, got {rho1}, {rho2}"
            )));
        }
        if !(bound > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bound must be positive, got {bound}"
            )));
        }
        if t.norm() == 0.0 {
            return Err(Error::InvalidParameter("bands need t != 0".into()));
        }
        let spec = BandSpec {
            rho1,
            rho2,
            bound,
            family,
            t,
        };
        let (_, inner_hi) = spec.radii(Band::Inner);
        let (outer_lo, _) = spec.radii(Band::Outer);
        if inner_hi >= outer_lo {
            return Err(Error::InvalidParameter(format!(
                "bands overlap: inner band reaches {inner_hi}, outer band starts at {outer_lo}"
            )));
        }
        Ok(spec)
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn family(&self) -> &NodalFamilySpec {
        &self.family
    }

    pub fn with_bound(&self, bound: f64) -> Result<Self> {
        BandSpec::new(self.rho1, self.rho2, bound, self.family, self.t)
    }

    /// `(lo, hi)` radii of a band.
    pub fn radii(&self, band: Band) -> (f64, f64) {
        let c = self.family.c();
        let cp = self.family.c_prime();
        let t = self.t.norm();
        match band {
            Band::Outer => (self.rho1 * c, self.rho2 * c),
            Band::Inner => (t / (cp * self.rho2), t / (cp * self.rho1)),
        }
    }

    /// The ring strictly between the bands, as closed radii.
    pub fn interior_radii(&self) -> (f64, f64) {
        (self.radii(Band::Inner).1, self.radii(Band::Outer).0)
    }
}

/// Circle grid used to estimate sups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandGrid {
    pub circles: usize,
    pub points: usize,
    pub interior_circles: usize,
}

impl Default for BandGrid {
    fn default() -> Self {
        BandGrid {
            circles: 8,
            points: 512,
            interior_circles: 32,
        }
    }
}

/// Geometrically spaced radii from `lo` to `hi`, both included.
pub(crate) fn ring_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || lo == hi {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

const GOLDEN_STEPS: usize = 64;
const MAX_REFINED_PEAKS: usize = 16;

/// Max of `|g|` on `|ζ| = r`: grid max, with each grid peak polished by a
/// golden-section search in the neighbouring cells.
pub(crate) fn circle_sup<G>(g: G, r: f64, points: usize) -> f64
where
    G: Fn(Complex64) -> Complex64,
{
    let roots = roots_of_unity(points);
    let vals: Vec<f64> = roots.iter().map(|u| g(u * r).norm()).collect();
    let mut best = vals.iter().copied().fold(0.0, f64::max);

    let n = points;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let prev = vals[(j + n - 1) % n];
            let next = vals[(j + 1) % n];
            vals[j] > prev && vals[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(MAX_REFINED_PEAKS);

    let h = TAU / n as f64;
    let on_circle = |theta: f64| g(Complex64::from_polar(r, theta)).norm();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for j in peaks {
        let centre = TAU * j as f64 / n as f64;
        let (mut a, mut b) = (centre - h, centre + h);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (on_circle(x1), on_circle(x2));
        for _ in 0..GOLDEN_STEPS {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = on_circle(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = on_circle(x1);
            }
        }
        best = best.max(f1).max(f2);
    }
    best
}

fn check_band_inside(d: &AnnulusKDifferential, lo: f64, hi: f64) -> Result<()> {
    if !d.annulus.contains_ring(lo, hi) {
        return Err(Error::BandOutsideAnnulus {
            lo,
            hi,
            r_inner: d.annulus.r_inner(),
            r_outer: d.annulus.r_outer(),
        });
    }
    Ok(())
}

/// Sup of `|η(dζ/ζ)^(-k)| = |f|` over one band.
pub fn band_sup(
    d: &AnnulusKDifferential,
    b: &BandSpec,
    which: Band,
    grid: &BandGrid,
) -> Result<f64> {
    let (lo, hi) = b.radii(which);
    check_band_inside(d, lo, hi)?;
    Ok(ring_radii(lo, hi, grid.circles)
        .into_iter()
        .map(|r| circle_sup(|z| d.f.eval_nonzero(z), r, grid.points))
        .fold(0.0, f64::max))
}

/// `true` iff both band sups are at most the bound.
pub fn is_band_bounded(d: &AnnulusKDifferential, b: &BandSpec, grid: &BandGrid) -> Result<bool> {
    let inner = band_sup(d, b, Band::Inner, grid)?;
    let outer = band_sup(d, b, Band::Outer, grid)?;
    Ok(inner <= b.bound && outer <= b.bound)
}

/// Sampled sup between the bands next to the larger band sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteriorCheck {
    pub interior_sup: f64,
    pub band_max: f64,
}

impl InteriorCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.interior_sup <= self.band_max + tol
    }
}

pub fn interior_sup_check(
    d: &AnnulusKDifferential,
    b: &BandSpec,
    grid: &BandGrid,
) -> Result<InteriorCheck> {
    let band_max = band_sup(d, b, Band::Inner, grid)?.max(band_sup(d, b, Band::Outer, grid)?);
    let (lo, hi) = b.interior_radii();
    let roots = roots_of_unity(grid.points);
    let interior_sup = ring_radii(lo, hi, grid.interior_circles)
        .into_iter()
        .flat_map(|r| roots.iter().map(move |u| u * r))
        .map(|z| d.f.eval_nonzero(z).norm())
        .fold(0.0, f64::max);
    Ok(InteriorCheck {
        interior_sup,
        band_max,
    })
}

/// A regular k-differential on the nodal fiber: `fz(z)(dz/z)^k` on the
/// `z`-branch and `gw(w)(dw/w)^k` on the `w`-branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalKDifferential {
    pub k: u32,
    pub fz: PowerSeries,
    pub gw: PowerSeries,
}

pub const RESIDUE_TOL: f64 = 1e-12;

impl NodalKDifferential {
    /// `fz(0) − (−1)^k gw(0)`.
    pub fn residue_defect(&self) -> Complex64 {
        let sign = if self.k.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.fz.coeff(0) - self.gw.coeff(0) * sign
    }
}

/// Residue matching `res η_z = (−1)^k res η_w`.
pub fn nodal_residue_check(n: &NodalKDifferential) -> bool {
    n.residue_defect().norm() <= RESIDUE_TOL
}
