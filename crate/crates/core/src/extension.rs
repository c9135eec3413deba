//! Holomorphic extension of band-bounded families across the node.
//!
//! A family `ψ = f(z, w)·α^k` restricted to the fiber over `t` has coefficient
//! function `F_t(ζ) = f(ζ, t/ζ) = Σ a_mn ζ^(m−n) tⁿ`. Sampling `F_t` on a torus
//! `|ζ| = r_ζ`, `|t| = ρ_t` and taking a DFT in each angle isolates every
//! `a_mn`: the `ζ`-transform picks the diagonal `p = m − n`, the `t`-transform
//! picks `n`, and the factor `r_ζ^p ρ_tⁿ` is divided out.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::differentials::{NodalKDifferential, PowerSeries};
use crate::error::{Error, Result};
use crate::laurent::{
    check_resolution, coefficients_from_samples, roots_of_unity, CircleSamples, LaurentSeries,
};
use crate::nodal::{AnnulusSpec, NodalFamilySpec};

/// `z^(−pole_order) Σ a_mn z^m wⁿ` with `0 <= m <= m_deg`, `0 <= n <= n_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoVarJson", into = "TwoVarJson")]
pub struct TwoVarSeries {
    coeffs: Vec<Vec<Complex64>>,
    pole_order: u32,
}

#[derive(Serialize, Deserialize)]
struct TwoVarJson {
    m_deg: usize,
    n_deg: usize,
    #[serde(default)]
    pole_order: u32,
    #[serde(with = "crate::json::complex_grid")]
    coeffs: Vec<Vec<Complex64>>,
}

impl TryFrom<TwoVarJson> for TwoVarSeries {
    type Error = Error;

    fn try_from(raw: TwoVarJson) -> Result<Self> {
        if raw.coeffs.len() != raw.m_deg + 1
            || raw.coeffs.iter().any(|row| row.len() != raw.n_deg + 1)
        {
            return Err(Error::Malformed(format!(
                "coefficient grid must be {} x {}",
                raw.m_deg + 1,
                raw.n_deg + 1
            )));
        }
        Ok(TwoVarSeries {
            coeffs: raw.coeffs,
            pole_order: raw.pole_order,
        })
    }
}

impl From<TwoVarSeries> for TwoVarJson {
    fn from(s: TwoVarSeries) -> Self {
        TwoVarJson {
            m_deg: s.m_deg(),
            n_deg: s.n_deg(),
            pole_order: s.pole_order,
            coeffs: s.coeffs,
        }
    }
}

impl TwoVarSeries {
    pub fn zeros(m_deg: usize, n_deg: usize) -> Self {
        TwoVarSeries {
            coeffs: vec![vec![Complex64::new(0.0, 0.0); n_deg + 1]; m_deg + 1],
            pole_order: 0,
        }
    }

    /// Builds from `(m, n, a_mn)` triples; degrees are the largest indices seen.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let m_deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let n_deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut s = Self::zeros(m_deg, n_deg);
        for (m, n, a) in terms {
            s.coeffs[m][n] += a;
        }
        s
    }

    /// `coeffs[m][n]` is the coefficient of `z^m wⁿ`.
    pub fn from_grid(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        let width = coeffs.first().map(Vec::len).unwrap_or(0);
        if width == 0 || coeffs.iter().any(|row| row.len() != width) {
            return Err(Error::Malformed(
                "coefficient grid must be rectangular and nonempty".into(),
            ));
        }
        Ok(TwoVarSeries {
            coeffs,
            pole_order: 0,
        })
    }

    pub fn with_pole_order(mut self, m0: u32) -> Self {
        self.pole_order = m0;
        self
    }

    pub fn m_deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n_deg(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    pub fn coeff(&self, m: usize, n: usize) -> Complex64 {
        self.coeffs
            .get(m)
            .and_then(|row| row.get(n))
            .copied()
            .unwrap_or_default()
    }

    pub fn grid(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.norm() == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient discrepancy, padding the smaller grid with zeros.
    /// Pole orders must agree for the comparison to be meaningful.
    pub fn max_coeff_diff(&self, other: &TwoVarSeries) -> f64 {
        let md = self.m_deg().max(other.m_deg());
        let nd = self.n_deg().max(other.n_deg());
        let mut worst = 0.0f64;
        for m in 0..=md {
            for n in 0..=nd {
                worst = worst.max((self.coeff(m, n) - other.coeff(m, n)).norm());
            }
        }
        if self.pole_order != other.pole_order {
            return f64::INFINITY;
        }
        worst
    }

    /// The holomorphic part `Σ a_mn z^m wⁿ`, ignoring the pole factor.
    pub fn eval_regular(&self, z: Complex64, w: Complex64) -> Complex64 {
        // Horner in w inside Horner in z
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, row| {
                let inner = row
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |a, &c| a * w + c);
                acc * z + inner
            })
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let reg = self.eval_regular(z, w);
        if self.pole_order == 0 {
            reg
        } else {
            reg * z.powi(-(self.pole_order as i32))
        }
    }

    /// Fiber coefficient function `F_t(ζ) = f(ζ, t/ζ)`.
    pub fn fiber_value(&self, zeta: Complex64, t: Complex64) -> Complex64 {
        self.eval(zeta, t / zeta)
    }

    /// `F_t` as a Laurent series in `ζ`.
    pub fn fiber_series(&self, t: Complex64) -> LaurentSeries {
        let shift = self.pole_order as i32;
        let mut tn = vec![Complex64::new(1.0, 0.0); self.n_deg() + 1];
        for n in 1..tn.len() {
            tn[n] = tn[n - 1] * t;
        }
        LaurentSeries::from_terms((0..=self.m_deg()).flat_map(|m| {
            let tn = &tn;
            (0..=self.n_deg())
                .map(move |n| (m as i32 - n as i32 - shift, self.coeffs[m][n] * tn[n]))
        }))
    }

    /// `f(z, 0) = Σ a_m0 z^m` (pole factor excluded).
    pub fn z_axis(&self) -> PowerSeries {
        PowerSeries::new(self.coeffs.iter().map(|row| row[0]).collect())
    }

    /// `f(0, w) = Σ a_0n wⁿ` (pole factor excluded).
    pub fn w_axis(&self) -> PowerSeries {
        PowerSeries::new(self.coeffs[0].clone())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TwoVarSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|c| c * s).collect())
                .collect(),
            pole_order: self.pole_order,
        }
    }

    /// Product of two series (pole orders add).
    pub fn mul(&self, other: &TwoVarSeries) -> Self {
        let mut out = Self::zeros(self.m_deg() + other.m_deg(), self.n_deg() + other.n_deg());
        for (m1, row1) in self.coeffs.iter().enumerate() {
            for (n1, a) in row1.iter().enumerate() {
                for (m2, row2) in other.coeffs.iter().enumerate() {
                    for (n2, b) in row2.iter().enumerate() {
                        out.coeffs[m1 + m2][n1 + n2] += a * b;
                    }
                }
            }
        }
        out.pole_order = self.pole_order + other.pole_order;
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TwoVarSeries::from_terms([(0, 0, Complex64::new(1.0, 0.0))]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Samples of `F_t(ζ)` on the torus `|ζ| = r_ζ`, `|t| = ρ_t`.
///
/// `values[j][l]` is taken at `t_j = ρ_t e^(2πij/N_t)`, `ζ_l = r_ζ e^(2πil/N_ζ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySamples {
    pub k: u32,
    pub r_zeta: f64,
    pub rho_t: f64,
    pub t_count: usize,
    pub zeta_count: usize,
    #[serde(with = "crate::json::complex_grid")]
    pub values: Vec<Vec<Complex64>>,
    #[serde(default = "unit_radius")]
    pub c: f64,
    #[serde(default = "unit_radius")]
    pub c_prime: f64,
}

fn unit_radius() -> f64 {
    1.0
}

impl FamilySamples {
    /// Default radii `r_ζ = c/2`, `ρ_t = c·c'/10`.
    pub fn default_radii(family: &NodalFamilySpec) -> (f64, f64) {
        (family.c() / 2.0, family.base_radius() / 10.0)
    }

    pub fn from_fn<F>(
        k: u32,
        family: &NodalFamilySpec,
        r_zeta: f64,
        rho_t: f64,
        t_count: usize,
        zeta_count: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        let t_roots = roots_of_unity(t_count);
        let z_roots = roots_of_unity(zeta_count);
        let values = t_roots
            .iter()
            .map(|ut| {
                let t = ut * rho_t;
                z_roots.iter().map(|uz| f(uz * r_zeta, t)).collect()
            })
            .collect();
        let fs = FamilySamples {
            k,
            r_zeta,
            rho_t,
            t_count,
            zeta_count,
            values,
            c: family.c(),
            c_prime: family.c_prime(),
        };
        fs.validate()?;
        Ok(fs)
    }

    pub fn from_series(
        s: &TwoVarSeries,
        k: u32,
        family: &NodalFamilySpec,
        r_zeta: f64,
        rho_t: f64,
        t_count: usize,
        zeta_count: usize,
    ) -> Result<Self> {
        Self::from_fn(k, family, r_zeta, rho_t, t_count, zeta_count, |z, t| {
            s.fiber_value(z, t)
        })
    }

    pub fn t_value(&self, j: usize) -> Complex64 {
        roots_of_unity(self.t_count)[j] * self.rho_t
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter(
                "weight k must be at least 1".into(),
            ));
        }
        if !(self.r_zeta > 0.0 && self.rho_t > 0.0) {
            return Err(Error::InvalidParameter(
                "sampling radii must be positive".into(),
            ));
        }
        if !(self.r_zeta < self.c && self.rho_t / self.r_zeta < self.c_prime) {
            return Err(Error::InvalidParameter(format!(
                "sampling circle |zeta| = {} with |t| = {} leaves the bidisc ({}, {})",
                self.r_zeta, self.rho_t, self.c, self.c_prime
            )));
        }
        if self.values.len() != self.t_count
            || self.values.iter().any(|row| row.len() != self.zeta_count)
        {
            return Err(Error::Malformed(format!(
                "values must be {} rows of {} samples",
                self.t_count, self.zeta_count
            )));
        }
        Ok(())
    }

    /// Multiplies every sample by `ζ^m0`.
    pub fn times_zeta_power(&self, m0: u32) -> Self {
        let z_roots = roots_of_unity(self.zeta_count);
        let factors: Vec<Complex64> = z_roots
            .iter()
            .map(|u| (u * self.r_zeta).powi(m0 as i32))
            .collect();
        let values = self
            .values
            .iter()
            .map(|row| row.iter().zip(&factors).map(|(v, f)| v * f).collect())
            .collect();
        FamilySamples {
            values,
            ..self.clone()
        }
    }
}

/// Coefficients of an extension are trusted down to this scale factor.
const MIN_SCALE: f64 = 1e-14;

fn check_degrees(fs: &FamilySamples, m_deg: usize, n_deg: usize) -> Result<()> {
    fs.validate()?;
    if fs.t_count < n_deg + 1 {
        return Err(Error::Aliasing {
            samples: fs.t_count,
            n_min: 0,
            n_max: n_deg as i32,
        });
    }
    if fs.zeta_count < 2 * (m_deg + n_deg) + 1 {
        return Err(Error::Aliasing {
            samples: fs.zeta_count,
            n_min: -(n_deg as i32),
            n_max: m_deg as i32,
        });
    }
    Ok(())
}

/// Smallest scale `r_ζ^(m−n) ρ_tⁿ` over the bidegree; coefficient errors are
/// roughly `ε·max|F| / scale`.
pub fn min_scale(fs: &FamilySamples, m_deg: usize, n_deg: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for m in 0..=m_deg {
        for n in 0..=n_deg {
            worst = worst.min(fs.r_zeta.powi(m as i32 - n as i32) * fs.rho_t.powi(n as i32));
        }
    }
    worst
}

/// Recovers `a_mn`, `m <= m_deg`, `n <= n_deg`, from torus samples.
pub fn extend(fs: &FamilySamples, m_deg: usize, n_deg: usize) -> Result<TwoVarSeries> {
    check_degrees(fs, m_deg, n_deg)?;
    let (p_lo, p_hi) = (-(n_deg as i32), m_deg as i32);

    if fs.values.iter().flatten().all(|v| v.norm() == 0.0) {
        return Ok(TwoVarSeries::zeros(m_deg, n_deg));
    }
    for m in 0..=m_deg {
        for n in 0..=n_deg {
            let scale = fs.r_zeta.powi(m as i32 - n as i32) * fs.rho_t.powi(n as i32);
            if scale < MIN_SCALE {
                return Err(Error::IllConditioned { m, n, scale });
            }
        }
    }

    // ζ-transform per t circle: Laurent coefficients c_p(t_j)
    let diagonals: Vec<LaurentSeries> = fs
        .values
        .iter()
        .map(|row| {
            let cs = CircleSamples::new(fs.r_zeta, row.clone())?;
            coefficients_from_samples(&cs, p_lo, p_hi)
        })
        .collect::<Result<_>>()?;

    // t-transform per diagonal p: c_p(t) = Σ_n a_{p+n, n} tⁿ; only
    // nonnegative powers occur, so t_count > n_deg suffices.
    let roots = roots_of_unity(fs.t_count);
    let nt = fs.t_count as i64;
    let mut out = TwoVarSeries::zeros(m_deg, n_deg);
    for p in p_lo..=p_hi {
        for n in 0..=n_deg {
            let m = p + n as i32;
            if m < 0 || m as usize > m_deg {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, series) in diagonals.iter().enumerate() {
                let idx = (-(j as i64) * n as i64).rem_euclid(nt) as usize;
                acc += series.coeff(p) * roots[idx];
            }
            out.coeffs[m as usize][n] = acc / fs.t_count as f64 * fs.rho_t.powi(-(n as i32));
        }
    }
    Ok(out)
}

/// Extension of a family whose inner-band growth is `|t|^(−m0)`: recovers
/// `f` with `ψ = f z^(−m0) α^k`.
pub fn extend_with_pole(
    fs: &FamilySamples,
    m0: u32,
    m_deg: usize,
    n_deg: usize,
) -> Result<TwoVarSeries> {
    let shifted = if m0 == 0 {
        fs.clone()
    } else {
        fs.times_zeta_power(m0)
    };
    Ok(extend(&shifted, m_deg, n_deg)?.with_pole_order(m0))
}

/// Fiber samples at arbitrary base points, for the least-squares fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteredFamilySamples {
    pub r_zeta: f64,
    pub t_values: Vec<Complex64>,
    /// One circle of `ζ` samples per entry of `t_values`.
    pub values: Vec<Vec<Complex64>>,
}

/// Least-squares extension for non-uniform `t`: a `ζ`-DFT per fiber, then a
/// dense Vandermonde fit in `t` for every diagonal.
pub fn extend_least_squares(
    fs: &ScatteredFamilySamples,
    m_deg: usize,
    n_deg: usize,
) -> Result<TwoVarSeries> {
    use nalgebra::{DMatrix, DVector};

    if fs.t_values.len() != fs.values.len() || fs.t_values.len() < n_deg + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} fibers with one sample row each",
            n_deg + 1
        )));
    }
    let (p_lo, p_hi) = (-(n_deg as i32), m_deg as i32);
    let diagonals: Vec<LaurentSeries> = fs
        .values
        .iter()
        .map(|row| {
            let cs = CircleSamples::new(fs.r_zeta, row.clone())?;
            check_resolution(cs.len(), p_lo, p_hi)?;
            if cs.len() < 2 * (m_deg + n_deg) + 1 {
                return Err(Error::Aliasing {
                    samples: cs.len(),
                    n_min: p_lo,
                    n_max: p_hi,
                });
            }
            coefficients_from_samples(&cs, p_lo, p_hi)
        })
        .collect::<Result<_>>()?;

    // Columns scaled by ρ^n so the Vandermonde stays well balanced.
    let rho = fs
        .t_values
        .iter()
        .map(|t| t.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let rows = fs.t_values.len();
    let vander = DMatrix::from_fn(rows, n_deg + 1, |i, n| {
        (fs.t_values[i] / rho).powi(n as i32)
    });
    let svd = vander.svd(true, true);

    let mut out = TwoVarSeries::zeros(m_deg, n_deg);
    for p in p_lo..=p_hi {
        let rhs = DVector::from_fn(rows, |i, _| diagonals[i].coeff(p));
        let sol = svd
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for n in 0..=n_deg {
            let m = p + n as i32;
            if m >= 0 && (m as usize) <= m_deg {
                out.coeffs[m as usize][n] = sol[n] / rho.powi(n as i32);
            }
        }
    }
    Ok(out)
}

/// Max relative-to-scale reproduction error of `s` against the samples.
pub fn reconstruction_error(s: &TwoVarSeries, fs: &FamilySamples) -> f64 {
    let z_roots = roots_of_unity(fs.zeta_count);
    let mut worst = 0.0f64;
    for (j, row) in fs.values.iter().enumerate() {
        let t = fs.t_value(j);
        for (l, v) in row.iter().enumerate() {
            let zeta = z_roots[l] * fs.r_zeta;
            worst = worst.max((s.fiber_value(zeta, t) - v).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Z,
    W,
}

/// Coefficient function of `ψ` on a branch of the nodal fiber:
/// `f(z, 0)` against `(dz/z)^k`, or `(−1)^k f(0, w)` against `(dw/w)^k`.
pub fn nodal_restriction(s: &TwoVarSeries, branch: Branch, k: u32) -> Result<PowerSeries> {
    if s.pole_order > 0 {
        return Err(Error::PolarBranch {
            pole_order: s.pole_order,
        });
    }
    Ok(match branch {
        Branch::Z => s.z_axis(),
        Branch::W => {
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            s.w_axis().scale(Complex64::new(sign, 0.0))
        }
    })
}

/// Both branch restrictions as a nodal k-differential.
pub fn nodal_differential(s: &TwoVarSeries, k: u32) -> Result<NodalKDifferential> {
    Ok(NodalKDifferential {
        k,
        fz: nodal_restriction(s, Branch::Z, k)?,
        gw: nodal_restriction(s, Branch::W, k)?,
    })
}

/// Sup errors of the fiber functions against the nodal limit on compacta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFamilyReport {
    pub t_abs: Vec<f64>,
    /// `z_side[i][j]`: sup over compactum `j` of `|F_{t_i}(ζ) − f(ζ, 0)|`.
    pub z_side: Vec<Vec<f64>>,
    /// `w_side[i][j]`: sup over compactum `j` of `|f(t_i/w, w) − f(0, w)|`.
    pub w_side: Vec<Vec<f64>>,
    /// Each sup at most twice the previous one.
    pub monotone_within_factor_two: bool,
    /// Least-squares slope of `log sup` against `log|t|`, per side, when
    /// every sup is positive.
    pub z_order: Option<f64>,
    pub w_order: Option<f64>,
    pub converging: bool,
}

const COMPACTUM_CIRCLES: usize = 16;
const COMPACTUM_POINTS: usize = 256;

fn ring_sup<G: Fn(Complex64) -> Complex64>(g: G, a: &AnnulusSpec) -> f64 {
    crate::differentials::ring_radii(a.r_inner(), a.r_outer(), COMPACTUM_CIRCLES)
        .into_iter()
        .map(|r| crate::differentials::circle_sup(&g, r, COMPACTUM_POINTS))
        .fold(0.0, f64::max)
}

/// Slope of the least-squares line through `(log x, log y)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Uniform convergence on compacta of the fiber functions of `truth` to its
/// nodal restrictions as `t → 0`. Compacta are radii in `ζ` on the
/// `z`-side and in `w` on the `w`-side.
pub fn verify_normal_families(
    truth: &TwoVarSeries,
    t_sequence: &[Complex64],
    compacta: &[AnnulusSpec],
) -> Result<NormalFamilyReport> {
    if compacta.iter().any(|a| a.r_inner() <= 0.0) {
        return Err(Error::InvalidParameter(
            "compacta must avoid the origin".into(),
        ));
    }
    if truth.pole_order() > 0 {
        return Err(Error::PolarBranch {
            pole_order: truth.pole_order(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut z_side = Vec::with_capacity(t_sequence.len());
    let mut w_side = Vec::with_capacity(t_sequence.len());
    for &t in t_sequence {
        z_side.push(
            compacta
                .iter()
                .map(|a| {
                    ring_sup(
                        |zeta| truth.eval(zeta, t / zeta) - truth.eval(zeta, zero),
                        a,
                    )
                })
                .collect::<Vec<_>>(),
        );
        w_side.push(
            compacta
                .iter()
                .map(|a| ring_sup(|w| truth.eval(t / w, w) - truth.eval(zero, w), a))
                .collect::<Vec<_>>(),
        );
    }
    let t_abs: Vec<f64> = t_sequence.iter().map(|t| t.norm()).collect();

    let worst = |side: &[Vec<f64>]| {
        side.iter()
            .map(|r| r.iter().copied().fold(0.0, f64::max))
            .collect::<Vec<_>>()
    };
    let zs = worst(&z_side);
    let ws = worst(&w_side);
    let monotone = |v: &[f64]| v.windows(2).all(|p| p[1] <= 2.0 * p[0]);
    let monotone_within_factor_two = monotone(&zs) && monotone(&ws);
    let converging = match (zs.first(), zs.last(), ws.first(), ws.last()) {
        (Some(z0), Some(z1), Some(w0), Some(w1)) => {
            (*z1 == 0.0 || z1 < z0) && (*w1 == 0.0 || w1 < w0)
        }
        _ => true,
    };
    Ok(NormalFamilyReport {
        z_order: loglog_slope(&t_abs, &zs),
        w_order: loglog_slope(&t_abs, &ws),
        t_abs,
        z_side,
        w_side,
        monotone_within_factor_two,
        converging,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    fn samples_of(s: &TwoVarSeries, t_count: usize, zeta_count: usize) -> FamilySamples {
        FamilySamples::from_series(
            s,
            1,
            &NodalFamilySpec::unit(),
            0.5,
            0.1,
            t_count,
            zeta_count,
        )
        .unwrap()
    }

    #[test]
    fn z_plus_w() {
        let truth = TwoVarSeries::from_terms([(1, 0, one()), (0, 1, one())]);
        let got = extend(&samples_of(&truth, 4, 16), 2, 2).unwrap();
        assert!(got.max_coeff_diff(&truth) < 1e-13);
    }

    #[test]
    fn constant_one() {
        let truth = TwoVarSeries::from_terms([(0, 0, one())]);
        // smallest scale is 0.5³·0.2³ = 1e-3, so errors ~1e-13 are expected
        let got = extend(&samples_of(&truth, 4, 16), 3, 3).unwrap();
        assert!(got.max_coeff_diff(&truth) < 1e-12);
    }

    #[test]
    fn all_zero_samples() {
        let fs = samples_of(&TwoVarSeries::zeros(1, 1), 4, 16);
        let got = extend(&fs, 2, 2).unwrap();
        assert!(got.is_zero());
        assert_eq!(got.pole_order(), 0);
    }

    #[test]
    fn aliasing_and_domain_errors() {
        let truth = TwoVarSeries::from_terms([(0, 0, one())]);
        let fs = samples_of(&truth, 4, 16);
        assert!(matches!(extend(&fs, 4, 4), Err(Error::Aliasing { .. })));
        assert!(matches!(extend(&fs, 8, 0), Err(Error::Aliasing { .. })));
        assert!(
            FamilySamples::from_series(&truth, 1, &NodalFamilySpec::unit(), 1.2, 0.1, 4, 16)
                .is_err()
        );
        assert!(
            FamilySamples::from_series(&truth, 1, &NodalFamilySpec::unit(), 0.1, 0.2, 4, 16)
                .is_err()
        );
    }

    #[test]
    fn ill_conditioning_reported() {
        let truth = TwoVarSeries::from_terms([(0, 0, one())]);
        let fs = FamilySamples::from_series(&truth, 1, &NodalFamilySpec::unit(), 0.5, 1e-4, 8, 32)
            .unwrap();
        assert!(matches!(
            extend(&fs, 4, 4),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn pole_examples() {
        let fam = NodalFamilySpec::unit();
        // F = 1/ζ, independent of t
        let fs = FamilySamples::from_fn(1, &fam, 0.5, 0.1, 4, 16, |z, _| z.inv()).unwrap();
        let got = extend_with_pole(&fs, 1, 2, 2).unwrap();
        assert_eq!(got.pole_order(), 1);
        assert!(
            got.max_coeff_diff(&TwoVarSeries::from_terms([(0, 0, one())]).with_pole_order(1))
                < 1e-14
        );

        // F = t/ζ² = z^(-2)·(zw) = z^(-1)·w
        let fs = FamilySamples::from_fn(1, &fam, 0.5, 0.1, 4, 16, |z, t| t / (z * z)).unwrap();
        let two = extend_with_pole(&fs, 2, 2, 2).unwrap();
        assert!(
            two.max_coeff_diff(&TwoVarSeries::from_terms([(1, 1, one())]).with_pole_order(2))
                < 1e-13
        );
        let one_pole = extend_with_pole(&fs, 1, 2, 2).unwrap();
        assert!(
            one_pole.max_coeff_diff(&TwoVarSeries::from_terms([(0, 1, one())]).with_pole_order(1))
                < 1e-13
        );
        assert!(reconstruction_error(&two, &fs) < 1e-13);

        let truth = TwoVarSeries::from_terms([(1, 0, one()), (0, 2, c(0.5, 0.5))]);
        let fs = samples_of(&truth, 4, 16);
        assert_eq!(
            extend_with_pole(&fs, 0, 2, 2).unwrap(),
            extend(&fs, 2, 2).unwrap()
        );
    }

    #[test]
    fn restriction_examples() {
        let zw = TwoVarSeries::from_terms([(1, 0, one()), (0, 1, one())]);
        let z = nodal_restriction(&zw, Branch::Z, 1).unwrap();
        let w = nodal_restriction(&zw, Branch::W, 1).unwrap();
        assert_eq!(z.0, vec![c(0.0, 0.0), one()]);
        assert_eq!(w.0, vec![c(-0.0, -0.0), c(-1.0, -0.0)]);

        let unit = TwoVarSeries::from_terms([(0, 0, one())]);
        let n1 = nodal_differential(&unit, 1).unwrap();
        assert_eq!((n1.fz.coeff(0), n1.gw.coeff(0)), (one(), c(-1.0, -0.0)));
        assert!(crate::differentials::nodal_residue_check(&n1));
        let n2 = nodal_differential(&unit, 2).unwrap();
        assert_eq!((n2.fz.coeff(0), n2.gw.coeff(0)), (one(), one()));

        let polar = unit.with_pole_order(1);
        assert!(matches!(
            nodal_restriction(&polar, Branch::Z, 1),
            Err(Error::PolarBranch { pole_order: 1 })
        ));
    }

    #[test]
    fn fiber_series_matches_evaluation() {
        let s =
            TwoVarSeries::from_terms([(2, 1, c(0.3, -0.2)), (0, 3, one()), (1, 0, c(0.0, 2.0))])
                .with_pole_order(1);
        let t = c(0.02, 0.01);
        let series = s.fiber_series(t);
        let zeta = c(0.3, 0.4);
        assert!((series.eval(zeta).unwrap() - s.fiber_value(zeta, t)).norm() < 1e-14);
    }

    #[test]
    fn normal_family_examples() {
        let compacta = [AnnulusSpec::new(0.4, 0.9).unwrap()];
        let ts: Vec<Complex64> = (1..=4).map(|i| c(10f64.powi(-i), 0.0)).collect();

        let z = TwoVarSeries::from_terms([(1, 0, one())]);
        let rep = verify_normal_families(&z, &ts, &compacta).unwrap();
        assert!(rep.z_side.iter().flatten().all(|&e| e == 0.0));
        assert!(rep.converging && rep.monotone_within_factor_two);

        let zw = TwoVarSeries::from_terms([(1, 0, one()), (0, 1, one())]);
        let rep = verify_normal_families(&zw, &ts, &compacta).unwrap();
        for (i, t) in rep.t_abs.iter().enumerate() {
            assert!((rep.z_side[i][0] - t / 0.4).abs() < 1e-12);
            assert!((rep.w_side[i][0] - t / 0.4).abs() < 1e-12);
        }
        assert!((rep.z_order.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn json_schema() {
        let s = TwoVarSeries::from_terms([(1, 0, one()), (0, 1, one())]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"m_deg":1,"n_deg":1,"pole_order":0,"coeffs":[[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]}"#
        );
        let bad = r#"{"m_deg":2,"n_deg":1,"coeffs":[[[0.0,0.0],[1.0,0.0]]]}"#;
        assert!(serde_json::from_str::<TwoVarSeries>(bad).is_err());

        let fs = samples_of(&s, 2, 5);
        let back: FamilySamples =
            serde_json::from_str(&serde_json::to_string(&fs).unwrap()).unwrap();
        assert_eq!(back, fs);
    }
}
