//! Zero counting by the argument principle on fibers and nodal branches.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{Branch, TwoVarSeries};
use crate::laurent::roots_of_unity;

pub const DEFAULT_WINDING_SAMPLES: usize = 4096;
pub const MAX_WINDING_SAMPLES: usize = 1 << 20;
/// Minimum `|g|` accepted on a counting contour.
pub const CONTOUR_FLOOR: f64 = 1e-9;
/// Branch coefficients at or below this (relative to the largest) count as zero.
pub const ORDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingReport {
    pub radius: f64,
    pub winding: i64,
    /// Accumulated argument increment, before dividing by 2π and rounding.
    pub raw_phase_sum: f64,
    pub samples: usize,
}

impl WindingReport {
    pub fn integrality_defect(&self) -> f64 {
        (self.raw_phase_sum / TAU - self.winding as f64).abs()
    }
}

/// Winding number of `g` around 0 along `|ζ| = radius`.
///
/// Phase is unwrapped from consecutive sample ratios; the grid doubles
/// while any step exceeds π/2.
pub fn winding_count<G>(g: G, radius: f64, samples: usize) -> Result<WindingReport>
where
    G: Fn(Complex64) -> Complex64,
{
    if !(radius > 0.0) || samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "winding needs radius > 0 and at least 3 samples, got {radius}, {samples}"
        )));
    }
    let mut n = samples;
    loop {
        let vals: Vec<Complex64> = roots_of_unity(n)
            .into_iter()
            .map(|u| g(u * radius))
            .collect();
        if let Some((j, v)) = vals
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() > CONTOUR_FLOOR))
        {
            return Err(Error::ContourThroughZero {
                radius,
                angle: TAU * j as f64 / n as f64,
                modulus: v.norm(),
            });
        }
        let mut total = 0.0;
        let mut max_step = 0.0f64;
        for j in 0..n {
            let step = (vals[(j + 1) % n] / vals[j]).arg();
            max_step = max_step.max(step.abs());
            total += step;
        }
        if max_step <= std::f64::consts::FRAC_PI_2 {
            return Ok(WindingReport {
                radius,
                winding: (total / TAU).round() as i64,
                raw_phase_sum: total,
                samples: n,
            });
        }
        if n >= MAX_WINDING_SAMPLES {
            return Err(Error::PhaseUnresolved { samples: n });
        }
        n = (2 * n).min(MAX_WINDING_SAMPLES);
    }
}

/// Zeros minus poles of `ζ ↦ f(ζ, t/ζ)` in `r_in < |ζ| < r_out`.
pub fn fiber_zero_count(f: &TwoVarSeries, t: Complex64, r_in: f64, r_out: f64) -> Result<i64> {
    Ok(fiber_windings(f, t, r_in, r_out)?.count())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberCount {
    #[serde(serialize_with = "ser_complex")]
    pub t: Complex64,
    pub inner: WindingReport,
    pub outer: WindingReport,
}

impl FiberCount {
    pub fn count(&self) -> i64 {
        self.outer.winding - self.inner.winding
    }
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&[z.re, z.im], s)
}

pub fn fiber_windings(f: &TwoVarSeries, t: Complex64, r_in: f64, r_out: f64) -> Result<FiberCount> {
    if t.norm() == 0.0 {
        return Err(Error::InvalidParameter("fiber counts need t != 0".into()));
    }
    if !(0.0 < r_in && r_in < r_out) {
        return Err(Error::InvalidParameter(format!(
            "counting radii need 0 < r_in < r_out, got {r_in}, {r_out}"
        )));
    }
    let g = |z: Complex64| f.fiber_value(z, t);
    Ok(FiberCount {
        t,
        inner: winding_count(g, r_in, DEFAULT_WINDING_SAMPLES)?,
        outer: winding_count(g, r_out, DEFAULT_WINDING_SAMPLES)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchOrder {
    pub order_at_origin: i64,
    pub zeros_in_punctured_disc: i64,
}

impl BranchOrder {
    pub fn total(&self) -> i64 {
        self.order_at_origin + self.zeros_in_punctured_disc
    }
}

/// Vanishing order at the node and further zeros in `0 < |x| < radius` of
/// the branch restriction `f(z, 0)` or `f(0, w)`.
///
/// An identically vanishing restriction (the branch lies in the divisor)
/// yields [`Error::DegenerateBranch`].
pub fn nodal_branch_order(f: &TwoVarSeries, branch: Branch, radius: f64) -> Result<BranchOrder> {
    let restriction = match branch {
        Branch::Z => f.z_axis(),
        Branch::W => f.w_axis(),
    };
    let scale = f.max_abs_coeff();
    let order = restriction
        .order(ORDER_TOL * scale)
        .ok_or(Error::DegenerateBranch)?;
    // the pole factor z^(-m0) lowers the z-branch order
    let shift = match branch {
        Branch::Z => f.pole_order() as i64,
        Branch::W => 0,
    };
    let wind = winding_count(|x| restriction.eval(x), radius, DEFAULT_WINDING_SAMPLES)?;
    Ok(BranchOrder {
        order_at_origin: order as i64 - shift,
        zeros_in_punctured_disc: wind.winding - order as i64,
    })
}

/// Counting circles for the fiber over `t`: inner `|t|/(c'ρ)`, outer `ρc`;
/// branch circles `ρc` and `ρc'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingBands {
    pub rho: f64,
    pub c: f64,
    pub c_prime: f64,
}

impl CountingBands {
    pub fn unit(rho: f64) -> Self {
        CountingBands {
            rho,
            c: 1.0,
            c_prime: 1.0,
        }
    }

    pub fn fiber_radii(&self, t: Complex64) -> (f64, f64) {
        (t.norm() / (self.c_prime * self.rho), self.rho * self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub fibers: Vec<FiberCount>,
    pub z_branch: Option<BranchOrder>,
    pub w_branch: Option<BranchOrder>,
    pub constant: bool,
    /// Fiber count equals the sum of branch totals; `None` when a branch is
    /// degenerate and no verdict is given.
    pub matches_nodal: Option<bool>,
}

impl ConstancyReport {
    pub fn passes(&self) -> bool {
        self.constant && self.matches_nodal == Some(true)
    }

    pub fn common_count(&self) -> Option<i64> {
        let first = self.fibers.first()?.count();
        self.constant.then_some(first)
    }
}

/// Checks that the zero count on fibers is the same for every `t` and equals
/// the nodal count.
pub fn constancy_check(
    f: &TwoVarSeries,
    t_list: &[Complex64],
    bands: &CountingBands,
) -> Result<ConstancyReport> {
    let fibers = t_list
        .iter()
        .map(|&t| {
            let (r_in, r_out) = bands.fiber_radii(t);
            fiber_windings(f, t, r_in, r_out)
        })
        .collect::<Result<Vec<_>>>()?;
    let degenerate_as_none = |r: Result<BranchOrder>| match r {
        Ok(o) => Ok(Some(o)),
        Err(Error::DegenerateBranch) => Ok(None),
        Err(e) => Err(e),
    };
    let z_branch = degenerate_as_none(nodal_branch_order(f, Branch::Z, bands.rho * bands.c))?;
    let w_branch = degenerate_as_none(nodal_branch_order(f, Branch::W, bands.rho * bands.c_prime))?;

    let constant = fibers.windows(2).all(|p| p[0].count() == p[1].count());
    let matches_nodal = match (z_branch, w_branch, fibers.first()) {
        (Some(z), Some(w), Some(first)) => Some(constant && first.count() == z.total() + w.total()),
        (Some(_), Some(_), None) => Some(true),
        _ => None,
    };
    Ok(ConstancyReport {
        fibers,
        z_branch,
        w_branch,
        constant,
        matches_nodal,
    })
}
