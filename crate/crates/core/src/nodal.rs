//! The standard nodal family `π(z, w) = zw = t` over the disc `|t| < c·c'`.
//!
//! Forms and vectors are pointwise: a [`CotangentElement`] is `a·du + b·dv`
//! at a base point and a [`TangentElement`] is `p·∂u + q·∂v`, where `(u, v)`
//! is either the hyperbola chart `(x, y)` or the product chart `(z, w)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radii of the bidisc `{|z| < c, |w| < c'}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalFamilySpec {
    c: f64,
    c_prime: f64,
}

impl NodalFamilySpec {
    pub fn new(c: f64, c_prime: f64) -> Result<Self> {
        if !(c > 0.0 && c_prime > 0.0 && c.is_finite() && c_prime.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "family radii must be positive, got c = {c}, c' = {c_prime}"
            )));
        }
        Ok(NodalFamilySpec { c, c_prime })
    }

    /// `c = c' = 1`.
    pub fn unit() -> Self {
        NodalFamilySpec {
            c: 1.0,
            c_prime: 1.0,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_prime(&self) -> f64 {
        self.c_prime
    }

    /// Radius `c·c'` of the base disc.
    pub fn base_radius(&self) -> f64 {
        self.c * self.c_prime
    }
}

/// Geometric annulus `r_inner < |ζ| < r_outer`; `r_inner = 0` is the
/// punctured disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct AnnulusSpec {
    r_inner: f64,
    r_outer: f64,
}

impl TryFrom<[f64; 2]> for AnnulusSpec {
    type Error = Error;

    fn try_from([r_inner, r_outer]: [f64; 2]) -> Result<Self> {
        AnnulusSpec::new(r_inner, r_outer)
    }
}

impl From<AnnulusSpec> for [f64; 2] {
    fn from(a: AnnulusSpec) -> Self {
        [a.r_inner, a.r_outer]
    }
}

impl AnnulusSpec {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner >= 0.0 && r_outer.is_finite() && r_inner < r_outer) {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 <= r_inner < r_outer, got ({r_inner}, {r_outer})"
            )));
        }
        Ok(AnnulusSpec { r_inner, r_outer })
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    /// True when the closed ring `lo <= |ζ| <= hi` sits inside the open annulus.
    pub fn contains_ring(&self, lo: f64, hi: f64) -> bool {
        lo > self.r_inner && hi < self.r_outer && lo <= hi
    }
}

/// Conformal module of a geometric annulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Module {
    Finite(f64),
    /// Punctured disc.
    Infinite,
}

impl Module {
    pub fn value(&self) -> f64 {
        match self {
            Module::Finite(m) => *m,
            Module::Infinite => f64::INFINITY,
        }
    }
}

/// `M(A) = log(r_outer / r_inner) / 2π`.
pub fn annulus_module(a: &AnnulusSpec) -> Module {
    if a.r_inner == 0.0 {
        Module::Infinite
    } else {
        Module::Finite((a.r_outer / a.r_inner).ln() / TAU)
    }
}

/// The fiber over `t` in the `z` coordinate: `|t|/c' < |z| < c`.
pub fn fiber_annulus(spec: &NodalFamilySpec, t: Complex64) -> Result<AnnulusSpec> {
    let bound = spec.base_radius();
    if t.norm() >= bound {
        return Err(Error::EmptyFiber {
            t_abs: t.norm(),
            bound,
        });
    }
    AnnulusSpec::new(t.norm() / spec.c_prime, spec.c)
}

/// `ζ ↦ (ζ, t/ζ)`.
pub fn embed(zeta: Complex64, t: Complex64) -> Result<ChartPoint> {
    if zeta.norm() == 0.0 {
        return Err(Error::ZeroPoint);
    }
    Ok(ChartPoint::zw(zeta, t / zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// Hyperbola coordinates, `π = x² − y²`.
    Xy,
    /// Product coordinates, `π = zw`.
    Zw,
}

/// A point of `ℂ²` in a named chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub u: Complex64,
    pub v: Complex64,
}

impl ChartPoint {
    pub fn zw(z: Complex64, w: Complex64) -> Self {
        ChartPoint {
            chart: Chart::Zw,
            u: z,
            v: w,
        }
    }

    pub fn xy(x: Complex64, y: Complex64) -> Self {
        ChartPoint {
            chart: Chart::Xy,
            u: x,
            v: y,
        }
    }

    /// Value of the projection.
    pub fn pi(&self) -> Complex64 {
        match self.chart {
            Chart::Xy => self.u * self.u - self.v * self.v,
            Chart::Zw => self.u * self.v,
        }
    }

    /// `z = x + y`, `w = x − y`.
    pub fn to_zw(&self) -> ChartPoint {
        match self.chart {
            Chart::Zw => *self,
            Chart::Xy => ChartPoint::zw(self.u + self.v, self.u - self.v),
        }
    }
}

/// `a·du + b·dv` at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentElement {
    pub a: Complex64,
    pub b: Complex64,
    pub at: ChartPoint,
}

/// `p·∂/∂u + q·∂/∂v` at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentElement {
    pub p: Complex64,
    pub q: Complex64,
    pub at: ChartPoint,
}

impl CotangentElement {
    pub fn new(a: Complex64, b: Complex64, at: ChartPoint) -> Self {
        CotangentElement { a, b, at }
    }

    /// `α = dz/z − dw/w`.
    pub fn alpha(at: ChartPoint) -> Self {
        let p = at.to_zw();
        CotangentElement::new(p.u.inv(), -p.v.inv(), p)
    }

    /// `dπ`, in whichever chart `at` uses.
    pub fn dpi(at: ChartPoint) -> Self {
        match at.chart {
            Chart::Zw => CotangentElement::new(at.v, at.u, at),
            Chart::Xy => CotangentElement::new(at.u * 2.0, -at.v * 2.0, at),
        }
    }

    /// `dx/y + dy/x` in the hyperbola chart.
    pub fn hyperbola_form(x: Complex64, y: Complex64) -> Self {
        CotangentElement::new(y.inv(), x.inv(), ChartPoint::xy(x, y))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        CotangentElement::new(self.a * s, self.b * s, self.at)
    }

    /// Pull back along `(x, y) ↦ (z, w) = (x + y, x − y)`; input in `(z, w)`,
    /// output based at `xy_point`.
    pub fn pull_to_xy(&self, xy_point: ChartPoint) -> Result<Self> {
        if self.at.chart != Chart::Zw || xy_point.chart != Chart::Xy {
            return Err(Error::InvalidParameter(
                "expected a (z, w) form and an (x, y) point".into(),
            ));
        }
        if xy_point.to_zw() != self.at {
            return Err(Error::BasePointMismatch);
        }
        Ok(CotangentElement::new(
            self.a + self.b,
            self.a - self.b,
            xy_point,
        ))
    }

    /// Coefficient of `dζ` after pulling back along `ζ ↦ (ζ, t/ζ)`.
    pub fn pull_back_to_fiber(&self, zeta: Complex64, t: Complex64) -> Result<Complex64> {
        let base = embed(zeta, t)?;
        if self.at.chart != Chart::Zw {
            return Err(Error::InvalidParameter(
                "pullback expects a (z, w) form".into(),
            ));
        }
        if (self.at.u - base.u).norm() > 0.0 || (self.at.v - base.v).norm() > 0.0 {
            return Err(Error::BasePointMismatch);
        }
        Ok(self.a - self.b * t / (zeta * zeta))
    }
}

impl TangentElement {
    pub fn new(p: Complex64, q: Complex64, at: ChartPoint) -> Self {
        TangentElement { p, q, at }
    }

    /// The vertical field `v`: `z∂z − w∂w`, or `y∂x + x∂y` in the hyperbola chart.
    pub fn vertical(at: ChartPoint) -> Self {
        match at.chart {
            Chart::Zw => TangentElement::new(at.u, -at.v, at),
            Chart::Xy => TangentElement::new(at.v, at.u, at),
        }
    }

    /// Push forward along `ζ ↦ (ζ, t/ζ)` of the Euler field `ζ∂/∂ζ`.
    pub fn euler_pushforward(zeta: Complex64, t: Complex64) -> Result<Self> {
        let at = embed(zeta, t)?;
        Ok(TangentElement::new(zeta, -t / zeta, at))
    }
}

/// Maps a point or element from `(x, y)` to `(z, w)`; elements already in
/// `(z, w)` pass through.
pub trait ChangeCoords: Sized {
    fn change_coords_xy(&self) -> Self;
}

impl ChangeCoords for ChartPoint {
    fn change_coords_xy(&self) -> Self {
        self.to_zw()
    }
}

impl ChangeCoords for TangentElement {
    // ∂x = ∂z + ∂w, ∂y = ∂z − ∂w
    fn change_coords_xy(&self) -> Self {
        match self.at.chart {
            Chart::Zw => *self,
            Chart::Xy => TangentElement::new(self.p + self.q, self.p - self.q, self.at.to_zw()),
        }
    }
}

impl ChangeCoords for CotangentElement {
    // dx = (dz + dw)/2, dy = (dz − dw)/2
    fn change_coords_xy(&self) -> Self {
        match self.at.chart {
            Chart::Zw => *self,
            Chart::Xy => CotangentElement::new(
                (self.a + self.b) * 0.5,
                (self.a - self.b) * 0.5,
                self.at.to_zw(),
            ),
        }
    }
}

fn same_base(x: &ChartPoint, y: &ChartPoint) -> Result<()> {
    if x.chart != y.chart || x.u != y.u || x.v != y.v {
        return Err(Error::BasePointMismatch);
    }
    Ok(())
}

/// `ω(X) = a·p + b·q`.
pub fn pair(form: &CotangentElement, vector: &TangentElement) -> Result<Complex64> {
    same_base(&form.at, &vector.at)?;
    Ok(form.a * vector.p + form.b * vector.q)
}

/// Coefficient of `du ∧ dv` in `ω₁ ∧ ω₂`.
pub fn wedge(first: &CotangentElement, second: &CotangentElement) -> Result<Complex64> {
    same_base(&first.at, &second.at)?;
    Ok(first.a * second.b - first.b * second.a)
}
