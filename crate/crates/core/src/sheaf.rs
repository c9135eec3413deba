//! Relative k-differentials versus k-canonical forms on the total space.
//!
//! With a nonvanishing reference `β` of the relative dualizing sheaf and
//! `τ` of `K_D`, a relative section `ψ` and a canonical form `Ψ` correspond by
//! `ψ = Ψ / (β ∧ π*τ)^k · β^k`. In the default gauge `β = α`, `τ = dt` we have
//! `α ∧ dπ = 2 dz∧dw`, so `ψ = f α^k` maps to `Ψ = f (2 dz∧dw)^k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::differentials::PowerSeries;
use crate::error::{Error, Result};
use crate::extension::TwoVarSeries;
use crate::laurent::LaurentSeries;
use crate::nodal::{wedge, ChartPoint, CotangentElement};

/// `ψ = f α^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct RelativeSection {
    pub k: u32,
    pub f: TwoVarSeries,
}

/// `Ψ = F (2 dz∧dw)^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormJson", into = "FormJson")]
pub struct CanonicalForm {
    pub k: u32,
    pub coeff: TwoVarSeries,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FormJson {
    RelativeSection {
        k: u32,
        #[serde(flatten)]
        series: TwoVarSeries,
    },
    CanonicalForm {
        k: u32,
        #[serde(flatten)]
        series: TwoVarSeries,
    },
}

impl From<RelativeSection> for FormJson {
    fn from(s: RelativeSection) -> Self {
        FormJson::RelativeSection {
            k: s.k,
            series: s.f,
        }
    }
}

impl From<CanonicalForm> for FormJson {
    fn from(s: CanonicalForm) -> Self {
        FormJson::CanonicalForm {
            k: s.k,
            series: s.coeff,
        }
    }
}

impl TryFrom<FormJson> for RelativeSection {
    type Error = Error;

    fn try_from(raw: FormJson) -> Result<Self> {
        match raw {
            FormJson::RelativeSection { k, series } => Ok(RelativeSection { k, f: series }),
            FormJson::CanonicalForm { .. } => {
                Err(Error::Malformed("expected kind relative_section".into()))
            }
        }
    }
}

impl TryFrom<FormJson> for CanonicalForm {
    type Error = Error;

    fn try_from(raw: FormJson) -> Result<Self> {
        match raw {
            FormJson::CanonicalForm { k, series } => Ok(CanonicalForm { k, coeff: series }),
            FormJson::RelativeSection { .. } => {
                Err(Error::Malformed("expected kind canonical_form".into()))
            }
        }
    }
}

/// Reference choices `β = g·α` with `g = exp(log_g)` and `τ = h(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    pub log_g: TwoVarSeries,
    pub h: PowerSeries,
}

/// Gauges smaller than this in modulus are refused.
pub const GAUGE_FLOOR: f64 = 1e-9;

impl Default for GaugeFunction {
    fn default() -> Self {
        GaugeFunction {
            log_g: TwoVarSeries::zeros(0, 0),
            h: PowerSeries::constant(Complex64::new(1.0, 0.0)),
        }
    }
}

impl GaugeFunction {
    pub fn new(log_g: TwoVarSeries, h: PowerSeries) -> Self {
        GaugeFunction { log_g, h }
    }

    /// `β = α` with the given `τ`-scale.
    pub fn tau_only(h: PowerSeries) -> Self {
        GaugeFunction {
            h,
            ..Self::default()
        }
    }

    pub fn g(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.log_g.eval(z, w).exp()
    }

    pub fn h_at(&self, t: Complex64) -> Complex64 {
        self.h.eval(t)
    }

    /// `β` and `π*τ` at a point, refusing near-vanishing gauges.
    fn frames(&self, at: ChartPoint) -> Result<(CotangentElement, CotangentElement, Complex64)> {
        let p = at.to_zw();
        let g = self.g(p.u, p.v);
        let h = self.h_at(p.pi());
        if g.norm() < GAUGE_FLOOR || h.norm() < GAUGE_FLOOR {
            return Err(Error::GaugeVanishes {
                z: p.u.to_string(),
                w: p.v.to_string(),
            });
        }
        let beta = CotangentElement::alpha(p).scaled(g);
        let tau = CotangentElement::dpi(p).scaled(h);
        Ok((beta, tau, g))
    }
}

/// Default-gauge transport `f ↦ F`, with the `2^k` kept in the basis.
pub fn relative_to_canonical(psi: &RelativeSection) -> CanonicalForm {
    CanonicalForm {
        k: psi.k,
        coeff: psi.f.clone(),
    }
}

pub fn canonical_to_relative(form: &CanonicalForm) -> RelativeSection {
    RelativeSection {
        k: form.k,
        f: form.coeff.clone(),
    }
}

/// Transport with `τ = s·dt` for a constant `s`: `F = f s^k`.
pub fn relative_to_canonical_scaled(psi: &RelativeSection, tau_scale: Complex64) -> CanonicalForm {
    CanonicalForm {
        k: psi.k,
        coeff: psi.f.scale(tau_scale.powi(psi.k as i32)),
    }
}

/// `Ψ / (2 dz∧dw)^k` at a point, computed as `ψ β^(−k) (β ∧ π*τ)^k`.
pub fn canonical_value_at(
    psi: &RelativeSection,
    gauge: &GaugeFunction,
    at: ChartPoint,
) -> Result<Complex64> {
    let p = at.to_zw();
    let (beta, tau, g) = gauge.frames(p)?;
    let k = psi.k as i32;
    let vol = wedge(&beta, &tau)? / 2.0;
    // ψ = f α^k = (f / g^k) β^k
    Ok(psi.f.eval(p.u, p.v) / g.powi(k) * vol.powi(k))
}

/// Coefficient of `α^k` in `Ψ / (β ∧ π*τ)^k · β^k` for `Ψ = value·(2 dz∧dw)^k`.
pub fn relative_value_at(
    value: Complex64,
    k: u32,
    gauge: &GaugeFunction,
    at: ChartPoint,
) -> Result<Complex64> {
    let p = at.to_zw();
    let (beta, tau, g) = gauge.frames(p)?;
    let k = k as i32;
    let vol = wedge(&beta, &tau)? / 2.0;
    Ok(value / vol.powi(k) * g.powi(k))
}

/// Max over `points` of the change in `Ψ / (β ∧ π*τ)^k · β^k` when `β = α` is
/// replaced by `β = g α`, with `Ψ` built from `ψ` and the gauge's `τ`.
pub fn gauge_invariance_check(
    psi: &RelativeSection,
    gauge: &GaugeFunction,
    points: &[ChartPoint],
) -> Result<f64> {
    let reference = GaugeFunction::tau_only(gauge.h.clone());
    let mut worst = 0.0f64;
    for &at in points {
        let big_psi = canonical_value_at(psi, &reference, at)?;
        let default = relative_value_at(big_psi, psi.k, &reference, at)?;
        let gauged = relative_value_at(big_psi, psi.k, gauge, at)?;
        worst = worst.max((gauged - default).norm());
    }
    Ok(worst)
}

/// Solves `Φ = dπ ∧ φ` with `φ` a multiple of `α`, for `Φ = F·2 dz∧dw`.
///
/// `dπ ∧ α = −2 dz∧dw`, so `φ = −F α`; the solution is unique modulo `dπ`.
pub fn poincare_residue(form: &CanonicalForm) -> Result<RelativeSection> {
    if form.k != 1 {
        return Err(Error::InvalidParameter(format!(
            "the residue is defined for k = 1, got k = {}",
            form.k
        )));
    }
    Ok(RelativeSection {
        k: 1,
        f: form.coeff.scale(Complex64::new(-1.0, 0.0)),
    })
}

/// The residue on the fiber over `t` as a coefficient against `dζ/ζ`:
/// `φ = c α` pulls back to `2c(ζ, t/ζ) dζ/ζ`.
pub fn poincare_residue_on_fiber(form: &CanonicalForm, t: Complex64) -> Result<LaurentSeries> {
    let phi = poincare_residue(form)?;
    Ok(phi.f.fiber_series(t).scale(Complex64::new(2.0, 0.0)))
}

/// Max over `points` of `|dπ ∧ φ − Φ|` in units of `dz∧dw`.
pub fn residue_wedge_defect(
    form: &CanonicalForm,
    phi: &RelativeSection,
    points: &[ChartPoint],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &at in points {
        let p = at.to_zw();
        let phi_form = CotangentElement::alpha(p).scaled(phi.f.eval(p.u, p.v));
        let lhs = wedge(&CotangentElement::dpi(p), &phi_form)?;
        let rhs = form.coeff.eval(p.u, p.v) * 2.0;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::{pair, TangentElement};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn points() -> Vec<ChartPoint> {
        vec![
            ChartPoint::zw(c(0.3, 0.1), c(-0.2, 0.4)),
            ChartPoint::zw(c(0.05, -0.6), c(0.7, 0.02)),
            ChartPoint::zw(c(-0.4, -0.4), c(0.1, 0.1)),
        ]
    }

    fn zw_sum() -> TwoVarSeries {
        TwoVarSeries::from_terms([(1, 0, c(1.0, 0.0)), (0, 1, c(1.0, 0.0))])
    }

    #[test]
    fn transport_examples() {
        let one = TwoVarSeries::from_terms([(0, 0, c(1.0, 0.0))]);
        for (k, f) in [
            (1, one.clone()),
            (3, TwoVarSeries::zeros(1, 1)),
            (2, zw_sum()),
        ] {
            let psi = RelativeSection { k, f };
            let form = relative_to_canonical(&psi);
            assert_eq!(form.coeff, psi.f);
            assert_eq!(canonical_to_relative(&form), psi);
        }
        let cubed = CanonicalForm {
            k: 1,
            coeff: zw_sum().pow(3),
        };
        assert_eq!(canonical_to_relative(&cubed).f, zw_sum().pow(3));
    }

    #[test]
    fn pointwise_default_gauge_matches_transport() {
        let psi = RelativeSection { k: 2, f: zw_sum() };
        for at in points() {
            let v = canonical_value_at(&psi, &GaugeFunction::default(), at).unwrap();
            assert!((v - psi.f.eval(at.u, at.v)).norm() < 1e-14);
        }
    }

    #[test]
    fn trivial_and_exponential_gauges() {
        let psi = RelativeSection { k: 2, f: zw_sum() };
        assert_eq!(
            gauge_invariance_check(&psi, &GaugeFunction::default(), &points()).unwrap(),
            0.0
        );
        let log_g = TwoVarSeries::from_terms([(1, 0, c(0.3, 0.0)), (0, 1, c(-0.2, 0.0))]);
        let gauge = GaugeFunction::new(log_g, PowerSeries::constant(c(1.0, 0.0)));
        assert!(gauge_invariance_check(&psi, &gauge, &points()).unwrap() <= 1e-10);
    }

    #[test]
    fn tau_rescaling_scales_canonical_form() {
        for k in 1..=4u32 {
            let psi = RelativeSection { k, f: zw_sum() };
            let scaled = relative_to_canonical_scaled(&psi, c(2.0, 0.0));
            let plain = relative_to_canonical(&psi);
            let factor = 2f64.powi(k as i32);
            for (row_s, row_p) in scaled.coeff.grid().iter().zip(plain.coeff.grid()) {
                for (a, b) in row_s.iter().zip(row_p) {
                    assert_eq!(*a, b * factor);
                }
            }
            // ψ itself does not change
            let gauge = GaugeFunction::tau_only(PowerSeries::constant(c(2.0, 0.0)));
            assert!(gauge_invariance_check(&psi, &gauge, &points()).unwrap() < 1e-13);
        }
    }

    #[test]
    fn vanishing_gauge_refused() {
        let gauge = GaugeFunction::tau_only(PowerSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0)]));
        let psi = RelativeSection { k: 1, f: zw_sum() };
        let at = [ChartPoint::zw(c(1e-6, 0.0), c(1e-6, 0.0))];
        assert!(matches!(
            gauge_invariance_check(&psi, &gauge, &at),
            Err(Error::GaugeVanishes { .. })
        ));
    }

    #[test]
    fn residue_examples() {
        let one = CanonicalForm {
            k: 1,
            coeff: TwoVarSeries::from_terms([(0, 0, c(1.0, 0.0))]),
        };
        let phi = poincare_residue(&one).unwrap();
        assert!(residue_wedge_defect(&one, &phi, &points()).unwrap() < 1e-12);

        let zero = CanonicalForm {
            k: 1,
            coeff: TwoVarSeries::zeros(0, 0),
        };
        assert!(poincare_residue(&zero).unwrap().f.is_zero());

        assert!(poincare_residue(&CanonicalForm {
            k: 2,
            coeff: zw_sum()
        })
        .is_err());
    }

    #[test]
    fn residue_against_transport_after_pairing() {
        // φ(v) = −ψ(v): dπ ∧ φ and φ ∧ dπ differ by orientation
        let psi = RelativeSection { k: 1, f: zw_sum() };
        let phi = poincare_residue(&relative_to_canonical(&psi)).unwrap();
        for at in points() {
            let v = TangentElement::vertical(at);
            let a = CotangentElement::alpha(at);
            let lhs = pair(&a.scaled(phi.f.eval(at.u, at.v)), &v).unwrap();
            let rhs = pair(&a.scaled(psi.f.eval(at.u, at.v)), &v).unwrap();
            assert!((lhs + rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn residue_on_fiber() {
        let form = CanonicalForm {
            k: 1,
            coeff: zw_sum(),
        };
        let t = c(0.01, 0.0);
        let s = poincare_residue_on_fiber(&form, t).unwrap();
        let zeta = c(0.3, 0.2);
        let want = -(zeta + t / zeta) * 2.0;
        assert!((s.eval(zeta).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn json_kinds() {
        let psi = RelativeSection { k: 2, f: zw_sum() };
        let text = serde_json::to_string(&psi).unwrap();
        assert!(
            text.starts_with(r#"{"kind":"relative_section","k":2,"m_deg":1"#),
            "{text}"
        );
        let back: RelativeSection = serde_json::from_str(&text).unwrap();
        assert_eq!(back, psi);
        assert!(serde_json::from_str::<CanonicalForm>(&text).is_err());
    }
}
