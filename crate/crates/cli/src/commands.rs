use std::fmt::Write as _;

use nodal_core::collar::{collar_ratio_bounds, density_table, CollarSpec};
use nodal_core::differentials::{band_sup, interior_sup_check, RESIDUE_TOL};
use nodal_core::divisor::{constancy_check, CountingBands};
use nodal_core::extension::{
    extend_with_pole, min_scale, nodal_differential, reconstruction_error,
};
use nodal_core::laurent::decompose;
use nodal_core::verify::{run_all, VerifyConfig, DEFAULT_SEED};
use nodal_core::{
    AnnulusKDifferential, Band, BandGrid, BandSpec, Complex64, FamilySamples, LaurentSeries,
    NodalFamilySpec, TwoVarSeries,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::Failure;

/// Columnar text for plotting, the same content as JSON, and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub passed: bool,
}

const DEFAULT_RHO: f64 = 0.5;
const DEFAULT_BAND_POINTS: usize = 512;
const DEFAULT_INTERIOR_TOL: f64 = 1e-9;
const DEFAULT_COLLAR_GRID: usize = 64;
const DEFAULT_DEGREE_CAP: usize = 8;

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn series_rows(out: &mut String, label: &str, s: &LaurentSeries) {
    for (n, a) in s.terms() {
        if a.norm() > 0.0 {
            let _ = writeln!(out, "{label} {n} {:.17e} {:.17e}", a.re, a.im);
        }
    }
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Report, Failure> {
    let mut d: AnnulusKDifferential = cfg.read_input()?;
    if let Some(k) = cfg.k {
        d = AnnulusKDifferential::new(k, d.f().clone(), *d.annulus())?;
    }
    let parts = decompose(d.f());
    let a = d.annulus();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "# decompose k={} annulus=[{}, {}]",
        d.k(),
        a.r_inner(),
        a.r_outer()
    );
    let _ = writeln!(text, "# part exponent re im");
    series_rows(&mut text, "minus", &parts.minus);
    let _ = writeln!(text, "f0 0 {:.17e} {:.17e}", parts.f0.re, parts.f0.im);
    series_rows(&mut text, "plus", &parts.plus);
    let _ = writeln!(text, "# residue re im");
    let _ = writeln!(text, "residue {:.17e} {:.17e}", parts.f0.re, parts.f0.im);

    // Bands of the family whose fiber is this annulus: c = r_out, c' = 1, |t| = r_in.
    let mut passed = true;
    let mut bands = Value::Null;
    let rho1 = cfg.rho.unwrap_or(DEFAULT_RHO);
    let spec = if a.r_inner() > 0.0 {
        NodalFamilySpec::new(a.r_outer(), 1.0)
            .and_then(|fam| {
                BandSpec::new(
                    rho1,
                    rho1.sqrt(),
                    1.0,
                    fam,
                    Complex64::new(a.r_inner(), 0.0),
                )
            })
            .ok()
    } else {
        None
    };
    match spec {
        Some(b) => {
            let grid = BandGrid {
                points: cfg.grid.unwrap_or(DEFAULT_BAND_POINTS),
                ..BandGrid::default()
            };
            let inner = band_sup(&d, &b, Band::Inner, &grid)?;
            let outer = band_sup(&d, &b, Band::Outer, &grid)?;
            let check = interior_sup_check(&d, &b, &grid)?;
            let tol = cfg.tol.unwrap_or(DEFAULT_INTERIOR_TOL);
            passed = check.holds(tol);
            let (ilo, ihi) = b.radii(Band::Inner);
            let (olo, ohi) = b.radii(Band::Outer);
            let _ = writeln!(text, "# band lo hi sup");
            let _ = writeln!(text, "inner {ilo:.17e} {ihi:.17e} {inner:.17e}");
            let _ = writeln!(text, "outer {olo:.17e} {ohi:.17e} {outer:.17e}");
            let _ = writeln!(text, "# interior_sup band_max holds");
            let _ = writeln!(
                text,
                "interior {:.17e} {:.17e} {}",
                check.interior_sup, check.band_max, passed
            );
            bands = json!({
                "rho1": rho1,
                "rho2": b.rho2(),
                "inner": { "radii": [ilo, ihi], "sup": inner },
                "outer": { "radii": [olo, ohi], "sup": outer },
                "interior_sup": check.interior_sup,
                "band_max": check.band_max,
                "tolerance": tol,
                "holds": passed,
            });
        }
        None => {
            let _ = writeln!(text, "# bands skipped: annulus too thin for rho = {rho1}");
        }
    }

    let json = json!({
        "k": d.k(),
        "annulus": [a.r_inner(), a.r_outer()],
        "plus": parts.plus,
        "f0": c(parts.f0),
        "minus": parts.minus,
        "residue": c(parts.f0),
        "bands": bands,
        "passed": passed,
    });
    Ok(Report { text, json, passed })
}

/// Largest bidegree the samples resolve, capped.
fn default_degrees(fs: &FamilySamples) -> (usize, usize) {
    let n_deg = fs.t_count.saturating_sub(1).min(DEFAULT_DEGREE_CAP);
    let m_deg = ((fs.zeta_count.saturating_sub(1)) / 2)
        .saturating_sub(n_deg)
        .min(DEFAULT_DEGREE_CAP);
    (m_deg, n_deg)
}

pub fn cmd_extend(cfg: &RunConfig) -> Result<Report, Failure> {
    let mut fs: FamilySamples = cfg.read_input()?;
    if let Some(k) = cfg.k {
        fs.k = k;
    }
    fs.validate()?;
    let (m_deg, n_deg) = cfg.degrees.unwrap_or_else(|| default_degrees(&fs));
    let m0 = cfg.pole.unwrap_or(0);
    let series = extend_with_pole(&fs, m0, m_deg, n_deg)?;
    if let Some(path) = &cfg.series_output {
        write_file(
            path,
            &pretty(&serde_json::to_value(&series).expect("series serializes")),
        )?;
    }
    let recon = reconstruction_error(&series, &fs);
    let scale = if m0 == 0 {
        min_scale(&fs, m_deg, n_deg)
    } else {
        min_scale(&fs.times_zeta_power(m0), m_deg, n_deg)
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "# extend k={} degrees=({m_deg}, {n_deg}) pole_order={m0} r_zeta={} rho_t={}",
        fs.k, fs.r_zeta, fs.rho_t
    );
    let _ = writeln!(text, "# m n re im");
    for m in 0..=series.m_deg() {
        for n in 0..=series.n_deg() {
            let a = series.coeff(m, n);
            let _ = writeln!(text, "a {m} {n} {:.17e} {:.17e}", a.re, a.im);
        }
    }
    let _ = writeln!(text, "# reconstruction_error min_scale");
    let _ = writeln!(text, "fit {recon:.17e} {scale:.17e}");

    let mut passed = true;
    let nodal_json = if m0 == 0 {
        let nodal = nodal_differential(&series, fs.k)?;
        let defect = nodal.residue_defect().norm();
        let tol = cfg.tol.unwrap_or(RESIDUE_TOL);
        passed = defect <= tol;
        let _ = writeln!(text, "# branch power re im");
        for (label, ps) in [("z", &nodal.fz), ("w", &nodal.gw)] {
            for (p, a) in ps.0.iter().enumerate() {
                let _ = writeln!(text, "{label} {p} {:.17e} {:.17e}", a.re, a.im);
            }
        }
        let _ = writeln!(text, "# residue_defect tolerance matches");
        let _ = writeln!(text, "residue {defect:.17e} {tol:.17e} {passed}");
        json!({ "nodal": nodal, "residue_defect": defect, "residue_tolerance": tol, "residue_matches": passed })
    } else {
        let _ = writeln!(text, "# branches skipped: polar along z = 0");
        json!({ "nodal": null })
    };

    let mut json = json!({
        "series": series,
        "degrees": [m_deg, n_deg],
        "reconstruction_error": recon,
        "min_scale": scale,
        "passed": passed,
    });
    json.as_object_mut()
        .expect("object")
        .extend(nodal_json.as_object().expect("object").clone());
    Ok(Report { text, json, passed })
}

fn default_t_list() -> Vec<Complex64> {
    (2..=8)
        .map(|e| Complex64::new(10f64.powi(-e), 0.0))
        .collect()
}

pub fn cmd_zeros(cfg: &RunConfig) -> Result<Report, Failure> {
    let f: TwoVarSeries = cfg.read_input()?;
    let t_list = cfg.t_list.clone().unwrap_or_else(default_t_list);
    let bands = CountingBands::unit(cfg.rho.unwrap_or(DEFAULT_RHO));
    let report = constancy_check(&f, &t_list, &bands)?;

    let mut text = String::new();
    let _ = writeln!(text, "# zeros rho={}", bands.rho);
    let _ = writeln!(
        text,
        "# t_re t_im r_inner r_outer winding_inner winding_outer count"
    );
    for fc in &report.fibers {
        let _ = writeln!(
            text,
            "fiber {:.17e} {:.17e} {:.17e} {:.17e} {} {} {}",
            fc.t.re,
            fc.t.im,
            fc.inner.radius,
            fc.outer.radius,
            fc.inner.winding,
            fc.outer.winding,
            fc.count()
        );
    }
    let _ = writeln!(
        text,
        "# branch order_at_origin zeros_in_punctured_disc total"
    );
    for (label, b) in [("z", report.z_branch), ("w", report.w_branch)] {
        match b {
            Some(o) => {
                let _ = writeln!(
                    text,
                    "{label} {} {} {}",
                    o.order_at_origin,
                    o.zeros_in_punctured_disc,
                    o.total()
                );
            }
            None => {
                let _ = writeln!(text, "{label} degenerate");
            }
        }
    }
    let matches = match report.matches_nodal {
        Some(b) => b.to_string(),
        None => "undecided".into(),
    };
    let _ = writeln!(text, "# constant matches_nodal");
    let _ = writeln!(text, "verdict {} {matches}", report.constant);

    // No verdict from a degenerate branch is not a failure.
    let passed = report.constant && report.matches_nodal != Some(false);
    let json = json!({ "report": report, "passed": passed });
    Ok(Report { text, json, passed })
}

pub fn cmd_collar(cfg: &RunConfig) -> Result<Report, Failure> {
    let t_list = cfg.t_list.clone().unwrap_or_else(default_t_list);
    let rho = cfg.rho.unwrap_or(DEFAULT_RHO);
    let grid = cfg.grid.unwrap_or(DEFAULT_COLLAR_GRID);

    let mut text = String::new();
    let _ = writeln!(text, "# collar rho={rho} grid={grid}");
    let mut rows = Vec::new();
    let mut summary = String::new();
    let _ = writeln!(summary, "# t_abs ratio_lo ratio_hi");
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &t in &t_list {
        let collar = CollarSpec::new(t, rho)?;
        let table = density_table(&collar, grid)?;
        let bounds = collar_ratio_bounds(&collar, grid)?;
        let _ = writeln!(text, "# t={} {}: r theta lambda ratio", t.re, t.im);
        for [r, th, lambda, ratio] in &table {
            let _ = writeln!(
                text,
                "density {r:.17e} {th:.17e} {lambda:.17e} {ratio:.17e}"
            );
        }
        let _ = writeln!(
            summary,
            "bounds {:.17e} {:.17e} {:.17e}",
            t.norm(),
            bounds.lo,
            bounds.hi
        );
        lo = lo.min(bounds.lo);
        hi = hi.max(bounds.hi);
        rows.push(json!({ "t": c(t), "table": table, "bounds": bounds }));
    }
    text.push_str(&summary);
    let _ = writeln!(text, "# bracket lo hi");
    let _ = writeln!(text, "bracket {lo:.17e} {hi:.17e}");
    let json =
        json!({ "rho": rho, "grid": grid, "collars": rows, "bracket": [lo, hi], "passed": true });
    Ok(Report {
        text,
        json,
        passed: true,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, Failure> {
    let defaults = VerifyConfig::default();
    let vc = VerifyConfig {
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        tol_scale: cfg.tol.unwrap_or(defaults.tol_scale),
        trials: cfg.grid.unwrap_or(defaults.trials),
    };
    let outcomes = run_all(&vc)?;
    let passed = outcomes.iter().all(|o| o.passed);
    let first_failure = outcomes.iter().find(|o| !o.passed);

    let mut text = String::new();
    let _ = writeln!(
        text,
        "# verify seed={} trials={} tol_scale={}",
        vc.seed, vc.trials, vc.tol_scale
    );
    let _ = writeln!(text, "# name status worst tolerance");
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{} {status} {:.6e} {:.6e}",
            o.name, o.worst, o.tolerance
        );
    }
    if let Some(o) = first_failure {
        let _ = writeln!(text, "# first counterexample ({})", o.name);
        let _ = writeln!(
            text,
            "{}",
            o.counterexample.as_ref().unwrap_or(&Value::Null)
        );
    }
    let json = json!({
        "seed": vc.seed,
        "trials": vc.trials,
        "tol_scale": vc.tol_scale,
        "checks": outcomes,
        "first_counterexample": first_failure.map(|o| json!({ "name": o.name, "input": o.counterexample })),
        "passed": passed,
    });
    Ok(Report { text, json, passed })
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}
