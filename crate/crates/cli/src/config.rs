use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nodal_core::Complex64;

use crate::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "nodal",
    version,
    about = "Differentials on degenerating annuli and the nodal family zw = t"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcmd {
    Decompose,
    Extend,
    Zeros,
    Collar,
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split an annulus k-differential into plus / f0 / minus parts and report band sups.
    Decompose(Flags),
    /// Recover the two-variable series from fiber samples.
    Extend(Flags),
    /// Count zeros on fibers and compare with the nodal branch orders.
    Zeros(Flags),
    /// Tabulate the collar density and the log/hyperbolic ratio bounds.
    Collar(Flags),
    /// Run the seeded invariant suite.
    Verify(Flags),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct Flags {
    /// Input JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Text report path; the JSON sidecar goes to `<output>.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid size: points per circle (decompose), radii per collar (collar),
    /// trials per check (verify).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Tolerance: maximum-principle slack (decompose), residue tolerance
    /// (extend), tolerance multiplier (verify).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated base points `re:im`.
    #[arg(long = "t-list", allow_hyphen_values = true)]
    pub t_list: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Weight override.
    #[arg(long)]
    pub k: Option<u32>,
    /// Bidegree `M,N` for extend.
    #[arg(long)]
    pub degrees: Option<String>,
    /// Pole order along z = 0 for extend.
    #[arg(long)]
    pub pole: Option<u32>,
    /// Also write the recovered series JSON here (extend).
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcmd,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub series_output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub t_list: Option<Vec<Complex64>>,
    pub rho: Option<f64>,
    pub k: Option<u32>,
    pub degrees: Option<(usize, usize)>,
    pub pole: Option<u32>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, Failure> {
        let (subcommand, f) = match cli.command {
            Command::Decompose(f) => (Subcmd::Decompose, f),
            Command::Extend(f) => (Subcmd::Extend, f),
            Command::Zeros(f) => (Subcmd::Zeros, f),
            Command::Collar(f) => (Subcmd::Collar, f),
            Command::Verify(f) => (Subcmd::Verify, f),
        };
        if let Some(tol) = f.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
            }
        }
        if let Some(rho) = f.rho {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Failure::Input(format!(
                    "--rho must lie in (0, 1), got {rho}"
                )));
            }
        }
        if f.grid == Some(0) {
            return Err(Failure::Input("--grid must be positive".into()));
        }
        Ok(RunConfig {
            subcommand,
            t_list: f.t_list.as_deref().map(parse_t_list).transpose()?,
            degrees: f.degrees.as_deref().map(parse_degrees).transpose()?,
            input: f.input,
            output: f.output,
            series_output: f.series,
            seed: f.seed,
            grid: f.grid,
            tol: f.tol,
            rho: f.rho,
            k: f.k,
            pole: f.pole,
        })
    }

    pub fn read_input<T: serde::de::DeserializeOwned>(&self) -> Result<T, Failure> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| Failure::Input("--input is required".into()))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Input(format!("bad complex value {s:?}, expected re:im"));
    let s = s.trim();
    let (re, im) = match s.split_once(':') {
        Some((re, im)) => (re, im),
        None => (s, "0"),
    };
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_t_list(s: &str) -> Result<Vec<Complex64>, Failure> {
    let list = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(Failure::Input("--t-list is empty".into()));
    }
    Ok(list)
}

fn parse_degrees(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("bad --degrees {s:?}, expected M,N"));
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        m.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_list_parses_re_im_pairs() {
        let got = parse_t_list("1e-2:0, -0.5:0.25,3").unwrap();
        assert_eq!(
            got,
            vec![
                Complex64::new(1e-2, 0.0),
                Complex64::new(-0.5, 0.25),
                Complex64::new(3.0, 0.0)
            ]
        );
        assert!(parse_t_list("1:x").is_err());
        assert!(parse_t_list(",").is_err());
    }

    #[test]
    fn degrees_parse() {
        assert_eq!(parse_degrees("6, 4").unwrap(), (6, 4));
        assert!(parse_degrees("6").is_err());
    }
}
