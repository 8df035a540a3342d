use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use szego_core::asymptotics::{edge_solutions, hyperbolic_solutions, site_residuals};
use szego_core::checker::{check_1_to_2, check_2_to_1};
use szego_core::commutation::{double_commute_add, double_commute_remove};
use szego_core::geronimus::{direct_geronimus, inverse_geronimus};
use szego_core::jacobi::{eigenvalues_outside, m_at_edge, m_function};
use szego_core::opuc::{circle_moments, verblunsky_from_moments, weight_from_verblunsky, Moments};
use szego_core::szego_maps::{range_membership, szego_forward, szego_inverse};
use szego_core::{
    CircleMeasure, Edge, Error, JacobiMatrix, LineMeasure, Outcome, Tolerances, Variant,
    VerblunskyCoeffs,
};

#[derive(Parser)]
#[command(name = "szego", version, about = "Jacobi matrices, Szego maps and Geronimus relations")]
struct Cli {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// JSON input document; `-` or absent reads stdin.
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    /// Write sequences and weight tables as CSV instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true)]
    tol_edge: Option<f64>,
    #[arg(long, global = true)]
    tol_edge_infinite: Option<f64>,
    #[arg(long, global = true)]
    tol_roundtrip: Option<f64>,
    #[arg(long, global = true)]
    tol_report: Option<f64>,
    #[arg(long, global = true)]
    tol_eig: Option<f64>,
    #[arg(long, global = true)]
    tol_band: Option<f64>,
    #[arg(long, global = true)]
    tol_fixed_point: Option<f64>,
    #[arg(long, global = true)]
    tol_window: Option<usize>,
}

impl TolArgs {
    fn resolve(&self) -> Tolerances {
        let mut t = Tolerances::default();
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { t.$field = v; })*
            };
        }
        set!(
            tol_edge => edge,
            tol_edge_infinite => edge_infinite,
            tol_roundtrip => roundtrip,
            tol_report => report,
            tol_eig => eig,
            tol_band => band,
            tol_fixed_point => fixed_point,
            tol_window => window
        );
        t
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one direction of the decay/spectral equivalence and print a report.
    Check {
        #[arg(long)]
        direction: CheckDirection,
        /// Variant for `2to1`; the input is then an alpha document.
        #[arg(long, value_parser = parse_variant, allow_hyphen_values = true)]
        variant: Option<Variant>,
    },
    /// Direct (`fwd`, alpha to matrix) or inverse (`inv`) Geronimus relations.
    Geronimus {
        #[arg(long)]
        direction: MapDirection,
        #[arg(long, value_parser = parse_variant, allow_hyphen_values = true)]
        variant: Variant,
    },
    /// Szego map from the circle to `[-2, 2]` (`fwd`) or back (`inv`).
    SzegoMap {
        #[arg(long, value_parser = parse_variant, allow_hyphen_values = true)]
        variant: Variant,
        #[arg(long)]
        direction: MapDirection,
        /// Circle grid size (a power of two).
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Insert or remove an eigenvalue by double commutation.
    Commute {
        #[command(subcommand)]
        op: CommuteOp,
    },
    /// Asymptotic solutions at `E` as CSV `k,psi_s,psi_b,ratio,residual`.
    Asymptotics {
        #[arg(long = "E", allow_hyphen_values = true)]
        energy: f64,
    },
    /// Evaluate `m(z)` at `RE,IM`.
    MFunction {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        at: Complex64,
    },
    /// Classify `m(-2)` and `m(2)`.
    Edges,
    /// Eigenvalues outside `[-2, 2]`.
    Eigs,
}

#[derive(Subcommand)]
enum CommuteOp {
    Add {
        #[arg(long = "E", allow_hyphen_values = true)]
        energy: f64,
        #[arg(long)]
        gamma: f64,
    },
    Remove {
        #[arg(long = "E", allow_hyphen_values = true)]
        energy: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckDirection {
    #[value(name = "1to2")]
    OneToTwo,
    #[value(name = "2to1")]
    TwoToOne,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapDirection {
    Fwd,
    Inv,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected RE,IM")?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

/// Circle measure input: Verblunsky coefficients, sampled weights or moments.
#[derive(Deserialize)]
#[serde(untagged)]
enum CircleDoc {
    Alpha(VerblunskyCoeffs),
    Weights { weights: Vec<f64> },
    Moments(Moments),
}

/// Line measure input: a matrix or a sampled density.
#[derive(Deserialize)]
#[serde(untagged)]
enum LineDoc {
    Matrix(JacobiMatrix),
    Density { density: Vec<f64> },
}

#[derive(Serialize)]
struct EdgesDoc {
    minus: szego_core::EdgeValue,
    plus: szego_core::EdgeValue,
    range: Vec<Variant>,
}

#[derive(Serialize)]
struct ComplexDoc {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct AsymptoticsRow {
    k: usize,
    psi_s: f64,
    psi_b: f64,
    ratio: f64,
    residual: f64,
}

struct Io {
    input: Option<PathBuf>,
    csv: bool,
}

impl Io {
    fn read<T: DeserializeOwned>(&self) -> anyhow::Result<T> {
        let text = match &self.input {
            Some(p) if p.as_os_str() != "-" => {
                fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
            }
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            }
        };
        serde_json::from_str(&text).context("parsing the input document")
    }

    fn json<T: Serialize>(&self, value: &T) -> anyhow::Result<()> {
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        Ok(())
    }

    fn matrix(&self, j: &JacobiMatrix) -> anyhow::Result<()> {
        if !self.csv {
            return self.json(j);
        }
        let mut w = csv::Writer::from_writer(io::stdout().lock());
        w.write_record(["n", "a", "b"])?;
        for n in 1..=j.support().max(1) {
            w.serialize((n, j.a(n), j.b(n)))?;
        }
        Ok(w.flush()?)
    }

    fn alpha(&self, a: &VerblunskyCoeffs) -> anyhow::Result<()> {
        if !self.csv {
            return self.json(a);
        }
        let mut w = csv::Writer::from_writer(io::stdout().lock());
        w.write_record(["n", "alpha"])?;
        for (n, v) in a.values().iter().enumerate() {
            w.serialize((n, v))?;
        }
        Ok(w.flush()?)
    }
}

fn alpha01(doc: &CircleDoc, weights: &[f64]) -> anyhow::Result<(f64, f64)> {
    let alpha = match doc {
        CircleDoc::Alpha(a) => a.clone(),
        _ => verblunsky_from_moments(&circle_moments(weights, 2), 2)?,
    };
    Ok((alpha.get(0), alpha.get(1)))
}

fn circle_weights(doc: &CircleDoc, grid: usize) -> anyhow::Result<Vec<f64>> {
    Ok(match doc {
        CircleDoc::Alpha(a) => weight_from_verblunsky(a, grid),
        CircleDoc::Weights { weights } => weights.clone(),
        CircleDoc::Moments(m) => {
            let c = m.to_complex()?;
            let count = c.len().checked_sub(1).ok_or_else(|| anyhow!("no moments given"))?;
            weight_from_verblunsky(&verblunsky_from_moments(&c, count)?, grid)
        }
    })
}

fn asymptotics(j: &JacobiMatrix, e: f64, tol: &Tolerances) -> anyhow::Result<Vec<AsymptoticsRow>> {
    let (small, big) = if (e.abs() - 2.0).abs() <= tol.band {
        let edge = if e > 0.0 { Edge::Plus } else { Edge::Minus };
        let pair = edge_solutions(j, edge, tol)?;
        (pair.small.values, pair.big.values)
    } else {
        let pair = hyperbolic_solutions(j, e, tol)?;
        (pair.minus.values, pair.plus.values)
    };
    let rs = site_residuals(j, e, &small);
    let rb = site_residuals(j, e, &big);
    Ok((1..small.len() - 1)
        .map(|k| AsymptoticsRow {
            k,
            psi_s: small[k],
            psi_b: big[k],
            ratio: small[k] / big[k],
            residual: rs[k - 1].max(rb[k - 1]),
        })
        .collect())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let tol = cli.tol.resolve();
    let io = Io { input: cli.io.input, csv: cli.io.csv };
    match cli.command {
        Command::Check { direction, variant } => {
            let report = match direction {
                CheckDirection::OneToTwo => check_1_to_2(&io.read()?, &tol)?,
                CheckDirection::TwoToOne => {
                    let v = variant.ok_or_else(|| anyhow!("--direction 2to1 needs --variant"))?;
                    check_2_to_1(&io.read()?, v, &tol)?
                }
            };
            io.json(&report)?;
            return Ok(report.outcome());
        }
        Command::Geronimus { direction: MapDirection::Fwd, variant } => {
            io.matrix(&direct_geronimus(&io.read()?, variant)?)?;
        }
        Command::Geronimus { direction: MapDirection::Inv, variant } => {
            let j: JacobiMatrix = io.read()?;
            let minus = m_at_edge(&j, Edge::Minus, &tol)?;
            let plus = m_at_edge(&j, Edge::Plus, &tol)?;
            io.alpha(&inverse_geronimus(&j, variant, (&minus, &plus))?.alpha)?;
        }
        Command::SzegoMap { variant, direction: MapDirection::Fwd, grid } => {
            let doc: CircleDoc = io.read()?;
            let weights = circle_weights(&doc, grid)?;
            let a01 = alpha01(&doc, &weights)?;
            let mu = CircleMeasure::normalized(weights)?;
            let nu = szego_forward(&mu, variant, Some(a01))?;
            if io.csv {
                nu.write_csv(io::stdout().lock())?;
            } else {
                io.json(&nu)?;
            }
        }
        Command::SzegoMap { variant, direction: MapDirection::Inv, grid } => {
            let nu = match io.read::<LineDoc>()? {
                LineDoc::Matrix(j) => LineMeasure::of_matrix(&j, grid / 2)?,
                LineDoc::Density { density } => LineMeasure::from_density(density),
            };
            let mu = szego_inverse(&nu, variant)?;
            if io.csv {
                mu.write_csv(io::stdout().lock())?;
            } else {
                io.json(&mu)?;
            }
        }
        Command::Commute { op: CommuteOp::Add { energy, gamma } } => {
            io.matrix(&double_commute_add(&io.read()?, energy, gamma, &tol)?)?;
        }
        Command::Commute { op: CommuteOp::Remove { energy } } => {
            io.matrix(&double_commute_remove(&io.read()?, energy, &tol)?)?;
        }
        Command::Asymptotics { energy } => {
            let rows = asymptotics(&io.read()?, energy, &tol)?;
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Command::MFunction { at } => {
            let m = m_function(&io.read()?, at)?;
            io.json(&ComplexDoc { re: m.re, im: m.im })?;
        }
        Command::Edges => {
            let j: JacobiMatrix = io.read()?;
            let minus = m_at_edge(&j, Edge::Minus, &tol)?;
            let plus = m_at_edge(&j, Edge::Plus, &tol)?;
            let range = range_membership(&j, &tol)?.into_iter().collect();
            io.json(&EdgesDoc { minus, plus, range })?;
        }
        Command::Eigs => {
            io.json(&eigenvalues_outside(&io.read()?, &tol)?)?;
        }
    }
    Ok(Outcome::Pass)
}

fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Inconclusive(_)) => Outcome::Inconclusive.exit_code() as u8,
        _ => Outcome::Fail.exit_code() as u8,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_argument() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert!(parse_complex("3").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let cli = Cli::parse_from(["szego", "--tol-report", "1e-4", "--tol-window", "300", "eigs"]);
        let t = cli.tol.resolve();
        assert_eq!((t.report, t.window), (1e-4, 300));
        assert_eq!(t.edge, Tolerances::default().edge);
    }

    #[test]
    fn error_exit_codes() {
        let unsure = anyhow::Error::from(Error::Inconclusive("edge".into())).context("edges");
        assert_eq!(error_code(&unsure), 2);
        assert_eq!(error_code(&Error::Domain("x".into()).into()), 1);
        assert_eq!(error_code(&anyhow!("io")), 1);
    }

    #[test]
    fn circle_doc_shapes() {
        assert!(matches!(serde_json::from_str::<CircleDoc>(r#"{"alpha":[0.1]}"#).unwrap(), CircleDoc::Alpha(_)));
        assert!(matches!(
            serde_json::from_str::<CircleDoc>(r#"{"moments_re":[1,0],"moments_im":[0,0]}"#).unwrap(),
            CircleDoc::Moments(_)
        ));
    }
}
