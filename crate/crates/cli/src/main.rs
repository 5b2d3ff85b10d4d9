//! `pfcs`: build, certify, and run experiments on deterministic partial
//! Fourier sensing matrices.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 certification failure,
//! 3 numerical non-convergence.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use pfcs_core::charsum::{write_reports_csv, KatzSums};
use pfcs_core::field::{parse_coeffs, FieldParams};
use pfcs_core::index::{build_amub, build_full, build_quotient, AmubPartition, IndexSet, Variant};
use pfcs_core::matrix::{certify_amub, SensingMatrix, BRUTEFORCE_CAP};
use pfcs_core::record::Record;
use pfcs_core::recovery::{run_success_sweep, write_sweep_csv, Arm, ExperimentConfig};
use pfcs_core::spectral::{run_eig_sweep, write_eig_csv};

use output::Outputs;

const EXIT_CERT_FAIL: u8 = 2;
const EXIT_NON_CONVERGED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pfcs",
    version,
    about = "Deterministic partial Fourier sensing matrices from finite-field character sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Full,
    Quotient,
    Amub,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum What {
    Katz,
    Quadratic,
    Coherence,
    Amub,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct an index set and write it with its compact matrix record.
    Build {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long)]
        n: u32,
        /// Quotient exponent: N = (q^n − 1)/(p^b − 1). Required for --variant quotient.
        #[arg(long)]
        b: Option<u32>,
        /// Monic modulus of degree a·n, coefficients constant term first (e.g. 2,0,1).
        #[arg(long)]
        modulus: Option<String>,
        /// Generator, same coefficient format; defaults to the first primitive root.
        #[arg(long)]
        g: Option<String>,
        /// Shift α; defaults to x.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, value_enum, default_value = "full")]
        variant: VariantArg,
        /// Output prefix; writes PREFIX.indexset.toml, PREFIX.matrix.toml and PREFIX.manifest.toml.
        #[arg(long)]
        out: PathBuf,
        /// Also write the dense matrix as PREFIX.dense.csv.
        #[arg(long)]
        dense: bool,
    },
    /// Run a certification on a compact matrix record.
    Certify {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        /// Report path; defaults to MATRIX with the check name appended.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for sampled character sweeps (only used above the exhaustive cap).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Success-rate sweep driven by a TOML experiment config.
    Recover {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gram eigenvalue statistics driven by a TOML config.
    Eigs {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_samples() -> usize {
    5_000
}

fn default_arms() -> Vec<Arm> {
    vec![Arm::Deterministic, Arm::Random]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EigConfig {
    matrix: PathBuf,
    k_range: [usize; 2],
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_arms")]
    arms: Vec<Arm>,
    seed: u64,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn read_matrix(path: &Path) -> Result<SensingMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let record = Record::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(record.to_matrix()?)
}

/// Paths inside a config are relative to the config file.
fn resolve(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn mu_bound(set: &IndexSet) -> f64 {
    let params = set.params();
    let q = params.q() as f64;
    match set.variant() {
        Variant::Amub => (q.sqrt() + 1.0) / (q + 1.0),
        _ => (f64::from(params.n()) - 1.0) / q.sqrt(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_build(
    args: &[String],
    (p, a, n, b): (u32, u32, u32, Option<u32>),
    modulus: Option<&str>,
    g: Option<&str>,
    alpha: Option<&str>,
    variant: VariantArg,
    out: &Path,
    dense: bool,
) -> Result<u8> {
    match (variant, b) {
        (VariantArg::Quotient, None) => bail!("--variant quotient requires --b"),
        (VariantArg::Full | VariantArg::Amub, Some(_)) => bail!("--b only applies to --variant quotient"),
        _ => {}
    }
    let modulus = modulus.map(parse_coeffs).transpose()?;
    let params = FieldParams::new(p, a, n, modulus.as_deref())?;
    let g = match g {
        Some(text) => params.parse_element(text)?,
        None => params.find_primitive_root()?,
    };
    let alpha = match alpha {
        Some(text) => params.parse_element(text)?,
        None => params.x(),
    };
    let set = match variant {
        VariantArg::Full => build_full(&params, &g, &alpha)?,
        VariantArg::Quotient => build_quotient(&params, &g, &alpha, b.unwrap())?,
        VariantArg::Amub => build_amub(&params, &g, &alpha)?.0,
    };
    let matrix = SensingMatrix::from_index_set(&set);

    let mut outputs = Outputs::new(args, args.join(" ").as_bytes(), None);
    outputs.write(&with_suffix(out, ".indexset.toml"), Record::from_index_set(&set).to_toml().as_bytes())?;
    outputs.write(&with_suffix(out, ".matrix.toml"), Record::from_matrix(&matrix)?.to_toml().as_bytes())?;
    if dense {
        let mut buf = Vec::new();
        matrix.write_dense_csv(&mut buf)?;
        outputs.write(&with_suffix(out, ".dense.csv"), &buf)?;
    }
    outputs.finish(&with_suffix(out, ".manifest.toml"))?;

    println!("field     GF({p}^{}) modulus {}", params.degree(), pfcs_core::field::format_coeffs(params.modulus()));
    println!("g         {g}");
    println!("alpha     {alpha}");
    println!("N         {}", set.ambient());
    println!("m         {}", set.len());
    println!("mu bound  {:.12}", mu_bound(&set));
    Ok(0)
}

#[derive(Serialize)]
struct QuadraticSummary {
    pass: bool,
    characters: u64,
    max_deviation: f64,
    worst_a: u64,
    tolerance: f64,
}

#[derive(Serialize)]
struct CoherenceSummary {
    pass: bool,
    mu: f64,
    argmax_pair: [u64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_fft: Option<f64>,
    welch: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    k_max: u64,
}

#[derive(Serialize)]
struct AmubSummary {
    pass: bool,
    max_block_deviation: f64,
    cross_min: f64,
    cross_max: f64,
    cross_pairs: u64,
    lower: f64,
    upper: f64,
}

fn toml_text<T: Serialize>(v: &T) -> Result<String> {
    Ok(toml::to_string(v)?)
}

fn cmd_certify(args: &[String], path: &Path, what: What, out: Option<PathBuf>, seed: u64) -> Result<u8> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let matrix = read_matrix(path)?;
    let set = matrix.index_set().expect("records always carry an index set").clone();
    let ext = if what == What::Katz { "csv" } else { "toml" };
    let name = format!("{what:?}").to_lowercase();
    let out = out.unwrap_or_else(|| with_suffix(path, &format!(".{name}.{ext}")));

    let (pass, text, summary) = match what {
        What::Katz => {
            let sums = KatzSums::from_index_set(&set)?;
            let cert = sums.certify_bound(seed);
            let mut buf = Vec::new();
            write_reports_csv(&cert.reports, sums.eps(), &mut buf)?;
            let line = format!(
                "max |S(a)| = {:.12} over {} characters ({}), bound {:.12}",
                cert.max_modulus,
                cert.characters,
                if cert.exhaustive { "exhaustive" } else { "sampled" },
                cert.bound
            );
            (cert.pass, String::from_utf8(buf)?, line)
        }
        What::Quadratic => {
            if set.params().n() != 2 {
                bail!("quadratic certification needs n = 2 (this matrix has n = {})", set.params().n());
            }
            let c = KatzSums::from_index_set(&set)?.certify_quadratic()?;
            let line = format!(
                "max deviation {:.3e} over {} characters (tol {:.1e})",
                c.max_deviation, c.characters, c.tolerance
            );
            let s = QuadraticSummary {
                pass: c.pass,
                characters: c.characters,
                max_deviation: c.max_deviation,
                worst_a: c.worst_a,
                tolerance: c.tolerance,
            };
            (c.pass, toml_text(&s)?, line)
        }
        What::Coherence => {
            let n = matrix.n_cols();
            let exact = if n <= BRUTEFORCE_CAP { matrix.coherence_bruteforce()? } else { matrix.coherence_fft()? };
            let mu_fft = if n <= BRUTEFORCE_CAP { Some(matrix.coherence_fft()?.mu) } else { None };
            let pass = exact.mu >= exact.welch - 1e-12 && exact.bound.is_none_or(|b| exact.mu <= b + 1e-9);
            let line = format!(
                "mu = {:.12}, welch = {:.12}, bound = {}, k_max = {}",
                exact.mu,
                exact.welch,
                exact.bound.map_or("none".into(), |b| format!("{b:.12}")),
                exact.k_max
            );
            let s = CoherenceSummary {
                pass,
                mu: exact.mu,
                argmax_pair: [exact.argmax_pair.0, exact.argmax_pair.1],
                mu_fft,
                welch: exact.welch,
                bound: exact.bound,
                k_max: exact.k_max,
            };
            (pass, toml_text(&s)?, line)
        }
        What::Amub => {
            if set.variant() != Variant::Amub {
                bail!("amub certification needs a matrix built with --variant amub (found {})", set.variant().name());
            }
            let r = certify_amub(&matrix, &AmubPartition::new(set.params().q()))?;
            let line = format!(
                "block deviation {:.3e}, cross moduli in [{:.12}, {:.12}] vs [{:.12}, {:.12}]",
                r.max_block_deviation, r.cross_min, r.cross_max, r.lower, r.upper
            );
            let s = AmubSummary {
                pass: r.pass,
                max_block_deviation: r.max_block_deviation,
                cross_min: r.cross_min,
                cross_max: r.cross_max,
                cross_pairs: r.cross_pairs,
                lower: r.lower,
                upper: r.upper,
            };
            (r.pass, toml_text(&s)?, line)
        }
    };
    let mut outputs = Outputs::new(args, &raw, Some(seed));
    outputs.write(&out, text.as_bytes())?;
    outputs.finish(&with_suffix(&out, ".manifest.toml"))?;
    println!("{name}: {} - {summary}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { EXIT_CERT_FAIL })
}

fn parse_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(Vec<u8>, T)> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&raw).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let config = toml::from_str(text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok((raw, config))
}

fn cmd_recover(args: &[String], path: &Path, out: Option<PathBuf>) -> Result<u8> {
    let (raw, config): (_, ExperimentConfig) = parse_config(path)?;
    let matrix_path = config.matrix.as_deref().context("config needs a `matrix` entry")?;
    let matrix = read_matrix(&resolve(path, matrix_path))?;
    let rows = run_success_sweep(&matrix, &config)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    let out = out.unwrap_or_else(|| path.with_extension("sweep.csv"));
    let mut outputs = Outputs::new(args, &raw, Some(config.seed));
    outputs.write(&out, &buf)?;
    outputs.finish(&with_suffix(&out, ".manifest.toml"))?;

    let stalled: usize = rows.iter().map(|r| r.non_converged).sum();
    println!("wrote {} rows to {}", rows.len(), out.display());
    if stalled > 0 {
        eprintln!("warning: {stalled} basis-pursuit runs hit the iteration cap");
        return Ok(EXIT_NON_CONVERGED);
    }
    Ok(0)
}

fn cmd_eigs(args: &[String], path: &Path, out: Option<PathBuf>) -> Result<u8> {
    let (raw, config): (_, EigConfig) = parse_config(path)?;
    let matrix = read_matrix(&resolve(path, &config.matrix))?;
    let rows = run_eig_sweep(&matrix, config.k_range, config.samples, &config.arms, config.seed)?;
    let mut buf = Vec::new();
    write_eig_csv(&rows, &mut buf)?;
    let out = out.unwrap_or_else(|| path.with_extension("eigs.csv"));
    let mut outputs = Outputs::new(args, &raw, Some(config.seed));
    outputs.write(&out, &buf)?;
    outputs.finish(&with_suffix(&out, ".manifest.toml"))?;

    let violations: usize = rows.iter().map(|r| r.envelope_violations).sum();
    println!("wrote {} rows to {}", rows.len(), out.display());
    if violations > 0 {
        eprintln!("warning: {violations} sampled Gram matrices left the Gershgorin envelope");
        return Ok(EXIT_CERT_FAIL);
    }
    Ok(0)
}

fn run(cli: Cli, args: &[String]) -> Result<u8> {
    match cli.command {
        Command::Build { p, a, n, b, modulus, g, alpha, variant, out, dense } => {
            cmd_build(args, (p, a, n, b), modulus.as_deref(), g.as_deref(), alpha.as_deref(), variant, &out, dense)
        }
        Command::Certify { matrix, what, out, seed } => cmd_certify(args, &matrix, what, out, seed),
        Command::Recover { config, out } => cmd_recover(args, &config, out),
        Command::Eigs { config, out } => cmd_eigs(args, &config, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(cli, &args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
