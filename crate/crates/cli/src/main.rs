use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kphoton::poly::{parse_rational, Rational};
use kphoton::Error;
use num_traits::ToPrimitive;

mod render;

#[derive(Parser, Debug)]
#[command(name = "rabi", version, about = "Exponent analysis and truncated-Fock numerics for the k-photon Rabi model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal-ordering coefficients a_j of (z∂)^k
    Coeffs {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Reduced operator of the first spinor component, normal ordered
    Ode {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Variant::Published)]
        variant: Variant,
        #[command(flatten)]
        out: Output,
    },
    /// Asymptotic branches (γ, β, ρ, c_n) at infinity
    Exponents {
        #[arg(long)]
        k: u32,
        /// Ansatz depth; levels beyond 5 feed the tail coefficients
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Self-adjointness verdict with its trace digest
    Verdict {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "1")]
        omega: String,
        #[arg(long, default_value = "0")]
        delta: String,
        /// Also write the hashed trace document here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Generating-function coefficients checked against brute force
    Gf {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Lowest eigenvalues of the truncated Rabi Hamiltonian across N
    Sweep {
        #[command(flatten)]
        model: Model,
        /// Comma-separated, strictly increasing truncation sizes
        #[arg(long = "n-list", value_delimiter = ',', default_values_t = [100usize, 200, 400, 800])]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = kphoton::fock::DEFAULT_M)]
        m: usize,
        #[arg(long, default_value_t = kphoton::fock::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form Jaynes–Cummings spectrum
    JcExact {
        #[command(flatten)]
        model: Model,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// Published convention, carrying ωk z^{k−1}
    Published,
    /// Direct elimination (A − B)(A + B) − Δ²
    Elimination,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here (atomically) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Model {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    g: String,
    #[arg(long, default_value = "1")]
    omega: String,
    #[arg(long, default_value = "0")]
    delta: String,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_solver_failure() { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn exact(name: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| usage(format!("--{name}: {e}")))
}

/// Decimal or `p/q`.
fn real(name: &str, s: &str) -> Result<f64, Failure> {
    let v = if s.contains('/') {
        exact(name, s)?.to_f64().unwrap_or(f64::NAN)
    } else {
        s.trim().parse::<f64>().map_err(|_| usage(format!("--{name}: `{s}` is not a number")))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{name}: `{s}` is not finite")))
    }
}

fn model(m: &Model) -> Result<kphoton::fock::ModelParams, Failure> {
    let params = kphoton::fock::ModelParams::new(m.k, real("g", &m.g)?, real("omega", &m.omega)?, real("delta", &m.delta)?)?;
    Ok(params)
}

fn only(format: Option<Format>, allowed: &[Format], default: Format) -> Result<Format, Failure> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!("format {f:?} is not available for this subcommand")))
    }
}

fn write_atomically(path: &Path, body: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { code: 1, message: format!("{}: {e}", path.display()) };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &Output, body: String) -> Result<(), Failure> {
    match &out.out {
        Some(path) => write_atomically(path, &body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure { code: 1, message: e.to_string() })
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RABI_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("RABI_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    use Format::*;
    match cli.command {
        Command::Coeffs { k, out } => {
            let f = only(out.format, &[Text, Json], Text)?;
            emit(&out, render::coeffs(k, f == Json)?)
        }
        Command::Ode { k, variant, out } => {
            let f = only(out.format, &[Text, Json], Text)?;
            emit(&out, render::ode(k, variant == Variant::Elimination, f == Json)?)
        }
        Command::Exponents { k, depth, out } => {
            let f = only(out.format, &[Text, Json], Text)?;
            emit(&out, render::exponents(k, depth, f == Json)?)
        }
        Command::Verdict { k, omega, delta, trace, out } => {
            let f = only(out.format, &[Text, Json], Text)?;
            let (omega, delta) = (exact("omega", &omega)?, exact("delta", &delta)?);
            let report = kphoton::verdict::verdict(k, &omega, &delta)?;
            if let Some(path) = trace {
                write_atomically(&path, &report.trace_json())?;
            }
            emit(&out, render::verdict(&report, f == Json))
        }
        Command::Gf { k, out } => {
            let f = only(out.format, &[Text, Json], Text)?;
            let (body, agree) = render::gf(k, f == Json)?;
            emit(&out, body)?;
            if agree {
                Ok(())
            } else {
                Err(Failure { code: 3, message: "closed forms disagree with the oracle".into() })
            }
        }
        Command::Sweep { model: m, n_list, m: count, tol, out } => {
            let f = only(out.format, &[Csv, Json], Csv)?;
            configure_threads()?;
            let params = model(&m)?;
            let sweep = kphoton::fock::convergence_sweep(&params, &n_list, count, tol)?;
            let body = match f {
                Json => render::pretty(&sweep.summary_json()),
                _ => sweep.to_csv(),
            };
            emit(&out, body)
        }
        Command::JcExact { model: m, n_max, out } => {
            let f = only(out.format, &[Text, Json, Csv], Text)?;
            let params = model(&m)?;
            emit(&out, render::jc_exact(&params, n_max, f)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rabi: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
