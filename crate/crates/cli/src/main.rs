//! `cpdcert` command line.
//!
//! Exit codes: 0 unique CPD (or success), 1 input error or failed example
//! check, 2 one factor unique, 3 inconclusive or no witness, 4 necessary
//! condition violated.

mod doc;
mod matfile;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpdcert::certify::{certify, certify_sfs, CertifyOptions, RoleMode, Tier};
use cpdcert::generic::{
    generic_unique_cpd, generic_unique_sfs, make_table, max_generic_rank, GenericMode, GenericVerdict, SamplerKind,
    TableKind, TableOptions, DEFAULT_TRIALS,
};
use cpdcert::linalg::{Mat, Mode, Scalar};
use cpdcert::suite::{run_all, run_example, SuiteOptions, EXAMPLES};
use cpdcert::tensor::{FactorTriple, Role};

use crate::doc::CertificateDocument;

#[derive(Parser)]
#[command(name = "cpdcert", version, about = "Certify uniqueness of CP decompositions of third-order tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the CPD given by factor matrices A, B, C.
    Check {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        #[command(flatten)]
        common: CheckArgs,
    },
    /// Certify [A, A, C], a tensor with symmetric frontal slices.
    CheckSfs {
        a: PathBuf,
        c: PathBuf,
        #[command(flatten)]
        common: CheckArgs,
    },
    /// Test generic uniqueness at one rank, or find the largest certified rank.
    Generic(GenericArgs),
    /// Regenerate a generic-uniqueness table.
    Tables(TablesArgs),
    /// Run the built-in worked examples.
    Examples(ExamplesArgs),
    /// Print a matrix file in canonical form.
    Fmt { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ArithArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum RolesArg {
    All,
    Fixed,
}

#[derive(Args)]
struct CheckArgs {
    /// Arithmetic; defaults to float when any input has a decimal entry.
    #[arg(long, value_enum)]
    mode: Option<ArithArg>,
    /// Relative rank tolerance for float mode.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "all")]
    roles: RolesArg,
    /// Write the certificate document (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Dense,
    Toeplitz,
    Hankel,
    /// A = B, symmetric frontal slices; needs I = J.
    Sfs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenericModeArg {
    Exact,
    Float,
    Auto,
}

impl From<GenericModeArg> for GenericMode {
    fn from(m: GenericModeArg) -> Self {
        match m {
            GenericModeArg::Exact => GenericMode::Exact,
            GenericModeArg::Float => GenericMode::Float,
            GenericModeArg::Auto => GenericMode::Auto,
        }
    }
}

#[derive(Args)]
struct GenericArgs {
    #[arg(long, num_args = 3, value_names = ["I", "J", "K"], required = true)]
    dims: Vec<usize>,
    #[arg(long, conflicts_with = "max_rank", required_unless_present = "max_rank")]
    rank: Option<usize>,
    #[arg(long)]
    max_rank: bool,
    #[arg(long, value_enum, default_value = "dense")]
    sampler: SamplerArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    mode: GenericModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Umwm,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum)]
    which: WhichArg,
    /// Index ranges such as `I=4..5` or `K=2..10`; repeatable.
    #[arg(long)]
    range: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    out: FormatArg,
    /// Write the table here instead of stdout.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    mode: GenericModeArg,
}

#[derive(Args)]
struct ExamplesArgs {
    #[arg(long)]
    only: Option<String>,
    /// Parameter of the alpha-family (integer or p/q, nonzero).
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Perturb the sharpness-family factors; those checks should then fail.
    #[arg(long)]
    tamper: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}:{source}")]
    Parse { path: String, source: matfile::ParseError },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Input(String),
}

fn exit_code(tier: Tier) -> u8 {
    match tier {
        Tier::UniqueCpd => 0,
        Tier::ThirdFactorUnique(_) => 2,
        Tier::Inconclusive => 3,
        Tier::NecessaryViolated => 4,
    }
}

fn read_matrix(path: &Path) -> Result<(matfile::MatrixFile, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let file = matfile::parse(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
    Ok((file, text))
}

/// Reads the factor files and settles the arithmetic for the whole run.
fn load(paths: &[&Path], mode: Option<ArithArg>) -> Result<(Vec<Mat>, String), CliError> {
    let mut mats = Vec::new();
    let mut texts = Vec::new();
    for p in paths {
        let (f, text) = read_matrix(p)?;
        mats.push(f.mat);
        texts.push(text);
    }
    let has_float = mats.iter().any(|m| m.mode() == Mode::Float);
    let float = match mode {
        Some(ArithArg::Exact) if has_float => {
            return Err(CliError::Input("--mode exact given but an input has decimal entries".into()))
        }
        Some(ArithArg::Exact) => false,
        Some(ArithArg::Float) => true,
        None => has_float,
    };
    if float {
        mats = mats.iter().map(Mat::to_float).collect();
    }
    Ok((mats, doc::digest(&texts)))
}

fn options(args: &CheckArgs) -> CertifyOptions {
    CertifyOptions {
        roles: match args.roles {
            RolesArg::All => RoleMode::All,
            RolesArg::Fixed => RoleMode::Fixed,
        },
    }
}

fn finish_check(doc: CertificateDocument, out: Option<&Path>) -> Result<u8, CliError> {
    print!("{}", doc.summary);
    if let Some(path) = out {
        std::fs::write(path, doc.to_json()).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    }
    Ok(exit_code(doc.certificate.conclusion))
}

fn cmd_check(a: &Path, b: &Path, c: &Path, args: &CheckArgs) -> Result<u8, CliError> {
    let (mut mats, digest) = load(&[a, b, c], args.mode)?;
    let cm = mats.pop().expect("three inputs");
    let bm = mats.pop().expect("three inputs");
    let am = mats.pop().expect("three inputs");
    let f = FactorTriple::new(am, bm, cm).map_err(|e| CliError::Input(e.to_string()))?;
    let cert = certify(&f, args.tol, options(args)).map_err(|e| CliError::Input(e.to_string()))?;
    finish_check(CertificateDocument::new(digest, cert), args.out.as_deref())
}

fn cmd_check_sfs(a: &Path, c: &Path, args: &CheckArgs) -> Result<u8, CliError> {
    let (mats, digest) = load(&[a, c], args.mode)?;
    let cert = certify_sfs(&mats[0], &mats[1], args.tol, options(args)).map_err(|e| CliError::Input(e.to_string()))?;
    finish_check(CertificateDocument::new(digest, cert), args.out.as_deref())
}

fn describe(v: &GenericVerdict) -> String {
    format!(
        "R = {}: witness via ({}) at m = {}, {} x {} product, {}, seed {}",
        v.r,
        v.condition,
        v.m,
        v.rows,
        v.cols,
        if v.exact { "exact" } else { "float only, not a proof" },
        v.seed
    )
}

fn cmd_generic(args: &GenericArgs) -> Result<u8, CliError> {
    let dims = [args.dims[0], args.dims[1], args.dims[2]];
    let mode = GenericMode::from(args.mode);
    let kinds = match args.sampler {
        SamplerArg::Dense => [SamplerKind::Dense, SamplerKind::Dense, SamplerKind::Dense],
        SamplerArg::Toeplitz => [SamplerKind::Toeplitz, SamplerKind::Toeplitz, SamplerKind::Toeplitz],
        SamplerArg::Hankel => [SamplerKind::Hankel, SamplerKind::Hankel, SamplerKind::Hankel],
        SamplerArg::Sfs if dims[0] != dims[1] => return Err(CliError::Input("--sampler sfs needs I = J".into())),
        SamplerArg::Sfs => [SamplerKind::Dense, SamplerKind::Sfs(Role::A), SamplerKind::Dense],
    };
    let gen_err = |e: cpdcert::generic::GenericError| CliError::Input(e.to_string());
    let verdict = match (args.rank, args.sampler) {
        (Some(r), SamplerArg::Sfs) => generic_unique_sfs(dims[0], dims[2], r, args.trials, args.seed, mode),
        (Some(r), _) => generic_unique_cpd(dims, r, &kinds, args.trials, args.seed, mode),
        (None, SamplerArg::Sfs) => {
            let mut best = None;
            for r in 1..=dims.iter().sum() {
                if let Some(v) = generic_unique_sfs(dims[0], dims[2], r, args.trials, args.seed, mode).map_err(gen_err)? {
                    best = Some(v);
                }
            }
            Ok(best)
        }
        (None, _) => max_generic_rank(dims, &kinds, args.trials, args.seed, mode),
    }
    .map_err(gen_err)?;
    let [i, j, k] = dims;
    match verdict {
        Some(v) => {
            println!("{i} x {j} x {k}: {}", describe(&v));
            if args.max_rank {
                println!("max rank {}", v.r);
            }
            Ok(0)
        }
        None => {
            println!("{i} x {j} x {k}: no witness found");
            Ok(3)
        }
    }
}

fn parse_range(s: &str) -> Result<(char, (usize, usize)), CliError> {
    let bad = || CliError::Input(format!("bad range '{s}', expected e.g. I=4..5"));
    let (key, span) = s.split_once('=').ok_or_else(bad)?;
    let key = match key.trim() {
        "I" | "i" => 'I',
        "K" | "k" => 'K',
        _ => return Err(bad()),
    };
    let (lo, hi) = span.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    Ok((key, (lo, hi)))
}

fn cmd_tables(args: &TablesArgs) -> Result<u8, CliError> {
    let mut opts =
        TableOptions { trials: args.trials, seed: args.seed, mode: args.mode.into(), ..TableOptions::default() };
    let which = match args.which {
        WhichArg::Two => TableKind::Two,
        WhichArg::Three => {
            opts.i_range = (4, 5);
            TableKind::Three
        }
        WhichArg::Umwm => {
            opts.i_range = (1, usize::MAX);
            TableKind::UmWm
        }
    };
    for r in &args.range {
        match parse_range(r)? {
            ('I', span) => opts.i_range = span,
            (_, span) => opts.k_range = span,
        }
    }
    let table = make_table(which, &opts).map_err(|e| CliError::Input(e.to_string()))?;
    let text = match args.out {
        FormatArg::Csv => table.to_csv(),
        FormatArg::Text => table.to_text(),
    };
    match &args.file {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_examples(args: &ExamplesArgs) -> Result<u8, CliError> {
    let alpha = match args.alpha.parse::<Scalar>() {
        Ok(Scalar::Exact(q)) => q,
        _ => return Err(CliError::Input(format!("--alpha must be an integer or p/q, got '{}'", args.alpha))),
    };
    let opts = SuiteOptions { alpha, tamper: args.tamper, seed: args.seed };
    let checks = match &args.only {
        Some(name) if !EXAMPLES.contains(&name.as_str()) => {
            return Err(CliError::Input(format!("unknown example '{name}'; known: {}", EXAMPLES.join(", "))))
        }
        Some(name) => run_example(name, &opts),
        None => run_all(&opts),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        failed += usize::from(!c.passed);
        if c.detail.is_empty() {
            println!("{status}  {}: {}", c.example, c.name);
        } else {
            println!("{status}  {}: {} [{}]", c.example, c.name, c.detail);
        }
    }
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { a, b, c, common } => cmd_check(a, b, c, common),
        Command::CheckSfs { a, c, common } => cmd_check_sfs(a, c, common),
        Command::Generic(args) => cmd_generic(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Examples(args) => cmd_examples(args),
        Command::Fmt { path } => read_matrix(path).map(|(f, _)| {
            print!("{}", matfile::write(&f));
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_cover_every_tier() {
        assert_eq!(exit_code(Tier::UniqueCpd), 0);
        assert_eq!(exit_code(Tier::ThirdFactorUnique(Role::C)), 2);
        assert_eq!(exit_code(Tier::Inconclusive), 3);
        assert_eq!(exit_code(Tier::NecessaryViolated), 4);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("I=4..5").unwrap(), ('I', (4, 5)));
        assert_eq!(parse_range("K=2..=10").unwrap(), ('K', (2, 10)));
        assert!(parse_range("J=1..2").is_err());
        assert!(parse_range("I=4").is_err());
    }
}
