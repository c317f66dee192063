use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tanner_core::channel::{parse_llr_file, write_llr_file};
use tanner_core::cover::{check_cover_optimality_with, cover_of_kind, CoverKind};
use tanner_core::harness::{derive_seed, write_csv, write_outputs};
use tanner_core::lab::depth_mass;
use tanner_core::{
    certify_with, generate_code, lp_decode, ml_decode, parse_code, run_experiment, transmit,
    verify_codeword_expectation, verify_itree_expectation, verify_prefix_decomposition, write_code,
    Assignment, CertifyOptions, ChannelSpec, ExactLlr, ExperimentConfig, GeneratorSpec, LlrVector,
    OmegaSchedule, Scalar, TannerCode,
};

#[derive(Parser)]
#[command(
    name = "tanner-cert",
    version,
    about = "Local-optimality certificates for generalized Tanner codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide (h, ω, i)-local optimality of a codeword.
    Certify(CertifyArgs),
    /// Exhaustive maximum-likelihood decoding.
    MlDecode(DecodeArgs),
    /// Exact LP decoding over the fundamental polytope.
    LpDecode(DecodeArgs),
    /// Check one of the decomposition identities exactly.
    VerifyLemma(LemmaArgs),
    /// Compare certificates on a code and on random M-covers.
    CoverCheck(CoverArgs),
    /// Run a Monte Carlo experiment from a config file.
    Run(RunArgs),
    /// Sample an LLR vector for a codeword.
    Transmit(TransmitArgs),
    /// Generate a random code.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Code file.
    #[arg(long)]
    code: PathBuf,
    /// Codeword as a bitstring; all-zero when omitted.
    #[arg(long, visible_alias = "x")]
    codeword: Option<String>,
}

impl CodeArgs {
    fn load(&self) -> Result<(TannerCode, Assignment)> {
        let code = load_code(&self.code)?;
        let x = match &self.codeword {
            Some(bits) => Assignment::parse(bits)?,
            None => Assignment::zeros(code.num_vars()),
        };
        Ok((code, x))
    }
}

#[derive(Args)]
struct LlrArgs {
    /// LLR file, one rational per line.
    #[arg(long, conflicts_with = "channel")]
    llr: Option<PathBuf>,
    /// Channel to sample from, e.g. `bsc:p=0.1` or `awgn:sigma=0.8`.
    #[arg(long)]
    channel: Option<String>,
    /// LLRs are rounded to multiples of 1/D.
    #[arg(long, default_value_t = 1_000_000)]
    quant_denom: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl LlrArgs {
    fn load(&self, code: &TannerCode, x: &Assignment) -> Result<ExactLlr> {
        match (&self.llr, &self.channel) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_llr_file(&text)?)
            }
            (None, Some(channel)) => {
                let spec = ChannelSpec::parse(channel, self.quant_denom)?;
                Ok(transmit(code, x, &spec, self.seed)?)
            }
            (None, None) => bail!("either --llr or --channel is required"),
        }
    }
}

#[derive(Args)]
struct TreeArgs {
    /// Half the tree height.
    #[arg(long, default_value_t = 1)]
    h: usize,
    /// `uniform:c`, `geometric:ρ` or a comma-separated list.
    #[arg(long, default_value = "uniform:1")]
    omega: String,
    #[arg(long, default_value_t = 2)]
    i: usize,
}

impl TreeArgs {
    fn omega(&self) -> Result<Vec<tanner_core::Rational>> {
        Ok(OmegaSchedule::parse(&self.omega)?.weights(self.h)?)
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    llr: LlrArgs,
    #[command(flatten)]
    tree: TreeArgs,
    /// Use f64 arithmetic instead of exact rationals.
    #[arg(long)]
    float: bool,
    /// Skip reconstruction of the minimizing tree.
    #[arg(long)]
    no_witness: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    llr: LlrArgs,
}

#[derive(Args)]
struct LemmaArgs {
    /// 2: codeword expectation, 3: prefix decomposition, 4: i-tree expectation.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
    which: u8,
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    tree: TreeArgs,
    /// Root variable for the i-tree expectation; defaults to the first
    /// support variable.
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    llr: LlrArgs,
    #[command(flatten)]
    tree: TreeArgs,
    /// Cover degree.
    #[arg(long = "M", short = 'M', default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// `random` or `cyclic`.
    #[arg(long, default_value = "random")]
    kind: CoverKind,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the CSV path from the config.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Overrides the JSON path from the config.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct TransmitArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    channel: String,
    #[arg(long, default_value_t = 1_000_000)]
    quant_denom: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// `regular:dv=2,dc=3,n=9` or `irregular:n=14,codes=hamming7*4`.
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_code(path: &Path) -> Result<TannerCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_code(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn print_json(value: &Value) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"), None)
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn certify_cmd(args: &CertifyArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let llr = args.llr.load(&code, &x)?;
    let omega = args.tree.omega()?;
    let options = CertifyOptions {
        witness: !args.no_witness,
        ..CertifyOptions::default()
    };
    let (report, certified) = if args.float {
        let llr = LlrVector::from_values(llr.values().iter().map(Scalar::to_f64).collect())?;
        let omega: Vec<f64> = omega.iter().map(Scalar::to_f64).collect();
        let report = certify_with(&code, &x, &llr, args.tree.h, &omega, args.tree.i, options)?;
        (report.to_json(), report.certified)
    } else {
        let report = certify_with(&code, &x, &llr, args.tree.h, &omega, args.tree.i, options)?;
        (report.to_json(), report.certified)
    };
    print_json(&report)?;
    Ok(verdict(certified))
}

fn ml_cmd(args: &DecodeArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let llr = args.llr.load(&code, &x)?;
    print_json(&ml_decode(&code, &llr)?.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn lp_cmd(args: &DecodeArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let llr = args.llr.load(&code, &x)?;
    print_json(&lp_decode(&code, &llr)?.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn lemma_cmd(args: &LemmaArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let omega = args.tree.omega()?;
    let h = args.tree.h;
    let report = match args.which {
        2 => verify_codeword_expectation(&code, &x, h, args.tree.i, &omega)?,
        3 => verify_prefix_decomposition(&code, &x, h, &omega)?,
        _ => {
            let graph = if x.weight() > 0 {
                code.induced_support_graph(&x)?
            } else {
                code.graph().clone()
            };
            let root = match args.root {
                Some(r) => r,
                None => *x.support().first().unwrap_or(&0),
            };
            verify_itree_expectation(&graph, root, h, args.tree.i, &omega)?
        }
    };
    let mut value = report.to_json();
    if args.which == 3 {
        let mass = depth_mass(&code, &x, h)?;
        value["depth_mass"] = json!(mass
            .iter()
            .map(|level| level
                .iter()
                .map(Scalar::to_exact_string)
                .collect::<Vec<_>>())
            .collect::<Vec<_>>());
    }
    print_json(&value)?;
    Ok(verdict(report.pass))
}

fn cover_cmd(args: &CoverArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let llr = args.llr.load(&code, &x)?;
    let omega = args.tree.omega()?;
    let mut log = Vec::with_capacity(args.trials);
    let mut violations = 0;
    for trial in 0..args.trials {
        let seed = derive_seed(args.llr.seed, 4, trial as u64);
        let cover = cover_of_kind(&code, args.m, args.kind, seed)?;
        let report = check_cover_optimality_with(
            &code,
            &x,
            &llr,
            args.tree.h,
            &omega,
            args.tree.i,
            &cover,
            seed,
        )?;
        violations += usize::from(report.violation);
        let mut entry = report.to_json();
        entry["trial"] = json!(trial);
        log.push(entry);
    }
    print_json(&json!({ "kind": args.kind.to_string(), "violations": violations, "trials": log }))?;
    Ok(verdict(violations == 0))
}

fn run_cmd(args: &RunArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let mut config = ExperimentConfig::parse(&text, base)?;
    if args.csv.is_some() {
        config.csv = args.csv.clone();
    }
    if args.json.is_some() {
        config.json = args.json.clone();
    }
    let experiment = run_experiment(&config)?;
    write_outputs(&config, &experiment)?;
    if config.csv.is_none() && config.json.is_none() {
        write_csv(&experiment.records, std::io::stdout().lock())?;
    }
    let summary = &experiment.summary;
    eprintln!("{}", serde_json::to_string(summary)?);
    Ok(verdict(!summary.has_violations()))
}

fn transmit_cmd(args: &TransmitArgs) -> Result<ExitCode> {
    let (code, x) = args.code.load()?;
    let spec = ChannelSpec::parse(&args.channel, args.quant_denom)?;
    let llr: ExactLlr = transmit(&code, &x, &spec, args.seed)?;
    emit(&write_llr_file(&llr), args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn generate_cmd(args: &GenerateArgs) -> Result<ExitCode> {
    let spec = GeneratorSpec::parse(&args.spec)?;
    let code = generate_code(&spec, args.seed)?;
    emit(&write_code(&code), args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Certify(a) => certify_cmd(a),
        Command::MlDecode(a) => ml_cmd(a),
        Command::LpDecode(a) => lp_cmd(a),
        Command::VerifyLemma(a) => lemma_cmd(a),
        Command::CoverCheck(a) => cover_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Transmit(a) => transmit_cmd(a),
        Command::Generate(a) => generate_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
