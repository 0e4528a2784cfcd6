mod commands;
mod config;
mod exit;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dioph_core::cylinder::CaseTag;
use dioph_core::records::RecordKind;
use dioph_core::transference::Provenance;

use commands::{NesterenkoArgs, Output, TransferArgs};
use config::{FileConfig, Format, Overrides, RunConfig};
use exit::Failure;

#[derive(Parser, Debug)]
#[command(name = "dioph", version, about = "Certified Diophantine approximation experiments")]
struct Cli {
    /// θ as a spec (`sqrt:2,sqrt:3`) or a corpus name (`plastic`)
    #[arg(long, global = true)]
    theta: Option<String>,
    /// Working precision in bits
    #[arg(long, global = true, env = "DIOPH_PRECISION")]
    precision: Option<u32>,
    /// Enumeration budget in candidate evaluations
    #[arg(long, global = true, env = "DIOPH_BUDGET")]
    budget: Option<u64>,
    /// Fraction of trailing records used by the estimators
    #[arg(long, global = true)]
    tail: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the payload here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write an SVG figure
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// TOML file with any of: theta, precision, budget, tail, format, output, svg
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Sim,
    Lin,
}

impl From<KindArg> for RecordKind {
    fn from(k: KindArg) -> RecordKind {
        match k {
            KindArg::Sim => RecordKind::Sim,
            KindArg::Lin => RecordKind::Lin,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    Case1,
    Case2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProvenanceArg {
    Exact,
    Estimated,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate best-approximation records
    Records {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "T")]
        t: u64,
    },
    /// Estimate regular and uniform exponents from records
    Exponents {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "T")]
        t: Option<u64>,
        /// Record CSV written by `records`
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Evaluate the transference inequalities
    Transfer {
        /// `n:λ,λ̂,ω,ω̂`
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        provenance: ProvenanceArg,
        #[arg(long)]
        sim_records: Option<PathBuf>,
        #[arg(long)]
        lin_records: Option<PathBuf>,
        #[arg(long = "T-sim", default_value_t = 10_000)]
        t_sim: u64,
        #[arg(long = "T-lin", default_value_t = 5_000)]
        t_lin: u64,
    },
    /// Run the empty-cylinder pipeline on a record
    Cylinder {
        /// Record index (0-based, as in the record CSV)
        #[arg(long, default_value_t = 0)]
        record: usize,
        #[arg(long, value_enum, default_value = "case1")]
        case: CaseArg,
        /// Record search bound; grown automatically when omitted
        #[arg(long = "T")]
        t: Option<u64>,
        /// Cross-check by exhaustive enumeration
        #[arg(long)]
        brute: bool,
        /// Every record below the bound
        #[arg(long)]
        all: bool,
    },
    /// Check the Nesterenko hypothesis and its conclusions
    Nesterenko {
        #[arg(long)]
        evidence: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        prop4: bool,
        #[arg(long, default_value = "0.1")]
        eps: String,
        #[arg(long, default_value = "0.01")]
        eps_prime: String,
        #[arg(long, default_value = "1")]
        c3: String,
        /// Angle checks on the lines spanned by SIM records up to this bound
        #[arg(long = "angle-T")]
        angle_t: Option<u64>,
    },
    /// Package LIN records as a Nesterenko evidence file
    Evidence {
        #[arg(long = "T", default_value_t = 2000)]
        t: u64,
    },
    /// The built-in θ corpus
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCmd {
    List,
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        theta: cli.theta,
        precision: cli.precision,
        budget: cli.budget,
        tail: cli.tail,
        format: cli.format,
        output: cli.output,
        svg: cli.svg,
    };
    let cfg = RunConfig::resolve(flags, file)?;
    let out = match cli.cmd {
        Cmd::Records { kind, t } => commands::records(&cfg, kind.into(), t)?,
        Cmd::Exponents { kind, t, records } => commands::exponents(&cfg, kind.into(), t, records.as_deref())?,
        Cmd::Transfer { tuple, provenance, sim_records, lin_records, t_sim, t_lin } => commands::transfer(
            &cfg,
            TransferArgs {
                tuple: tuple.as_deref(),
                provenance: match provenance {
                    ProvenanceArg::Exact => Provenance::ExactInput,
                    ProvenanceArg::Estimated => Provenance::Estimated,
                },
                sim_records: sim_records.as_deref(),
                lin_records: lin_records.as_deref(),
                t_sim,
                t_lin,
            },
        )?,
        Cmd::Cylinder { record, case, t, brute, all } => {
            let case = match case {
                CaseArg::Case1 => CaseTag::Case1,
                CaseArg::Case2 => CaseTag::Case2,
            };
            commands::cylinder(&cfg, record, case, t, brute, all)?
        }
        Cmd::Nesterenko { evidence, d, prop4, eps, eps_prime, c3, angle_t } => commands::nesterenko(
            &cfg,
            NesterenkoArgs { evidence: &evidence, d, prop4, eps: &eps, eps_prime: &eps_prime, c3: &c3, angle_t },
        )?,
        Cmd::Evidence { t } => commands::evidence(&cfg, t)?,
        Cmd::Corpus { cmd: CorpusCmd::List } => commands::corpus_list(&cfg),
    };
    emit(&cfg, out)
}

fn emit(cfg: &RunConfig, out: Output) -> Result<Output, Failure> {
    let write = |path: &PathBuf, data: &str| {
        std::fs::write(path, data).map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display())))
    };
    match &cfg.output {
        Some(p) => write(p, &out.body)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(out.body.as_bytes()).and_then(|_| so.flush()).map_err(|e| Failure::data(e.to_string()))?;
        }
    }
    match (&cfg.svg, &out.svg) {
        (Some(p), Some(s)) => write(p, s)?,
        (Some(_), None) => eprintln!("note: this command draws no figure; --svg ignored"),
        _ => {}
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
