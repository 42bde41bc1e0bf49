use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use synergist::decomposition::{decompose, shared_bit_fixture, DecompositionConfig};
use synergist::experiments::{cmd_fig2, cmd_fig3, cmd_fig4, ExperimentReport, ResilienceConfig, SrvExperimentConfig};
use synergist::info::{cond_mutual_info, entropy, mutual_info};
use synergist::oracle::three_bit_msrv_census;
use synergist::srv::{find_osrv_sequence, find_srv, SearchConfig};
use synergist::synergy::{estimate_synergy, srv_upper_bound, whole_minus_sum};
use synergist::JointPmf;

#[derive(Parser)]
#[command(name = "synergist", version, about = "Synergistic information between discrete random variables")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with settings for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Xor,
    Mod3,
    Wxy,
    ThreeBit,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a distribution: random, or a named fixture.
    Gen {
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, value_enum, conflicts_with_all = ["vars", "states"])]
        fixture: Option<Fixture>,
    },
    /// Entropies and (conditional) mutual information of a distribution.
    Measure {
        /// Distribution file; stdin when absent.
        #[arg(long)]
        pmf: Option<PathBuf>,
        /// H(vars), e.g. `0,1`.
        #[arg(long)]
        entropy: Vec<String>,
        /// I(a : b), e.g. `0,1:2`.
        #[arg(long)]
        mi: Vec<String>,
        /// I(a : b | c), e.g. `0:1|2`.
        #[arg(long)]
        cmi: Vec<String>,
    },
    /// Search one SRV (or an orthogonal sequence) of the inputs.
    FindSrv {
        #[arg(long)]
        pmf: Option<PathBuf>,
        #[arg(long, default_value = "0,1")]
        inputs: String,
        #[arg(long)]
        sequence: bool,
    },
    /// Estimate the synergistic information of the inputs about a target.
    Synergy {
        #[arg(long)]
        pmf: Option<PathBuf>,
        #[arg(long, default_value = "0,1")]
        inputs: String,
        /// Target variables, or `append-redundant` for a fresh random
        /// deterministic function of the inputs.
        #[arg(long)]
        target: String,
    },
    /// Decompose B relative to A into orthogonal and parallel parts.
    Decompose {
        /// Distribution file; the (W,X)/(W,Y) fixture when absent.
        #[arg(long)]
        pmf: Option<PathBuf>,
        #[arg(long, default_value = "0,1")]
        a: String,
        #[arg(long, default_value = "2,3")]
        b: String,
    },
    /// SRV success rate and relative error per number of states.
    Fig2 {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        states: Option<String>,
    },
    /// Information of a single SRV relative to its upper bound.
    Fig3 {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        states: Option<String>,
    },
    /// Resilience of random versus SRV outputs to perturbations.
    Fig4 {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        norm: Option<f64>,
        #[arg(long)]
        states: Option<usize>,
    },
    /// Deterministic SRV census of three independent bits.
    OracleCensus {
        #[arg(long, default_value_t = 2)]
        max_out: usize,
    },
}

enum Failure {
    Usage(String),
    Domain(synergist::Error),
}

impl From<synergist::Error> for Failure {
    fn from(e: synergist::Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_vars(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad variable index {t:?} in {text:?}"))))
        .collect()
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| usage(format!("bad {what} {t:?}"))))
        .collect()
}

fn load_pmf(path: Option<&Path>) -> CliResult<JointPmf> {
    match path {
        Some(p) => Ok(JointPmf::load(p)?),
        None => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text).map_err(synergist::Error::from)?;
            Ok(JointPmf::from_json(&text)?)
        }
    }
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(synergist::Error::from)?;
            serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn json_only(cli: &Cli, what: &str) -> CliResult<()> {
    if cli.format == Format::Csv {
        return Err(usage(format!("{what} has no CSV output; use --format json")));
    }
    Ok(())
}

fn fixture(f: Fixture) -> synergist::Result<JointPmf> {
    match f {
        Fixture::Xor => JointPmf::uniform(&[2, 2])?.append_redundant(2, |s| s[0] ^ s[1]),
        Fixture::Mod3 => JointPmf::uniform(&[3, 3])?.append_redundant(3, |s| (s[0] + s[1]) % 3),
        Fixture::Wxy => Ok(shared_bit_fixture()),
        Fixture::ThreeBit => JointPmf::uniform(&[2, 2, 2]),
    }
}

fn report_output(cli: &Cli, report: &ExperimentReport) -> String {
    match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let seed = cli.seed;
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Gen { vars, states, fixture: fx } => {
            let pmf = match fx {
                Some(f) => fixture(*f)?,
                None => {
                    if *vars == 0 {
                        return Err(usage("--vars must be positive"));
                    }
                    JointPmf::random(&vec![*states; *vars], seed.unwrap_or(0))?
                }
            };
            Ok(match cli.format {
                Format::Csv => pmf.to_csv(),
                Format::Json => pmf.to_json() + "\n",
            })
        }
        Command::Measure { pmf, entropy: hs, mi, cmi } => {
            let pmf = load_pmf(pmf.as_deref())?;
            let mut rows: Vec<(String, f64)> = Vec::new();
            for spec in hs {
                rows.push((format!("H({spec})"), entropy(&pmf, &parse_vars(spec)?)?));
            }
            for spec in mi {
                let (a, b) = spec.split_once(':').ok_or_else(|| usage(format!("--mi expects a:b, got {spec:?}")))?;
                rows.push((format!("I({a}:{b})"), mutual_info(&pmf, &parse_vars(a)?, &parse_vars(b)?)?));
            }
            for spec in cmi {
                let (ab, c) = spec.split_once('|').ok_or_else(|| usage(format!("--cmi expects a:b|c, got {spec:?}")))?;
                let (a, b) = ab.split_once(':').ok_or_else(|| usage(format!("--cmi expects a:b|c, got {spec:?}")))?;
                let v = cond_mutual_info(&pmf, &parse_vars(a)?, &parse_vars(b)?, &parse_vars(c)?)?;
                rows.push((format!("I({a}:{b}|{c})"), v));
            }
            if rows.is_empty() {
                return Err(usage("measure needs at least one of --entropy, --mi, --cmi"));
            }
            Ok(match cli.format {
                Format::Csv => {
                    let mut out = String::from("quantity,bits\n");
                    for (k, v) in &rows {
                        out.push_str(&format!("\"{k}\",{v:.15}\n"));
                    }
                    out
                }
                Format::Json => json(&rows.into_iter().map(|(k, v)| (k, v.into())).collect::<serde_json::Map<_, _>>()),
            })
        }
        Command::FindSrv { pmf, inputs, sequence } => {
            json_only(cli, "find-srv")?;
            let pmf = load_pmf(pmf.as_deref())?;
            let inputs = parse_vars(inputs)?;
            let mut search: SearchConfig = load_config(config)?;
            if let Some(s) = seed {
                search.seed = s;
            }
            if *sequence {
                let seq = find_osrv_sequence(&pmf, &inputs, &search)?;
                Ok(json(&serde_json::json!({
                    "inputs": seq.inputs,
                    "srv_indices": seq.srv_indices,
                    "srvs": seq.srvs,
                    "upper_bound": srv_upper_bound(&pmf, &inputs)?,
                })))
            } else {
                let found = find_srv(&pmf, &inputs, &search)?;
                let mut value = serde_json::to_value(&found).map_err(synergist::Error::from)?;
                value["upper_bound"] = srv_upper_bound(&pmf, &inputs)?.into();
                Ok(json(&value))
            }
        }
        Command::Synergy { pmf, inputs, target } => {
            json_only(cli, "synergy")?;
            let mut pmf = load_pmf(pmf.as_deref())?;
            let inputs = parse_vars(inputs)?;
            let mut search: SearchConfig = load_config(config)?;
            if let Some(s) = seed {
                search.seed = s;
            }
            let target = if target == "append-redundant" {
                let card = inputs.iter().filter_map(|&v| pmf.cardinalities().get(v)).copied().max().unwrap_or(2);
                pmf = pmf.append_random_redundant(&inputs, card, seed.unwrap_or(0))?;
                vec![pmf.num_vars() - 1]
            } else {
                parse_vars(target)?
            };
            let estimate = estimate_synergy(&pmf, &inputs, &target, &search)?;
            Ok(json(&serde_json::json!({
                "inputs": inputs,
                "target": target,
                "estimate": estimate,
                "mutual_information": mutual_info(&pmf, &inputs, &target)?,
                "whole_minus_sum": whole_minus_sum(&pmf, &inputs, &target)?,
            })))
        }
        Command::Decompose { pmf, a, b } => {
            json_only(cli, "decompose")?;
            let pmf = match pmf {
                Some(p) => JointPmf::load(p)?,
                None => shared_bit_fixture(),
            };
            let mut settings: DecompositionConfig = load_config(config)?;
            if let Some(s) = seed {
                settings.seed = s;
            }
            let result = decompose(&pmf, &parse_vars(b)?, &parse_vars(a)?, &settings)?;
            Ok(json(&result))
        }
        Command::Fig2 { trials, states } | Command::Fig3 { trials, states } => {
            let mut settings: SrvExperimentConfig = load_config(config)?;
            if let Some(t) = trials {
                settings.trials = *t;
            }
            if let Some(s) = states {
                settings.states = parse_list(s, "state count")?;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            let report = if matches!(cli.command, Command::Fig2 { .. }) {
                cmd_fig2(&settings)?
            } else {
                cmd_fig3(&settings)?
            };
            Ok(report_output(cli, &report))
        }
        Command::Fig4 { trials, norm, states } => {
            let mut settings: ResilienceConfig = load_config(config)?;
            if let Some(t) = trials {
                settings.trials = *t;
            }
            if let Some(n) = norm {
                settings.norm = *n;
            }
            if let Some(m) = states {
                settings.states = *m;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            Ok(report_output(cli, &cmd_fig4(&settings)?))
        }
        Command::OracleCensus { max_out } => {
            json_only(cli, "oracle-census")?;
            Ok(json(&three_bit_msrv_census(*max_out)?))
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
    let output = match run(&cli) {
        Ok(text) => text,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, output.as_bytes()),
        None => io::stdout().write_all(output.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
