//! Command-line front end.
//!
//! Exit codes: 0 success (or no arbitrage), 10 arbitrage / bubble found,
//! 1 a verification or suite claim failed, 64 usage error, 65 invalid input,
//! 66 missing input file, 73 output could not be written.

mod manifest;
pub mod suite;

pub use manifest::{sha256_hex, RunManifest, MANIFEST_FILE};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arbitrage::{arbitrage_cone, classify_sequence, detect_arbitrage, Verdict};
use crate::continuous::{
    arbitrage_report, self_financing_residual, ExplicitBesselArbitrage, PathEnsemble, Process, Scheme, SimConfig,
};
use crate::deflator::{bubble_to_arbitrage, cheapest_superreplication, detect_bubble, find_esmd, verify_deflator, BubbleWitness, PortfolioCheck};
use crate::io::{self, InputError};
use crate::market::{Market, ShortReport};
use crate::random::random_long_only;
use crate::rational::{self, Rational};

pub const EXIT_ARBITRAGE: u8 = 10;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NO_INPUT: u8 = 66;
pub const EXIT_CANT_CREATE: u8 = 73;

#[derive(Debug, Parser)]
#[command(name = "arbitrage-lab", version, about = "Exact arbitrage analysis on scenario-tree markets")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write result files and a run manifest here.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Format of standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide arbitrage exactly and print a certificate.
    Detect { market: PathBuf },
    /// Extreme rays of the one-period arbitrage cone.
    Cone { market: PathBuf },
    /// Classify a strategy sequence against a payoff.
    ClassifySequence { market: PathBuf, sequence: PathBuf },
    /// Find or verify a supermartingale deflator.
    #[command(subcommand)]
    Deflator(DeflatorCommand),
    /// Detect bubbles and turn them into arbitrages.
    #[command(subcommand)]
    Bubble(BubbleCommand),
    /// Simulate a Bessel-type market and evaluate the explicit arbitrage.
    Simulate(SimulateArgs),
    /// Run every end-to-end check and report each claim.
    PaperSuite(SuiteArgs),
}

#[derive(Debug, Subcommand)]
pub enum DeflatorCommand {
    /// Find a supermartingale deflator with Z(root) = 1.
    Find { market: PathBuf },
    /// Check a deflator on the assets and on portfolios.
    Verify {
        market: PathBuf,
        deflator: PathBuf,
        /// Strategy file (one strategy or an array).
        #[arg(long)]
        portfolios: Option<PathBuf>,
        /// Random long-only portfolios to add.
        #[arg(long, default_value_t = 100)]
        random_portfolios: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BubbleCommand {
    /// Search every asset for a cheaper dominating portfolio.
    Detect { market: PathBuf },
    /// Turn a bubble into an arbitrage.
    Exploit {
        market: PathBuf,
        /// Asset index (0-based); default is the first asset with a bubble.
        #[arg(long)]
        asset: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessArg {
    Bessel3,
    Sqbessel4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    #[value(alias = "exact_norm")]
    ExactNorm,
    Euler,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ProcessArg::Bessel3)]
    pub process: ProcessArg,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Uniform time steps per path.
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    /// exact-norm samples the radial part exactly; euler is Euler-Maruyama.
    #[arg(long, value_enum, default_value_t = SchemeArg::ExactNorm)]
    pub scheme: SchemeArg,
    /// Initial price; the explicit arbitrage is evaluated only for s0 = 1, horizon = 1.
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Directory with replacements for the bundled data files.
    #[arg(long)]
    pub markets_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    /// Random markets per property check.
    #[arg(long, default_value_t = 1000)]
    pub random_markets: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(InputError::Missing { .. }) => EXIT_NO_INPUT,
            CliError::Input(_) | CliError::Data(_) => EXIT_DATA,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Output { .. } => EXIT_CANT_CREATE,
        }
    }
}

fn data_err(e: impl ToString) -> CliError {
    CliError::Data(e.to_string())
}

/// What a command produced, in every output format.
pub struct Outcome {
    /// File stem for written results.
    pub name: &'static str,
    pub json: Value,
    pub csv: String,
    pub table: String,
    pub exit: u8,
    /// Additional files (name, contents) for the output directory.
    pub extra: Vec<(String, String)>,
}

struct Inputs<'a> {
    manifest: &'a mut RunManifest,
}

impl Inputs<'_> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = io::read_file(path)?;
        self.manifest.record_input(path, text.as_bytes());
        Ok(text)
    }

    fn market(&mut self, path: &Path) -> Result<Market, CliError> {
        let text = self.read(path)?;
        io::parse_market(&text).map_err(|e| prefix(path, e))
    }
}

fn prefix(path: &Path, e: InputError) -> CliError {
    match e {
        InputError::Syntax { line, column, message } => CliError::Input(InputError::Syntax {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        }),
        InputError::Field { field, message } => CliError::Input(InputError::Field {
            field,
            message: format!("{message} (in {})", path.display()),
        }),
        other => CliError::Input(other),
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// Parses `args` (program name first), executes, prints, and returns the exit
/// code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut manifest = RunManifest::new(command, cli.seed);
    let started = Instant::now();
    let result = execute(&cli, &mut manifest).and_then(|outcome| {
        manifest.elapsed_ms = started.elapsed().as_millis();
        emit(&cli, &mut manifest, &outcome)?;
        Ok(outcome.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, manifest: &mut RunManifest, outcome: &Outcome) -> Result<(), CliError> {
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&outcome.json).expect("json")),
        Format::Csv => print!("{}", outcome.csv),
        Format::Table => print!("{}", outcome.table),
    }
    let Some(dir) = &cli.output_dir else {
        return Ok(());
    };
    let write = |name: &str, contents: &str| {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Output { path, source })
    };
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.clone(),
        source,
    })?;
    let doc = json!({ "manifest": MANIFEST_FILE, "command": outcome.name, "result": outcome.json });
    let mut files = vec![
        (format!("{}.json", outcome.name), serde_json::to_string_pretty(&doc).expect("json") + "\n"),
        (format!("{}.csv", outcome.name), format!("# manifest: {MANIFEST_FILE}\n{}", outcome.csv)),
    ];
    files.extend(outcome.extra.iter().cloned());
    for (name, contents) in &files {
        write(name, contents)?;
        manifest.outputs.push(name.clone());
    }
    write(MANIFEST_FILE, &(serde_json::to_string_pretty(manifest).expect("json") + "\n"))
}

fn execute(cli: &Cli, manifest: &mut RunManifest) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    let mut inputs = Inputs { manifest };
    match &cli.command {
        Command::Detect { market } => {
            let m = inputs.market(market)?;
            Ok(detect_outcome(&m))
        }
        Command::Cone { market } => {
            let m = inputs.market(market)?;
            cone_outcome(&m)
        }
        Command::ClassifySequence { market, sequence } => {
            let m = inputs.market(market)?;
            let text = inputs.read(sequence)?;
            let input = io::parse_sequence(&text, &m).map_err(|e| prefix(sequence, e))?;
            let v = classify_sequence(&m, &input.strategies, &input.xi, &input.epsilon).map_err(data_err)?;
            let mut table = format!("classification: {:?}\n", v.kind);
            if let Some(c) = v.cutoff_index {
                let _ = writeln!(table, "every member from {c} on holds a short position");
            }
            let mut csv = String::from("member,initial_value,shortfall,shorted_assets\n");
            for (k, ((x, r), s)) in v.initial_values.iter().zip(&v.shortfall).zip(&v.short_reports).enumerate() {
                let _ = writeln!(table, "  member {:>3}: cost {:>10}  shortfall {:>10}  shorts {}", k + 1, rational::to_string(x), rational::to_string(r), shorted_label(s));
                let _ = writeln!(csv, "{},{},{},{}", k + 1, rational::to_string(x), rational::to_string(r), shorted_label(s).replace(", ", " "));
            }
            Ok(Outcome {
                name: "classify_sequence",
                json: serde_json::to_value(&v).expect("json"),
                csv,
                table,
                exit: 0,
                extra: Vec::new(),
            })
        }
        Command::Deflator(DeflatorCommand::Find { market }) => {
            let m = inputs.market(market)?;
            let z = find_esmd(&m).map_err(data_err)?;
            let mut table = format!("{:?} deflator\n", z.kind);
            let mut csv = String::from("node,z\n");
            for (k, v) in z.values().iter().enumerate() {
                let _ = writeln!(table, "  node {k:>4}: {}", rational::to_string(v));
                let _ = writeln!(csv, "{k},{}", rational::to_string(v));
            }
            Ok(Outcome {
                name: "deflator",
                json: io::deflator_to_json(&z),
                csv,
                table,
                exit: 0,
                extra: Vec::new(),
            })
        }
        Command::Deflator(DeflatorCommand::Verify {
            market,
            deflator,
            portfolios,
            random_portfolios,
        }) => {
            let m = inputs.market(market)?;
            let text = inputs.read(deflator)?;
            let z = io::parse_deflator(&text, &m).map_err(|e| prefix(deflator, e))?;
            let mut strategies = match portfolios {
                Some(p) => {
                    let text = inputs.read(p)?;
                    io::parse_strategies(&text, &m).map_err(|e| prefix(p, e))?
                }
                None => Vec::new(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..*random_portfolios {
                strategies.push(random_long_only(&mut rng, &m, &Rational::from_integer((k % 5).into())));
            }
            let report = verify_deflator(&m, &z, &strategies);
            let passed = report.passed();
            let mut table = format!(
                "deflator {}: positive {}, asset violations {}, portfolios checked {}\n",
                if passed { "passes" } else { "FAILS" },
                report.positive,
                report.asset_violations.len(),
                report.checked_portfolios()
            );
            let mut csv = String::from("portfolio,status\n");
            for (k, p) in report.portfolios.iter().enumerate() {
                let status = match p {
                    PortfolioCheck::Skipped { .. } => "skipped",
                    c if c.passed() => "pass",
                    _ => "fail",
                };
                let _ = writeln!(csv, "{k},{status}");
                if status == "fail" {
                    let _ = writeln!(table, "  portfolio {k} fails");
                }
            }
            Ok(Outcome {
                name: "deflator_verify",
                json: serde_json::to_value(&report).expect("json"),
                csv,
                table,
                exit: if passed { 0 } else { EXIT_FAILED },
                extra: Vec::new(),
            })
        }
        Command::Bubble(BubbleCommand::Detect { market }) => {
            let m = inputs.market(market)?;
            Ok(match detect_bubble(&m) {
                Some(w) => bubble_outcome("bubble", &w, None),
                None => no_bubble("bubble"),
            })
        }
        Command::Bubble(BubbleCommand::Exploit { market, asset }) => {
            let m = inputs.market(market)?;
            let witness = match asset {
                Some(i) => {
                    m.check_asset(*i).map_err(|e| CliError::Usage(e.to_string()))?;
                    let (strategy, _) = cheapest_superreplication(&m, *i);
                    BubbleWitness::new(&m, *i, strategy).ok()
                }
                None => detect_bubble(&m),
            };
            Ok(match witness {
                Some(w) => {
                    let cert = bubble_to_arbitrage(&m, &w).map_err(data_err)?;
                    let verdict = Verdict::Arbitrage(cert);
                    bubble_outcome("bubble_exploit", &w, Some(&verdict))
                }
                None => no_bubble("bubble_exploit"),
            })
        }
        Command::Simulate(args) => {
            let cfg = SimConfig {
                n_paths: args.paths,
                n_steps: args.steps,
                horizon: args.horizon,
                s0: args.s0,
                seed,
                scheme: match args.scheme {
                    SchemeArg::ExactNorm => Scheme::ExactNorm,
                    SchemeArg::Euler => Scheme::Euler,
                },
                ..SimConfig::default()
            };
            let process = match args.process {
                ProcessArg::Bessel3 => Process::Bessel3,
                ProcessArg::Sqbessel4 => Process::SquaredBessel4,
            };
            inputs.manifest.config = json!({ "process": process, "sim": cfg });
            let ensemble = PathEnsemble::new(process, cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(simulate_outcome(&ensemble))
        }
        Command::PaperSuite(args) => {
            let cfg = suite::SuiteConfig {
                markets_dir: args.markets_dir.clone(),
                paths: args.paths,
                steps: args.steps,
                random_markets: args.random_markets,
                seed,
            };
            inputs.manifest.config = serde_json::to_value(&cfg).expect("json");
            let manifest = &mut *inputs.manifest;
            let report = suite::run_suite(&cfg, &mut |path, bytes| manifest.record_input(path, bytes));
            let mut table = String::new();
            let mut csv = String::from("claim,result\n");
            for c in &report.claims {
                let _ = writeln!(table, "{} {:<34} {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
                let _ = writeln!(csv, "{},{}", c.name, if c.passed { "pass" } else { "fail" });
            }
            if !report.passed() {
                let _ = writeln!(table, "failed claims: {}", report.failures().join(", "));
                eprintln!("failed claims: {}", report.failures().join(", "));
            }
            Ok(Outcome {
                name: "paper_suite",
                json: serde_json::to_value(&report).expect("json"),
                csv,
                table,
                exit: if report.passed() { 0 } else { EXIT_FAILED },
                extra: vec![("paper_suite.md".into(), report.to_markdown())],
            })
        }
    }
}

fn shorted_label(r: &ShortReport) -> String {
    let assets = r.shorted_assets();
    if assets.is_empty() {
        "none".into()
    } else {
        assets.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(", ")
    }
}

fn vector_label(v: &[Rational]) -> String {
    format!("({})", v.iter().map(rational::to_string).collect::<Vec<_>>().join(", "))
}

fn short_table(report: &ShortReport, out: &mut String, csv: &mut String) {
    let _ = writeln!(out, "short positions (assets numbered from 1):");
    let _ = writeln!(out, "  {:>6} {:>6} {:>6} {:>12}", "period", "node", "asset", "quantity");
    let _ = writeln!(csv, "period,node,asset,quantity");
    for s in &report.shorts {
        let q = rational::to_string(&s.quantity);
        let _ = writeln!(out, "  {:>6} {:>6} {:>6} {:>12}", s.time, s.node.0, s.asset + 1, q);
        let _ = writeln!(csv, "{},{},{},{}", s.time, s.node.0, s.asset, q);
    }
}

pub fn detect_outcome(m: &Market) -> Outcome {
    let verdict = detect_arbitrage(m);
    let mut table = String::new();
    let mut csv = String::new();
    let exit = match &verdict {
        Verdict::Arbitrage(c) => {
            let _ = writeln!(table, "arbitrage found (certificate verifies: {})", c.verify(m));
            if let (Some(node), Some(ray)) = (c.window, &c.ray) {
                let _ = writeln!(table, "one-step ray at node {}: {}", node.0, vector_label(ray));
            }
            short_table(&c.short_report, &mut table, &mut csv);
            EXIT_ARBITRAGE
        }
        Verdict::NoArbitrage(c) => {
            let _ = writeln!(table, "no arbitrage (certificate verifies: {})", c.verify(m));
            let _ = writeln!(csv, "node,state_prices");
            for d in &c.one_step {
                let _ = writeln!(table, "  node {:>4}: state prices {}", d.node.0, vector_label(&d.state_prices));
                let _ = writeln!(csv, "{},{}", d.node.0, d.state_prices.iter().map(rational::to_string).collect::<Vec<_>>().join(" "));
            }
            0
        }
    };
    Outcome {
        name: "detect",
        json: serde_json::to_value(&verdict).expect("json"),
        csv,
        table,
        exit,
        extra: Vec::new(),
    }
}

fn cone_outcome(m: &Market) -> Result<Outcome, CliError> {
    let cone = arbitrage_cone(m).map_err(data_err)?;
    let mut table = format!("{} extreme ray(s)\n", cone.rays.len());
    let mut csv = String::from("kind,vector\n");
    for r in &cone.rays {
        let _ = writeln!(table, "  ray {}", vector_label(r));
        let _ = writeln!(csv, "ray,{}", r.iter().map(rational::to_string).collect::<Vec<_>>().join(" "));
    }
    for l in &cone.lineality {
        let _ = writeln!(table, "  zero-payoff direction {}", vector_label(l));
        let _ = writeln!(csv, "lineality,{}", l.iter().map(rational::to_string).collect::<Vec<_>>().join(" "));
    }
    Ok(Outcome {
        name: "cone",
        exit: if cone.is_empty() { 0 } else { EXIT_ARBITRAGE },
        json: serde_json::to_value(&cone).expect("json"),
        csv,
        table,
        extra: Vec::new(),
    })
}

fn bubble_outcome(name: &'static str, w: &BubbleWitness, exploit: Option<&Verdict>) -> Outcome {
    let mut table = format!(
        "bubble in asset {}: dominated at the horizon by a portfolio costing {} (gap {})\n",
        w.asset + 1,
        rational::to_string(w.cost()),
        rational::to_string(&w.gap)
    );
    let mut csv = String::new();
    let mut json = json!({ "witness": w });
    if let Some(v) = exploit {
        if let Some(c) = v.arbitrage() {
            let _ = writeln!(table, "exploiting arbitrage:");
            short_table(&c.short_report, &mut table, &mut csv);
        }
        json["arbitrage"] = serde_json::to_value(v).expect("json");
    } else {
        let _ = writeln!(csv, "asset,cost,gap\n{},{},{}", w.asset, rational::to_string(w.cost()), rational::to_string(&w.gap));
    }
    Outcome {
        name,
        json,
        csv,
        table,
        exit: EXIT_ARBITRAGE,
        extra: Vec::new(),
    }
}

fn no_bubble(name: &'static str) -> Outcome {
    Outcome {
        name,
        json: json!({ "witness": null }),
        csv: String::from("asset,cost,gap\n"),
        table: "no bubble\n".into(),
        exit: 0,
        extra: Vec::new(),
    }
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    process: Process,
    config: &'a SimConfig,
    terminal_mean: crate::continuous::McStatistic,
    terminal_second_moment: crate::continuous::McStatistic,
    terminal_inverse_mean: crate::continuous::McStatistic,
    #[serde(skip_serializing_if = "Option::is_none")]
    explicit_arbitrage: Option<Value>,
}

fn simulate_outcome(e: &PathEnsemble) -> Outcome {
    let times = e.times();
    let last = times.len() - 1;
    let points = times.len();
    let acc = e.reduce(
        || vec![[crate::continuous::Running::default(); 3]; points],
        |acc, _, s| {
            for (r, &x) in acc.iter_mut().zip(s) {
                r[0].push(x);
                r[1].push(x * x);
                r[2].push(1.0 / x);
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                for j in 0..3 {
                    x[j].merge(&y[j]);
                }
            }
        },
    );
    let stats: Vec<[crate::continuous::McStatistic; 3]> = acc.iter().map(|r| r.map(|x| x.statistic())).collect();

    let explicit = ExplicitBesselArbitrage::for_ensemble(e).ok();
    let report = explicit.map(|k| (arbitrage_report(e, &k), self_financing_residual(e, &k)));

    let mut csv = String::from("t,mean_s,se_s,mean_s2,se_s2,mean_inv_s,se_inv_s");
    if report.is_some() {
        csv.push_str(",eta_negative,theta_positive");
    }
    csv.push('\n');
    for k in 0..points {
        let [a, b, c] = &stats[k];
        let _ = write!(csv, "{},{},{},{},{},{},{}", times[k], a.estimate, a.std_error, b.estimate, b.std_error, c.estimate, c.std_error);
        if let Some((r, _)) = &report {
            let _ = write!(csv, ",{},{}", r.eta_negative[k], r.theta_positive[k]);
        }
        csv.push('\n');
    }

    let cfg = e.config();
    let mut table = format!(
        "{:?}, {:?} scheme, {} paths, {} steps, seed {}\n",
        e.process(),
        cfg.scheme,
        cfg.n_paths,
        cfg.n_steps,
        cfg.seed
    );
    let names = ["E[S_T]", "E[S_T^2]", "E[1/S_T]"];
    for (j, name) in names.iter().enumerate() {
        let s = stats[last][j];
        let _ = writeln!(table, "  {name:<9} {:.6} ± {:.6}", s.estimate, s.std_error);
    }
    let explicit_json = report.as_ref().map(|(r, res)| {
        let _ = writeln!(table, "explicit arbitrage:");
        let _ = writeln!(table, "  max |v_0|            {}", r.initial_abs_max);
        let _ = writeln!(table, "  v_T range            [{:.12}, {:.12}]", r.terminal_min, r.terminal_max);
        let _ = writeln!(table, "  min value            {:.6}", r.min_value);
        let _ = writeln!(table, "  P(eta < 0) at t_1    {}", r.eta_negative_at_first_step());
        let _ = writeln!(table, "  short on [0, t] for  t = {} (99% of paths)", r.short_interval(0.99));
        let _ = writeln!(table, "  residual median/max  {:.3e} / {:.3e}", res.median, res.max);
        json!({
            "initial_abs_max": r.initial_abs_max,
            "terminal": r.terminal,
            "terminal_min": r.terminal_min,
            "terminal_max": r.terminal_max,
            "min_value": r.min_value,
            "eta_negative_first_step": r.eta_negative_at_first_step(),
            "short_interval_99": r.short_interval(0.99),
            "residual": res,
        })
    });
    let summary = SimulateSummary {
        process: e.process(),
        config: cfg,
        terminal_mean: stats[last][0],
        terminal_second_moment: stats[last][1],
        terminal_inverse_mean: stats[last][2],
        explicit_arbitrage: explicit_json,
    };
    Outcome {
        name: "simulate",
        json: serde_json::to_value(&summary).expect("json"),
        csv,
        table,
        exit: 0,
        extra: Vec::new(),
    }
}
