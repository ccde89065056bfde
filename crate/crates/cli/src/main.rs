//! `kappa0`: exit weights, exact minima, worked-example checks and
//! reinforced-walk simulation from the command line.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kappa0::rational::parse_rational;
use kappa0::verify::{verify_catalog, Catalog, VerifyConfig};
use kappa0::{GraphSpec, SolverConfig, SpecFile, VertexSet, Weights};

use report::{Format, Outcome};

#[derive(Parser)]
#[command(
    name = "kappa0",
    version,
    about = "Minimal exit weight of finite strongly connected sets"
)]
struct Cli {
    /// Worker threads for the parallel parts (0 = one per core).
    #[arg(long, global = true, env = "KAPPA0_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exit counts and exit weight of one set.
    Beta {
        #[command(flatten)]
        input: SpecInput,
        /// Members, e.g. `0,1,2`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        set: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The minimum exit weight, or its formula.
    Kappa0 {
        #[command(flatten)]
        input: SpecInput,
        #[arg(long, value_enum, default_value_t = Mode::Numeric)]
        mode: Mode,
        /// Diameter bound for the oracle.
        #[arg(long, default_value_t = 20)]
        max_diameter: u32,
        /// State budget for the frontier solver.
        #[arg(long, default_value_t = SolverConfig::default().max_states)]
        max_states: usize,
        /// Floating-point weights in numeric mode.
        #[arg(long)]
        float: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the bundled (or a given) golden catalog of worked examples.
    VerifyExamples {
        /// Run a single case by name.
        #[arg(long)]
        only: Option<String>,
        /// Catalog file to use instead of the bundled one.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, default_value_t = SolverConfig::default().max_states)]
        max_states: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reinforced walks from 0: visits to 0 before leaving a set.
    Simulate {
        #[command(flatten)]
        input: SpecInput,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        set: Vec<i64>,
        #[arg(long, default_value_t = 100_000)]
        walks: u64,
        #[arg(long, default_value_t = kappa0::derrw::DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct SpecInput {
    /// Graph spec JSON: {"L": 2, "R": 2, "alpha": {"-2": "1/9", ...}}.
    #[arg(long)]
    spec: PathBuf,
    /// Weight override `i=p/q`; repeatable.
    #[arg(long = "alpha", allow_hyphen_values = true)]
    alpha: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Numeric,
    Symbolic,
    Oracle,
}

impl SpecInput {
    fn load(&self) -> Result<(GraphSpec, Option<Weights>)> {
        let text = std::fs::read_to_string(&self.spec)
            .with_context(|| format!("reading {}", self.spec.display()))?;
        let file = SpecFile::from_json(&text)
            .with_context(|| format!("parsing {}", self.spec.display()))?;
        if self.alpha.is_empty() {
            return Ok((file.spec, file.weights));
        }
        let mut alpha: BTreeMap<i32, _> = file
            .weights
            .map(|w| w.iter().map(|(i, v)| (i, v.clone())).collect())
            .unwrap_or_default();
        for item in &self.alpha {
            let (key, value) = item
                .split_once('=')
                .with_context(|| format!("--alpha {item:?} is not of the form i=p/q"))?;
            let i: i32 = key
                .trim()
                .parse()
                .with_context(|| format!("bad offset in --alpha {item:?}"))?;
            if !file.spec.contains(i) {
                bail!(
                    "--alpha {item:?}: offset {i} is not in the support {:?}",
                    file.spec.support()
                );
            }
            alpha.insert(i, parse_rational(value)?);
        }
        if alpha.len() != file.spec.support().len() {
            let missing: Vec<i32> = file
                .spec
                .support()
                .iter()
                .copied()
                .filter(|i| !alpha.contains_key(i))
                .collect();
            bail!("weights missing for offsets {missing:?}");
        }
        let weights = Weights::new(&file.spec, alpha)?;
        Ok((file.spec, Some(weights)))
    }

    fn load_weighted(&self) -> Result<(GraphSpec, Weights)> {
        match self.load()? {
            (spec, Some(w)) => Ok((spec, w)),
            (_, None) => bail!("this command needs weights; give them in the spec or with --alpha"),
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Beta { input, set, format } => {
            let (spec, weights) = input.load()?;
            let set = VertexSet::new(set)?;
            report::beta(&spec, weights.as_ref(), &set, format)
        }
        Command::Kappa0 {
            input,
            mode,
            max_diameter,
            max_states,
            float,
            format,
        } => {
            let (spec, weights) = input.load()?;
            let config = SolverConfig { max_states };
            match mode {
                Mode::Numeric => {
                    let weights = weights.context("numeric mode needs weights")?;
                    if float {
                        report::numeric_f64(&spec, &weights, config, format)
                    } else {
                        report::numeric(&spec, &weights, config, format)
                    }
                }
                Mode::Symbolic => report::symbolic(&spec, weights.as_ref(), config, format),
                Mode::Oracle => report::oracle(&spec, weights.as_ref(), max_diameter, format),
            }
        }
        Command::VerifyExamples {
            only,
            golden,
            max_states,
            format,
        } => {
            let catalog = match golden {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Catalog::from_json(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => Catalog::builtin(),
            };
            if let Some(name) = &only {
                if !catalog.cases.iter().any(|c| &c.name == name) {
                    let names: Vec<&str> = catalog.cases.iter().map(|c| c.name.as_str()).collect();
                    bail!("no case named {name:?}; known: {}", names.join(", "));
                }
            }
            let config = VerifyConfig {
                solver: SolverConfig { max_states },
            };
            let reports = verify_catalog(&catalog, only.as_deref(), config);
            report::verification(&reports, format)
        }
        Command::Simulate {
            input,
            set,
            walks,
            cap,
            seed,
            format,
        } => {
            let (spec, weights) = input.load_weighted()?;
            let set = VertexSet::new(set)?;
            let sim = kappa0::simulate(&spec, &weights, &set, walks, cap, seed)?;
            report::simulation(&sim, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
