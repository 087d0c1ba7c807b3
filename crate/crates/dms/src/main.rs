use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dms_core::{
    alpha, check_forall_bisim, check_galois, explore, reachable, DomainId, ExplorationConfig, GaloisSpec, Gate, Reachability,
    Verdict,
};

/// Explore, abstract and check data-manipulating systems.
#[derive(Parser)]
#[command(name = "dms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a system file.
    Validate { file: PathBuf },
    /// Build the bounded transition system, concrete unless a domain is given.
    Explore {
        file: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        /// Write the LTS as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the LTS as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Search for a state enabling the target action.
    Reach {
        file: PathBuf,
        /// Action to reach; defaults to the file's first `target`.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Print the abstraction of a set of databases.
    Abstract {
        file: PathBuf,
        #[arg(long)]
        domain: DomainId,
        #[arg(long)]
        set: PathBuf,
    },
    /// Randomized check of the Galois laws.
    CheckGalois {
        #[arg(long)]
        domain: DomainId,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Play the ∀-bisimulation game between a set and its abstraction.
    CheckBisim {
        file: PathBuf,
        #[arg(long)]
        domain: DomainId,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_delimiter = ',')]
        pool: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        fresh: usize,
        /// Evaluate guards outside the domain's licensed fragment.
        #[arg(long = "override")]
        override_gate: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Bounds {
    #[arg(long)]
    domain: Option<DomainId>,
    /// Pool constants; defaults to the file's `const` line.
    #[arg(long, value_delimiter = ',')]
    pool: Option<Vec<String>>,
    /// Fresh constants available to concrete steps.
    #[arg(long, default_value_t = 0)]
    fresh: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 10_000)]
    max_states: usize,
    /// Evaluate guards outside the domain's licensed fragment.
    #[arg(long = "override")]
    override_gate: bool,
}

/// Exit status and message of a failed command.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(1, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<dms::Spec, Failure> {
    dms::parse_spec(&read(path)?).map_err(|e| Failure(1, format!("{}:{e}", path.display())))
}

fn config(spec: &dms::Spec, pool: Option<Vec<String>>, fresh: usize, override_gate: bool) -> ExplorationConfig {
    let pool = match pool {
        Some(names) => dms_core::ConstantPool::new(names, fresh),
        None => spec.pool(fresh),
    };
    let gate = if override_gate { Gate::Override } else { Gate::Strict };
    ExplorationConfig::new(pool).with_gate(gate)
}

fn bounded(spec: &dms::Spec, b: &Bounds) -> ExplorationConfig {
    config(spec, b.pool.clone(), b.fresh, b.override_gate).with_depth(b.depth).with_max_states(b.max_states)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { file } => {
            let spec = load(&file)?;
            let sys = &spec.system;
            println!("ok: {} predicates, {} actions, initial {}", sys.vocabulary().len(), sys.actions().len(), sys.initial());
            for act in sys.actions() {
                let fragment = dms_core::classify(act.guard());
                println!("  {} [{fragment}]", act.name());
            }
            Ok(0)
        }
        Command::Explore { file, bounds, dot, json } => {
            let spec = load(&file)?;
            let lts = explore(&spec.system, bounds.domain, &bounded(&spec, &bounds))?;
            let truncated = if lts.is_truncated() { " (truncated)" } else { "" };
            println!("{} states, {} transitions{truncated}", lts.len(), lts.transitions().len());
            for (i, s) in lts.states().iter().enumerate() {
                println!("  s{i}: {s}");
            }
            for t in lts.transitions() {
                println!("  s{} -{}-> s{}", t.from, t.label, t.to);
            }
            if let Some(path) = dot {
                write_out(&path, &dms::to_dot(&lts))?;
            }
            if let Some(path) = json {
                write_out(&path, &dms::to_json(&lts))?;
            }
            Ok(0)
        }
        Command::Reach { file, target, bounds } => {
            let spec = load(&file)?;
            let Some(target) = target.or_else(|| spec.targets.first().map(|t| t.to_string())) else {
                return Err(Failure(1, "no --target given and the file declares none".into()));
            };
            match reachable(&spec.system, &target, bounds.domain, &bounded(&spec, &bounds))? {
                Reachability::ReachedAt { trace, state } => {
                    println!("reached {target} after {} steps", trace.len());
                    for label in &trace {
                        println!("  {label}");
                    }
                    println!("state: {state}");
                    Ok(0)
                }
                Reachability::NotWithinBounds { truncated } => {
                    let why = if truncated { "bounds were hit" } else { "state space exhausted" };
                    println!("{target} not reached within depth {} ({why})", bounds.depth);
                    Ok(2)
                }
            }
        }
        Command::Abstract { file, domain, set } => {
            let spec = load(&file)?;
            let c = dms::parse_set(&read(&set)?, Some(spec.system.vocabulary()))
                .map_err(|e| Failure(1, format!("{}:{e}", set.display())))?;
            println!("{}", alpha(domain, &c)?);
            Ok(0)
        }
        Command::CheckGalois { domain, samples, seed, json } => {
            let report = check_galois(domain, &GaloisSpec { samples, seed, ..GaloisSpec::default() });
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for law in &report.laws {
                    println!("{:<10} {}/{}", law.law.to_string(), law.passed, law.checked);
                }
            }
            Ok(verdict(&report.verdict, json))
        }
        Command::CheckBisim { file, domain, set, depth, pool, fresh, override_gate, json } => {
            let spec = load(&file)?;
            let c = dms::parse_set(&read(&set)?, Some(spec.system.vocabulary()))
                .map_err(|e| Failure(1, format!("{}:{e}", set.display())))?;
            let state = alpha(domain, &c)?;
            let report = check_forall_bisim(&state, &c, &spec.system, &config(&spec, pool, fresh, override_gate), depth)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("abstraction: {state}");
                println!("game positions: {}, depth {}", report.samples, report.explored_depth);
            }
            Ok(verdict(&report.verdict, json))
        }
    }
}

fn verdict(v: &Verdict, quiet: bool) -> u8 {
    match v {
        Verdict::Holds => {
            if !quiet {
                println!("holds");
            }
            0
        }
        Verdict::FailsAt(f) => {
            if !quiet {
                println!("counterexample: {f}");
            }
            3
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
