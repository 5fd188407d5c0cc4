//! `probnet`: generate, check, solve and simulate network design instances
//! with probabilistic arc capacities.
//!
//! Exit codes: 0 on success, 1 when a solve ends infeasible or at a limit
//! (outputs are still written), 2 on usage or input errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use probnet_core::bnb::{solve_cqnd, CutFamily, Solution, SolveConfig, SolveStatus};
use probnet_core::instgen::{generate, benchmark_grid, GenSpec, Regime};
use probnet_core::model::{omega_from_epsilon, NetworkInstance, OmegaModel};
use probnet_core::report::{append_csv, write_csv, SolveRecord};
use probnet_core::separation::{self, SepStrategy, SeparationConfig, SeparationProblem};
use probnet_core::sim::{simulate_with_samples, tradeoff_curve};

#[derive(Parser, Debug)]
#[command(name = "probnet", version, about = "Network design with probabilistic arc capacities")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random instance, or a whole benchmark grid.
    Generate(GenerateArgs),
    /// Validate an instance file and print a summary.
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Solve one instance and emit a CSV row.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the separation oracle at a given point.
    Separate {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        omega: OmegaArgs,
        /// Comma-separated arc values, one per arc.
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "enum")]
        sep: SepStrategy,
    },
    /// Monte-Carlo service level of a design.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        /// Built arcs as comma-separated 0-based ids.
        #[arg(long)]
        arcs: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write every sampled min-cut value, one per line.
        #[arg(long)]
        dump_mincuts: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve and simulate across service levels.
    Tradeoff {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.3,0.2,0.025,0.01,0.001")]
        epsilons: Vec<f64>,
        #[arg(long, default_value = "normal")]
        omega_model: OmegaModel,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve a generated benchmark grid.
    Bench {
        /// paper-independent, paper-correlated or paper-general.
        #[arg(long)]
        grid: String,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        nodes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        /// Also solve every instance with OA cuts only.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value = "recommended")]
        cuts: String,
        #[arg(long, alias = "strategy", default_value = "enum")]
        sep: SepStrategy,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value = "independent")]
    regime: Regime,
    #[arg(long, default_value_t = 10)]
    nodes: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emit the full benchmark grid for the regime into `--out-dir`.
    #[arg(long)]
    grid: bool,
    #[arg(long, requires = "grid")]
    out_dir: Option<PathBuf>,
    /// Instance path; stdout when absent.
    #[arg(long, conflicts_with = "grid")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct OmegaChoice {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Args, Debug)]
struct OmegaArgs {
    #[command(flatten)]
    choice: OmegaChoice,
    #[arg(long, default_value = "normal")]
    omega_model: OmegaModel,
}

impl OmegaArgs {
    fn resolve(&self) -> Result<f64> {
        match (self.choice.epsilon, self.choice.omega) {
            (Some(eps), None) => Ok(omega_from_epsilon(self.omega_model, eps)?),
            (None, Some(omega)) => Ok(omega),
            _ => bail!("give exactly one of --epsilon and --omega"),
        }
    }
}

#[derive(Args, Debug)]
struct LimitArgs {
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    omega: OmegaArgs,
    /// Comma list of oa, pack, xpack, polymatroid, cover, aggregate, or
    /// `recommended`.
    #[arg(long, default_value = "recommended")]
    cuts: String,
    #[arg(long, default_value = "enum")]
    sep: SepStrategy,
    #[command(flatten)]
    limits: LimitArgs,
    /// Recorded in the output for reproducibility.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Append CSV rows here instead of printing them.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave wall-clock columns empty so repeated runs are byte-identical.
    #[arg(long)]
    no_time: bool,
}

impl OutArgs {
    fn emit<R: Serialize>(&self, rows: &[R]) -> Result<()> {
        match &self.out {
            Some(p) => append_csv(p, rows).with_context(|| format!("writing {}", p.display())),
            None => Ok(write_csv(io::stdout().lock(), rows)?),
        }
    }
}

fn resolve_cuts(spec: &str, inst: &NetworkInstance) -> Result<BTreeSet<CutFamily>> {
    if spec.trim() == "recommended" {
        Ok(CutFamily::recommended(inst.is_diagonal()))
    } else {
        Ok(CutFamily::parse_list(spec)?)
    }
}

fn apply_limits(cfg: &mut SolveConfig, limits: &LimitArgs) -> Result<()> {
    if let Some(t) = limits.time_limit {
        if !(t > 0.0 && t.is_finite()) {
            bail!("--time-limit must be a positive number of seconds");
        }
        cfg.time_limit = Some(Duration::from_secs_f64(t));
    }
    if let Some(n) = limits.node_limit {
        cfg.node_limit = n;
    }
    Ok(())
}

fn load(path: &Path) -> Result<NetworkInstance> {
    NetworkInstance::load(path).with_context(|| format!("reading instance {}", path.display()))
}

fn parse_arcs(list: &str, m: usize) -> Result<Vec<bool>> {
    let mut x = vec![false; m];
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let a: usize = part.parse().with_context(|| format!("bad arc id '{part}'"))?;
        if a >= m {
            bail!("arc id {a} out of range (instance has {m} arcs)");
        }
        x[a] = true;
    }
    Ok(x)
}

/// Prints the resolved configuration to stderr.
fn echo<T: Serialize>(what: &str, value: &T) {
    if let Ok(s) = serde_json::to_string(value) {
        eprintln!("# {what} {s}");
    }
}

fn outcome(statuses: impl IntoIterator<Item = SolveStatus>) -> ExitCode {
    if statuses.into_iter().all(|s| s == SolveStatus::Optimal) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Generate(args) => run_generate(&args).map(|_| ExitCode::SUCCESS),
        Command::Check { instance } => {
            let inst = load(&instance)?;
            let mu: Vec<f64> = inst.arcs.iter().map(|a| a.mu.max(0.0)).collect();
            let (flow, _) = separation::max_flow_min_cut(&inst, &mu);
            println!(
                "valid, {} nodes, {} arcs, demand {}",
                inst.nodes,
                inst.num_arcs(),
                inst.demand
            );
            println!(
                "covariance {}",
                if inst.is_diagonal() { "diagonal" } else { "full" }
            );
            println!("mean max flow {flow}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { instance, solve, out } => {
            let inst = load(&instance)?;
            let omega = solve.omega.resolve()?;
            let mut cfg = SolveConfig {
                cuts: resolve_cuts(&solve.cuts, &inst)?,
                separation: solve.sep,
                seed: solve.seed,
                ..SolveConfig::with_omega(omega)
            };
            apply_limits(&mut cfg, &solve.limits)?;
            echo("solve", &cfg);
            let sol = solve_cqnd(&inst, &cfg)?;
            if let Some(d) = &sol.design {
                eprintln!("# arcs {:?}", d.arcs());
            }
            let rec = SolveRecord::new(&inst, omega, &CutFamily::list_name(&cfg.cuts), &sol, !out.no_time);
            out.emit(&[rec])?;
            Ok(outcome([sol.stats.status]))
        }
        Command::Separate { instance, omega, x, sep } => {
            let inst = load(&instance)?;
            let omega = omega.resolve()?;
            let xs: Vec<f64> = x
                .split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad value '{v}'")))
                .collect::<Result<_>>()?;
            if xs.len() != inst.num_arcs() {
                bail!("--x has {} values for {} arcs", xs.len(), inst.num_arcs());
            }
            let p = SeparationProblem::new(&inst, &xs, omega)?;
            let r = separation::separate(&p, &SeparationConfig::with_strategy(sep))?;
            let report = serde_json::json!({
                "strategy": sep.name(),
                "status": r.status.name(),
                "theta": r.theta,
                "violation": r.violation,
                "cut_arcs": r.cut.map(|c| c.arc_ids),
                "nodes": r.nodes,
            });
            println!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { instance, arcs, samples, seed, dump_mincuts, out } => {
            let inst = load(&instance)?;
            let x = parse_arcs(&arcs, inst.num_arcs())?;
            echo("simulate", &serde_json::json!({ "samples": samples, "seed": seed, "arcs": arcs }));
            let (report, cuts) = simulate_with_samples(&x, &inst, samples, seed)?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            if let Some(path) = dump_mincuts {
                let mut f = io::BufWriter::new(
                    fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
                );
                for v in &cuts {
                    writeln!(f, "{v}")?;
                }
                f.flush()?;
            }
            out.emit(&[report])?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tradeoff { instance, epsilons, omega_model, samples, seed, limits, out } => {
            let inst = load(&instance)?;
            let mut cfg = SolveConfig {
                cuts: CutFamily::recommended(inst.is_diagonal()),
                seed,
                ..SolveConfig::default()
            };
            apply_limits(&mut cfg, &limits)?;
            echo("tradeoff", &cfg);
            let rows = tradeoff_curve(&inst, &epsilons, omega_model, &cfg, samples, seed)?;
            out.emit(&rows)?;
            Ok(if rows.iter().all(|r| r.status == "optimal") {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Bench { grid, nodes, base_seed, compare, cuts, sep, limits, out } => {
            let regime: Regime = grid
                .strip_prefix("paper-")
                .unwrap_or(&grid)
                .parse()?;
            let specs = benchmark_grid(regime, &nodes, base_seed);
            let mut base = SolveConfig {
                separation: sep,
                seed: base_seed,
                ..SolveConfig::default()
            };
            apply_limits(&mut base, &limits)?;
            echo("bench", &base);
            let runs: Vec<(NetworkInstance, GenSpec, BTreeSet<CutFamily>)> = specs
                .iter()
                .map(|g| -> Result<Vec<_>> {
                    let inst = generate(g)?;
                    let mut sets = vec![resolve_cuts(&cuts, &inst)?];
                    if compare && sets[0] != CutFamily::oa_only() {
                        sets.insert(0, CutFamily::oa_only());
                    }
                    Ok(sets.into_iter().map(|s| (inst.clone(), g.clone(), s)).collect())
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let results: Vec<(SolveRecord, SolveStatus)> = runs
                .par_iter()
                .map(|(inst, g, set)| -> Result<_> {
                    let cfg = SolveConfig {
                        omega: g.omega,
                        cuts: set.clone(),
                        ..base.clone()
                    };
                    let sol: Solution = solve_cqnd(inst, &cfg)?;
                    let rec = SolveRecord::new(inst, g.omega, &CutFamily::list_name(set), &sol, !out.no_time);
                    Ok((rec, sol.stats.status))
                })
                .collect::<Result<_>>()?;
            let (rows, statuses): (Vec<_>, Vec<_>) = results.into_iter().unzip();
            out.emit(&rows)?;
            Ok(outcome(statuses))
        }
    }
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    if args.grid {
        let dir = args.out_dir.as_deref().unwrap_or(Path::new("."));
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for g in benchmark_grid(args.regime, &[args.nodes], args.seed) {
            let inst = generate(&g)?;
            let path = dir.join(format!("{}.json", g.id()));
            inst.save(&path).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
        return Ok(());
    }
    let spec = GenSpec {
        nodes: args.nodes,
        omega: args.omega,
        beta: args.beta,
        regime: args.regime,
        seed: args.seed,
    };
    echo("generate", &spec);
    let inst = generate(&spec)?;
    match &args.out {
        Some(p) => inst.save(p).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{}", inst.to_json()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
