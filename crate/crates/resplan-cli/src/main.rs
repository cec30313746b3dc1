//! Command-line front end: single-scenario planning, the life-cycle and
//! harvest-spread sweeps, and the heuristic-vs-exact comparison. Sweeps and
//! comparisons emit CSV; plans print structured text and can be exported as
//! JSON.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use resplan::experiments::{
    compare_csv, run_lifecycle_sweep, run_oracle_compare, run_spread_sweep, sweep_csv,
    SweepSpec,
};
use resplan::planner::{plan_scenario, PlanOptions, PlanSolution};
use resplan::radio::infeasible_set;
use resplan::scenario::{load_scenario, Scenario};

#[derive(Parser)]
#[command(
    name = "resplan",
    about = "Planner for cellular networks with energy-harvesting base stations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario file and print the deployment, power lines, and
    /// cost breakdown.
    Plan {
        /// Scenario description (TOML).
        scenario: PathBuf,
        /// Seed for the randomized site-removal step.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Replace every harvest law with a point mass at zero (conventional
        /// all-grid deployment); install costs stay as the file declares.
        #[arg(long)]
        no_res: bool,
        /// Skip the energy-balancing phase: no power lines are considered.
        #[arg(long)]
        no_balancing: bool,
        /// Also write the full solution as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a multi-seed sweep and emit aggregated CSV.
    Sweep {
        kind: SweepKind,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-site capacity override (the spread sweep runs both 6 and 12
        /// when omitted; the life-cycle sweep defaults to 12).
        #[arg(long)]
        b: Option<u32>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the heuristic against the exhaustive solver on small random
    /// instances and emit per-instance gaps as CSV.
    CompareOracle {
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    /// Total cost vs planning horizon T = 6..20 years.
    Lifecycle,
    /// Total cost vs harvest spread at T = 10 years.
    Spread,
}

#[derive(Serialize)]
struct PlanJson {
    feasible: bool,
    seed: u64,
    deployed_sites: Vec<usize>,
    /// `assignments[m]` is the serving site of test point m, if any.
    assignments: Vec<Option<usize>>,
    qos_failed_tps: Vec<usize>,
    power_lines: Vec<PowerLineJson>,
    grid_w: Vec<GridDrawJson>,
    phase1_outer_iterations: usize,
    phase2_iterations: Option<usize>,
    phase2_fell_back: Option<bool>,
    cost: CostJson,
}

#[derive(Serialize)]
struct PowerLineJson {
    from_site: usize,
    to_site: usize,
    flow_w: f64,
    line_cost_eur: f64,
}

#[derive(Serialize)]
struct GridDrawJson {
    site: usize,
    grid_w: f64,
}

#[derive(Serialize)]
struct CostJson {
    install_eur: f64,
    connection_eur: f64,
    grid_energy_eur: f64,
    loss_energy_eur: f64,
    total_eur: f64,
}

fn plan_to_json(sol: &PlanSolution, s: &Scenario, seed: u64) -> PlanJson {
    let assign = &sol.phase1.assign;
    let mut power_lines = Vec::new();
    for t in 0..s.n_sites() {
        for n in 0..s.n_sites() {
            if sol.plan.edges[t][n] {
                power_lines.push(PowerLineJson {
                    from_site: t,
                    to_site: n,
                    flow_w: sol.plan.flows[t][n],
                    line_cost_eur: s.edge(t, n).conn_cost_eur,
                });
            }
        }
    }
    PlanJson {
        feasible: sol.feasible,
        seed,
        deployed_sites: assign.deployed_sites(),
        assignments: (0..s.n_tps()).map(|m| assign.assigned_site(m)).collect(),
        qos_failed_tps: infeasible_set(assign, s),
        power_lines,
        grid_w: assign
            .deployed_sites()
            .iter()
            .map(|&n| GridDrawJson { site: n, grid_w: sol.plan.grid[n] })
            .collect(),
        phase1_outer_iterations: sol.phase1.outer_iterations,
        phase2_iterations: sol.phase2.as_ref().map(|p| p.iterations),
        phase2_fell_back: sol.phase2.as_ref().map(|p| p.fell_back),
        cost: CostJson {
            install_eur: sol.cost.install_eur,
            connection_eur: sol.cost.connection_eur,
            grid_energy_eur: sol.cost.grid_energy_eur,
            loss_energy_eur: sol.cost.loss_energy_eur,
            total_eur: sol.cost.total_eur,
        },
    }
}

fn print_plan(sol: &PlanSolution, s: &Scenario) {
    let assign = &sol.phase1.assign;
    let deployed = assign.deployed_sites();
    if sol.feasible {
        println!("status: feasible");
    } else {
        let failed = infeasible_set(assign, s);
        let ids: Vec<String> = failed.iter().map(|m| m.to_string()).collect();
        println!("status: infeasible (QoS unmet at test points: {})", ids.join(" "));
    }

    let ids: Vec<String> = deployed.iter().map(|n| n.to_string()).collect();
    println!("deployed sites ({} of {}): {}", deployed.len(), s.n_sites(), ids.join(" "));

    println!("assignments:");
    for m in 0..s.n_tps() {
        match assign.assigned_site(m) {
            Some(n) => {
                let d = s.tps()[m].position.distance(&s.sites()[n].position);
                println!("  tp {m:>3} -> site {n} ({d:.1} m)");
            }
            None => println!("  tp {m:>3} -> unassigned"),
        }
    }

    let mut any_line = false;
    for t in 0..s.n_sites() {
        for n in 0..s.n_sites() {
            if sol.plan.edges[t][n] {
                if !any_line {
                    println!("power lines:");
                    any_line = true;
                }
                println!(
                    "  site {t} -> site {n}: {:.3} W (line cost {:.2} EUR)",
                    sol.plan.flows[t][n],
                    s.edge(t, n).conn_cost_eur
                );
            }
        }
    }
    if !any_line {
        println!("power lines: none");
    }

    println!("grid draws:");
    for &n in &deployed {
        println!("  site {n}: {:.3} W", sol.plan.grid[n]);
    }

    println!("cost breakdown (EUR):");
    println!("  install:     {:.2}", sol.cost.install_eur);
    println!("  connections: {:.2}", sol.cost.connection_eur);
    println!("  grid energy: {:.2}", sol.cost.grid_energy_eur);
    println!("  line losses: {:.2}", sol.cost.loss_energy_eur);
    println!("  total:       {:.2}", sol.cost.total_eur);

    print!("phase 1: {} outer iterations", sol.phase1.outer_iterations);
    match &sol.phase2 {
        Some(p2) if p2.fell_back => {
            println!("; phase 2: {} iterations (no line paid off)", p2.iterations)
        }
        Some(p2) => println!("; phase 2: {} iterations", p2.iterations),
        None => println!(),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Plan { scenario, seed, no_res, no_balancing, out } => {
            let text = fs::read_to_string(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            let mut s = load_scenario(&text)
                .with_context(|| format!("loading {}", scenario.display()))?;
            if no_res {
                s = s.with_zero_harvest();
            }
            let sol =
                plan_scenario(&s, PlanOptions { balancing: !no_balancing }, seed);
            println!(
                "scenario: {} ({} sites, {} test points, capacity {})",
                scenario.display(),
                s.n_sites(),
                s.n_tps(),
                s.capacity()
            );
            print_plan(&sol, &s);
            if let Some(path) = &out {
                let json = serde_json::to_string_pretty(&plan_to_json(&sol, &s, seed))?;
                fs::write(path, json)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if sol.feasible { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Sweep { kind, runs, confidence, seed, b, out } => {
            let spec = SweepSpec { runs, confidence, seed, b_cap: b };
            let outcome = match kind {
                SweepKind::Lifecycle => run_lifecycle_sweep(&spec)?,
                SweepKind::Spread => run_spread_sweep(&spec)?,
            };
            emit(&sweep_csv(&outcome), out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CompareOracle { instances, seed, out } => {
            let outcome = run_oracle_compare(instances, seed)?;
            emit(&compare_csv(&outcome), out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> anyhow::Result<ExitCode> {
    run()
}
