//! Phase 2: energy balancing over inter-site power lines. Starting from the
//! fully connected directed edge set over deployed sites, each iteration
//! solves an LP for grid draws and line flows, prices the full plan, prunes
//! the idle lines (or the weakest active one once none are idle), and keeps
//! the cheapest snapshot. If even that snapshot loses to the line-free
//! phase-1 plan, the planner falls back to it.

use crate::cost::lambda_t;
use crate::energy::{surplus, EnergyPlan};
use crate::lp::{solve_lp, LpProblem, LpStatus, Relation};
use crate::phase1::Phase1Result;
use crate::radio::Assignment;
use crate::scenario::Scenario;

/// Flows at or below this magnitude (watts) count as zero when pruning.
pub const ZERO_FLOW_W: f64 = 1e-6;

/// Outcome of [`run_phase2`].
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Result {
    pub plan: EnergyPlan,
    /// Total cost of the plan: installation + connections + lifetime energy.
    pub cost: f64,
    /// LP rounds executed; at most the initial edge count.
    pub iterations: usize,
    /// True when the line-free phase-1 plan beat every edge snapshot; the
    /// returned plan then has no edges and the phase-1 grid vector.
    pub fell_back: bool,
}

/// Builds the balancing LP for a fixed edge set: variables are the grid draw
/// of every deployed site followed by one flow per edge (in the given
/// order), all nonnegative; the objective prices lifetime grid energy plus
/// lifetime line losses; one ≤-constraint per deployed site caps its net
/// shortfall at its surplus.
///
/// Installation and connection costs are constants for a fixed edge set, so
/// they stay out of the LP and are added back by the caller.
pub fn build_balancing_lp(
    assign: &Assignment,
    edges: &[(usize, usize)],
    s: &Scenario,
) -> LpProblem {
    let deployed = assign.deployed_sites();
    let lt = lambda_t(s);
    let n_grid = deployed.len();

    let mut objective = Vec::with_capacity(n_grid + edges.len());
    objective.extend(std::iter::repeat(lt).take(n_grid));
    objective.extend(edges.iter().map(|&(t, n)| lt * s.edge(t, n).loss_factor));

    let mut p = LpProblem::minimize(objective);
    for (i, &n) in deployed.iter().enumerate() {
        p.set_name(i, format!("g{n}"));
    }
    for (k, &(t, n)) in edges.iter().enumerate() {
        p.set_name(n_grid + k, format!("f{t}_{n}"));
    }

    for (i, &site) in deployed.iter().enumerate() {
        // Exports count against the site, imports arrive shrunk by the line
        // loss, the grid covers the rest:
        //   −g + Σ exports − Σ (1−ε)·imports ≤ Δ_site.
        let mut row = vec![0.0; n_grid + edges.len()];
        row[i] = -1.0;
        for (k, &(t, n)) in edges.iter().enumerate() {
            if t == site {
                row[n_grid + k] += 1.0;
            }
            if n == site {
                row[n_grid + k] -= 1.0 - s.edge(t, n).loss_factor;
            }
        }
        p.add_constraint(row, Relation::Le, surplus(assign, site, s))
            .expect("row width matches the variable count");
    }
    p
}

/// Runs the pruning loop on a feasible phase-1 result.
///
/// # Panics
/// If `p1.found` is false; phase 2 requires a QoS-feasible deployment.
pub fn run_phase2(p1: &Phase1Result, s: &Scenario, _seed: u64) -> Phase2Result {
    assert!(p1.found, "phase 2 requires a feasible phase-1 result");
    let deployed = p1.assign.deployed_sites();
    let n_sites = s.n_sites();
    let n_grid = deployed.len();

    let install: f64 = deployed.iter().map(|&n| s.sites()[n].install_cost_eur).sum();

    let mut edges: Vec<(usize, usize)> = deployed
        .iter()
        .flat_map(|&t| deployed.iter().map(move |&n| (t, n)))
        .filter(|&(t, n)| t != n)
        .collect();

    if edges.is_empty() {
        // Zero or one deployed site: nothing to balance.
        return Phase2Result {
            plan: EnergyPlan::without_edges(p1.grid.clone()),
            cost: p1.cost,
            iterations: 0,
            fell_back: true,
        };
    }

    let mut best: Option<(f64, Vec<(usize, usize)>, Vec<f64>, Vec<Vec<f64>>)> = None;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let lp = build_balancing_lp(&p1.assign, &edges, s);
        let sol = solve_lp(&lp).expect("balancing LP is well-formed");
        assert_eq!(
            sol.status,
            LpStatus::Optimal,
            "balancing LP is always feasible and bounded"
        );

        let connection: f64 =
            edges.iter().map(|&(t, n)| s.edge(t, n).conn_cost_eur).sum();
        let c2 = sol.objective_value + connection + install;

        if best.as_ref().is_some_and(|&(s_best, ..)| c2 > s_best) {
            break;
        }
        let mut grid = vec![0.0; n_sites];
        for (i, &n) in deployed.iter().enumerate() {
            grid[n] = sol.x[i];
        }
        let mut flows = vec![vec![0.0; n_sites]; n_sites];
        for (k, &(t, n)) in edges.iter().enumerate() {
            flows[t][n] = sol.x[n_grid + k];
        }
        best = Some((c2, edges.clone(), grid, flows));

        // Prune the lines carrying the least energy: drop every idle edge,
        // or — once all remaining edges carry flow — the single weakest one
        // (first in lexicographic order on ties, since `edges` is lex-sorted).
        let old_len = edges.len();
        if (0..edges.len()).any(|k| sol.x[n_grid + k] <= ZERO_FLOW_W) {
            let mut k = 0;
            edges.retain(|_| {
                let keep = sol.x[n_grid + k] > ZERO_FLOW_W;
                k += 1;
                keep
            });
        } else {
            let weakest = (0..edges.len())
                .min_by(|&a, &b| sol.x[n_grid + a].total_cmp(&sol.x[n_grid + b]))
                .expect("edge set is non-empty inside the loop");
            edges.remove(weakest);
        }
        debug_assert!(edges.len() < old_len, "each round must prune an edge");
        if edges.is_empty() {
            break;
        }
    }

    let (s_best, best_edges, best_grid, best_flows) =
        best.expect("loop ran at least once");
    if p1.cost < s_best {
        return Phase2Result {
            plan: EnergyPlan::without_edges(p1.grid.clone()),
            cost: p1.cost,
            iterations,
            fell_back: true,
        };
    }
    let mut edge_matrix = vec![vec![false; n_sites]; n_sites];
    for &(t, n) in &best_edges {
        edge_matrix[t][n] = true;
    }
    Phase2Result {
        plan: EnergyPlan { grid: best_grid, flows: best_flows, edges: edge_matrix },
        cost: s_best,
        iterations,
        fell_back: false,
    }
}
