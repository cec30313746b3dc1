//! Brute-force exact solver for small instances, used as ground truth when
//! judging the two-phase heuristic. It enumerates every deployment vector,
//! every capacity-respecting assignment, and every directed power-line
//! subset over the deployed sites, pricing each with the same LP and cost
//! arithmetic the heuristic uses.

use std::collections::HashMap;

use thiserror::Error;

use crate::energy::EnergyPlan;
use crate::lp::{solve_lp, LpStatus};
use crate::phase2::build_balancing_lp;
use crate::radio::{qos_linearized_holds, Assignment};
use crate::scenario::Scenario;

/// Hard size caps; the search is exponential in all three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_sites: usize,
    pub max_tps: usize,
    pub max_capacity: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_sites: 4, max_tps: 6, max_capacity: 3 }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(
        "instance too large for exhaustive search: {sites} sites (cap {max_sites}), \
         {tps} test points (cap {max_tps}), capacity {capacity} (cap {max_capacity})"
    )]
    TooLarge {
        sites: usize,
        max_sites: usize,
        tps: usize,
        max_tps: usize,
        capacity: u32,
        max_capacity: u32,
    },
    #[error("no deployment satisfies every QoS target")]
    Infeasible,
}

/// Global optimum over deployments, assignments, power-line subsets, and
/// the corresponding grid/flow dispatch.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub best_cost: f64,
    pub best_assign: Assignment,
    pub best_plan: EnergyPlan,
    /// Combinations examined: one per QoS-rejected (deployment, assignment)
    /// pair, plus one per power-line subset of every feasible pair.
    pub enumerated: u64,
}

/// Cheapest dispatch for one deployment: best over all edge subsets of
/// (LP energy cost + connection cost), with the solution artifacts.
struct DispatchBest {
    net_cost: f64,
    edges: Vec<(usize, usize)>,
    grid: Vec<f64>,
    flows: Vec<Vec<f64>>,
}

/// Exhaustively solves the full planning problem.
///
/// The dispatch sub-problem depends on the assignment only through the
/// per-site served counts, so its optimum is memoized per (deployment,
/// counts) while assignments are enumerated in full for the QoS check.
pub fn solve_exact(s: &Scenario, limits: OracleLimits) -> Result<ExactResult, OracleError> {
    let n_sites = s.n_sites();
    let n_tps = s.n_tps();
    if n_sites > limits.max_sites
        || n_tps > limits.max_tps
        || s.capacity() > limits.max_capacity
    {
        return Err(OracleError::TooLarge {
            sites: n_sites,
            max_sites: limits.max_sites,
            tps: n_tps,
            max_tps: limits.max_tps,
            capacity: s.capacity(),
            max_capacity: limits.max_capacity,
        });
    }

    let mut enumerated: u64 = 0;
    let mut best: Option<(f64, Assignment, EnergyPlan)> = None;
    let mut memo: HashMap<(u32, Vec<u8>), DispatchBest> = HashMap::new();

    for mask in 0u32..(1 << n_sites) {
        let deployed: Vec<usize> = (0..n_sites).filter(|&n| mask >> n & 1 == 1).collect();
        if deployed.len() * (s.capacity() as usize) < n_tps {
            continue; // not enough slots for a complete assignment
        }
        let install: f64 = deployed.iter().map(|&n| s.sites()[n].install_cost_eur).sum();

        let mut assign = Assignment::empty(n_tps, n_sites);
        for &n in &deployed {
            assign.b[n] = true;
        }
        let mut slots_left = vec![0u32; n_sites];
        for &n in &deployed {
            slots_left[n] = s.capacity();
        }
        enumerate_assignments(
            s,
            &deployed,
            mask,
            install,
            0,
            &mut assign,
            &mut slots_left,
            &mut memo,
            &mut enumerated,
            &mut best,
        );
    }

    match best {
        Some((best_cost, best_assign, best_plan)) => {
            Ok(ExactResult { best_cost, best_assign, best_plan, enumerated })
        }
        None => Err(OracleError::Infeasible),
    }
}

/// Depth-first over test points in ascending id, branching on the serving
/// site; at each leaf runs the QoS check and, if it passes, prices the
/// deployment via the memoized dispatch optimum.
#[allow(clippy::too_many_arguments)]
fn enumerate_assignments(
    s: &Scenario,
    deployed: &[usize],
    mask: u32,
    install: f64,
    m: usize,
    assign: &mut Assignment,
    slots_left: &mut [u32],
    memo: &mut HashMap<(u32, Vec<u8>), DispatchBest>,
    enumerated: &mut u64,
    best: &mut Option<(f64, Assignment, EnergyPlan)>,
) {
    if m == s.n_tps() {
        let qos_ok = (0..s.n_tps())
            .all(|m| (0..s.n_sites()).all(|n| qos_linearized_holds(assign, m, n, s)));
        if !qos_ok {
            *enumerated += 1;
            return;
        }

        let counts: Vec<u8> =
            deployed.iter().map(|&n| assign.served_count(n) as u8).collect();
        let n_pairs = deployed.len() * deployed.len().saturating_sub(1);
        *enumerated += 1u64 << n_pairs;

        let dispatch = memo
            .entry((mask, counts))
            .or_insert_with(|| best_dispatch(s, deployed, assign));
        let total = install + dispatch.net_cost;
        if best.as_ref().is_none_or(|(c, ..)| total < *c) {
            let mut edges = vec![vec![false; s.n_sites()]; s.n_sites()];
            for &(t, n) in &dispatch.edges {
                edges[t][n] = true;
            }
            let plan =
                EnergyPlan { grid: dispatch.grid.clone(), flows: dispatch.flows.clone(), edges };
            *best = Some((total, assign.clone(), plan));
        }
        return;
    }

    for &n in deployed {
        if slots_left[n] == 0 {
            continue;
        }
        slots_left[n] -= 1;
        assign.p[m][n] = true;
        enumerate_assignments(
            s, deployed, mask, install, m + 1, assign, slots_left, memo, enumerated, best,
        );
        assign.p[m][n] = false;
        slots_left[n] += 1;
    }
}

/// Minimizes energy + connection cost over every directed edge subset for a
/// fixed deployment and load profile. Ties keep the first subset in mask
/// order, i.e. the one with lexicographically earliest edges.
fn best_dispatch(s: &Scenario, deployed: &[usize], assign: &Assignment) -> DispatchBest {
    let pairs: Vec<(usize, usize)> = deployed
        .iter()
        .flat_map(|&t| deployed.iter().map(move |&n| (t, n)))
        .filter(|&(t, n)| t != n)
        .collect();
    let n_grid = deployed.len();
    let n_sites = s.n_sites();

    let mut best: Option<DispatchBest> = None;
    for subset in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(k, _)| subset >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let connection: f64 = edges.iter().map(|&(t, n)| s.edge(t, n).conn_cost_eur).sum();

        let lp = build_balancing_lp(assign, &edges, s);
        let sol = solve_lp(&lp).expect("balancing LP is well-formed");
        assert_eq!(sol.status, LpStatus::Optimal, "balancing LP is always solvable");
        let net_cost = sol.objective_value + connection;

        if best.as_ref().is_none_or(|b| net_cost < b.net_cost) {
            let mut grid = vec![0.0; n_sites];
            for (i, &n) in deployed.iter().enumerate() {
                grid[n] = sol.x[i];
            }
            let mut flows = vec![vec![0.0; n_sites]; n_sites];
            for (k, &(t, n)) in edges.iter().enumerate() {
                flows[t][n] = sol.x[n_grid + k];
            }
            best = Some(DispatchBest { net_cost, edges, grid, flows });
        }
    }
    best.expect("subset loop covers at least the empty set")
}
