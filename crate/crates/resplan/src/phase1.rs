//! Phase 1: QoS-aware base-station deployment. Starting from a
//! nearest-site assignment, the planner repeatedly tries to empty the
//! least-loaded deployed site by re-homing its test points onto neighbors
//! that stay energy-surplus, removing the site when everything re-homes
//! without breaking QoS. The first failed removal ends the search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::cost_c1;
use crate::energy::{optimal_grid_vector, surplus};
use crate::radio::{infeasible_set, Assignment};
use crate::scenario::Scenario;

/// Outcome of [`run_phase1`].
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Result {
    /// False when even the initial nearest-site assignment violates QoS; the
    /// remaining fields then describe that initial assignment for diagnosis.
    pub found: bool,
    pub assign: Assignment,
    /// Per-site grid draw in watts: `max{−Δ_n, 0}` for deployed sites.
    pub grid: Vec<f64>,
    /// Installation plus lifetime grid-energy cost of `assign`.
    pub cost: f64,
    /// Number of removal attempts made (accepted or final-failed).
    pub outer_iterations: usize,
}

/// Attaches every test point (ascending id) to its nearest site with spare
/// capacity, ties to the lowest site id; deploys exactly the sites that end
/// up serving someone.
///
/// # Panics
/// If the instance has more test points than total capacity `B·N`.
pub fn initial_assignment(s: &Scenario) -> Assignment {
    let capacity = s.capacity() as usize;
    let mut assign = Assignment::empty(s.n_tps(), s.n_sites());
    let mut load = vec![0usize; s.n_sites()];
    for m in 0..s.n_tps() {
        let mut best: Option<(f64, usize)> = None;
        for n in 0..s.n_sites() {
            if load[n] < capacity {
                let d = s.tps()[m].position.distance(&s.sites()[n].position);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, n));
                }
            }
        }
        let (_, n) = best.expect("instance must satisfy capacity·sites >= test points");
        assign.p[m][n] = true;
        load[n] += 1;
    }
    for n in 0..s.n_sites() {
        assign.b[n] = load[n] > 0;
    }
    assign
}

/// Runs the deployment search. Deterministic for a fixed `(scenario, seed)`;
/// the seed only drives the uniform choice among equally-least-loaded sites.
pub fn run_phase1(s: &Scenario, seed: u64) -> Phase1Result {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let capacity = s.capacity() as usize;
    let mut assign = initial_assignment(s);

    if !infeasible_set(&assign, s).is_empty() {
        let grid = optimal_grid_vector(&assign, s);
        let cost = cost_c1(&assign.b, &grid, s);
        return Phase1Result { found: false, assign, grid, cost, outer_iterations: 0 };
    }

    let mut outer_iterations = 0;
    loop {
        let deployed = assign.deployed_sites();
        if deployed.is_empty() {
            break;
        }
        outer_iterations += 1;

        // Uniform choice among the least-loaded deployed sites (ascending id).
        let min_load = deployed.iter().map(|&n| assign.served_count(n)).min().unwrap();
        let candidates: Vec<usize> = deployed
            .iter()
            .copied()
            .filter(|&n| assign.served_count(n) == min_load)
            .collect();
        let target = candidates[rng.gen_range(0..candidates.len())];

        // Tentatively remove the site and re-home its test points.
        let mut tentative = assign.clone();
        let detached: Vec<usize> =
            (0..s.n_tps()).filter(|&m| tentative.p[m][target]).collect();
        for &m in &detached {
            tentative.p[m][target] = false;
        }
        tentative.b[target] = false;

        let mut all_rehomed = true;
        for &m in &detached {
            // Remaining deployed sites by distance, ties to the lowest id.
            let mut order: Vec<usize> = tentative.deployed_sites();
            order.sort_by(|&a, &b| {
                s.tps()[m]
                    .position
                    .distance(&s.sites()[a].position)
                    .total_cmp(&s.tps()[m].position.distance(&s.sites()[b].position))
                    .then(a.cmp(&b))
            });
            let mut attached = false;
            for n in order {
                if tentative.served_count(n) >= capacity {
                    continue;
                }
                tentative.p[m][n] = true;
                // The receiving site must remain strictly energy-surplus
                // with the extra load; otherwise undo and look further.
                if surplus(&tentative, n, s) > 0.0 {
                    attached = true;
                    break;
                }
                tentative.p[m][n] = false;
            }
            if !attached {
                all_rehomed = false;
                break;
            }
        }

        if all_rehomed && infeasible_set(&tentative, s).is_empty() {
            assign = tentative;
        } else {
            // First failed removal ends the search; `assign` still holds the
            // last accepted state.
            break;
        }
    }

    let grid = optimal_grid_vector(&assign, s);
    let cost = cost_c1(&assign.b, &grid, s);
    Phase1Result { found: true, assign, grid, cost, outer_iterations }
}
