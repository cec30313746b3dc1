//! Harvest model and energy feasibility: the per-site harvest distribution,
//! the quantile supply bound, the signed surplus Δ_n, the closed-form optimal
//! grid power, the chance-constrained outage inequality, and a Monte-Carlo
//! harness that validates the outage bound empirically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::radio::Assignment;
use crate::scenario::Scenario;

/// Absolute tolerance in watts when checking the outage constraint.
/// LP solutions carry rounding noise of roughly this order.
pub const OUTAGE_TOL_W: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("quantile level must lie strictly inside (0, 1), got {0}")]
    QuantileLevel(f64),
}

/// Stationary law of the power harvested by one site's renewable source.
///
/// Only the uniform family ships; the quantile/CDF interface is the extension
/// point for other continuous laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnergyDistribution {
    /// Harvested power uniform on [a_w, b_w] watts. `a_w == b_w` degenerates
    /// to a point mass (used for the no-harvest baseline).
    Uniform { a_w: f64, b_w: f64 },
}

impl EnergyDistribution {
    pub fn uniform(a_w: f64, b_w: f64) -> Self {
        EnergyDistribution::Uniform { a_w, b_w }
    }

    /// Point mass at zero: a site with no usable harvest.
    pub fn none() -> Self {
        EnergyDistribution::Uniform { a_w: 0.0, b_w: 0.0 }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        let EnergyDistribution::Uniform { a_w, b_w } = *self;
        if !(a_w.is_finite() && b_w.is_finite() && 0.0 <= a_w && a_w <= b_w) {
            return Err(format!(
                "harvest bounds must satisfy 0 <= a_w <= b_w (got a_w={a_w}, b_w={b_w})"
            ));
        }
        Ok(())
    }

    /// Probability density at `z` watts. Infinite at the atom of a degenerate
    /// (point-mass) distribution.
    pub fn pdf(&self, z: f64) -> f64 {
        let EnergyDistribution::Uniform { a_w, b_w } = *self;
        if z < a_w || z > b_w {
            0.0
        } else if a_w == b_w {
            f64::INFINITY
        } else {
            1.0 / (b_w - a_w)
        }
    }

    /// Cumulative distribution function P(Z ≤ z).
    pub fn cdf(&self, z: f64) -> f64 {
        let EnergyDistribution::Uniform { a_w, b_w } = *self;
        if z < a_w {
            0.0
        } else if z >= b_w {
            1.0
        } else {
            (z - a_w) / (b_w - a_w)
        }
    }

    /// Exact inverse of the CDF on (0,1): the harvest level exceeded with
    /// probability 1−phi.
    pub fn quantile(&self, phi: f64) -> Result<f64, EnergyError> {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(EnergyError::QuantileLevel(phi));
        }
        let EnergyDistribution::Uniform { a_w, b_w } = *self;
        Ok(a_w + phi * (b_w - a_w))
    }

    /// Draws one harvest realization.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let EnergyDistribution::Uniform { a_w, b_w } = *self;
        a_w + rng.gen::<f64>() * (b_w - a_w)
    }
}

/// Energy side of a plan: grid draws, directed inter-site flows, and the
/// built power-line edges. All vectors/matrices are indexed by site id over
/// the full candidate set; entries for undeployed sites stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPlan {
    /// Grid power P_n^(g) in watts, length N.
    pub grid: Vec<f64>,
    /// flows[t][n] = watts transferred from site t to site n (diagonal zero).
    pub flows: Vec<Vec<f64>>,
    /// edges[t][n] = whether the directed line (t,n) is built.
    pub edges: Vec<Vec<bool>>,
}

impl EnergyPlan {
    /// Plan with no grid power, no flows and no edges.
    pub fn zero(n_sites: usize) -> Self {
        EnergyPlan {
            grid: vec![0.0; n_sites],
            flows: vec![vec![0.0; n_sites]; n_sites],
            edges: vec![vec![false; n_sites]; n_sites],
        }
    }

    /// Edge-free plan with the given grid vector.
    pub fn without_edges(grid: Vec<f64>) -> Self {
        let n = grid.len();
        EnergyPlan {
            grid,
            flows: vec![vec![0.0; n]; n],
            edges: vec![vec![false; n]; n],
        }
    }

    /// Checks the structural plan invariants against a deployment.
    pub fn validate(&self, assign: &Assignment) -> Result<(), String> {
        let n = self.grid.len();
        if self.flows.len() != n || self.edges.len() != n || assign.b.len() != n {
            return Err("plan dimensions do not match the site count".into());
        }
        for t in 0..n {
            if self.flows[t].len() != n || self.edges[t].len() != n {
                return Err("plan matrices must be square".into());
            }
            if self.grid[t] < 0.0 {
                return Err(format!("grid power must be nonnegative (site {t})"));
            }
            for u in 0..n {
                if self.flows[t][u] < 0.0 {
                    return Err(format!("flows must be nonnegative (edge {t}->{u})"));
                }
                if self.flows[t][u] > 0.0 && !self.edges[t][u] {
                    return Err(format!("positive flow on unbuilt edge {t}->{u}"));
                }
                if self.edges[t][u] && !(assign.b[t] && assign.b[u]) {
                    return Err(format!("edge {t}->{u} touches an undeployed site"));
                }
            }
        }
        Ok(())
    }
}

/// Signed energy surplus Δ_n: quantile supply minus static and transmission
/// demand. Positive means the site's firm harvest covers its own load.
pub fn surplus(assign: &Assignment, n: usize, s: &Scenario) -> f64 {
    let site = &s.sites()[n];
    let served = assign.served_count(n) as f64;
    -served * site.tx_power_per_tp_w - site.static_power_w + s.supply_quantile_w(n)
}

/// Closed-form optimal grid power: max{−Δ_n, 0} for deployed sites, 0 for
/// undeployed ones.
pub fn optimal_grid_power(assign: &Assignment, n: usize, s: &Scenario) -> f64 {
    if assign.b[n] {
        (-surplus(assign, n, s)).max(0.0)
    } else {
        0.0
    }
}

/// Optimal grid power for every site.
pub fn optimal_grid_vector(assign: &Assignment, s: &Scenario) -> Vec<f64> {
    (0..s.sites().len())
        .map(|n| optimal_grid_power(assign, n, s))
        .collect()
}

/// Left-hand side of the outage constraint for site n, in watts:
/// demand + exports − grid − discounted imports − quantile supply,
/// gated by the deployment indicator. Non-positive means the outage
/// probability stays within the site's bound.
pub fn outage_lhs(assign: &Assignment, plan: &EnergyPlan, n: usize, s: &Scenario) -> f64 {
    if !assign.b[n] {
        return 0.0;
    }
    let site = &s.sites()[n];
    let served = assign.served_count(n) as f64;
    let mut lhs = served * site.tx_power_per_tp_w + site.static_power_w - plan.grid[n]
        - s.supply_quantile_w(n);
    for t in 0..s.sites().len() {
        if t == n {
            continue;
        }
        if plan.edges[n][t] {
            lhs += plan.flows[n][t];
        }
        if plan.edges[t][n] {
            lhs -= (1.0 - s.edge(t, n).loss_factor) * plan.flows[t][n];
        }
    }
    lhs
}

/// Whether the outage constraint holds at site n (within [`OUTAGE_TOL_W`]).
pub fn outage_constraint_satisfied(
    assign: &Assignment,
    plan: &EnergyPlan,
    n: usize,
    s: &Scenario,
) -> bool {
    outage_lhs(assign, plan, n, s) <= OUTAGE_TOL_W
}

/// Empirical outage probability at site n: the fraction of `draws` harvest
/// realizations under which firm supply (grid + discounted imports + draw)
/// falls short of demand (load + static + exports).
pub fn simulate_outage(
    assign: &Assignment,
    plan: &EnergyPlan,
    n: usize,
    s: &Scenario,
    draws: u64,
    seed: u64,
) -> f64 {
    assert!(draws >= 1, "need at least one draw");
    if !assign.b[n] {
        return 0.0;
    }
    let site = &s.sites()[n];
    let served = assign.served_count(n) as f64;
    let mut demand = served * site.tx_power_per_tp_w + site.static_power_w;
    let mut firm = plan.grid[n];
    for t in 0..s.sites().len() {
        if t == n {
            continue;
        }
        if plan.edges[n][t] {
            demand += plan.flows[n][t];
        }
        if plan.edges[t][n] {
            firm += (1.0 - s.edge(t, n).loss_factor) * plan.flows[t][n];
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut short = 0u64;
    for _ in 0..draws {
        if site.harvest.sample(&mut rng) + firm < demand {
            short += 1;
        }
    }
    short as f64 / draws as f64
}
