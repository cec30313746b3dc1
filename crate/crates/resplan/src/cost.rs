//! Deployment economics: the lifetime energy-price coefficient λT, the full
//! cost objective with its breakdown, and the two stage objectives (grid-only
//! C₁ and edge-aware C₂).

use thiserror::Error;

use crate::energy::EnergyPlan;
use crate::radio::Assignment;
use crate::scenario::Scenario;

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("energy price and life cycle must be positive and finite (price = {price} EUR/kWh, years = {years})")]
    Domain { price: f64, years: f64 },
}

/// Lifetime cost of one watt drawn continuously from the grid:
/// λT = price[EUR/kWh] · years · 8760[h/y] / 1000[W/kW], in EUR per watt.
pub fn lambda_t_eur_per_watt(
    price_eur_per_kwh: f64,
    life_cycle_years: f64,
) -> Result<f64, CostError> {
    if !(price_eur_per_kwh > 0.0
        && price_eur_per_kwh.is_finite()
        && life_cycle_years > 0.0
        && life_cycle_years.is_finite())
    {
        return Err(CostError::Domain { price: price_eur_per_kwh, years: life_cycle_years });
    }
    Ok(price_eur_per_kwh * life_cycle_years * HOURS_PER_YEAR / 1000.0)
}

/// λT for a validated scenario (whose price and life cycle are positive).
pub fn lambda_t(s: &Scenario) -> f64 {
    lambda_t_eur_per_watt(s.energy_price_eur_per_kwh(), s.life_cycle_years())
        .expect("scenario validation guarantees a positive price and life cycle")
}

/// Additive decomposition of a plan's lifetime cost in EUR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Σ installation costs of deployed sites.
    pub install_eur: f64,
    /// Σ connection costs of built power lines.
    pub connection_eur: f64,
    /// λT · Σ grid draw of deployed sites.
    pub grid_energy_eur: f64,
    /// λT · Σ ε_{t,n} · flow over built lines (energy burned in transfer).
    pub loss_energy_eur: f64,
    pub total_eur: f64,
}

impl CostBreakdown {
    pub fn zero() -> Self {
        CostBreakdown {
            install_eur: 0.0,
            connection_eur: 0.0,
            grid_energy_eur: 0.0,
            loss_energy_eur: 0.0,
            total_eur: 0.0,
        }
    }
}

/// Full lifetime cost of a deployment plus its energy plan.
pub fn objective_cost(assign: &Assignment, plan: &EnergyPlan, s: &Scenario) -> CostBreakdown {
    let lt = lambda_t(s);
    let mut install = 0.0;
    let mut grid = 0.0;
    for n in 0..s.n_sites() {
        if assign.b[n] {
            install += s.sites()[n].install_cost_eur;
            grid += plan.grid[n];
        }
    }
    let mut connection = 0.0;
    let mut loss_w = 0.0;
    for t in 0..s.n_sites() {
        for n in 0..s.n_sites() {
            if t != n && plan.edges[t][n] {
                connection += s.edge(t, n).conn_cost_eur;
                loss_w += s.edge(t, n).loss_factor * plan.flows[t][n];
            }
        }
    }
    let grid_energy = lt * grid;
    let loss_energy = lt * loss_w;
    CostBreakdown {
        install_eur: install,
        connection_eur: connection,
        grid_energy_eur: grid_energy,
        loss_energy_eur: loss_energy,
        total_eur: install + connection + grid_energy + loss_energy,
    }
}

/// Stage-one objective: installation plus lifetime grid energy of deployed
/// sites, with no power lines.
pub fn cost_c1(b: &[bool], grid: &[f64], s: &Scenario) -> f64 {
    let lt = lambda_t(s);
    (0..s.n_sites())
        .filter(|&n| b[n])
        .map(|n| s.sites()[n].install_cost_eur + lt * grid[n])
        .sum()
}

/// Stage-two objective over the deployed set `deployed`: for every built line
/// the connection cost plus lifetime loss energy, and for every deployed site
/// its installation cost plus lifetime grid energy.
pub fn cost_c2(
    edges: &[Vec<bool>],
    grid: &[f64],
    flows: &[Vec<f64>],
    s: &Scenario,
    deployed: &[usize],
) -> f64 {
    let lt = lambda_t(s);
    let mut total = 0.0;
    for &t in deployed {
        for &n in deployed {
            if t != n && edges[t][n] {
                total += s.edge(t, n).conn_cost_eur
                    + lt * s.edge(t, n).loss_factor * flows[t][n];
            }
        }
    }
    for &n in deployed {
        total += s.sites()[n].install_cost_eur + lt * grid[n];
    }
    total
}
