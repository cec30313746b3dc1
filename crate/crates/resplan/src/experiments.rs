//! Experiment harness behind the CLI: the life-cycle sweep, the
//! harvest-spread sweep, the heuristic-vs-exact comparison, batch-means
//! statistics, and deterministic CSV emission.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::oracle::{solve_exact, OracleError, OracleLimits};
use crate::phase1::{run_phase1, Phase1Result};
use crate::phase2::{run_phase2, Phase2Result};
use crate::planner::{plan_scenario, PlanOptions};
use crate::scenario::{
    generate_scenario, GenerationParams, HarvestSpec, Point, Scenario, ScenarioError,
    ScenarioParts, Site, TestPoint,
};

#[derive(Debug, Error)]
pub enum ExperimentsError {
    #[error("need at least two feasible samples for a confidence interval, got {0}")]
    TooFewSamples(usize),
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    Confidence(f64),
    #[error("invalid sweep spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Counter-based seed derivation: every (experiment, run) pair gets an
/// independent stream regardless of execution order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    // SplitMix64 over the concatenated words; avalanches even for
    // consecutive counters.
    let mut state = base;
    for &part in parts {
        state = state.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(part);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        state = z ^ (z >> 31);
    }
    state
}

/// Planner configuration evaluated by the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigLabel {
    /// Conventional deployment: no harvesters, cheaper installs, phase 1 only.
    NoRes,
    /// Harvesters installed but no power lines: phase 1 only.
    ResNoConn,
    /// Harvesters plus optional power lines: phase 1 + phase 2.
    ResConn,
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConfigLabel::NoRes => "no-res",
            ConfigLabel::ResNoConn => "res-no-conn",
            ConfigLabel::ResConn => "res-conn",
        })
    }
}

/// Parameters shared by every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub runs: usize,
    pub confidence: f64,
    pub seed: u64,
    /// Per-site capacity override; `None` keeps each sweep's default.
    pub b_cap: Option<u32>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { runs: 100, confidence: 0.95, seed: 1, b_cap: None }
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<(), ExperimentsError> {
        if self.runs < 2 {
            return Err(ExperimentsError::Spec(
                "runs must be >= 2 to form confidence intervals".into(),
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(ExperimentsError::Confidence(self.confidence));
        }
        Ok(())
    }
}

/// One aggregated CSV row: statistics of a (sweep coordinate, configuration)
/// cell. Infeasible runs are counted but excluded from the mean; a cell with
/// fewer than two feasible runs reports NaN statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_x: f64,
    pub config: ConfigLabel,
    pub b_cap: u32,
    pub n_runs: usize,
    pub n_infeasible: usize,
    pub mean_cost_eur: f64,
    pub ci_half_width_eur: f64,
}

/// Observed solver-iteration bounds across a batch of runs: phase 1 must
/// finish within N outer loops, phase 2 within its initial edge count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TerminationStats {
    pub phase1_runs: u64,
    pub phase1_violations: u64,
    pub phase2_runs: u64,
    pub phase2_violations: u64,
}

impl TerminationStats {
    pub fn record_phase1(&mut self, p1: &Phase1Result, s: &Scenario) {
        self.phase1_runs += 1;
        if p1.outer_iterations > s.n_sites() {
            self.phase1_violations += 1;
        }
    }

    pub fn record_phase2(&mut self, p2: &Phase2Result, p1: &Phase1Result) {
        self.phase2_runs += 1;
        let d = p1.assign.deployed_sites().len();
        if p2.iterations > d * d.saturating_sub(1) {
            self.phase2_violations += 1;
        }
    }

    pub fn merge(&mut self, other: &TerminationStats) {
        self.phase1_runs += other.phase1_runs;
        self.phase1_violations += other.phase1_violations;
        self.phase2_runs += other.phase2_runs;
        self.phase2_violations += other.phase2_violations;
    }
}

/// Rows plus provenance comments (emitted as `#` lines in the CSV) and the
/// iteration-bound bookkeeping for the whole sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub termination: TerminationStats,
    pub comments: Vec<String>,
}

/// Sample mean and normal-approximation confidence half-width z·s/√n over
/// independent batch runs (s uses the n−1 divisor).
pub fn batch_mean_ci(samples: &[f64], confidence: f64) -> Result<(f64, f64), ExperimentsError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ExperimentsError::Confidence(confidence));
    }
    let n = samples.len();
    if n < 2 {
        return Err(ExperimentsError::TooFewSamples(n));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal parameters are valid")
        .inverse_cdf(0.5 + confidence / 2.0);
    Ok((mean, z * var.sqrt() / nf.sqrt()))
}

fn summarize_cell(
    sweep_x: f64,
    config: ConfigLabel,
    b_cap: u32,
    costs: &[f64],
    n_infeasible: usize,
    confidence: f64,
) -> SweepRow {
    let (mean, half) = match batch_mean_ci(costs, confidence) {
        Ok(pair) => pair,
        Err(_) => (f64::NAN, f64::NAN),
    };
    SweepRow {
        sweep_x,
        config,
        b_cap,
        n_runs: costs.len(),
        n_infeasible,
        mean_cost_eur: mean,
        ci_half_width_eur: half,
    }
}

/// Installation cost of the conventional no-harvester build-out; sited
/// equipment is cheaper without the RES hardware.
pub const NO_RES_INSTALL_EUR: f64 = 55_000.0;

/// Life-cycle sweep: total cost of ownership versus planning horizon
/// T ∈ {6, 8, …, 20} years at the standard nine-site scale.
///
/// Each run draws fresh test-point positions and per-site harvest bounds;
/// the draws depend on (base seed, run) only, so the T axis sees the same
/// 100 instances at every point (common random numbers). Three
/// configurations share each instance's layout: `no-res` replaces the
/// harvest law with a point mass at zero and installs at
/// [`NO_RES_INSTALL_EUR`].
pub fn run_lifecycle_sweep(spec: &SweepSpec) -> Result<SweepOutcome, ExperimentsError> {
    spec.validate()?;
    let b_cap = spec.b_cap.unwrap_or(12);
    let t_grid: Vec<f64> = (0..8).map(|i| 6.0 + 2.0 * i as f64).collect();
    let configs = [ConfigLabel::NoRes, ConfigLabel::ResNoConn, ConfigLabel::ResConn];

    let mut costs = vec![[Vec::new(), Vec::new(), Vec::new()]; t_grid.len()];
    let mut infeasible = vec![[0usize; 3]; t_grid.len()];
    let mut termination = TerminationStats::default();

    for run in 0..spec.runs {
        let scen_seed = derive_seed(spec.seed, &[0, run as u64]);
        let p1_seed = derive_seed(spec.seed, &[1, run as u64]);
        for (ti, &t) in t_grid.iter().enumerate() {
            let no_res_params = GenerationParams {
                life_cycle_years: t,
                capacity: b_cap,
                install_cost_eur: NO_RES_INSTALL_EUR,
                harvest: HarvestSpec::Fixed { a_w: 0.0, b_w: 0.0 },
                ..GenerationParams::default()
            };
            let s0 = generate_scenario(&no_res_params, scen_seed)?;
            let p0 = run_phase1(&s0, p1_seed);
            termination.record_phase1(&p0, &s0);
            if p0.found {
                costs[ti][0].push(p0.cost);
            } else {
                infeasible[ti][0] += 1;
            }

            let res_params = GenerationParams {
                life_cycle_years: t,
                capacity: b_cap,
                ..GenerationParams::default()
            };
            let s1 = generate_scenario(&res_params, scen_seed)?;
            let p1 = run_phase1(&s1, p1_seed);
            termination.record_phase1(&p1, &s1);
            if p1.found {
                costs[ti][1].push(p1.cost);
                let p2 = run_phase2(&p1, &s1, p1_seed);
                termination.record_phase2(&p2, &p1);
                costs[ti][2].push(p2.cost);
            } else {
                infeasible[ti][1] += 1;
                infeasible[ti][2] += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for (ti, &t) in t_grid.iter().enumerate() {
        for (ci, &config) in configs.iter().enumerate() {
            rows.push(summarize_cell(
                t,
                config,
                b_cap,
                &costs[ti][ci],
                infeasible[ti][ci],
                spec.confidence,
            ));
        }
    }
    Ok(SweepOutcome {
        rows,
        termination,
        comments: vec![
            "life-cycle sweep: total cost vs planning horizon T (years)".into(),
            format!(
                "runs={} confidence={} seed={} b={}; instances redrawn per run \
                 (common across T and configs)",
                spec.runs, spec.confidence, spec.seed, b_cap
            ),
            format!(
                "no-res installs at {NO_RES_INSTALL_EUR} EUR with zero harvest; \
                 res configs at 60000 EUR with a_n~U[0,100], b_n~U[100,200]"
            ),
        ],
    })
}

/// Harvest-spread sweep at T = 10 years: per-site harvest is uniform on
/// [100−10k, 190] W for k = 0..9, so the spread b−a grows as 90+10k while
/// the mean falls as 145−5k. One test-point layout is drawn for the whole
/// sweep; runs differ only in the phase-1 removal randomness.
///
/// Without a capacity override both B=6 and B=12 are swept, giving the four
/// configurations {res-no-conn, res-conn} × {6, 12}.
pub fn run_spread_sweep(spec: &SweepSpec) -> Result<SweepOutcome, ExperimentsError> {
    spec.validate()?;
    let b_values: Vec<u32> = match spec.b_cap {
        Some(b) => vec![b],
        None => vec![6, 12],
    };
    let configs = [ConfigLabel::ResNoConn, ConfigLabel::ResConn];
    let layout_seed = derive_seed(spec.seed, &[0]);
    let mut termination = TerminationStats::default();
    let mut rows = Vec::new();

    for k in 0..10u32 {
        let a_w = 100.0 - 10.0 * k as f64;
        let b_w = 190.0;
        for &b_cap in &b_values {
            let params = GenerationParams {
                life_cycle_years: 10.0,
                capacity: b_cap,
                harvest: HarvestSpec::Fixed { a_w, b_w },
                ..GenerationParams::default()
            };
            let s = generate_scenario(&params, layout_seed)?;
            let mut cell_costs = [Vec::new(), Vec::new()];
            let mut cell_infeasible = [0usize; 2];
            for run in 0..spec.runs {
                let p1_seed = derive_seed(spec.seed, &[1, run as u64]);
                let p1 = run_phase1(&s, p1_seed);
                termination.record_phase1(&p1, &s);
                if p1.found {
                    cell_costs[0].push(p1.cost);
                    let p2 = run_phase2(&p1, &s, p1_seed);
                    termination.record_phase2(&p2, &p1);
                    cell_costs[1].push(p2.cost);
                } else {
                    cell_infeasible[0] += 1;
                    cell_infeasible[1] += 1;
                }
            }
            for (ci, &config) in configs.iter().enumerate() {
                rows.push(summarize_cell(
                    b_w - a_w,
                    config,
                    b_cap,
                    &cell_costs[ci],
                    cell_infeasible[ci],
                    spec.confidence,
                ));
            }
        }
    }
    Ok(SweepOutcome {
        rows,
        termination,
        comments: vec![
            "harvest-spread sweep at T=10 years: cost vs spread of the \
             per-site harvest law"
                .into(),
            "harvest family: a_n = 100 - 10k W, b_n = 190 W for k = 0..9, \
             i.e. spread 90+10k W and mean 145 - 5k W"
                .into(),
            format!(
                "runs={} confidence={} seed={} b={:?}; one TP layout for the \
                 whole sweep, runs differ only in phase-1 randomness",
                spec.runs, spec.confidence, spec.seed, b_values
            ),
        ],
    })
}

/// Renders a sweep as CSV: provenance comments, a header row, then one line
/// per (sweep coordinate, configuration). Byte-deterministic for a fixed
/// spec.
pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut out = String::new();
    for c in &outcome.comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("sweep_x,config,b_cap,n_runs,n_infeasible,mean_cost_eur,ci_half_width_eur\n");
    for r in &outcome.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.sweep_x,
            r.config,
            r.b_cap,
            r.n_runs,
            r.n_infeasible,
            r.mean_cost_eur,
            r.ci_half_width_eur
        ));
    }
    out
}

/// Verdict of one heuristic-vs-exact instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareStatus {
    /// Both solved; the gap is defined.
    Ok,
    /// No deployment satisfies QoS; instance skipped.
    Infeasible,
    /// The exact search found a plan but the heuristic did not.
    HeuristicFailed,
}

impl fmt::Display for CompareStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareStatus::Ok => "ok",
            CompareStatus::Infeasible => "infeasible",
            CompareStatus::HeuristicFailed => "heuristic-failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub instance: usize,
    pub n_sites: usize,
    pub n_tps: usize,
    pub b_cap: u32,
    pub status: CompareStatus,
    /// NaN unless the exact search solved the instance.
    pub exact_cost_eur: f64,
    /// NaN unless the heuristic found a feasible plan.
    pub heuristic_cost_eur: f64,
    /// (heuristic − exact) / exact; NaN unless status is ok.
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    pub termination: TerminationStats,
    pub n_ok: usize,
    pub n_infeasible: usize,
    pub n_heuristic_failed: usize,
    /// Median and maximum relative gap over the ok rows; NaN when none.
    pub median_gap: f64,
    pub max_gap: f64,
}

/// Random oracle-sized instance: 2–4 sites and 1–6 test points scattered
/// uniformly over a 300 m – 3 km square, with random install costs, harvest
/// bounds, capacity, and planning horizon.
fn oracle_instance(seed: u64) -> Result<Scenario, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_sites = rng.gen_range(2..=4usize);
    let capacity = rng.gen_range(1..=3u32);
    let n_tps = rng.gen_range(1..=6usize.min(n_sites * capacity as usize));
    let area = rng.gen_range(300.0..=3000.0);
    let life_cycle_years = rng.gen_range(6.0..=20.0);
    let sites = (0..n_sites)
        .map(|_| {
            let x = rng.gen_range(0.0..area);
            let y = rng.gen_range(0.0..area);
            let install = rng.gen_range(1_000.0..=60_000.0);
            let a = rng.gen_range(0.0..=100.0);
            let b = rng.gen_range(100.0..=200.0);
            Site::new(
                Point::new(x, y),
                install,
                20.0,
                19.0,
                0.05,
                crate::energy::EnergyDistribution::uniform(a, b),
            )
        })
        .collect();
    let tps = (0..n_tps)
        .map(|_| {
            let x = rng.gen_range(0.0..area);
            let y = rng.gen_range(0.0..area);
            TestPoint::new(Point::new(x, y), -114.0, 0.0)
        })
        .collect();
    Scenario::from_parts(ScenarioParts {
        sites,
        tps,
        capacity,
        area_side_m: area,
        life_cycle_years,
        ..ScenarioParts::default()
    })
}

/// Pits the two-phase heuristic against the exhaustive oracle on capped
/// random instances.
pub fn run_oracle_compare(
    instances: usize,
    seed: u64,
) -> Result<CompareOutcome, ExperimentsError> {
    if instances == 0 {
        return Err(ExperimentsError::Spec("instances must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(instances);
    let mut termination = TerminationStats::default();
    let mut gaps = Vec::new();

    for i in 0..instances {
        let s = oracle_instance(derive_seed(seed, &[2, i as u64]))?;
        let p1_seed = derive_seed(seed, &[3, i as u64]);
        let heuristic = plan_scenario(&s, PlanOptions::default(), p1_seed);
        termination.record_phase1(&heuristic.phase1, &s);
        if let Some(p2) = &heuristic.phase2 {
            termination.record_phase2(p2, &heuristic.phase1);
        }

        let exact = match solve_exact(&s, OracleLimits::default()) {
            Ok(r) => Some(r),
            Err(OracleError::Infeasible) => None,
            Err(e @ OracleError::TooLarge { .. }) => {
                unreachable!("generator respects the oracle caps: {e}")
            }
        };

        let (status, exact_cost, heuristic_cost, rel_gap) = match (&exact, heuristic.feasible)
        {
            (Some(r), true) => {
                let h = heuristic.cost.total_eur;
                let gap = (h - r.best_cost) / r.best_cost;
                gaps.push(gap);
                (CompareStatus::Ok, r.best_cost, h, gap)
            }
            (Some(r), false) => {
                (CompareStatus::HeuristicFailed, r.best_cost, f64::NAN, f64::NAN)
            }
            (None, _) => (CompareStatus::Infeasible, f64::NAN, f64::NAN, f64::NAN),
        };
        rows.push(CompareRow {
            instance: i,
            n_sites: s.n_sites(),
            n_tps: s.n_tps(),
            b_cap: s.capacity(),
            status,
            exact_cost_eur: exact_cost,
            heuristic_cost_eur: heuristic_cost,
            rel_gap,
        });
    }

    let n_ok = gaps.len();
    let n_infeasible =
        rows.iter().filter(|r| r.status == CompareStatus::Infeasible).count();
    let n_heuristic_failed =
        rows.iter().filter(|r| r.status == CompareStatus::HeuristicFailed).count();
    gaps.sort_by(f64::total_cmp);
    let median_gap = match n_ok {
        0 => f64::NAN,
        n if n % 2 == 1 => gaps[n / 2],
        n => (gaps[n / 2 - 1] + gaps[n / 2]) / 2.0,
    };
    let max_gap = gaps.last().copied().unwrap_or(f64::NAN);
    Ok(CompareOutcome {
        rows,
        termination,
        n_ok,
        n_infeasible,
        n_heuristic_failed,
        median_gap,
        max_gap,
    })
}

/// Renders the oracle comparison as CSV with a `#` summary header.
pub fn compare_csv(outcome: &CompareOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# heuristic vs exact search: ok={} infeasible={} heuristic-failed={}\n",
        outcome.n_ok, outcome.n_infeasible, outcome.n_heuristic_failed
    ));
    out.push_str(&format!(
        "# median_rel_gap={} max_rel_gap={}\n",
        outcome.median_gap, outcome.max_gap
    ));
    out.push_str(
        "instance,n_sites,n_tps,b_cap,status,exact_cost_eur,heuristic_cost_eur,rel_gap\n",
    );
    for r in &outcome.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.n_sites,
            r.n_tps,
            r.b_cap,
            r.status,
            r.exact_cost_eur,
            r.heuristic_cost_eur,
            r.rel_gap
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ci_matches_two_point_reference() {
        // {0, 2}: mean 1, s = √2, half-width z·√2/√2 = z ≈ 1.96 at 95%.
        let (mean, half) = batch_mean_ci(&[0.0, 2.0], 0.95).unwrap();
        assert_eq!(mean, 1.0);
        assert_relative_eq!(half, 1.959964, max_relative = 1e-6);
    }

    #[test]
    fn ci_of_constant_samples_is_zero() {
        let (mean, half) = batch_mean_ci(&[7.5; 30], 0.95).unwrap();
        assert_eq!(mean, 7.5);
        assert_eq!(half, 0.0);
    }

    #[test]
    fn ci_is_scale_equivariant() {
        let xs = [3.0, 9.0, 1.0, 4.0, 5.5];
        let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let (m1, h1) = batch_mean_ci(&xs, 0.9).unwrap();
        let (m2, h2) = batch_mean_ci(&doubled, 0.9).unwrap();
        assert_relative_eq!(m2, 2.0 * m1, max_relative = 1e-12);
        assert_relative_eq!(h2, 2.0 * h1, max_relative = 1e-12);
    }

    #[test]
    fn ci_rejects_degenerate_input() {
        assert!(matches!(
            batch_mean_ci(&[1.0], 0.95),
            Err(ExperimentsError::TooFewSamples(1))
        ));
        assert!(matches!(
            batch_mean_ci(&[1.0, 2.0], 1.0),
            Err(ExperimentsError::Confidence(_))
        ));
    }

    #[test]
    fn sweeps_reject_specs_that_cannot_form_intervals() {
        let single = SweepSpec { runs: 1, ..SweepSpec::default() };
        assert!(run_lifecycle_sweep(&single).is_err());
        let sure = SweepSpec { confidence: 1.0, ..SweepSpec::default() };
        assert!(run_spread_sweep(&sure).is_err());
    }

    #[test]
    fn derived_seeds_spread_out() {
        // Different parts map to different streams; same parts agree.
        assert_eq!(derive_seed(1, &[0, 5]), derive_seed(1, &[0, 5]));
        assert_ne!(derive_seed(1, &[0, 5]), derive_seed(1, &[1, 5]));
        assert_ne!(derive_seed(1, &[0, 5]), derive_seed(1, &[0, 6]));
        assert_ne!(derive_seed(1, &[0, 5]), derive_seed(2, &[0, 5]));
    }

    #[test]
    fn lifecycle_rows_are_complete_and_deterministic() {
        let spec = SweepSpec { runs: 3, ..SweepSpec::default() };
        let a = run_lifecycle_sweep(&spec).unwrap();
        assert_eq!(a.rows.len(), 8 * 3);
        for (i, row) in a.rows.iter().enumerate() {
            assert_eq!(row.sweep_x, 6.0 + 2.0 * (i / 3) as f64);
            assert_eq!(row.n_runs + row.n_infeasible, 3);
            assert_eq!(row.b_cap, 12);
        }
        // Feasibility is a property of the layout, not of the config.
        for chunk in a.rows.chunks(3) {
            assert!(chunk.iter().all(|r| r.n_infeasible == chunk[0].n_infeasible));
        }
        let b = run_lifecycle_sweep(&spec).unwrap();
        assert_eq!(sweep_csv(&a), sweep_csv(&b));
        assert_eq!(a.termination.phase1_violations, 0);
        assert_eq!(a.termination.phase2_violations, 0);
    }

    #[test]
    fn spread_rows_cover_both_capacities() {
        let spec = SweepSpec { runs: 2, ..SweepSpec::default() };
        let out = run_spread_sweep(&spec).unwrap();
        // 10 spreads × 2 capacities × 2 configs.
        assert_eq!(out.rows.len(), 40);
        for (i, row) in out.rows.iter().enumerate() {
            assert_eq!(row.sweep_x, 90.0 + 10.0 * (i / 4) as f64);
        }
        let restricted = run_spread_sweep(&SweepSpec { b_cap: Some(12), ..spec }).unwrap();
        assert_eq!(restricted.rows.len(), 20);
        assert!(restricted.rows.iter().all(|r| r.b_cap == 12));
    }

    #[test]
    fn sweep_csv_shape() {
        let spec = SweepSpec { runs: 2, ..SweepSpec::default() };
        let csv = sweep_csv(&run_lifecycle_sweep(&spec).unwrap());
        let mut lines = csv.lines();
        let mut n_comments = 0;
        for line in lines.by_ref() {
            if line.starts_with('#') {
                n_comments += 1;
            } else {
                assert_eq!(
                    line,
                    "sweep_x,config,b_cap,n_runs,n_infeasible,mean_cost_eur,ci_half_width_eur"
                );
                break;
            }
        }
        assert!(n_comments >= 2);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 24);
        assert!(rows[0].starts_with("6,no-res,12,"));
        assert!(rows[23].starts_with("20,res-conn,12,"));
    }

    #[test]
    fn compare_runs_end_to_end() {
        let out = run_oracle_compare(4, 7).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.n_ok + out.n_infeasible + out.n_heuristic_failed, 4);
        for r in &out.rows {
            if r.status == CompareStatus::Ok {
                assert!(r.rel_gap >= -1e-9);
                assert!(r.exact_cost_eur <= r.heuristic_cost_eur * (1.0 + 1e-9));
            }
        }
        let csv = compare_csv(&out);
        assert!(csv.contains("median_rel_gap="));
        assert_eq!(compare_csv(&run_oracle_compare(4, 7).unwrap()), csv);
    }
}
