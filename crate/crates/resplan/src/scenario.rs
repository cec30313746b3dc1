//! Problem instances: candidate sites, test points, channel gains, power-line
//! parameters and global constants, plus random-instance generation and the
//! on-disk scenario file format.
//!
//! A [`Scenario`] is immutable after construction and validated up front, so
//! the solvers never re-check units or bounds. Noise and SINR targets enter
//! in dBm/dB (as in the file format) and are converted to linear watts/ratios
//! exactly once, at construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::EnergyDistribution;
use crate::radio::pathloss_gain;
use crate::units;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("capacity: {tps} test points exceed the total capacity of {sites} sites x {capacity} slots")]
    Capacity { tps: usize, sites: usize, capacity: u32 },
    #[error("parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("validation: {0}")]
    Validation(String),
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x_m: f64,
    pub y_m: f64,
}

impl Point {
    pub fn new(x_m: f64, y_m: f64) -> Self {
        Point { x_m, y_m }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }
}

/// Candidate base-station site together with its renewable source.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    /// Positional index within the scenario; assigned at construction.
    pub id: usize,
    pub position: Point,
    /// Installation cost c_n in EUR.
    pub install_cost_eur: f64,
    /// Transmission power P_n in watts spent per served test point.
    pub tx_power_per_tp_w: f64,
    /// Static operating power P_n^(o) in watts while deployed.
    pub static_power_w: f64,
    /// Outage bound φ_n: maximum allowed energy-outage probability.
    pub outage_bound: f64,
    /// Law of the harvested power Z_n.
    pub harvest: EnergyDistribution,
}

impl Site {
    pub fn new(
        position: Point,
        install_cost_eur: f64,
        tx_power_per_tp_w: f64,
        static_power_w: f64,
        outage_bound: f64,
        harvest: EnergyDistribution,
    ) -> Self {
        Site {
            id: 0,
            position,
            install_cost_eur,
            tx_power_per_tp_w,
            static_power_w,
            outage_bound,
            harvest,
        }
    }
}

/// Demand point with a minimum-SINR QoS requirement.
///
/// The dB values are the stored source of truth (they round-trip the file
/// format losslessly); the linear equivalents are derived once here.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPoint {
    /// Positional index within the scenario; assigned at construction.
    pub id: usize,
    pub position: Point,
    noise_dbm: f64,
    sinr_min_db: f64,
    noise_power_w: f64,
    sinr_min: f64,
}

impl TestPoint {
    pub fn new(position: Point, noise_dbm: f64, sinr_min_db: f64) -> Self {
        TestPoint {
            id: 0,
            position,
            noise_dbm,
            sinr_min_db,
            noise_power_w: units::dbm_to_watts(noise_dbm),
            sinr_min: units::db_to_linear(sinr_min_db),
        }
    }

    pub fn noise_dbm(&self) -> f64 {
        self.noise_dbm
    }

    pub fn sinr_min_db(&self) -> f64 {
        self.sinr_min_db
    }

    /// Noise power δ_m in watts.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    /// Minimum SINR γ_m as a linear ratio.
    pub fn sinr_min(&self) -> f64 {
        self.sinr_min
    }
}

/// Parameters of one directed power line (t, n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeParams {
    /// One-off connection cost c_{t,n} in EUR.
    pub conn_cost_eur: f64,
    /// Fraction ε_{t,n} of transferred power lost on the line.
    pub loss_factor: f64,
}

/// Log-distance pathloss constants: fixed term plus dB-per-decade slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossParams {
    pub l_a_db: f64,
    pub l_b_db: f64,
}

impl Default for PathlossParams {
    fn default() -> Self {
        PathlossParams { l_a_db: 148.1, l_b_db: 37.6 }
    }
}

/// Raw ingredients for [`Scenario::from_parts`]. The defaults carry the
/// standard evaluation constants, so tests and callers set only what they
/// care about.
#[derive(Debug, Clone)]
pub struct ScenarioParts {
    pub sites: Vec<Site>,
    pub tps: Vec<TestPoint>,
    /// M×N linear channel gains; computed from positions via pathloss when
    /// absent.
    pub gains: Option<Vec<Vec<f64>>>,
    pub capacity: u32,
    pub energy_price_eur_per_kwh: f64,
    pub life_cycle_years: f64,
    pub area_side_m: f64,
    pub edge_unit_cost_eur_per_m: f64,
    pub loss_factor: f64,
    pub pathloss: PathlossParams,
}

impl Default for ScenarioParts {
    fn default() -> Self {
        ScenarioParts {
            sites: Vec::new(),
            tps: Vec::new(),
            gains: None,
            capacity: 12,
            energy_price_eur_per_kwh: 0.3,
            life_cycle_years: 10.0,
            area_side_m: 3000.0,
            edge_unit_cost_eur_per_m: 10.0,
            loss_factor: 0.01,
            pathloss: PathlossParams::default(),
        }
    }
}

/// Immutable problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    sites: Vec<Site>,
    tps: Vec<TestPoint>,
    gains: Vec<Vec<f64>>,
    edges: Vec<Vec<EdgeParams>>,
    capacity: u32,
    energy_price_eur_per_kwh: f64,
    life_cycle_years: f64,
    area_side_m: f64,
    edge_unit_cost_eur_per_m: f64,
    loss_factor: f64,
    pathloss: PathlossParams,
    /// Cached I_n(φ_n): the firm supply credited to each site.
    supply_quantiles_w: Vec<f64>,
}

impl Scenario {
    /// Builds and validates a scenario. Site and test-point ids are assigned
    /// positionally; gains and edge parameters are derived from positions
    /// unless explicit gains are supplied.
    pub fn from_parts(parts: ScenarioParts) -> Result<Scenario, ScenarioError> {
        let ScenarioParts {
            mut sites,
            mut tps,
            gains,
            capacity,
            energy_price_eur_per_kwh,
            life_cycle_years,
            area_side_m,
            edge_unit_cost_eur_per_m,
            loss_factor,
            pathloss,
        } = parts;

        let invalid = |msg: String| Err(ScenarioError::Validation(msg));

        if capacity < 1 {
            return invalid(format!("capacity >= 1 violated (capacity = {capacity})"));
        }
        if !(energy_price_eur_per_kwh > 0.0 && energy_price_eur_per_kwh.is_finite()) {
            return invalid(format!(
                "energy_price > 0 violated (price = {energy_price_eur_per_kwh})"
            ));
        }
        if !(life_cycle_years > 0.0 && life_cycle_years.is_finite()) {
            return invalid(format!(
                "life_cycle_years > 0 violated (years = {life_cycle_years})"
            ));
        }
        if !(area_side_m > 0.0 && area_side_m.is_finite()) {
            return invalid(format!("area_m > 0 violated (area = {area_side_m})"));
        }
        if !(edge_unit_cost_eur_per_m >= 0.0 && edge_unit_cost_eur_per_m.is_finite()) {
            return invalid(format!(
                "edge_unit_cost >= 0 violated (unit cost = {edge_unit_cost_eur_per_m})"
            ));
        }
        if !(0.0..=1.0).contains(&loss_factor) {
            return invalid(format!("0 <= loss_factor <= 1 violated ({loss_factor})"));
        }
        if !(pathloss.l_a_db.is_finite() && pathloss.l_b_db.is_finite()) {
            return invalid("pathloss constants must be finite".into());
        }

        for (n, site) in sites.iter_mut().enumerate() {
            site.id = n;
            if !(site.position.x_m.is_finite() && site.position.y_m.is_finite()) {
                return invalid(format!("site {n}: position must be finite"));
            }
            if !(site.install_cost_eur >= 0.0) {
                return invalid(format!(
                    "install_cost >= 0 violated at site {n} ({})",
                    site.install_cost_eur
                ));
            }
            if !(site.tx_power_per_tp_w > 0.0) {
                return invalid(format!(
                    "tx_power_per_tp > 0 violated at site {n} ({})",
                    site.tx_power_per_tp_w
                ));
            }
            if !(site.static_power_w >= 0.0) {
                return invalid(format!(
                    "static_power >= 0 violated at site {n} ({})",
                    site.static_power_w
                ));
            }
            if !(site.outage_bound > 0.0 && site.outage_bound < 1.0) {
                return invalid(format!(
                    "0 < outage_bound < 1 violated at site {n} ({})",
                    site.outage_bound
                ));
            }
            if let Err(msg) = site.harvest.validate() {
                return invalid(format!("site {n}: {msg}"));
            }
        }

        for (m, tp) in tps.iter_mut().enumerate() {
            tp.id = m;
            if !(tp.position.x_m.is_finite() && tp.position.y_m.is_finite()) {
                return invalid(format!("tp {m}: position must be finite"));
            }
            if !(tp.noise_power_w > 0.0 && tp.noise_power_w.is_finite()) {
                return invalid(format!(
                    "noise_power > 0 violated at tp {m} ({} dBm)",
                    tp.noise_dbm
                ));
            }
            if !(tp.sinr_min > 0.0 && tp.sinr_min.is_finite()) {
                return invalid(format!(
                    "sinr_min > 0 violated at tp {m} ({} dB)",
                    tp.sinr_min_db
                ));
            }
        }

        let gains = match gains {
            Some(g) => {
                if g.len() != tps.len() || g.iter().any(|row| row.len() != sites.len()) {
                    return invalid(format!(
                        "gains dimensions must be {}x{}",
                        tps.len(),
                        sites.len()
                    ));
                }
                g
            }
            None => tps
                .iter()
                .map(|tp| {
                    sites
                        .iter()
                        .map(|site| {
                            pathloss_gain(
                                tp.position.distance(&site.position),
                                pathloss.l_a_db,
                                pathloss.l_b_db,
                            )
                        })
                        .collect()
                })
                .collect(),
        };
        for (m, row) in gains.iter().enumerate() {
            for (n, &g) in row.iter().enumerate() {
                if !(g > 0.0 && g <= 1.0) {
                    return invalid(format!(
                        "gains in (0, 1] violated at gains[{m}][{n}] = {g}"
                    ));
                }
            }
        }

        let edges: Vec<Vec<EdgeParams>> = sites
            .iter()
            .map(|t| {
                sites
                    .iter()
                    .map(|n| EdgeParams {
                        conn_cost_eur: if t.id == n.id {
                            0.0
                        } else {
                            edge_unit_cost_eur_per_m * t.position.distance(&n.position)
                        },
                        loss_factor,
                    })
                    .collect()
            })
            .collect();

        let supply_quantiles_w = sites
            .iter()
            .map(|site| {
                site.harvest
                    .quantile(site.outage_bound)
                    .expect("outage_bound validated above")
            })
            .collect();

        Ok(Scenario {
            sites,
            tps,
            gains,
            edges,
            capacity,
            energy_price_eur_per_kwh,
            life_cycle_years,
            area_side_m,
            edge_unit_cost_eur_per_m,
            loss_factor,
            pathloss,
            supply_quantiles_w,
        })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn tps(&self) -> &[TestPoint] {
        &self.tps
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_tps(&self) -> usize {
        self.tps.len()
    }

    /// Linear channel gain h_{m,n}.
    pub fn gain(&self, m: usize, n: usize) -> f64 {
        self.gains[m][n]
    }

    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gains
    }

    /// Parameters of the directed power line t -> n.
    pub fn edge(&self, t: usize, n: usize) -> EdgeParams {
        self.edges[t][n]
    }

    /// Maximum number of test points one base station may serve (B).
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn energy_price_eur_per_kwh(&self) -> f64 {
        self.energy_price_eur_per_kwh
    }

    pub fn life_cycle_years(&self) -> f64 {
        self.life_cycle_years
    }

    pub fn area_side_m(&self) -> f64 {
        self.area_side_m
    }

    pub fn edge_unit_cost_eur_per_m(&self) -> f64 {
        self.edge_unit_cost_eur_per_m
    }

    pub fn loss_factor(&self) -> f64 {
        self.loss_factor
    }

    pub fn pathloss(&self) -> PathlossParams {
        self.pathloss
    }

    /// Firm supply I_n(φ_n) in watts: the harvest level available with
    /// probability at least 1−φ_n.
    pub fn supply_quantile_w(&self, n: usize) -> f64 {
        self.supply_quantiles_w[n]
    }

    pub fn site_distance(&self, t: usize, n: usize) -> f64 {
        self.sites[t].position.distance(&self.sites[n].position)
    }

    /// The same scenario with every harvester removed (point mass at zero):
    /// the conventional all-grid baseline. Gains are carried over verbatim,
    /// so radio quantities match the original bit for bit.
    pub fn with_zero_harvest(&self) -> Scenario {
        let mut sites = self.sites.clone();
        for site in &mut sites {
            site.harvest = EnergyDistribution::none();
        }
        Scenario::from_parts(ScenarioParts {
            sites,
            tps: self.tps.clone(),
            gains: Some(self.gains.clone()),
            capacity: self.capacity,
            energy_price_eur_per_kwh: self.energy_price_eur_per_kwh,
            life_cycle_years: self.life_cycle_years,
            area_side_m: self.area_side_m,
            edge_unit_cost_eur_per_m: self.edge_unit_cost_eur_per_m,
            loss_factor: self.loss_factor,
            pathloss: self.pathloss,
        })
        .expect("a valid scenario stays valid with harvest removed")
    }
}

/// How per-site harvest laws are produced during generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarvestSpec {
    /// The same uniform law at every site.
    Fixed { a_w: f64, b_w: f64 },
    /// Per-site bounds drawn once at generation time: a_n uniform over
    /// `a_range`, b_n uniform over `b_range` (inclusive).
    Drawn { a_range: (f64, f64), b_range: (f64, f64) },
}

/// Knobs for [`generate_scenario`]. Defaults reproduce the standard
/// evaluation setup: 3 km × 3 km area, 9 grid sites, 20 test points,
/// B=12, and per-site harvest bounds a_n ∈ [0,100] W, b_n ∈ [100,200] W.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    pub area_side_m: f64,
    /// Number of candidate sites; must be a perfect square (grid layout).
    pub n_sites: usize,
    pub n_tps: usize,
    pub capacity: u32,
    pub energy_price_eur_per_kwh: f64,
    pub life_cycle_years: f64,
    pub install_cost_eur: f64,
    pub tx_power_per_tp_w: f64,
    pub static_power_w: f64,
    pub outage_bound: f64,
    pub noise_dbm: f64,
    pub sinr_min_db: f64,
    pub pathloss: PathlossParams,
    pub edge_unit_cost_eur_per_m: f64,
    pub loss_factor: f64,
    pub harvest: HarvestSpec,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            area_side_m: 3000.0,
            n_sites: 9,
            n_tps: 20,
            capacity: 12,
            energy_price_eur_per_kwh: 0.3,
            life_cycle_years: 10.0,
            install_cost_eur: 60_000.0,
            tx_power_per_tp_w: 20.0,
            static_power_w: 19.0,
            outage_bound: 0.05,
            noise_dbm: -114.0,
            sinr_min_db: 0.0,
            pathloss: PathlossParams::default(),
            edge_unit_cost_eur_per_m: 10.0,
            loss_factor: 0.01,
            harvest: HarvestSpec::Drawn { a_range: (0.0, 100.0), b_range: (100.0, 200.0) },
        }
    }
}

/// Generates a random instance: candidate sites on a uniform √N×√N grid
/// (each at its cell center), test points i.i.d. uniform over the area, and
/// harvest laws per `params.harvest`.
///
/// Determinism contract: for a fixed seed the result is identical, and the
/// RNG draws test-point positions first (x then y, in id order) and per-site
/// harvest bounds second (a then b, in id order). A `Fixed` harvest spec
/// consumes no randomness, so two generations with the same seed share TP
/// positions regardless of their harvest specs.
pub fn generate_scenario(
    params: &GenerationParams,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    let k = (params.n_sites as f64).sqrt().round() as usize;
    if k == 0 || k * k != params.n_sites {
        return Err(ScenarioError::Config(format!(
            "n_sites must be a positive perfect square for the grid layout (got {})",
            params.n_sites
        )));
    }
    if params.n_tps as u64 > params.capacity as u64 * params.n_sites as u64 {
        return Err(ScenarioError::Capacity {
            tps: params.n_tps,
            sites: params.n_sites,
            capacity: params.capacity,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let tps: Vec<TestPoint> = (0..params.n_tps)
        .map(|_| {
            let x = rng.gen_range(0.0..params.area_side_m);
            let y = rng.gen_range(0.0..params.area_side_m);
            TestPoint::new(Point::new(x, y), params.noise_dbm, params.sinr_min_db)
        })
        .collect();

    let spacing = params.area_side_m / k as f64;
    let mut sites = Vec::with_capacity(params.n_sites);
    for iy in 0..k {
        for ix in 0..k {
            let position = Point::new(
                (ix as f64 + 0.5) * spacing,
                (iy as f64 + 0.5) * spacing,
            );
            let harvest = match params.harvest {
                HarvestSpec::Fixed { a_w, b_w } => EnergyDistribution::uniform(a_w, b_w),
                HarvestSpec::Drawn { a_range, b_range } => {
                    let a = rng.gen_range(a_range.0..=a_range.1);
                    let b = rng.gen_range(b_range.0..=b_range.1);
                    EnergyDistribution::uniform(a, b)
                }
            };
            sites.push(Site::new(
                position,
                params.install_cost_eur,
                params.tx_power_per_tp_w,
                params.static_power_w,
                params.outage_bound,
                harvest,
            ));
        }
    }

    Scenario::from_parts(ScenarioParts {
        sites,
        tps,
        gains: None,
        capacity: params.capacity,
        energy_price_eur_per_kwh: params.energy_price_eur_per_kwh,
        life_cycle_years: params.life_cycle_years,
        area_side_m: params.area_side_m,
        edge_unit_cost_eur_per_m: params.edge_unit_cost_eur_per_m,
        loss_factor: params.loss_factor,
        pathloss: params.pathloss,
    })
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    area_m: f64,
    capacity: u32,
    energy_price_eur_per_kwh: f64,
    life_cycle_years: f64,
    edge_unit_cost_eur_per_m: f64,
    loss_factor: f64,
    #[serde(default = "default_l_a")]
    pathloss_l_a_db: f64,
    #[serde(default = "default_l_b")]
    pathloss_l_b_db: f64,
    /// Optional explicit M×N gain matrix, row-major, linear scale. When
    /// absent, gains are recomputed from positions and the pathloss
    /// constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gains: Option<Vec<f64>>,
    sites: Vec<SiteFile>,
    tps: Vec<TpFile>,
}

fn default_l_a() -> f64 {
    PathlossParams::default().l_a_db
}

fn default_l_b() -> f64 {
    PathlossParams::default().l_b_db
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteFile {
    x_m: f64,
    y_m: f64,
    install_cost_eur: f64,
    tx_power_w: f64,
    static_power_w: f64,
    outage_bound: f64,
    harvest: EnergyDistribution,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TpFile {
    x_m: f64,
    y_m: f64,
    noise_dbm: f64,
    sinr_min_db: f64,
}

/// Parses a scenario file. Schema violations surface as parse errors with
/// line/column positions; invariant violations surface as validation errors
/// naming the broken invariant.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text)?;
    let n_sites = file.sites.len();
    let n_tps = file.tps.len();

    let gains = match file.gains {
        Some(flat) => {
            if flat.len() != n_sites * n_tps {
                return Err(ScenarioError::Validation(format!(
                    "gains must hold exactly M*N = {} entries (got {})",
                    n_sites * n_tps,
                    flat.len()
                )));
            }
            Some(flat.chunks(n_sites).map(|row| row.to_vec()).collect())
        }
        None => None,
    };

    let sites = file
        .sites
        .into_iter()
        .map(|sf| {
            Site::new(
                Point::new(sf.x_m, sf.y_m),
                sf.install_cost_eur,
                sf.tx_power_w,
                sf.static_power_w,
                sf.outage_bound,
                sf.harvest,
            )
        })
        .collect();
    let tps = file
        .tps
        .into_iter()
        .map(|tf| TestPoint::new(Point::new(tf.x_m, tf.y_m), tf.noise_dbm, tf.sinr_min_db))
        .collect();

    Scenario::from_parts(ScenarioParts {
        sites,
        tps,
        gains,
        capacity: file.capacity,
        energy_price_eur_per_kwh: file.energy_price_eur_per_kwh,
        life_cycle_years: file.life_cycle_years,
        area_side_m: file.area_m,
        edge_unit_cost_eur_per_m: file.edge_unit_cost_eur_per_m,
        loss_factor: file.loss_factor,
        pathloss: PathlossParams { l_a_db: file.pathloss_l_a_db, l_b_db: file.pathloss_l_b_db },
    })
}

/// Serializes a scenario so that `load_scenario(save_scenario(s)) == s`
/// exactly. The gain matrix is written out only when it differs from what
/// would be recomputed from positions.
pub fn save_scenario(s: &Scenario) -> String {
    let recomputed: Vec<Vec<f64>> = s
        .tps
        .iter()
        .map(|tp| {
            s.sites
                .iter()
                .map(|site| {
                    pathloss_gain(
                        tp.position.distance(&site.position),
                        s.pathloss.l_a_db,
                        s.pathloss.l_b_db,
                    )
                })
                .collect()
        })
        .collect();
    let gains = if recomputed == s.gains {
        None
    } else {
        Some(s.gains.iter().flatten().copied().collect())
    };

    let file = ScenarioFile {
        area_m: s.area_side_m,
        capacity: s.capacity,
        energy_price_eur_per_kwh: s.energy_price_eur_per_kwh,
        life_cycle_years: s.life_cycle_years,
        edge_unit_cost_eur_per_m: s.edge_unit_cost_eur_per_m,
        loss_factor: s.loss_factor,
        pathloss_l_a_db: s.pathloss.l_a_db,
        pathloss_l_b_db: s.pathloss.l_b_db,
        gains,
        sites: s
            .sites
            .iter()
            .map(|site| SiteFile {
                x_m: site.position.x_m,
                y_m: site.position.y_m,
                install_cost_eur: site.install_cost_eur,
                tx_power_w: site.tx_power_per_tp_w,
                static_power_w: site.static_power_w,
                outage_bound: site.outage_bound,
                harvest: site.harvest,
            })
            .collect(),
        tps: s
            .tps
            .iter()
            .map(|tp| TpFile {
                x_m: tp.position.x_m,
                y_m: tp.position.y_m,
                noise_dbm: tp.noise_dbm,
                sinr_min_db: tp.sinr_min_db,
            })
            .collect(),
    };
    toml::to_string_pretty(&file).expect("scenario serialization cannot fail")
}
