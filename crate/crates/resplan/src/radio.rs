//! Downlink radio model: assignment structure, log-distance pathloss, load
//! ratios, SINR with load-scaled interference, big-M constants and the two
//! equivalent QoS feasibility checks (ratio form and linearized form).

use crate::scenario::Scenario;

/// Relative tolerance for SINR-style comparisons. Both feasibility routes use
/// the same comparator so they cannot disagree at the boundary.
pub(crate) const SINR_REL_TOL: f64 = 1e-9;

/// `a >= b` up to a relative tolerance scaled by the larger magnitude.
pub(crate) fn approx_ge(a: f64, b: f64) -> bool {
    a >= b - SINR_REL_TOL * a.abs().max(b.abs())
}

/// Deployment decision `b` plus the Boolean test-point/site assignment `p`
/// (rows indexed by test point, columns by site).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub p: Vec<Vec<bool>>,
    pub b: Vec<bool>,
}

impl Assignment {
    /// No sites deployed, nothing assigned.
    pub fn empty(n_tps: usize, n_sites: usize) -> Self {
        Assignment { p: vec![vec![false; n_sites]; n_tps], b: vec![false; n_sites] }
    }

    pub fn n_tps(&self) -> usize {
        self.p.len()
    }

    pub fn n_sites(&self) -> usize {
        self.b.len()
    }

    /// Number of test points served by site `n`.
    pub fn served_count(&self, n: usize) -> usize {
        self.p.iter().filter(|row| row[n]).count()
    }

    /// The site serving test point `m`, if any.
    pub fn assigned_site(&self, m: usize) -> Option<usize> {
        self.p[m].iter().position(|&v| v)
    }

    /// Indices of deployed sites, ascending.
    pub fn deployed_sites(&self) -> Vec<usize> {
        self.b
            .iter()
            .enumerate()
            .filter_map(|(n, &on)| on.then_some(n))
            .collect()
    }

    /// Structural feasibility: each test point served by at most one site,
    /// only deployed sites serve, and no site exceeds `capacity`.
    pub fn validate(&self, capacity: u32) -> Result<(), String> {
        for (m, row) in self.p.iter().enumerate() {
            if row.len() != self.b.len() {
                return Err(format!(
                    "assignment row {m} has {} entries, expected {}",
                    row.len(),
                    self.b.len()
                ));
            }
            let served = row.iter().filter(|&&v| v).count();
            if served > 1 {
                return Err(format!("test point {m} assigned to {served} sites"));
            }
            for (n, &p_mn) in row.iter().enumerate() {
                if p_mn && !self.b[n] {
                    return Err(format!("test point {m} assigned to undeployed site {n}"));
                }
            }
        }
        for n in 0..self.b.len() {
            let load = self.served_count(n);
            if load as u64 > capacity as u64 {
                return Err(format!(
                    "site {n} serves {load} test points, capacity is {capacity}"
                ));
            }
        }
        Ok(())
    }
}

/// Linear channel gain at `distance_m` meters under the log-distance model
/// `L(d) = l_a + l_b·log10(d/1km)` dB, with the distance floored at 1 m so
/// the gain never exceeds the model's 1 m value.
pub fn pathloss_gain(distance_m: f64, l_a_db: f64, l_b_db: f64) -> f64 {
    let d = distance_m.max(1.0);
    10f64.powf(-(l_a_db + l_b_db * (d / 1000.0).log10()) / 10.0)
}

/// Fraction of site `t`'s capacity in use: ρ_t = (Σ_m p_{m,t}) / B.
pub fn load_ratio(assign: &Assignment, t: usize, capacity: u32) -> f64 {
    assign.served_count(t) as f64 / capacity as f64
}

/// Load-scaled interference seen by test point `m` when served from site `n`:
/// Σ_{t≠n, t deployed} ρ_t · P_t · h_{m,t}. Undeployed candidates radiate
/// nothing, so they are excluded.
fn interference_w(assign: &Assignment, m: usize, n: usize, s: &Scenario) -> f64 {
    let cap = s.capacity();
    (0..s.n_sites())
        .filter(|&t| t != n && assign.b[t])
        .map(|t| {
            load_ratio(assign, t, cap) * s.sites()[t].tx_power_per_tp_w * s.gain(m, t)
        })
        .sum()
}

/// SINR of test point `m` served from site `n` under the given assignment.
pub fn sinr(assign: &Assignment, m: usize, n: usize, s: &Scenario) -> f64 {
    let signal = s.sites()[n].tx_power_per_tp_w * s.gain(m, n);
    signal / (interference_w(assign, m, n, s) + s.tps()[m].noise_power_w())
}

/// Big-M constant for the linearized QoS constraint of pair (m, n):
/// γ_m · (Σ_{t≠n} P_t·h_{m,t} + δ_m), a fixed upper bound on the constraint's
/// right-hand side over *all* assignments (every load ratio is at most one).
/// It depends only on the instance, never on the current assignment.
pub fn big_m(m: usize, n: usize, s: &Scenario) -> f64 {
    let tp = &s.tps()[m];
    let worst_interference: f64 = (0..s.n_sites())
        .filter(|&t| t != n)
        .map(|t| s.sites()[t].tx_power_per_tp_w * s.gain(m, t))
        .sum();
    tp.sinr_min() * (worst_interference + tp.noise_power_w())
}

/// Linearized QoS constraint for pair (m, n):
/// M_{m,n}·(1−p_{m,n}) + P_n·h_{m,n}·p_{m,n} ≥ γ_m·(Σ_{t≠n} ρ_t·P_t·h_{m,t} + δ_m).
///
/// With Boolean p the left side is either the big-M constant (constraint
/// inactive) or the received signal power. Equivalent to `sinr >= γ_m` for
/// assigned pairs whenever per-site loads respect the capacity.
pub fn qos_linearized_holds(assign: &Assignment, m: usize, n: usize, s: &Scenario) -> bool {
    let tp = &s.tps()[m];
    let lhs = if assign.p[m][n] {
        s.sites()[n].tx_power_per_tp_w * s.gain(m, n)
    } else {
        big_m(m, n, s)
    };
    let rhs = tp.sinr_min() * (interference_w(assign, m, n, s) + tp.noise_power_w());
    approx_ge(lhs, rhs)
}

/// Set of test points whose QoS is violated: unassigned test points and
/// assigned ones whose SINR falls short of γ_m. Returned ascending.
pub fn infeasible_set(assign: &Assignment, s: &Scenario) -> Vec<usize> {
    (0..s.n_tps())
        .filter(|&m| match assign.assigned_site(m) {
            Some(n) => !approx_ge(sinr(assign, m, n, s), s.tps()[m].sinr_min()),
            None => true,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::EnergyDistribution;
    use crate::scenario::{Point, Scenario, ScenarioParts, Site, TestPoint};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scenario_with_gains(
        n_sites: usize,
        n_tps: usize,
        gains: Vec<Vec<f64>>,
        capacity: u32,
    ) -> Scenario {
        let sites = (0..n_sites)
            .map(|n| {
                Site::new(
                    Point::new(1000.0 * n as f64, 0.0),
                    60_000.0,
                    20.0,
                    19.0,
                    0.05,
                    EnergyDistribution::uniform(100.0, 200.0),
                )
            })
            .collect();
        let tps = (0..n_tps)
            .map(|m| TestPoint::new(Point::new(100.0 * m as f64, 500.0), -114.0, 0.0))
            .collect();
        Scenario::from_parts(ScenarioParts {
            sites,
            tps,
            gains: Some(gains),
            capacity,
            ..ScenarioParts::default()
        })
        .expect("fixture is valid")
    }

    #[test]
    fn pathloss_reference_values() {
        // 148.1 dB at 1 km, +37.6 dB per decade.
        assert_relative_eq!(
            pathloss_gain(1000.0, 148.1, 37.6),
            1.549e-15,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            pathloss_gain(500.0, 148.1, 37.6),
            2.099e-14,
            max_relative = 1e-3
        );
        // Halving the distance multiplies the gain by 2^3.76 ≈ 13.55.
        let ratio = pathloss_gain(500.0, 148.1, 37.6) / pathloss_gain(1000.0, 148.1, 37.6);
        assert_relative_eq!(ratio, 13.55, max_relative = 1e-3);
    }

    #[test]
    fn pathloss_floors_distance_at_one_meter() {
        let at_floor = pathloss_gain(1.0, 148.1, 37.6);
        assert_eq!(pathloss_gain(0.0, 148.1, 37.6), at_floor);
        assert_eq!(pathloss_gain(0.5, 148.1, 37.6), at_floor);
        assert!(pathloss_gain(1.1, 148.1, 37.6) < at_floor);
        assert!(at_floor <= 1.0);
    }

    #[test]
    fn pathloss_is_monotone_decreasing() {
        let mut prev = pathloss_gain(1.0, 148.1, 37.6);
        for i in 1..200 {
            let g = pathloss_gain(1.0 + 25.0 * i as f64, 148.1, 37.6);
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn single_site_sinr_matches_reference() {
        // One site, one TP at 500 m: SINR = P·h/δ ≈ 105.4 with P = 20 W.
        let s = scenario_with_gains(
            1,
            1,
            vec![vec![pathloss_gain(500.0, 148.1, 37.6)]],
            12,
        );
        let mut assign = Assignment::empty(1, 1);
        assign.b[0] = true;
        assign.p[0][0] = true;
        assert_relative_eq!(sinr(&assign, 0, 0, &s), 105.4, max_relative = 1e-3);
        assert!(infeasible_set(&assign, &s).is_empty());
    }

    #[test]
    fn interference_scales_with_load() {
        let h = 1e-14;
        let s = scenario_with_gains(2, 4, vec![vec![10.0 * h, h]; 4], 12);
        let mut assign = Assignment::empty(4, 2);
        assign.b = vec![true, true];
        assign.p[0][0] = true;
        let base = sinr(&assign, 0, 0, &s);
        // Loading the interferer with one TP reduces TP 0's SINR; with two it
        // drops further.
        assign.p[1][1] = true;
        let one = sinr(&assign, 0, 0, &s);
        assign.p[2][1] = true;
        let two = sinr(&assign, 0, 0, &s);
        assert!(base > one && one > two);
        // ρ = 2/12 interference: 2/12 · 20 W · h.
        let tp = &s.tps()[0];
        let expected = 20.0 * 10.0 * h
            / ((2.0 / 12.0) * 20.0 * h + tp.noise_power_w());
        assert_relative_eq!(two, expected, epsilon = 1e-12);
    }

    #[test]
    fn undeployed_sites_do_not_interfere() {
        let h = 1e-14;
        let s = scenario_with_gains(2, 2, vec![vec![h, h]; 2], 12);
        let mut assign = Assignment::empty(2, 2);
        assign.b = vec![true, false];
        assign.p[0][0] = true;
        // Site 1 is undeployed: p[1][1] cannot be set, and even a stale load
        // on a deployed-then-removed site is excluded by the b-filter.
        let tp = &s.tps()[0];
        let expected = 20.0 * h / tp.noise_power_w();
        assert_relative_eq!(sinr(&assign, 0, 0, &s), expected, epsilon = 1e-12);
    }

    #[test]
    fn big_m_matches_reference() {
        // One interferer with P = 20 W, h = 1e-14, γ = 1 (0 dB), δ at −114 dBm:
        // M = 20·1e-14 + 3.981e-15 ≈ 2.0398e-13.
        let s = scenario_with_gains(2, 1, vec![vec![5e-14, 1e-14]], 12);
        assert_relative_eq!(big_m(0, 0, &s), 2.0398e-13, max_relative = 1e-4);
    }

    #[test]
    fn big_m_ignores_deployment() {
        let s = scenario_with_gains(3, 1, vec![vec![5e-14, 1e-14, 2e-14]], 12);
        // The constant must not depend on any assignment, so computing it
        // twice around an assignment change yields the same bits.
        let before = big_m(0, 0, &s);
        let mut assign = Assignment::empty(1, 3);
        assign.b = vec![true, true, true];
        assign.p[0][0] = true;
        let after = big_m(0, 0, &s);
        assert_eq!(before, after);
        // And it dominates the RHS of any assignment's constraint.
        let tp = &s.tps()[0];
        let rhs = tp.sinr_min()
            * (super::interference_w(&assign, 0, 0, &s) + tp.noise_power_w());
        assert!(before >= rhs);
    }

    #[test]
    fn linearized_and_ratio_checks_agree_exhaustively() {
        // All Boolean assignments on small instances, random gains: the
        // linearized constraint must hold for every (m, n) exactly when all
        // assigned pairs meet their SINR targets.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n_sites = 2;
            let n_tps = 2;
            let gains: Vec<Vec<f64>> = (0..n_tps)
                .map(|_| (0..n_sites).map(|_| rng.gen_range(1e-16..1e-13)).collect())
                .collect();
            let s = scenario_with_gains(n_sites, n_tps, gains, 12);
            // Enumerate all p with at most one site per TP, all sites deployed.
            for code in 0..((n_sites + 1).pow(n_tps as u32)) {
                let mut assign = Assignment::empty(n_tps, n_sites);
                assign.b = vec![true; n_sites];
                let mut c = code;
                for m in 0..n_tps {
                    let choice = c % (n_sites + 1);
                    c /= n_sites + 1;
                    if choice > 0 {
                        assign.p[m][choice - 1] = true;
                    }
                }
                let linearized_ok = (0..n_tps)
                    .all(|m| (0..n_sites).all(|n| qos_linearized_holds(&assign, m, n, &s)));
                let ratio_ok = (0..n_tps).all(|m| match assign.assigned_site(m) {
                    Some(n) => approx_ge(sinr(&assign, m, n, &s), s.tps()[m].sinr_min()),
                    None => true,
                });
                assert_eq!(linearized_ok, ratio_ok);
            }
        }
    }

    #[test]
    fn infeasible_set_flags_unassigned_and_weak() {
        let h_strong = 1e-13;
        let h_weak = 1e-16;
        let s = scenario_with_gains(
            2,
            3,
            vec![
                vec![h_strong, h_weak],
                vec![h_weak, h_weak],
                vec![h_weak, h_strong],
            ],
            12,
        );
        let mut assign = Assignment::empty(3, 2);
        assign.b = vec![true, true];
        assign.p[0][0] = true;
        assign.p[1][0] = true; // weak link: SINR ≈ 20·1e-16/δ ≈ 0.5, below γ=1
        assert_eq!(infeasible_set(&assign, &s), vec![1, 2]);
        assign.p[2][1] = true;
        assert_eq!(infeasible_set(&assign, &s), vec![1]);
    }

    #[test]
    fn assignment_validation() {
        let mut assign = Assignment::empty(3, 2);
        assign.b = vec![true, false];
        assign.p[0][0] = true;
        assert!(assign.validate(12).is_ok());
        assert_eq!(assign.served_count(0), 1);
        assert_eq!(assign.assigned_site(0), Some(0));
        assert_eq!(assign.assigned_site(1), None);
        assert_eq!(assign.deployed_sites(), vec![0]);

        let mut double = assign.clone();
        double.p[0][1] = true;
        assert!(double.validate(12).unwrap_err().contains("2 sites"));

        let mut undeployed = assign.clone();
        undeployed.p[1][1] = true;
        assert!(undeployed.validate(12).unwrap_err().contains("undeployed"));

        let mut overload = assign.clone();
        overload.p[1][0] = true;
        overload.p[2][0] = true;
        assert!(overload.validate(2).unwrap_err().contains("capacity"));
        assert!(overload.validate(3).is_ok());
    }
}
