//! Self-contained linear programming: a dense two-phase primal simplex with
//! Bland's anti-cycling rule and per-variable lower bounds.
//!
//! The LPs in this crate are tiny — at most on the order of a hundred
//! variables and a dozen constraints — so a dense deterministic tableau
//! implementation is simpler, fully reproducible, and fast enough, without
//! any external solver dependency.

use thiserror::Error;

/// Absolute tolerance for constraint satisfaction checks.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Slack below a variable's lower bound tolerated in returned solutions.
pub const LOWER_BOUND_TOL: f64 = 1e-9;
/// Entries smaller than this never serve as pivots.
const PIVOT_EPS: f64 = 1e-9;
/// Reduced costs above −RC_EPS count as nonnegative (optimal).
const RC_EPS: f64 = 1e-9;
/// Hard cap on simplex iterations per phase. Bland's rule guarantees finite
/// termination, so hitting it indicates a bug rather than a hard instance.
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("constraint has {got} coefficients, problem has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective, bounds, coefficients and right-hand sides must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. For non-optimal statuses `x` is empty and the
/// objective value is NaN.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

/// Minimization problem over variables with individual lower bounds
/// (default 0) and no upper bounds.
#[derive(Debug, Clone)]
pub struct LpProblem {
    objective: Vec<f64>,
    constraints: Vec<LpConstraint>,
    var_lower: Vec<f64>,
    var_names: Vec<String>,
}

impl LpProblem {
    /// A problem minimizing `objective · x` with all variables bounded below
    /// by zero and named `x0, x1, …` until renamed.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            constraints: Vec::new(),
            var_lower: vec![0.0; n],
            var_names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[LpConstraint] {
        &self.constraints
    }

    pub fn var_lower(&self) -> &[f64] {
        &self.var_lower
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.var_names[j]
    }

    pub fn set_lower(&mut self, j: usize, lower: f64) {
        self.var_lower[j] = lower;
    }

    pub fn set_name(&mut self, j: usize, name: impl Into<String>) {
        self.var_names[j] = name.into();
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    ) -> Result<(), LpError> {
        if coeffs.len() != self.n_vars() {
            return Err(LpError::DimensionMismatch {
                expected: self.n_vars(),
                got: coeffs.len(),
            });
        }
        self.constraints.push(LpConstraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Whether `x` satisfies every constraint within [`FEASIBILITY_TOL`] and
    /// every lower bound within [`LOWER_BOUND_TOL`].
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        if x.len() != self.n_vars() {
            return false;
        }
        if x.iter().zip(&self.var_lower).any(|(&v, &lo)| v < lo - LOWER_BOUND_TOL) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(&a, &v)| a * v).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs + FEASIBILITY_TOL,
                Relation::Ge => lhs >= c.rhs - FEASIBILITY_TOL,
                Relation::Eq => (lhs - c.rhs).abs() <= FEASIBILITY_TOL,
            }
        })
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    fn check_finite(&self) -> Result<(), LpError> {
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.var_lower.iter().all(|v| v.is_finite())
            && self.constraints.iter().all(|c| {
                c.rhs.is_finite() && c.coeffs.iter().all(|v| v.is_finite())
            });
        if finite { Ok(()) } else { Err(LpError::NonFinite) }
    }
}

struct Tableau {
    /// `rows × (n_cols + 1)` matrix; the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.n_cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs the simplex loop minimizing `cost` over the columns for which
    /// `eligible` holds (basic columns always stay). Returns false when the
    /// problem is unbounded in the current phase.
    fn run(&mut self, cost: &[f64], eligible: &[bool]) -> bool {
        for _ in 0..MAX_ITERATIONS {
            // Reduced costs from scratch each iteration: rc_j = c_j − c_B·T_j.
            // O(rows · cols), trivial at this scale, and immune to drift.
            let entering = (0..self.n_cols).find(|&j| {
                if !eligible[j] || self.basis.contains(&j) {
                    return false;
                }
                let rc = cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &bj)| cost[bj] * self.t[i][j])
                        .sum::<f64>();
                rc < -RC_EPS
            });
            let Some(col) = entering else { return true };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((best_i, best)) => {
                            ratio < best
                                || (ratio == best && self.basis[i] < self.basis[best_i])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
        unreachable!("simplex exceeded the iteration cap; Bland's rule should terminate")
    }
}

/// Solves the problem with a dense two-phase simplex. Lower bounds are
/// handled by shifting, ≥/= rows by artificial variables. Deterministic:
/// Bland's rule picks the lowest-index entering column and breaks ratio ties
/// toward the lowest basis index.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.check_finite()?;
    let n = p.n_vars();

    // Shift x = y + lower so y ≥ 0, and normalize every row to a
    // nonnegative right-hand side.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = p
        .constraints
        .iter()
        .map(|c| {
            let shifted = c.rhs
                - c.coeffs.iter().zip(&p.var_lower).map(|(&a, &lo)| a * lo).sum::<f64>();
            (c.coeffs.clone(), c.relation, shifted)
        })
        .collect();
    for (coeffs, relation, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            for v in coeffs.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *relation = match *relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Relation::Le | Relation::Ge))
        .count();
    let n_art = rows
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Relation::Ge | Relation::Eq))
        .count();
    let n_cols = n + n_slack + n_art;

    let mut t = vec![vec![0.0; n_cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    for (i, (coeffs, relation, rhs)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(coeffs);
        t[i][n_cols] = *rhs;
        match relation {
            Relation::Le => {
                t[i][slack_at] = 1.0;
                basis[i] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                t[i][slack_at] = -1.0;
                slack_at += 1;
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                art_at += 1;
            }
            Relation::Eq => {
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                art_at += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, n_cols };
    let artificial_start = n + n_slack;

    // Phase 1: drive the artificial variables to zero.
    if n_art > 0 {
        let mut cost = vec![0.0; n_cols];
        for c in cost.iter_mut().skip(artificial_start) {
            *c = 1.0;
        }
        let all = vec![true; n_cols];
        let bounded = tab.run(&cost, &all);
        debug_assert!(bounded, "phase-1 objective is bounded below by zero");
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bj)| bj >= artificial_start)
            .map(|(i, _)| tab.rhs(i))
            .sum();
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective_value: f64::NAN,
            });
        }
        // Pivot remaining (degenerate) artificials out of the basis, or drop
        // their rows as redundant.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= artificial_start {
                let col = (0..artificial_start).find(|&j| tab.t[i][j].abs() > PIVOT_EPS);
                match col {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase 2: minimize the true objective, artificial columns barred.
    let mut cost = vec![0.0; n_cols];
    cost[..n].copy_from_slice(&p.objective);
    let mut eligible = vec![true; n_cols];
    for e in eligible.iter_mut().skip(artificial_start) {
        *e = false;
    }
    if !tab.run(&cost, &eligible) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective_value: f64::NAN,
        });
    }

    let mut x = p.var_lower.clone();
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] += tab.rhs(i);
        }
    }
    let objective_value = p.objective_at(&x);
    Ok(LpSolution { status: LpStatus::Optimal, x, objective_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve(p: &LpProblem) -> LpSolution {
        let sol = solve_lp(p).expect("well-formed problem");
        if sol.status == LpStatus::Optimal {
            assert!(p.is_feasible(&sol.x), "optimal point must be feasible: {:?}", sol.x);
            assert_relative_eq!(sol.objective_value, p.objective_at(&sol.x), epsilon = 1e-9);
        }
        sol
    }

    #[test]
    fn one_variable_bound() {
        let mut p = LpProblem::minimize(vec![1.0]);
        p.add_constraint(vec![1.0], Relation::Ge, 5.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.x[0], 5.0, epsilon = 1e-9);
        assert_relative_eq!(sol.objective_value, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn grid_versus_transfer_tradeoff() {
        // min g + 0.2628·0.01·f  s.t.  50 − g − 0.99·f ≤ 0: importing is
        // two orders of magnitude cheaper, so g = 0, f = 50/0.99.
        let mut p = LpProblem::minimize(vec![1.0, 0.2628 * 0.01]);
        p.set_name(0, "g");
        p.set_name(1, "f");
        p.add_constraint(vec![-1.0, -0.99], Relation::Le, -50.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.x[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(sol.x[1], 50.0 / 0.99, epsilon = 1e-6);
        assert_relative_eq!(sol.objective_value, 0.1327, epsilon = 1e-4);
    }

    #[test]
    fn contradictory_constraints_are_infeasible() {
        let mut p = LpProblem::minimize(vec![1.0]);
        p.add_constraint(vec![1.0], Relation::Le, 1.0).unwrap();
        p.add_constraint(vec![1.0], Relation::Ge, 2.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.x.is_empty());
        assert!(sol.objective_value.is_nan());
    }

    #[test]
    fn unbounded_direction_detected() {
        let mut p = LpProblem::minimize(vec![-1.0, 0.0]);
        p.add_constraint(vec![0.0, 1.0], Relation::Le, 1.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_lower_bounds_shift_correctly() {
        let mut p = LpProblem::minimize(vec![1.0, 1.0]);
        p.set_lower(0, -5.0);
        p.set_lower(1, -2.0);
        p.add_constraint(vec![1.0, 1.0], Relation::Ge, -6.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.objective_value, -6.0, epsilon = 1e-9);
        assert!(sol.x[0] >= -5.0 - 1e-9 && sol.x[1] >= -2.0 - 1e-9);
    }

    #[test]
    fn equality_constraints_hold_exactly() {
        // min x + 2y + 3z  s.t.  x + y + z = 10,  y − z = 2.
        let mut p = LpProblem::minimize(vec![1.0, 2.0, 3.0]);
        p.add_constraint(vec![1.0, 1.0, 1.0], Relation::Eq, 10.0).unwrap();
        p.add_constraint(vec![0.0, 1.0, -1.0], Relation::Eq, 2.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        // Optimum puts everything on the cheap variables: x = 8, y = 2, z = 0.
        assert_relative_eq!(sol.x[0], 8.0, epsilon = 1e-9);
        assert_relative_eq!(sol.x[1], 2.0, epsilon = 1e-9);
        assert_relative_eq!(sol.x[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic degenerate LP makes naive pivot rules cycle;
        // Bland's rule must terminate at the optimum −1/20.
        let mut p = LpProblem::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        p.add_constraint(vec![0.25, -60.0, -1.0 / 25.0, 9.0], Relation::Le, 0.0).unwrap();
        p.add_constraint(vec![0.5, -90.0, -1.0 / 50.0, 3.0], Relation::Le, 0.0).unwrap();
        p.add_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.objective_value, -0.05, epsilon = 1e-9);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        // The second equality is the first doubled: rank-deficient but
        // consistent.
        let mut p = LpProblem::minimize(vec![1.0, 1.0]);
        p.add_constraint(vec![1.0, 1.0], Relation::Eq, 4.0).unwrap();
        p.add_constraint(vec![2.0, 2.0], Relation::Eq, 8.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_relative_eq!(sol.objective_value, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_a_construction_error() {
        let mut p = LpProblem::minimize(vec![1.0, 2.0]);
        let err = p.add_constraint(vec![1.0], Relation::Le, 1.0).unwrap_err();
        assert_eq!(err, LpError::DimensionMismatch { expected: 2, got: 1 });
        assert!(p.constraints().is_empty());
    }

    #[test]
    fn non_finite_data_is_rejected() {
        let mut p = LpProblem::minimize(vec![f64::NAN]);
        p.add_constraint(vec![1.0], Relation::Ge, 0.0).unwrap();
        assert_eq!(solve_lp(&p).unwrap_err(), LpError::NonFinite);
    }

    #[test]
    fn determinism_bitwise() {
        let mut p = LpProblem::minimize(vec![1.0, 2.0, 0.5, 1.5]);
        p.add_constraint(vec![1.0, 1.0, 1.0, 1.0], Relation::Ge, 10.0).unwrap();
        p.add_constraint(vec![1.0, -1.0, 2.0, 0.0], Relation::Le, 6.0).unwrap();
        p.add_constraint(vec![0.0, 1.0, 1.0, -1.0], Relation::Eq, 3.0).unwrap();
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
    }

    #[test]
    fn weak_duality_spot_check() {
        // The optimum never exceeds the objective at any sampled feasible
        // point (minimization), up to tolerance.
        let mut p = LpProblem::minimize(vec![3.0, 1.0, 4.0]);
        p.add_constraint(vec![1.0, 1.0, 0.0], Relation::Ge, 2.0).unwrap();
        p.add_constraint(vec![0.0, 1.0, 1.0], Relation::Ge, 3.0).unwrap();
        p.add_constraint(vec![1.0, 0.0, 1.0], Relation::Le, 50.0).unwrap();
        let sol = solve(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut tried = 0;
        while tried < 200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..10.0)).collect();
            if p.is_feasible(&x) {
                tried += 1;
                assert!(sol.objective_value <= p.objective_at(&x) + 1e-6);
            } else {
                tried += 1;
            }
        }
    }

    #[test]
    fn random_problems_optimal_points_are_feasible() {
        // Seeded sweep over random LPs: whenever the solver claims optimal,
        // the point must be feasible and no axis-aligned feasible sample may
        // beat it.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let n = rng.gen_range(1..5usize);
            let m = rng.gen_range(1..5usize);
            let mut p =
                LpProblem::minimize((0..n).map(|_| rng.gen_range(-2.0..3.0)).collect());
            for _ in 0..m {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let relation = match rng.gen_range(0..3) {
                    0 => Relation::Le,
                    1 => Relation::Ge,
                    _ => Relation::Eq,
                };
                let rhs = rng.gen_range(-5.0..5.0);
                p.add_constraint(coeffs, relation, rhs).unwrap();
            }
            let sol = solve_lp(&p).unwrap();
            if sol.status == LpStatus::Optimal {
                assert!(p.is_feasible(&sol.x));
            }
        }
    }
}
