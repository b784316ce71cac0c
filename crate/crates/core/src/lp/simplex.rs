//! Dense two-phase tableau simplex with Bland's anti-cycling rule.

use super::{BasicSolution, Direction, LinearProgram, LpError, LpStatus, Relation};
use crate::scalar::Scalar;

/// Total pivot budget across both phases.
pub const ITERATION_CAP: usize = 1_000_000;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let rhs = self.rhs();
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v = *v / p;
        }
        self.rows[r][c] = T::one();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == T::zero() {
                continue;
            }
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v = *v - f * pv;
            }
            row[c] = T::zero();
            if row[rhs] < T::zero() && row[rhs] > -T::tolerance() {
                row[rhs] = T::zero();
            }
        }
        let f = self.obj[c];
        if f != T::zero() {
            for (v, &pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v = *v - f * pv;
            }
            self.obj[c] = T::zero();
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Sets reduced costs for `costs` given the current basis.
    fn price(&mut self, costs: &[T]) {
        let width = self.obj.len();
        self.obj = costs.iter().copied().chain(std::iter::repeat(T::zero())).take(width).collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = costs.get(b).copied().unwrap_or_else(T::zero);
            if cb != T::zero() {
                for (v, &a) in self.obj.iter_mut().zip(row) {
                    *v = *v - cb * a;
                }
            }
        }
    }

    /// Minimizes over columns `0..allowed`, entering the lowest-index
    /// improving column and leaving the lowest-index basic variable among
    /// tied ratios.
    fn run(&mut self, allowed: usize) -> Result<Outcome, LpError> {
        let tol = T::tolerance();
        let rhs = self.rhs();
        loop {
            self.iterations += 1;
            if self.iterations > ITERATION_CAP {
                return Err(LpError::NumericFailure(ITERATION_CAP));
            }
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -tol) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a <= tol {
                    continue;
                }
                let ratio = row[rhs] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best_r, best)) => {
                        let slack = tol * T::one().max(best.abs());
                        if ratio < best - slack || (ratio <= best + slack && self.basis[r] < self.basis[best_r]) {
                            Some((r, ratio))
                        } else {
                            Some((best_r, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(r, c);
        }
    }
}

/// Solves `lp` to an optimal basic feasible solution.
///
/// Bounds are shifted to `x >= 0`, finite upper bounds become rows, and
/// rows are normalized to nonnegative right-hand sides. Phase one minimizes
/// the artificial sum; artificials left in the basis at zero are pivoted out
/// or their (redundant) rows dropped.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> Result<BasicSolution<T>, LpError> {
    lp.check()?;
    let n = lp.num_vars();
    let tol = T::tolerance();

    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![T::zero(); n];
        let mut rhs = c.rhs;
        for &(k, a) in &c.terms {
            coeffs[k] = coeffs[k] + a;
            rhs = rhs - a * lp.lower[k];
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for k in 0..n {
        if let Some(u) = lp.upper[k] {
            let mut coeffs = vec![T::zero(); n];
            coeffs[k] = T::one();
            rows.push((coeffs, Relation::Le, u - lp.lower[k]));
        }
    }
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if *rhs < T::zero() {
            for v in coeffs.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let slack_count = rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
    let art_count = rows.iter().filter(|(_, rel, _)| *rel != Relation::Le).count();
    let art_start = n + slack_count;
    let width = art_start + art_count + 1;

    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        obj: vec![T::zero(); width],
        basis: Vec::with_capacity(rows.len()),
        iterations: 0,
    };
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(width, T::zero());
        row[width - 1] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = T::one();
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -T::one();
                next_slack += 1;
                row[next_art] = T::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = T::one();
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }

    if art_count > 0 {
        let mut phase_one = vec![T::zero(); width - 1];
        for c in phase_one.iter_mut().skip(art_start) {
            *c = T::one();
        }
        tab.price(&phase_one);
        tab.run(width - 1)?;
        let residual = tab
            .rows
            .iter()
            .zip(&tab.basis)
            .filter(|(_, &b)| b >= art_start)
            .fold(T::zero(), |acc, (row, _)| acc + row[width - 1]);
        let scale = tab.rows.iter().fold(T::one(), |acc, row| acc.max(row[width - 1].abs()));
        if residual > tol * scale {
            return Ok(BasicSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: T::nan(),
                basis: Vec::new(),
            });
        }
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                let mut best: Option<(usize, T)> = None;
                for j in 0..art_start {
                    let a = tab.rows[r][j].abs();
                    if a > tol && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                match best {
                    Some((j, _)) => tab.pivot(r, j),
                    None => {
                        tab.rows.swap_remove(r);
                        tab.basis.swap_remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut costs: Vec<T> = match lp.direction {
        Direction::Minimize => lp.costs.clone(),
        Direction::Maximize => lp.costs.iter().map(|&c| -c).collect(),
        Direction::Feasibility => vec![T::zero(); n],
    };
    costs.resize(art_start, T::zero());
    tab.price(&costs);
    let outcome = tab.run(art_start)?;

    let mut y = vec![T::zero(); art_start];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < art_start {
            y[b] = row[width - 1].max(T::zero());
        }
    }
    let values: Vec<T> = (0..n).map(|k| lp.lower[k] + y[k]).collect();
    let mut basis: Vec<usize> = tab.basis.iter().copied().filter(|&b| b < art_start).collect();
    basis.sort_unstable();
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    let objective = match status {
        LpStatus::Optimal => lp.objective_value(&values),
        _ if lp.direction == Direction::Maximize => T::infinity(),
        _ => T::neg_infinity(),
    };
    Ok(BasicSolution {
        status,
        values,
        objective,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximize_single_bound() {
        let mut lp = LinearProgram::<f64>::new(Direction::Maximize);
        let x = lp.add_nonneg(1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values, vec![3.0]);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn feasibility_returns_a_vertex() {
        let mut lp = LinearProgram::<f64>::new(Direction::Feasibility);
        let a = lp.add_nonneg(0.0);
        let b = lp.add_nonneg(0.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        let mut v = s.values.clone();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![0.0, 1.0]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(Direction::Minimize);
        let x = lp.add_nonneg(1.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::<f64>::new(Direction::Maximize);
        let x = lp.add_nonneg(1.0);
        let y = lp.add_nonneg(0.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bounds_are_honoured() {
        let mut lp = LinearProgram::<f64>::new(Direction::Minimize);
        let x = lp.add_var(1.0, -2.0, Some(5.0));
        let y = lp.add_var(-1.0, 1.0, Some(4.0));
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 0.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert!((s.values[x] + 2.0).abs() < 1e-12);
        assert!((s.values[y] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic example on which the largest-coefficient rule cycles.
        let mut lp = LinearProgram::<f64>::new(Direction::Minimize);
        let v: Vec<usize> = [-0.75, 150.0, -0.02, 6.0].iter().map(|&c| lp.add_nonneg(c)).collect();
        lp.add_constraint(vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(v[2], 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::<f64>::new(Direction::Maximize);
        let a = lp.add_nonneg(1.0);
        let b = lp.add_nonneg(2.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 2.0);
        lp.add_constraint(vec![(a, 2.0), (b, 2.0)], Relation::Eq, 4.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 4.0).abs() < 1e-12);
        assert!(s.basis.len() <= 2);
    }

    #[test]
    fn single_precision() {
        let mut lp = LinearProgram::<f32>::new(Direction::Maximize);
        let x = lp.add_nonneg(3.0);
        let y = lp.add_nonneg(2.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(x, 1.0), (y, 3.0)], Relation::Le, 6.0);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert!((s.objective - 11.0).abs() < 1e-4);
    }

    #[test]
    fn malformed_rejected() {
        let mut lp = LinearProgram::<f64>::new(Direction::Minimize);
        lp.add_nonneg(1.0);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Malformed(_))));
    }
}
