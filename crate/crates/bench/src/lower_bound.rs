//! LP lower bound on the optimal assignment load.

use malleable::lp::{solve_lp, Direction, LinearProgram, LpError, LpStatus, Relation};
use malleable::{MachineSet, ModelError, SpeedModel};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowerBoundError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `max_j f_j(M)`, the whole-set part of the bound.
pub fn whole_set_bound<M: SpeedModel + ?Sized>(model: &M) -> Result<f64, ModelError> {
    let all = model.machines();
    (0..model.job_count()).try_fold(0.0f64, |acc, j| Ok(acc.max(model.processing_time(j, all)?)))
}

/// Minimum `C` such that every job can be split fractionally over single
/// machines (`Σ_i x_ij >= 1`, machine `i` charged `x_ij / g_j({i})`) within
/// load `C`, and `C >= max_j f_j(M)`.
///
/// Jobs with zero speed on every single machine get no split row and are
/// covered only by the whole-set term. Valid for subadditive speeds.
pub fn lp_lower_bound<M: SpeedModel + ?Sized>(model: &M) -> Result<f64, LowerBoundError> {
    let whole = whole_set_bound(model)?;
    let m = model.machine_count();
    let mut lp = LinearProgram::new(Direction::Minimize);
    let c = lp.add_var(1.0, whole, None);
    let mut by_machine: Vec<Vec<(usize, f64)>> = vec![vec![(c, -1.0)]; m];
    for j in 0..model.job_count() {
        let mut row = Vec::new();
        for (i, terms) in by_machine.iter_mut().enumerate() {
            let g = model.speed(j, MachineSet::singleton(i));
            if g > 0.0 {
                let v = lp.add_nonneg(0.0);
                row.push((v, 1.0));
                terms.push((v, 1.0 / g));
            }
        }
        if !row.is_empty() {
            lp.add_constraint(row, Relation::Ge, 1.0);
        }
    }
    for terms in by_machine {
        if terms.len() > 1 {
            lp.add_constraint(terms, Relation::Le, 0.0);
        }
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.values[c].max(whole)),
        _ => Err(LpError::InfeasibleLp.into()),
    }
}
