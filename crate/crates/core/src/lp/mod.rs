//! Linear programs with extreme-point solutions, assignment support graphs,
//! pseudoforest orientation, rounding, and the relaxed-decision search.

mod rounding;
mod search;
mod simplex;
mod support;

use thiserror::Error;

use crate::scalar::Scalar;

pub use rounding::{lst_lp, lst_round, lst_solve, round_support, LstOutcome, ProcessingTimes};
pub use search::{binary_search_decision, Decision, SearchError, SearchOutcome, DEFAULT_REL_TOL};
pub use simplex::{solve_lp, ITERATION_CAP};
pub use support::{
    build_support_graph, orient_pseudoforest, orient_pseudoforest_with, Node, PseudoforestOrientation, SupportEdge, SupportGraph,
    SUPPORT_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
    /// Any feasible point.
    Feasibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// `opt c·x  s.t.  rows,  lower <= x <= upper`.
///
/// Lower bounds must be finite; upper bounds are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T: Scalar = f64> {
    pub direction: Direction,
    pub costs: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<Option<T>>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(direction: Direction) -> Self {
        LinearProgram {
            direction,
            costs: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    /// Adds a variable with bounds `[lower, upper]` and objective coefficient
    /// `cost`; returns its index.
    pub fn add_var(&mut self, cost: T, lower: T, upper: Option<T>) -> usize {
        self.costs.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.costs.len() - 1
    }

    /// Nonnegative variable without an upper bound.
    pub fn add_nonneg(&mut self, cost: T) -> usize {
        self.add_var(cost, T::zero(), None)
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, T)>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint { terms, relation, rhs });
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.costs.iter().zip(x).fold(T::zero(), |acc, (&c, &v)| acc + c * v)
    }

    /// True iff `x` satisfies every row and bound within `tol`.
    pub fn is_feasible(&self, x: &[T], tol: T) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(k, &v)| {
            v >= self.lower[k] - tol && self.upper[k].is_none_or(|u| v <= u + tol)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs = c.terms.iter().fold(T::zero(), |acc, &(k, a)| acc + a * x[k]);
                match c.relation {
                    Relation::Le => lhs <= c.rhs + tol,
                    Relation::Ge => lhs >= c.rhs - tol,
                    Relation::Eq => (lhs - c.rhs).abs() <= tol,
                }
            })
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors do not match variable count".into()));
        }
        if self.costs.iter().chain(&self.lower).any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("costs and lower bounds must be finite".into()));
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() || c.terms.iter().any(|&(k, a)| k >= n || !a.is_finite()) {
                return Err(LpError::Malformed("constraint with bad index or coefficient".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// When `status` is `Optimal`, `values` is a vertex of the feasible region and
/// `basis` lists the basic columns (structural indices below `num_vars`, then
/// one slack or surplus column per inequality row and bound row).
#[derive(Debug, Clone, PartialEq)]
pub struct BasicSolution<T: Scalar = f64> {
    pub status: LpStatus,
    pub values: Vec<T>,
    pub objective: T,
    pub basis: Vec<usize>,
}

impl<T: Scalar> BasicSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Variables strictly between their bounds.
    pub fn fractional_count(&self, lp: &LinearProgram<T>) -> usize {
        let tol = T::tolerance();
        self.values
            .iter()
            .enumerate()
            .filter(|&(k, &v)| v > lp.lower[k] + tol && lp.upper[k].is_none_or(|u| v < u - tol))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex exceeded {0} iterations")]
    NumericFailure(usize),
    #[error("support graph is not a pseudoforest (component with {nodes} nodes and {edges} edges)")]
    NotPseudoforest { nodes: usize, edges: usize },
    #[error("the assignment LP is infeasible")]
    InfeasibleLp,
    #[error("job {0} could not be rounded to a machine")]
    Unroundable(usize),
}
