//! Geometric binary search over a relaxed decision procedure.

use std::fmt;

/// Default multiplicative precision of [`binary_search_decision`].
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Number of times the upper bound may double before giving up.
const MAX_DOUBLINGS: usize = 64;

/// Answer of a decision procedure at level `C`.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision<S> {
    /// A solution of value at most `rho * C`.
    Accept(S),
    /// Evidence that no solution of value below `C` exists.
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<S> {
    /// Smallest accepted level found.
    pub level: f64,
    /// Solution returned at `level`.
    pub solution: S,
    /// Number of procedure calls.
    pub calls: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchError<E> {
    BoundsInverted { lo: f64, hi: f64 },
    NonPositive,
    NoAcceptance { hi: f64 },
    Procedure(E),
}

impl<E: fmt::Display> fmt::Display for SearchError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::BoundsInverted { lo, hi } => write!(f, "lower bound {lo} exceeds upper bound {hi}"),
            SearchError::NonPositive => write!(f, "bounds and tolerance must be positive and finite"),
            SearchError::NoAcceptance { hi } => write!(f, "procedure rejected every level up to {hi}"),
            SearchError::Procedure(e) => write!(f, "decision procedure failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> std::error::Error for SearchError<E> {}

/// Finds the smallest level the procedure accepts, to within `rel_tol`.
///
/// The procedure is first called at `hi`, which is doubled while rejected,
/// then at `lo`; if `lo` is accepted the search stops there. Otherwise the
/// bracket `(lo, hi]` is bisected geometrically until `hi <= lo * (1 +
/// rel_tol)`. The returned solution is the one from the last accepted call.
pub fn binary_search_decision<S, E, F>(
    lo: f64,
    hi: f64,
    rel_tol: f64,
    mut procedure: F,
) -> Result<SearchOutcome<S>, SearchError<E>>
where
    F: FnMut(f64) -> Result<Decision<S>, E>,
{
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !valid(lo) || !valid(hi) || !valid(rel_tol) {
        return Err(SearchError::NonPositive);
    }
    if lo > hi {
        return Err(SearchError::BoundsInverted { lo, hi });
    }
    let mut calls = 0;
    let mut call = |c: f64| {
        calls += 1;
        procedure(c).map_err(SearchError::Procedure)
    };

    let (mut lo, mut hi) = (lo, hi);
    let mut best = None;
    for _ in 0..=MAX_DOUBLINGS {
        match call(hi)? {
            Decision::Accept(s) => {
                best = Some(s);
                break;
            }
            Decision::Reject => {
                lo = hi;
                hi *= 2.0;
            }
        }
    }
    let Some(mut best) = best else {
        return Err(SearchError::NoAcceptance { hi: hi / 2.0 });
    };
    if lo < hi {
        if let Decision::Accept(s) = call(lo)? {
            return Ok(SearchOutcome {
                level: lo,
                solution: s,
                calls,
            });
        }
    }
    while hi > lo * (1.0 + rel_tol) {
        let mid = (lo * hi).sqrt().clamp(lo, hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match call(mid)? {
            Decision::Accept(s) => {
                best = s;
                hi = mid;
            }
            Decision::Reject => lo = mid,
        }
    }
    Ok(SearchOutcome {
        level: hi,
        solution: best,
        calls,
    })
}
