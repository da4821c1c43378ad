use serde::Serialize;

use crate::hypergraph::BRUTE_FORCE_MAX_N;
use crate::{HgError, Hypergraph, Result};

/// Absolute slack for rounding in `lambda2`.
const SLACK: f64 = 1e-12;

/// Both sides of `lambda2 / 2 <= phi <= sqrt(2 lambda2)`.
#[derive(Clone, Debug, Serialize)]
pub struct CheegerReport {
    pub lambda2: f64,
    pub expansion: f64,
    pub set: Vec<usize>,
    pub lower: f64,
    pub upper: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub holds: bool,
    /// True when `expansion` is the exact minimum over all sets.
    pub exact: bool,
}

/// Checks the Cheeger sandwich for `lambda2` against the best of the brute
/// force minimizer (small instances) and the supplied set.
pub fn cheeger_check(h: &Hypergraph<f64>, lambda2: f64, set: Option<&[usize]>) -> Result<CheegerReport> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut exact = false;
    if h.n() <= BRUTE_FORCE_MAX_N {
        best = Some(h.brute_force_expansion()?);
        exact = true;
    }
    if let Some(s) = set {
        let phi = h.expansion(s)?;
        if best.as_ref().is_none_or(|b| phi < b.1) {
            best = Some((s.to_vec(), phi));
        }
    }
    let (set, expansion) = best.ok_or_else(|| {
        HgError::InvalidInput("instance too large for brute force and no set supplied".to_string())
    })?;
    let lower = lambda2 / 2.0;
    let upper = (2.0 * lambda2.max(0.0)).sqrt();
    Ok(CheegerReport {
        lambda2,
        expansion,
        set,
        lower,
        upper,
        lower_slack: expansion - lower,
        upper_slack: upper - expansion,
        holds: lower <= expansion + SLACK && expansion <= upper + SLACK,
        exact,
    })
}
