//! Level-set sweeps.

use crate::cut::{CutResult, RatioType};
use crate::operator::rayleigh;
use crate::{HgError, Hypergraph, Result, Scalar};

/// `sum_e w(e) max_{i,j in e} |y_i - y_j| / sum_i d_i y_i`.
pub fn sweep_nonneg_bound<T: Scalar>(h: &Hypergraph<T>, y: &[T]) -> T {
    let num: T = h
        .edges()
        .iter()
        .zip(h.weights())
        .map(|(e, &w)| {
            let (lo, hi) = e.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                (lo.min(y[v]), hi.max(y[v]))
            });
            w * (hi - lo)
        })
        .sum();
    let den: T = y.iter().zip(h.degrees()).map(|(&v, &d)| d * v).sum();
    num / den
}

/// Scans the proper level sets `{i : y_i >= r}` of a nonnegative vector and
/// returns the one minimizing `cut(S) / vol(S)`.
pub fn sweep_cut_nonneg<T: Scalar>(h: &Hypergraph<T>, y: &[T]) -> Result<CutResult<T>> {
    if y.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    if y.iter().any(|&v| !(v >= T::zero()) || !v.is_finite()) {
        return Err(HgError::InvalidInput("negative or non-finite entry".to_string()));
    }
    let mut order: Vec<usize> = (0..h.n()).filter(|&v| y[v] > T::zero()).collect();
    if order.is_empty() {
        return Err(HgError::ZeroVector);
    }
    order.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap().then(a.cmp(&b)));
    let mut inside_count = vec![0usize; h.m()];
    let mut cut = T::zero();
    let mut vol = T::zero();
    let mut best: Option<(T, usize)> = None;
    for (pos, &v) in order.iter().enumerate() {
        for &e in h.incident(v) {
            let size = h.edge(e).len();
            let before = inside_count[e];
            inside_count[e] += 1;
            let was = before > 0 && before < size;
            let now = before + 1 < size;
            if !was && now {
                cut = cut + h.weight(e);
            } else if was && !now {
                cut = cut - h.weight(e);
            }
        }
        vol = vol + h.degree(v);
        let last_of_level = pos + 1 == order.len() || y[order[pos + 1]] < y[v];
        if last_of_level && pos + 1 < h.n() {
            let ratio = cut / vol;
            if best.is_none_or(|(b, _)| ratio < b) {
                best = Some((ratio, pos + 1));
            }
        }
    }
    let (_, len) = best.ok_or_else(|| {
        HgError::InvalidInput("vector has no proper level set".to_string())
    })?;
    CutResult::evaluate(h, order[..len].to_vec(), RatioType::OneSided, y.to_vec())
}

/// Weighted median: `vol{y > m} <= vol/2` and `vol{y < m} <= vol/2`.
fn volume_median<T: Scalar>(h: &Hypergraph<T>, y: &[T]) -> T {
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap());
    let half = h.volume() / T::of(2.0);
    let mut acc = T::zero();
    for &v in &order {
        acc = acc + h.degree(v);
        if acc >= half {
            return y[v];
        }
    }
    y[order[order.len() - 1]]
}

/// Splits a density at its volume median and returns `(X+, X-)`.
pub fn median_split<T: Scalar>(h: &Hypergraph<T>, y: &[T]) -> (Vec<T>, Vec<T>) {
    let m = volume_median(h, y);
    let plus = y.iter().map(|&v| (v - m).max(T::zero())).collect();
    let minus = y.iter().map(|&v| (m - v).max(T::zero())).collect();
    (plus, minus)
}

/// `R(y) + 2 sqrt(R(y) / r_min)`.
pub fn sweep_bound<T: Scalar>(rayleigh_value: T, r_min: usize) -> T {
    rayleigh_value + T::of(2.0) * (rayleigh_value / T::of(r_min as f64)).sqrt()
}

/// Cheeger rounding of a density vector.
///
/// The vector is centered against the stationary measure, split at its volume
/// median, and the signed part with the smaller Rayleigh quotient is squared and
/// swept. Every candidate set has at most half the volume, so the returned
/// symmetric expansion is at most `R(y) + 2 sqrt(R(y) / r_min)`.
pub fn sweep_cut<T: Scalar>(h: &Hypergraph<T>, y: &[T]) -> Result<CutResult<T>> {
    if y.len() != h.n() {
        return Err(HgError::InvalidInput("vector length mismatch".to_string()));
    }
    let vol = h.volume();
    let mean = y
        .iter()
        .zip(h.degrees())
        .map(|(&v, &d)| v * d)
        .sum::<T>()
        / vol;
    let centered: Vec<T> = y.iter().map(|&v| v - mean).collect();
    let (plus, minus) = median_split(h, &centered);
    let score = |z: &[T]| rayleigh(h, z).ok();
    let z = match (score(&plus), score(&minus)) {
        (Some(a), Some(b)) => {
            if a <= b {
                plus
            } else {
                minus
            }
        }
        (Some(_), None) => plus,
        (None, Some(_)) => minus,
        (None, None) => return Err(HgError::InvalidInput("constant vector".to_string())),
    };
    let squared: Vec<T> = z.iter().map(|&v| v * v).collect();
    let swept = sweep_cut_nonneg(h, &squared)?;
    CutResult::evaluate(h, swept.set, RatioType::Symmetric, y.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonneg_sweep_on_triple() {
        let h = Hypergraph::<f64>::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
        let y = [1.0, 0.5, 0.0];
        let c = sweep_cut_nonneg(&h, &y).unwrap();
        assert_eq!(c.set, vec![0, 1]);
        assert_eq!(c.expansion, 0.5);
        assert!((sweep_nonneg_bound(&h, &y) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_returns_itself() {
        let h = Hypergraph::<f64>::unweighted(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let c = sweep_cut_nonneg(&h, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.set, vec![0, 1]);
        assert_eq!(c.expansion, 1.0 / 3.0);
    }

    #[test]
    fn cheeger_sweep_on_triple() {
        let h = Hypergraph::<f64>::unweighted(3, vec![vec![0, 1, 2]]).unwrap();
        let c = sweep_cut(&h, &[2.0, -1.0, -1.0]).unwrap();
        assert_eq!(c.expansion, 1.0);
        assert!(c.expansion <= sweep_bound(1.5, 3));
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let h = Hypergraph::<f64>::unweighted(2, vec![vec![0, 1]]).unwrap();
        assert!(sweep_cut_nonneg(&h, &[-1.0, 0.0]).is_err());
        assert!(sweep_cut_nonneg(&h, &[0.0, 0.0]).is_err());
        assert!(sweep_cut(&h, &[3.0, 3.0]).is_err());
    }
}
