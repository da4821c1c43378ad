//! Small dense helpers over nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenpairs of a symmetric matrix, ascending.
pub(crate) fn sym_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Orthonormal basis of `{v : rows v = 0}` as columns of an `n x q` matrix.
pub(crate) fn null_space(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::identity(n, n);
    }
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for r in rows {
        let s = norm(r);
        if s == 0.0 {
            continue;
        }
        let v = DVector::from_iterator(n, r.iter().map(|x| x / s));
        gram += &v * v.transpose();
    }
    let (values, vectors) = sym_eigen(gram);
    let cols: Vec<usize> = (0..n).filter(|&i| values[i] <= 1e-10).collect();
    let mut out = DMatrix::zeros(n, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &vectors.column(i));
    }
    out
}

/// Fixes the sign so the entry of largest magnitude (first on ties) is positive.
pub(crate) fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

pub(crate) fn column(m: &DMatrix<f64>, j: usize) -> Vec<f64> {
    m.column(j).iter().copied().collect()
}
