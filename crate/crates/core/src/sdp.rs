//! Max-of-distances SDPs over a Gram matrix, solved with clarabel.
//!
//! Variables are `svec(Z)` for `Z >= 0` of size `q` and one epigraph variable
//! per term. The Gram matrix of the vertex vectors is `Y = Q Z Q^T` where the
//! columns of `Q` span the allowed subspace (`Q = I` when unrestricted).
//! Linear functionals of `Y` are given as entry lists `(i, j, c)` meaning
//! `sum c * Y_ij`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;

use crate::linalg::sym_eigen;
use crate::{HgError, Result};

pub(crate) type Functional = Vec<(usize, usize, f64)>;

/// `|u_i / s_i - u_j / s_j|^2` as a functional of `Y`.
pub(crate) fn scaled_distance(i: usize, j: usize, si: f64, sj: f64) -> Functional {
    vec![
        (i, i, 1.0 / (si * si)),
        (j, j, 1.0 / (sj * sj)),
        (i, j, -2.0 / (si * sj)),
    ]
}

pub(crate) fn distance(i: usize, j: usize) -> Functional {
    scaled_distance(i, j, 1.0, 1.0)
}

pub(crate) fn evaluate(f: &Functional, y: &DMatrix<f64>) -> f64 {
    f.iter().map(|&(i, j, c)| c * y[(i, j)]).sum()
}

#[derive(Clone, Debug, Default)]
pub(crate) struct SdpProblem {
    pub n: usize,
    /// Orthonormal columns spanning the allowed subspace; `None` for all of `R^n`.
    pub basis: Option<DMatrix<f64>>,
    /// Minimize `sum_t weight_t * max_p <P_p, Y>`.
    pub terms: Vec<(f64, Vec<Functional>)>,
    pub equalities: Vec<(Functional, f64)>,
    /// `<G, Y> >= 0`.
    pub inequalities: Vec<Functional>,
}

#[derive(Clone, Debug)]
pub(crate) struct SdpSolution {
    /// Gram matrix of the vertex vectors.
    pub gram: DMatrix<f64>,
    /// `n x q` factor with `gram = factor * factor^T`.
    pub factor: DMatrix<f64>,
    pub objective: f64,
}

/// Solver settings tried in order until one reports success.
struct Attempt {
    tol: f64,
    equilibrate: bool,
    max_iter: u32,
}

const ATTEMPTS: [Attempt; 3] = [
    Attempt { tol: 1e-10, equilibrate: true, max_iter: 400 },
    Attempt { tol: 1e-8, equilibrate: false, max_iter: 400 },
    Attempt { tol: 1e-7, equilibrate: true, max_iter: 1000 },
];

impl Attempt {
    fn settings(&self) -> std::result::Result<clarabel::solver::DefaultSettings<f64>, clarabel::solver::DefaultSettingsBuilderError> {
        DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .equilibrate_enable(self.equilibrate)
            .build()
    }
}

fn svec_index(a: usize, b: usize) -> usize {
    let (i, j) = if a <= b { (a, b) } else { (b, a) };
    j * (j + 1) / 2 + i
}

impl SdpProblem {
    fn q(&self) -> usize {
        self.basis.as_ref().map_or(self.n, |b| b.ncols())
    }

    /// Coefficients of a functional of `Y` on `svec(Z)`.
    fn row(&self, f: &Functional) -> Vec<(usize, f64)> {
        let s2 = std::f64::consts::SQRT_2;
        match &self.basis {
            None => f
                .iter()
                .map(|&(i, j, c)| {
                    if i == j {
                        (svec_index(i, i), c)
                    } else {
                        (svec_index(i, j), c / s2)
                    }
                })
                .collect(),
            Some(qm) => {
                let q = qm.ncols();
                let mut m = DMatrix::<f64>::zeros(q, q);
                for &(i, j, c) in f {
                    for a in 0..q {
                        let qa = qm[(i, a)] * c;
                        if qa == 0.0 {
                            continue;
                        }
                        for b in 0..q {
                            m[(a, b)] += qa * qm[(j, b)];
                        }
                    }
                }
                let mut out = Vec::with_capacity(q * (q + 1) / 2);
                for b in 0..q {
                    for a in 0..=b {
                        let v = if a == b {
                            m[(a, a)]
                        } else {
                            (m[(a, b)] + m[(b, a)]) / s2
                        };
                        if v != 0.0 {
                            out.push((svec_index(a, b), v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn solve(&self) -> Result<SdpSolution> {
        let q = self.q();
        if q == 0 {
            return Err(HgError::Solver("empty feasible subspace".to_string()));
        }
        let nz = q * (q + 1) / 2;
        let nt = self.terms.len();
        let nvar = nz + nt;
        let mut rows: Vec<usize> = Vec::new();
        let mut cols: Vec<usize> = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut r = 0;
        let mut push = |entries: &[(usize, f64)], rhs: f64, r: &mut usize, b: &mut Vec<f64>| {
            for &(c, v) in entries {
                rows.push(*r);
                cols.push(c);
                vals.push(v);
            }
            b.push(rhs);
            *r += 1;
        };
        for (f, rhs) in &self.equalities {
            push(&self.row(f), *rhs, &mut r, &mut b);
        }
        let n_eq = r;
        for (t, (_, pieces)) in self.terms.iter().enumerate() {
            for p in pieces {
                let mut e = self.row(p);
                e.push((nz + t, -1.0));
                push(&e, 0.0, &mut r, &mut b);
            }
        }
        for g in &self.inequalities {
            let e: Vec<(usize, f64)> = self.row(g).into_iter().map(|(c, v)| (c, -v)).collect();
            push(&e, 0.0, &mut r, &mut b);
        }
        let n_ineq = r - n_eq;
        for k in 0..nz {
            push(&[(k, -1.0)], 0.0, &mut r, &mut b);
        }
        let a = CscMatrix::new_from_triplets(r, nvar, rows, cols, vals);
        let p = CscMatrix::<f64>::zeros((nvar, nvar));
        let mut c = vec![0.0; nvar];
        for (t, (w, _)) in self.terms.iter().enumerate() {
            c[nz + t] = *w;
        }
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        if n_eq > 0 {
            cones.push(SupportedConeT::ZeroConeT(n_eq));
        }
        if n_ineq > 0 {
            cones.push(SupportedConeT::NonnegativeConeT(n_ineq));
        }
        cones.push(SupportedConeT::PSDTriangleConeT(q));
        let mut last = None;
        let mut x = None;
        for attempt in ATTEMPTS {
            let settings = attempt
                .settings()
                .map_err(|e| HgError::Solver(format!("{e:?}")))?;
            let mut solver = DefaultSolver::new(&p, &c, &a, &b, &cones, settings)
                .map_err(|e| HgError::Solver(format!("{e:?}")))?;
            solver.solve();
            match solver.solution.status {
                SolverStatus::Solved | SolverStatus::AlmostSolved => {
                    x = Some(solver.solution.x.clone());
                    break;
                }
                s => last = Some(s),
            }
        }
        let x = &x.ok_or_else(|| {
            HgError::Solver(format!("SDP solver stopped with status {:?}", last.expect("one attempt ran")))
        })?;
        let mut z = DMatrix::<f64>::zeros(q, q);
        for j in 0..q {
            for i in 0..=j {
                let v = x[svec_index(i, j)];
                let v = if i == j { v } else { v / std::f64::consts::SQRT_2 };
                z[(i, j)] = v;
                z[(j, i)] = v;
            }
        }
        let (values, vectors) = sym_eigen(z);
        let mut w = DMatrix::<f64>::zeros(q, q);
        for k in 0..q {
            let s = values[k].max(0.0).sqrt();
            for i in 0..q {
                w[(i, k)] = vectors[(i, k)] * s;
            }
        }
        let factor = match &self.basis {
            Some(qm) => qm * w,
            None => w,
        };
        let gram = &factor * factor.transpose();
        let objective = self
            .terms
            .iter()
            .map(|(wt, pieces)| {
                wt * pieces
                    .iter()
                    .map(|p| evaluate(p, &gram))
                    .fold(0.0, f64::max)
            })
            .sum();
        Ok(SdpSolution {
            gram,
            factor,
            objective,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_relaxation() {
        // min |u0 - u1|^2 subject to |u0|^2 + |u1|^2 = 1, u0 + u1 = 0.
        let basis = DMatrix::from_column_slice(2, 1, &[1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()]);
        let prob = SdpProblem {
            n: 2,
            basis: Some(basis),
            terms: vec![(1.0, vec![distance(0, 1)])],
            equalities: vec![(vec![(0, 0, 1.0), (1, 1, 1.0)], 1.0)],
            inequalities: vec![],
        };
        let sol = prob.solve().unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-7, "{}", sol.objective);
    }

    #[test]
    fn unrestricted_with_triangle_rows() {
        let prob = SdpProblem {
            n: 3,
            basis: None,
            terms: vec![(1.0, vec![distance(0, 1)]), (1.0, vec![distance(1, 2)])],
            equalities: vec![(distance(0, 2), 1.0)],
            inequalities: vec![{
                let mut t = distance(0, 1);
                t.extend(distance(1, 2));
                t.extend(distance(0, 2).into_iter().map(|(i, j, c)| (i, j, -c)));
                t
            }],
        };
        let sol = prob.solve().unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-7, "{}", sol.objective);
    }
}
