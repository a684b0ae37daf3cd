//! Sparse storage, direct factorizations and the saddle-point solver.
//!
//! Factorizations are delegated to `faer`'s sparse LU with partial pivoting.
//! Every solve is checked against the residual bound
//! `‖Ax − b‖∞ ≤ 1e-10 (1 + ‖b‖∞)`; a violation is reported as a singular
//! matrix for the named system.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

const RESIDUAL_BOUND: f64 = 1e-10;

/// Row-compressed sparse matrix. Column indices are strictly ascending in
/// every row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Sums duplicate `(row, col, value)` entries into a CSR matrix.
pub fn assemble(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<SparseMatrix> {
    let mut counts = vec![0usize; nrows + 1];
    for &(r, c, _) in triplets {
        if r >= nrows || c >= ncols {
            return Err(Error::IndexOutOfRange {
                row: r,
                col: c,
                nrows,
                ncols,
            });
        }
        counts[r + 1] += 1;
    }
    for i in 0..nrows {
        counts[i + 1] += counts[i];
    }
    let mut entries = vec![(0usize, 0.0f64); triplets.len()];
    let mut next = counts.clone();
    for &(r, c, v) in triplets {
        entries[next[r]] = (c, v);
        next[r] += 1;
    }
    let mut row_ptr = Vec::with_capacity(nrows + 1);
    let mut col_idx = Vec::with_capacity(triplets.len());
    let mut values = Vec::with_capacity(triplets.len());
    row_ptr.push(0);
    for r in 0..nrows {
        let row = &mut entries[counts[r]..counts[r + 1]];
        row.sort_by_key(|e| e.0);
        for &(c, v) in row.iter() {
            if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix {
        nrows,
        ncols,
        row_ptr,
        col_idx,
        values,
    })
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        assemble(n, n, &t).unwrap()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(i) => self.values[range.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `Aᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                y[c] += v * x[r];
            }
        }
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        assemble(self.ncols, self.nrows, &t).unwrap()
    }

    pub fn scaled(&self, s: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    fn to_faer(&self) -> SparseColMat<usize, f64> {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t).expect("valid CSR structure")
    }
}

/// A reusable LU factorization of a square sparse matrix.
pub struct FactorHandle {
    name: String,
    matrix: SparseMatrix,
    lu: Option<Lu<usize, f64>>,
}

impl std::fmt::Debug for FactorHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorHandle")
            .field("name", &self.name)
            .field("n", &self.matrix.nrows)
            .finish()
    }
}

/// Factorizes `a`; `system` names the matrix in error messages.
pub fn factorize(a: &SparseMatrix, system: &str) -> Result<FactorHandle> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch {
            context: "factorize (square matrix required)",
            expected: a.nrows,
            got: a.ncols,
        });
    }
    let singular = || Error::SingularMatrix {
        system: system.to_string(),
    };
    let lu = if a.nrows == 0 {
        None
    } else {
        let mat = a.to_faer();
        let symbolic = SymbolicLu::try_new(mat.symbolic()).map_err(|_| singular())?;
        Some(Lu::try_new_with_symbolic(symbolic, mat.as_ref()).map_err(|_| singular())?)
    };
    let handle = FactorHandle {
        name: system.to_string(),
        matrix: a.clone(),
        lu,
    };
    // exact zero pivots show up as non-finite solutions
    if a.nrows > 0 {
        let probe: Vec<f64> = (0..a.nrows).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        handle.solve(&probe)?;
    }
    Ok(handle)
}

impl FactorHandle {
    pub fn dim(&self) -> usize {
        self.matrix.nrows
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "solve",
                expected: self.dim(),
                got: b.len(),
            });
        }
        let Some(lu) = &self.lu else {
            return Ok(Vec::new());
        };
        let rhs = faer::Col::<f64>::from_fn(b.len(), |i| b[i]);
        let sol = lu.solve(&rhs);
        let x: Vec<f64> = (0..b.len()).map(|i| sol[i]).collect();
        let ax = self.matrix.mul_vec(&x);
        let res = ax.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let bn = norm_inf(b);
        if !res.is_finite() || x.iter().any(|v| !v.is_finite()) || res > RESIDUAL_BOUND * (1.0 + bn) {
            return Err(Error::SingularMatrix {
                system: self.name.clone(),
            });
        }
        Ok(x)
    }
}

pub fn solve(handle: &FactorHandle, b: &[f64]) -> Result<Vec<f64>> {
    handle.solve(b)
}

/// Factorized saddle-point system
///
/// ```text
/// [ A   Bᵀ  0 ] [x]   [f]
/// [ B   0   m ] [λ] = [g]
/// [ 0   mᵀ  0 ] [μ]   [0]
/// ```
///
/// The optional vector `m` removes a one-dimensional left null space of `B`
/// (e.g. constants for a divergence operator) by constraining `mᵀλ = 0`.
#[derive(Debug)]
pub struct SaddleSystem {
    n_primal: usize,
    n_constraint: usize,
    factor: FactorHandle,
}

impl SaddleSystem {
    pub fn new(a: &SparseMatrix, b: &SparseMatrix, mean: Option<&[f64]>, system: &str) -> Result<Self> {
        let n = a.nrows();
        let m = b.nrows();
        if a.ncols() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "saddle blocks",
                expected: n,
                got: b.ncols(),
            });
        }
        let extra = usize::from(mean.is_some());
        let mut t: Vec<(usize, usize, f64)> = a.triplets().collect();
        for (r, c, v) in b.triplets() {
            t.push((n + r, c, v));
            t.push((c, n + r, v));
        }
        if let Some(mv) = mean {
            if mv.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "saddle mean constraint",
                    expected: m,
                    got: mv.len(),
                });
            }
            for (i, &v) in mv.iter().enumerate() {
                t.push((n + i, n + m, v));
                t.push((n + m, n + i, v));
            }
        }
        let total = n + m + extra;
        let k = assemble(total, total, &t)?;
        let factor = factorize(&k, system).map_err(|e| match e {
            Error::SingularMatrix { system } => Error::RankDeficient { system },
            other => other,
        })?;
        Ok(Self {
            n_primal: n,
            n_constraint: m,
            factor,
        })
    }

    /// Returns `(x, λ)`.
    pub fn solve(&self, f: &[f64], g: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if f.len() != self.n_primal || g.len() != self.n_constraint {
            return Err(Error::DimensionMismatch {
                context: "saddle right-hand side",
                expected: self.n_primal + self.n_constraint,
                got: f.len() + g.len(),
            });
        }
        let mut rhs = Vec::with_capacity(self.factor.dim());
        rhs.extend_from_slice(f);
        rhs.extend_from_slice(g);
        rhs.resize(self.factor.dim(), 0.0);
        let sol = self.factor.solve(&rhs)?;
        let x = sol[..self.n_primal].to_vec();
        let lam = sol[self.n_primal..self.n_primal + self.n_constraint].to_vec();
        Ok((x, lam))
    }
}

/// One-shot saddle solve; see [`SaddleSystem`].
pub fn solve_saddle(
    a: &SparseMatrix,
    b: &SparseMatrix,
    mean: Option<&[f64]>,
    f: &[f64],
    g: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    SaddleSystem::new(a, b, mean, "saddle system")?.solve(f, g)
}

/// Conjugate gradients on a symmetric positive semidefinite operator,
/// starting from zero. For a consistent singular system this returns the
/// solution with no component in the operator's null space.
pub fn conjugate_gradient(
    op: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let bnorm = dot(rhs, rhs).sqrt();
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for it in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            return Ok((x, it));
        }
        let ap = op(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        p.iter_mut().zip(&r).for_each(|(pi, ri)| *pi = ri + rr_new / rr * *pi);
        rr = rr_new;
        // stop once roundoff dominates
        if rr < best * 0.999 {
            best = rr;
            stall = 0;
        } else {
            stall += 1;
            if stall > 50 {
                break;
            }
        }
    }
    let res = rr.sqrt() / bnorm;
    if res <= rel_tol {
        Ok((x, max_iter))
    } else {
        Err(Error::NonConvergence {
            solver: "conjugate gradient",
            iterations: max_iter,
            residual: res,
        })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
