//! Compressed sparse row symmetric matrices and a Jacobi-preconditioned
//! conjugate gradient solver. Everything is single-threaded with a fixed
//! summation order, so results are bitwise reproducible.

use crate::error::{Error, Result};

/// Coordinate-format accumulator used during assembly.
#[derive(Debug, Clone)]
pub struct TripletMatrix {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        if v != 0.0 {
            self.entries.push((i as u32, j as u32, v));
        }
    }

    pub fn to_csr(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut cols: Vec<u32> = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut row_of: Vec<u32> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            if row_of.last() == Some(&i) && cols.last() == Some(&j) {
                *vals.last_mut().unwrap() += v;
            } else {
                row_of.push(i);
                cols.push(j);
                vals.push(v);
            }
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        for &i in &row_of {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

/// Square sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.cols[lo..hi].binary_search(&(j as u32)) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let y = self.matvec(x);
        dot(x, &y)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |A_ij − A_ji| over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k] as usize;
                worst = worst.max((self.vals[k] - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Entry-wise sum of two matrices of equal size.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = TripletMatrix::new(self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.push(i, self.cols[k] as usize, self.vals[k]);
            }
            for k in other.row_ptr[i]..other.row_ptr[i + 1] {
                t.push(i, other.cols[k] as usize, other.vals[k]);
            }
        }
        t.to_csr()
    }

    /// Zeroes row and column `dof`, then sets the diagonal to 1.
    /// `rhs` receives the matching elimination updates for value `value`.
    pub fn eliminate_dof(&mut self, dof: usize, value: f64, rhs: &mut [f64]) {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k] as usize;
                if i == dof && j == dof {
                    self.vals[k] = 1.0;
                } else if j == dof {
                    rhs[i] -= self.vals[k] * value;
                    self.vals[k] = 0.0;
                } else if i == dof {
                    self.vals[k] = 0.0;
                }
            }
        }
        rhs[dof] = value;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Outcome of a conjugate gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// (semi-)definite systems. Zero rows are tolerated as long as the
/// matching right-hand side entries are zero (the solution stays zero
/// there).
pub fn cg_solve(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n();
    assert_eq!(b.len(), n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { iterations: 0, residual: 0.0 }));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];

    for iter in 1..=max_iter {
        a.matvec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(Error::SolverIndefinite { curvature: pq });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if iter % 64 == 0 {
            // Refresh the residual to keep the recursion honest.
            a.matvec_into(&x, &mut q);
            for i in 0..n {
                r[i] = b[i] - q[i];
            }
        }
        let rel = norm(&r) / b_norm;
        if rel <= tol {
            // Accept only a true residual below tolerance.
            a.matvec_into(&x, &mut q);
            let mut true_r = 0.0;
            for i in 0..n {
                let ri = b[i] - q[i];
                true_r += ri * ri;
                r[i] = ri;
            }
            let true_rel = true_r.sqrt() / b_norm;
            if true_rel <= tol {
                return Ok((x, SolveStats { iterations: iter, residual: true_rel }));
            }
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverNonConvergence { residual: norm(&r) / b_norm, iterations: max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spd() -> CsrMatrix {
        // [[4, 1, 0], [1, 3, 1], [0, 1, 2]]
        let mut t = TripletMatrix::new(3);
        for (i, j, v) in [
            (0, 0, 4.0),
            (0, 1, 1.0),
            (1, 0, 1.0),
            (1, 1, 3.0),
            (1, 2, 1.0),
            (2, 1, 1.0),
            (2, 2, 2.0),
        ] {
            t.push(i, j, v);
        }
        t.to_csr()
    }

    #[test]
    fn duplicate_triplets_accumulate() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(1, 0, 0.5);
        let m = t.to_csr();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 0), 0.5);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn cg_matches_direct_inverse() {
        let a = small_spd();
        let b = vec![1.0, 2.0, 3.0];
        let (x, stats) = cg_solve(&a, &b, 1e-14, 100).unwrap();
        let r: Vec<f64> = a
            .matvec(&x)
            .iter()
            .zip(&b)
            .map(|(ax, bi)| bi - ax)
            .collect();
        assert!(norm(&r) <= 1e-12);
        assert!(stats.iterations <= 3 + 1);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = small_spd();
        let (x, stats) = cg_solve(&a, &[0.0; 3], 1e-12, 10).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 1.0);
        t.push(1, 1, -1.0);
        let a = t.to_csr();
        assert!(matches!(
            cg_solve(&a, &[0.0, 1.0], 1e-12, 10),
            Err(Error::SolverIndefinite { .. })
        ));
    }

    #[test]
    fn zero_rows_with_zero_rhs_are_tolerated() {
        let mut t = TripletMatrix::new(3);
        t.push(0, 0, 2.0);
        t.push(2, 2, 1.0);
        let a = t.to_csr();
        let (x, _) = cg_solve(&a, &[4.0, 0.0, 3.0], 1e-14, 50).unwrap();
        assert!((x[0] - 2.0).abs() <= 1e-12);
        assert_eq!(x[1], 0.0);
        assert!((x[2] - 3.0).abs() <= 1e-12);
    }
}
