use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{norm2, CsrMatrix};
use crate::C64;

/// Pivots below this fraction of their row norm count as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// Partially pivoted dense LU with a pivot-size check.
pub struct DenseLu {
    lu: PartialPivLu<C64>,
}

impl DenseLu {
    pub fn new(a: &Mat<C64>, what: &'static str) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { what, expected: n, found: a.ncols() });
        }
        if (0..n).any(|j| (0..n).any(|i| !a[(i, j)].is_finite())) {
            return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
        }
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let fwd = lu.P().arrays().0;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut singular = n > 0 && u.ncols() == 0;
        for i in 0..n {
            let row = fwd[i];
            let row_norm = (0..n).map(|j| a[(row, j)].norm_sqr()).sum::<f64>().sqrt();
            let pivot = u[(i, i)].norm();
            lo = lo.min(pivot);
            hi = hi.max(pivot);
            if !(pivot >= PIVOT_TOLERANCE * row_norm) || row_norm == 0.0 {
                singular = true;
            }
        }
        if singular {
            return Err(Error::Singular { what, condition: if lo > 0.0 { hi / lo } else { f64::INFINITY } });
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, b: &Mat<C64>) -> Mat<C64> {
        let mut x = b.clone();
        self.lu.solve_in_place(x.as_mut());
        x
    }
}

/// Sparse LU of a square CSR matrix, validated by a test solve.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, C64>,
    n: usize,
}

impl SparseLu {
    pub fn new(a: &CsrMatrix, what: &'static str) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch { what, expected: n, found: a.ncols() });
        }
        let trip: Vec<Triplet<usize, usize, C64>> = a.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let csc = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::InvalidArgument(format!("{what}: {e:?}")))?;
        let lu = csc.sp_lu().map_err(|_| Error::Singular { what, condition: f64::INFINITY })?;
        let this = Self { lu, n };
        // A solve with a fixed nonconstant right-hand side gives a lower
        // bound for the condition number and catches numerically zero pivots.
        let b: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i % 7) as f64, (i % 3) as f64 - 1.0)).collect();
        let x = this.solve(&b);
        let r: Vec<C64> = a.matvec(&x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
        let condition = a.frobenius_norm() * norm2(&x) / norm2(&b);
        if !condition.is_finite() || condition > 1.0 / PIVOT_TOLERANCE || norm2(&r) > 1e-8 * norm2(&b) {
            return Err(Error::Singular { what, condition });
        }
        Ok(this)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, b: &mut Mat<C64>) {
        self.lu.solve_in_place(b.as_mut());
    }
}
