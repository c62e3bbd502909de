//! Compressed-sparse-row complex matrices.
//!
//! Just enough algebra to build operators and superoperators: products,
//! adjoints, Kronecker products and sums. Factorizations go through faer.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))))
    }

    /// Builds from `(row, col, value)` entries; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut t: Vec<(usize, usize, Complex64)> = entries.into_iter().collect();
        t.sort_unstable_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut data: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "entry ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                data.push(v);
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
        .pruned()
    }

    fn pruned(self) -> Self {
        if self.data.iter().all(|v| *v != Complex64::new(0.0, 0.0)) {
            return self;
        }
        let (nrows, ncols) = (self.nrows, self.ncols);
        let kept: Vec<_> = self.iter().filter(|e| e.2 != Complex64::new(0.0, 0.0)).collect();
        let mut indptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &kept {
            indptr[r + 1] += 1;
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: kept.iter().map(|e| e.1).collect(),
            data: kept.iter().map(|e| e.2).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Row-major iteration over stored entries.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.data[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.indptr[r]..self.indptr[r + 1];
        match self.indices[range.clone()].binary_search(&c) {
            Ok(k) => self.data[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out.pruned()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(r, c, v)| (c, r, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut entries = Vec::new();
        for (r, k, a) in self.iter() {
            for (c, b) in other.row(k) {
                entries.push((r, c, a * b));
            }
        }
        Self::from_triplets(self.nrows, other.ncols, entries)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let (m, n) = (other.nrows, other.ncols);
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.iter() {
            for (r2, c2, b) in other.iter() {
                entries.push((r1 * m + r2, c1 * n + c2, a * b));
            }
        }
        Self::from_triplets(self.nrows * m, self.ncols * n, entries)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// Largest entry modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint())
            .data
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn to_dense(&self) -> faer::Mat<Complex64> {
        let mut m = faer::Mat::<Complex64>::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, Complex64>> {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::SolverFailure(format!("sparse assembly: {e:?}")))
    }
}

/// Sparse LU with partial pivoting. The symbolic analysis can be shared
/// between matrices with the same pattern.
pub struct SparseLu {
    lu: Lu<usize, Complex64>,
    n: usize,
}

impl SparseLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        let a = m.to_faer()?;
        let symbolic = Self::symbolic(&a)?;
        Self::factor_with(&symbolic, &a)
    }

    pub fn symbolic(a: &SparseColMat<usize, Complex64>) -> Result<SymbolicLu<usize>> {
        guarded(|| SymbolicLu::try_new(a.symbolic()))?
            .map_err(|e| Error::SolverFailure(format!("symbolic LU: {e:?}")))
    }

    pub fn factor_with(
        symbolic: &SymbolicLu<usize>,
        a: &SparseColMat<usize, Complex64>,
    ) -> Result<Self> {
        let lu = guarded(|| Lu::try_new_with_symbolic(symbolic.clone(), a.as_ref()))?
            .map_err(|e| Error::SolverFailure(format!("numeric LU: {e:?}")))?;
        Ok(SparseLu { lu, n: a.nrows() })
    }

    /// Solves `A x = b`; fails if the result is not finite (singular `A`).
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(b.len(), self.n);
        let rhs = Col::<Complex64>::from_fn(self.n, |i| b[i]);
        let x = self.lu.solve(&rhs);
        let out: Vec<Complex64> = (0..self.n).map(|i| x[i]).collect();
        if out.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(out)
        } else {
            Err(Error::SolverFailure("singular system".into()))
        }
    }
}

/// faer panics on exactly zero pivots; surface that as a solver error.
fn guarded<T>(f: impl FnOnce() -> T) -> Result<T> {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .map_err(|_| Error::SolverFailure("singular matrix".into()))
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
