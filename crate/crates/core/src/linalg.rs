//! Crate-private numerical helpers: modified Gram–Schmidt with rank
//! tracking, orthogonal complements, principal angles, and small
//! combinatorial utilities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Incremental modified Gram–Schmidt orthonormalizer.
///
/// Holds an orthonormal basis of the span of every vector fed to `extend`,
/// growing one column at a time. Vectors whose residual after projection is
/// below `tol` times their own norm are rejected as dependent. Each
/// projection pass is applied twice ("twice is enough") so the basis stays
/// orthonormal to machine precision even for nearly dependent input.
#[derive(Clone)]
pub(crate) struct Mgs {
    q: DMatrix<Complex64>,
    rank: usize,
    tol: f64,
}

impl Mgs {
    pub fn new(n: usize, tol: f64) -> Self {
        Mgs {
            q: DMatrix::zeros(n, n),
            rank: 0,
            tol,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis columns accumulated so far.
    pub fn basis(&self) -> nalgebra::DMatrixView<'_, Complex64> {
        self.q.view((0, 0), (self.q.nrows(), self.rank))
    }

    /// Residual of `v` against the current span (two projection passes).
    pub fn residual(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut w = v.clone();
        for _ in 0..2 {
            for i in 0..self.rank {
                let q = self.q.column(i);
                let coeff = q.dotc(&w);
                w.axpy(-coeff, &q.clone_owned(), Complex64::new(1.0, 0.0));
            }
        }
        w
    }

    /// Adds `v` to the span. Returns true when the rank grew.
    pub fn extend(&mut self, v: &DVector<Complex64>) -> bool {
        let nv = v.norm();
        if !(nv > 0.0) {
            return false;
        }
        let w = self.residual(v);
        let nw = w.norm();
        if nw > self.tol * nv {
            self.q
                .column_mut(self.rank)
                .copy_from(&(w / Complex64::new(nw, 0.0)));
            self.rank += 1;
            true
        } else {
            false
        }
    }

    pub fn extend_columns(&mut self, cols: nalgebra::DMatrixView<'_, Complex64>) {
        for c in 0..cols.ncols() {
            self.extend(&cols.column(c).clone_owned());
        }
    }
}

/// Thin orthonormal basis of the column span of `a`.
pub(crate) fn orthonormal_basis(
    a: nalgebra::DMatrixView<'_, Complex64>,
    tol: f64,
) -> DMatrix<Complex64> {
    let mut mgs = Mgs::new(a.nrows(), tol);
    mgs.extend_columns(a);
    mgs.basis().clone_owned()
}

/// Orthonormal basis of the orthogonal complement of the column span of `a`.
pub(crate) fn orth_complement(
    a: nalgebra::DMatrixView<'_, Complex64>,
    tol: f64,
) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut mgs = Mgs::new(n, tol);
    mgs.extend_columns(a);
    let span_rank = mgs.rank();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        mgs.extend(&e);
    }
    let q = mgs.basis();
    q.columns(span_rank, mgs.rank() - span_rank).clone_owned()
}

/// Sine of the largest principal angle between the column spans of `a` and
/// `b` (same dimension), computed as the spectral norm of
/// `Q_a − Q_b (Q_bᴴ Q_a)`. Accurate for small angles, unlike the
/// `sqrt(1 − cos²)` form.
pub(crate) fn max_principal_sine(
    a: nalgebra::DMatrixView<'_, Complex64>,
    b: nalgebra::DMatrixView<'_, Complex64>,
    tol: f64,
) -> f64 {
    let qa = orthonormal_basis(a, tol);
    let qb = orthonormal_basis(b, tol);
    if qa.ncols() != qb.ncols() {
        // Spans of different dimension are maximally separated.
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let r = &qa - &qb * (qb.adjoint() * &qa);
    match r
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::NAN, f64::max)
    {
        s if s.is_finite() => s.min(1.0),
        _ => 1.0,
    }
}

/// Binomial coefficient as f64 (exact for every value used here).
pub(crate) fn comb(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Pairwise (cascade) summation: deterministic for a fixed slice order and
/// far more accurate than sequential accumulation on long sums.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1..=8 => xs.iter().sum(),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
