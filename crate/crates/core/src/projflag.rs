//! The complex projective line, Möbius actions, complete flags in `Cⁿ`, the
//! Veronese embedding, and the irreducible representation `π_n`.

use nalgebra::{DMatrix, DMatrixView, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dilog::{det2, COINCIDENCE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{comb, max_principal_sine};

/// Relative singular-value threshold for every rank decision in the crate.
pub const RANK_TOL: f64 = 1e-9;

/// A point of `P¹(C)` in homogeneous coordinates `[x : y]`.
///
/// The stored representative is normalized so that `max(|x|, |y|) = 1`;
/// equality is projective. The point at infinity is `[1 : 0]`.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    x: Complex64,
    y: Complex64,
}

impl ProjPoint {
    pub fn new(x: Complex64, y: Complex64) -> Result<Self> {
        for v in [x, y] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "projective point has non-finite coordinate {v}"
                )));
            }
        }
        let scale = x.norm().max(y.norm());
        if scale < 1e-300 {
            return Err(Error::InvalidInput(
                "projective point needs a nonzero coordinate".into(),
            ));
        }
        Ok(ProjPoint {
            x: x / scale,
            y: y / scale,
        })
    }

    /// The affine point `[z : 1]`.
    pub fn from_affine(z: Complex64) -> Result<Self> {
        ProjPoint::new(z, Complex64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        ProjPoint {
            x: Complex64::new(0.0, 0.0),
            y: Complex64::new(1.0, 0.0),
        }
    }

    pub fn one() -> Self {
        ProjPoint {
            x: Complex64::new(1.0, 0.0),
            y: Complex64::new(1.0, 0.0),
        }
    }

    pub fn infinity() -> Self {
        ProjPoint {
            x: Complex64::new(1.0, 0.0),
            y: Complex64::new(0.0, 0.0),
        }
    }

    /// Vertices `(0, 1, e^{iπ/3}, ∞)` of the positively oriented regular
    /// ideal tetrahedron used as the base configuration throughout.
    pub fn regular_tetrahedron() -> [ProjPoint; 4] {
        let corner = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        [
            ProjPoint::zero(),
            ProjPoint::one(),
            ProjPoint::from_affine(corner).expect("corner is finite"),
            ProjPoint::infinity(),
        ]
    }

    pub fn x(&self) -> Complex64 {
        self.x
    }

    pub fn y(&self) -> Complex64 {
        self.y
    }

    /// Projective equality at tolerance `tol` on the normalized determinant.
    pub fn projectively_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        det2(self, other).norm() <= tol
    }

    /// Fubini–Study chordal distance (sine of the angle between the lines).
    pub fn chordal_distance(&self, other: &ProjPoint) -> f64 {
        let na = (self.x.norm_sqr() + self.y.norm_sqr()).sqrt();
        let nb = (other.x.norm_sqr() + other.y.norm_sqr()).sqrt();
        det2(self, other).norm() / (na * nb)
    }

    /// Uniform point with respect to the Fubini–Study (rotation-invariant)
    /// measure: a normalized complex-Gaussian pair.
    pub fn random_fubini_study<R: Rng>(rng: &mut R) -> Self {
        loop {
            let g = |rng: &mut R| -> Complex64 {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            };
            let x = g(rng);
            let y = g(rng);
            if x.norm().max(y.norm()) > 1e-6 {
                return ProjPoint::new(x, y).expect("gaussian pair is finite and nonzero");
            }
        }
    }

    /// Möbius action of a 2×2 group element in homogeneous coordinates.
    pub fn apply_mobius(&self, g: &GroupElement) -> ProjPoint {
        assert_eq!(g.n(), 2, "Möbius action needs a 2x2 element");
        let m = g.matrix();
        let x = m[(0, 0)] * self.x + m[(0, 1)] * self.y;
        let y = m[(1, 0)] * self.x + m[(1, 1)] * self.y;
        ProjPoint::new(x, y).expect("invertible matrices preserve P1")
    }
}

/// An element of `PSL(n,C)`: an invertible `n×n` complex matrix considered up
/// to a nonzero scalar, with its determinant cached.
#[derive(Clone, Debug)]
pub struct GroupElement {
    mat: DMatrix<Complex64>,
    det: Complex64,
}

impl GroupElement {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "group element must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidInput(
                "group element has non-finite entries".into(),
            ));
        }
        let det = mat.determinant();
        if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::InvalidInput(
                "group element must be invertible (determinant is zero or non-finite)".into(),
            ));
        }
        Ok(GroupElement { mat, det })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            mat: DMatrix::identity(n, n),
            det: Complex64::new(1.0, 0.0),
        }
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = self.mat.clone().try_inverse().ok_or_else(|| {
            Error::Numerical("group element is numerically singular, cannot invert".into())
        })?;
        Ok(GroupElement {
            mat: inv,
            det: 1.0 / self.det,
        })
    }

    /// Representative with determinant 1 up to an n-th root of unity.
    pub fn normalized(&self) -> GroupElement {
        let n = self.n();
        let scale = self.det.powf(-1.0 / n as f64);
        GroupElement {
            mat: &self.mat * scale,
            det: self.det * scale.powu(n as u32),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conjugated(&self) -> GroupElement {
        GroupElement {
            mat: self.mat.map(|e| e.conj()),
            det: self.det.conj(),
        }
    }

    /// Distance between projective classes: both matrices are scaled so the
    /// entry where `self` attains its largest modulus becomes 1, then
    /// compared entrywise in max norm. Sharing the reference entry keeps the
    /// comparison stable when several entries tie for the maximum.
    pub fn proj_distance(&self, other: &GroupElement) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        let (mut pi, mut pj, mut best) = (0, 0, -1.0);
        for i in 0..self.n() {
            for j in 0..self.n() {
                let a = self.mat[(i, j)].norm();
                if a > best {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        }
        let sa = self.mat[(pi, pj)];
        let sb = other.mat[(pi, pj)];
        if sb.norm() == 0.0 {
            return f64::INFINITY;
        }
        let mut d = 0.0f64;
        for i in 0..self.n() {
            for j in 0..self.n() {
                d = d.max((self.mat[(i, j)] / sa - other.mat[(i, j)] / sb).norm());
            }
        }
        d
    }

    pub fn proj_eq(&self, other: &GroupElement, tol: f64) -> bool {
        self.proj_distance(other) <= tol
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.mat.clone().svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0f64, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        }
    }

    /// Random element of `PSL(n,C)`: complex-Gaussian entries projected to
    /// determinant 1, resampled until the condition number is at most
    /// `cond_cap`. The cap only controls floating-point error of downstream
    /// evaluations; see the estimator documentation.
    pub fn random_gaussian<R: Rng>(rng: &mut R, n: usize, cond_cap: f64) -> GroupElement {
        loop {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] =
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                }
            }
            let Ok(g) = GroupElement::new(m) else {
                continue;
            };
            let g = g.normalized();
            if g.condition_number() <= cond_cap {
                return g;
            }
        }
    }

    /// [`GroupElement::random_gaussian`] specialized to `PSL(2,C)`.
    pub fn random_psl2<R: Rng>(rng: &mut R, cond_cap: f64) -> GroupElement {
        GroupElement::random_gaussian(rng, 2, cond_cap)
    }
}

impl std::ops::Mul for &GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.n(), rhs.n(), "group element dimensions must agree");
        GroupElement {
            mat: &self.mat * &rhs.mat,
            det: self.det * rhs.det,
        }
    }
}

/// A complete flag `0 ⊂ F¹ ⊂ … ⊂ Fⁿ = Cⁿ` stored as an ordered basis:
/// `F^i` is the span of the first `i` basis columns.
#[derive(Clone, Debug)]
pub struct CompleteFlag {
    basis: DMatrix<Complex64>,
}

impl CompleteFlag {
    pub fn new(basis: DMatrix<Complex64>) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "flag basis must be square and nonempty, got {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidInput(
                "flag basis has non-finite entries".into(),
            ));
        }
        let sv = basis.clone().svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0f64, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let limit = 1.0 / RANK_TOL;
        if !(smin > 0.0) || smax / smin > limit {
            return Err(Error::IllConditioned {
                what: "flag basis".into(),
                cond: if smin > 0.0 {
                    smax / smin
                } else {
                    f64::INFINITY
                },
                limit,
            });
        }
        Ok(CompleteFlag { basis })
    }

    /// The standard coordinate flag `⟨e₁⟩ ⊂ ⟨e₁,e₂⟩ ⊂ …`.
    pub fn standard(n: usize) -> Self {
        CompleteFlag {
            basis: DMatrix::identity(n, n),
        }
    }

    /// Random flag: a complex-Gaussian basis, resampled until its condition
    /// number is at most `cond_cap`.
    pub fn random_gaussian<R: Rng>(rng: &mut R, n: usize, cond_cap: f64) -> CompleteFlag {
        loop {
            let g = GroupElement::random_gaussian(rng, n, cond_cap);
            if let Ok(f) = CompleteFlag::new(g.matrix().clone()) {
                return f;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Basis of the `j`-dimensional subspace `F^j` (first `j` columns).
    pub fn level(&self, j: usize) -> DMatrixView<'_, Complex64> {
        assert!(j <= self.n());
        self.basis.view((0, 0), (self.n(), j))
    }

    pub fn col(&self, i: usize) -> DVector<Complex64> {
        self.basis.column(i).clone_owned()
    }

    /// The flag `g·F`.
    pub fn apply(&self, g: &GroupElement) -> Result<CompleteFlag> {
        if g.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply a {0}x{0} element to a flag in C^{1}",
                g.n(),
                self.n()
            )));
        }
        CompleteFlag::new(g.matrix() * &self.basis)
    }

    pub fn conjugated(&self) -> CompleteFlag {
        CompleteFlag {
            basis: self.basis.map(|e| e.conj()),
        }
    }

    /// Flag distance: the maximum over proper levels `j` of the sine of the
    /// largest principal angle between `F^j` and `G^j`.
    pub fn distance(&self, other: &CompleteFlag) -> f64 {
        assert_eq!(self.n(), other.n(), "flag dimensions must agree");
        let mut d = 0.0f64;
        for j in 1..self.n() {
            d = d.max(max_principal_sine(self.level(j), other.level(j), RANK_TOL));
        }
        d
    }
}

/// A complete flag with the additional datum of a decoration: vectors `v^i`
/// with `F^i = C·v^i + F^{i−1}`. The decoration is stored as the flag basis
/// itself, so the decoration condition holds by construction.
#[derive(Clone, Debug)]
pub struct AffineFlag {
    flag: CompleteFlag,
}

impl AffineFlag {
    pub fn new(flag: CompleteFlag) -> Self {
        AffineFlag { flag }
    }

    pub fn flag(&self) -> &CompleteFlag {
        &self.flag
    }

    pub fn n(&self) -> usize {
        self.flag.n()
    }

    /// Decoration vector `v^{i+1}` (0-indexed: the `i`-th basis column).
    pub fn decoration(&self, i: usize) -> DVector<Complex64> {
        self.flag.col(i)
    }
}

impl From<CompleteFlag> for AffineFlag {
    fn from(flag: CompleteFlag) -> Self {
        AffineFlag::new(flag)
    }
}

/// Concatenate component flags block-diagonally: the level-`k` subspace, for
/// `k` inside block `i`, is `C^{n₁} ⊕ … ⊕ C^{n_{i−1}} ⊕ (component i at its
/// local level)`. This is the refinement of the partial flag stabilized by
/// the block-upper-triangular parabolic.
pub fn block_flag(components: &[CompleteFlag]) -> Result<CompleteFlag> {
    if components.is_empty() {
        return Err(Error::InvalidInput(
            "block_flag needs at least one component".into(),
        ));
    }
    let n: usize = components.iter().map(|f| f.n()).sum();
    let mut basis = DMatrix::<Complex64>::zeros(n, n);
    let mut off = 0;
    for f in components {
        basis
            .view_mut((off, off), (f.n(), f.n()))
            .copy_from(f.basis());
        off += f.n();
    }
    CompleteFlag::new(basis)
}

/// The unique `g ∈ PSL(2,C)` with `g·ξ0 = 0`, `g·ξ1 = 1`, `g·ξ3 = ∞`.
pub fn mobius_normalize(p0: &ProjPoint, p1: &ProjPoint, p3: &ProjPoint) -> Result<GroupElement> {
    let pts = [p0, p1, p3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if det2(pts[i], pts[j]).norm() <= COINCIDENCE_TOL {
                return Err(Error::Degenerate(
                    "mobius_normalize needs three pairwise distinct points".into(),
                ));
            }
        }
    }
    let d13 = det2(p1, p3);
    let d10 = det2(p1, p0);
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[p0.y() * d13, -p0.x() * d13, p3.y() * d10, -p3.x() * d10],
    );
    GroupElement::new(mat)
}

/// The Veronese embedding `V_n : P¹(C) → F(n,C)`.
///
/// The `d`-th subspace is spanned by the shifted binomial vectors
/// `(x^m, C(m,1)x^{m−1}y, …, y^m)` with `m = n−d`, shifted by `k` leading
/// zeros for `k = 0,…,d−1`; the 1-dimensional piece is the rational normal
/// curve point. The returned basis adds one vector per level, with the shift
/// chosen per chart (`k = 0` when `|y| ≥ |x|`, else `k = d−1`) so the basis
/// stays well-conditioned at and near the coordinate points.
pub fn veronese(p: &ProjPoint, n: usize) -> CompleteFlag {
    assert!(n >= 1, "veronese needs n >= 1");
    let (x, y) = (p.x(), p.y());
    let chart_y = y.norm() >= x.norm();
    let mut basis = DMatrix::<Complex64>::zeros(n, n);
    for d in 1..=n {
        let m = n - d;
        let k = if chart_y { 0 } else { d - 1 };
        let mut col = DVector::<Complex64>::zeros(n);
        for t in 0..=m {
            col[k + t] = comb(m, t) * x.powu((m - t) as u32) * y.powu(t as u32);
        }
        let norm = col.norm();
        basis
            .column_mut(d - 1)
            .copy_from(&(col / Complex64::new(norm, 0.0)));
    }
    CompleteFlag::new(basis).expect("veronese basis is well-conditioned for normalized points")
}

/// The irreducible representation `π_n : PSL(2,C) → PSL(n,C)` realized on the
/// degree-(n−1) binary forms in the same binomial basis as the Veronese
/// embedding, so that `π_n(g)·V_n(ξ) = V_n(gξ)` with no change of basis.
pub fn sym_power(g: &GroupElement, n: usize) -> Result<GroupElement> {
    if g.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "sym_power expects a 2x2 element, got {0}x{0}",
            g.n()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("sym_power needs n >= 1".into()));
    }
    let gm = g.normalized();
    let m = gm.matrix();
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        // Coefficients of (a x + b y)^{n−1−i} (c x + d y)^i over x^{n−1−j} y^j.
        let p = n - 1 - i;
        let c1: Vec<Complex64> = (0..=p)
            .map(|t| comb(p, t) * a.powu((p - t) as u32) * b.powu(t as u32))
            .collect();
        let c2: Vec<Complex64> = (0..=i)
            .map(|t| comb(i, t) * c.powu((i - t) as u32) * d.powu(t as u32))
            .collect();
        let mut conv = vec![Complex64::new(0.0, 0.0); n];
        for (s, &u) in c1.iter().enumerate() {
            for (t, &v) in c2.iter().enumerate() {
                conv[s + t] += u * v;
            }
        }
        for j in 0..n {
            out[(i, j)] = comb(n - 1, i) * conv[j] / comb(n - 1, j);
        }
    }
    GroupElement::new(out)
}
