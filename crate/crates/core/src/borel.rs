//! The Borel cocycle `B_n` on 4-tuples of flags.
//!
//! For a multi-index `J = (j0,…,j3)` the strat class of a flag 4-tuple is the
//! quotient `W₊/W₋` with `W₋ = ⟨F_0^{j0},…,F_3^{j3}⟩` and
//! `W₊ = ⟨F_0^{j0+1},…,F_3^{j3+1}⟩`, carrying the images of the four
//! decoration vectors. Its volume is zero unless the quotient is
//! 2-dimensional and all four projected decorations are nonzero, in which
//! case the projections define four points of a projective line and the
//! Bloch-Wigner volume of that ideal tetrahedron is taken. `B_n` is the sum
//! over all `n⁴` multi-indices.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::dilog::{ideal_volume, nu3};
use crate::error::{Error, Result};
use crate::linalg::{comb, pairwise_sum, Mgs};
use crate::projflag::{AffineFlag, CompleteFlag, ProjPoint, RANK_TOL};

/// Relative threshold below which a projected decoration counts as zero.
pub const ZERO_PROJECTION_TOL: f64 = 1e-9;

/// A multi-index `J ∈ {0,…,n−1}⁴` selecting one subspace level per flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiIndex(pub [usize; 4]);

impl MultiIndex {
    fn check(&self, n: usize) -> Result<()> {
        if self.0.iter().any(|&j| j >= n) {
            return Err(Error::InvalidInput(format!(
                "multi-index {:?} out of range for n = {n}",
                self.0
            )));
        }
        Ok(())
    }
}

/// The strat class of a flag 4-tuple at a multi-index: the dimension `m` of
/// `W₊/W₋` and, when `m = 2`, the projected decorations in an orthonormal
/// coordinate system on the quotient model `W₊ ∩ W₋^⊥`.
#[derive(Clone, Debug)]
pub struct StratClass {
    m: usize,
    projected: Option<[DVector<Complex64>; 4]>,
}

impl StratClass {
    pub fn compute(flags: &[AffineFlag; 4], j: MultiIndex) -> Result<StratClass> {
        let n = check_common_dimension(flags)?;
        j.check(n)?;

        let mut mgs = Mgs::new(n, RANK_TOL);
        for (f, &ji) in flags.iter().zip(&j.0) {
            mgs.extend_columns(f.flag().level(ji));
        }
        let rank_minus = mgs.rank();

        // W₊ = W₋ + span of the four decorations v_i^{j_i+1}; the decorations
        // are normalized first so the zero-projection test below is relative.
        let mut decorations = Vec::with_capacity(4);
        for (f, &ji) in flags.iter().zip(&j.0) {
            let v = f.decoration(ji);
            let norm = v.norm();
            decorations.push(v / Complex64::new(norm, 0.0));
        }
        for v in &decorations {
            mgs.extend(v);
        }
        let m = mgs.rank() - rank_minus;
        if m != 2 {
            return Ok(StratClass { m, projected: None });
        }

        let slot = mgs.basis().columns(rank_minus, 2).clone_owned();
        let projected = [
            slot.adjoint() * &decorations[0],
            slot.adjoint() * &decorations[1],
            slot.adjoint() * &decorations[2],
            slot.adjoint() * &decorations[3],
        ];
        Ok(StratClass {
            m,
            projected: Some(projected),
        })
    }

    /// Codimension of `W₋` in `W₊`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Projected decorations in quotient coordinates, present iff `m = 2`.
    pub fn projected(&self) -> Option<&[DVector<Complex64>; 4]> {
        self.projected.as_ref()
    }

    /// The volume of the strat class: zero unless `m = 2` and every
    /// decoration survives projection, else the ideal volume of the four
    /// projected points on the quotient projective line.
    pub fn volume(&self) -> Result<f64> {
        let Some(q) = &self.projected else {
            return Ok(0.0);
        };
        let mut pts = Vec::with_capacity(4);
        for v in q {
            if v.norm() < ZERO_PROJECTION_TOL {
                return Ok(0.0);
            }
            pts.push(ProjPoint::new(v[0], v[1])?);
        }
        Ok(ideal_volume(&pts[0], &pts[1], &pts[2], &pts[3]))
    }
}

/// Volume of the strat class of `flags` at `j`.
pub fn strat_value(flags: &[AffineFlag; 4], j: MultiIndex) -> Result<f64> {
    StratClass::compute(flags, j)?.volume()
}

/// The Borel cocycle `B_n` of a decorated flag 4-tuple: the sum of
/// [`strat_value`] over all `n⁴` multi-indices.
///
/// Most multi-indices have `m ≠ 2`, so the joint span dimensions
/// `dim⟨F_0^a,…,F_3^d⟩` are first tabulated by incremental rank updates
/// (cloning the partial orthonormal basis once per loop level); only
/// multi-indices the table marks as candidates are handed to the full
/// strat-class computation, which recomputes ranks from scratch and remains
/// the deciding authority.
pub fn borel_value(flags: &[AffineFlag; 4]) -> Result<f64> {
    let n = check_common_dimension(flags)?;

    let idx =
        |a: usize, b: usize, c: usize, d: usize| ((a * (n + 1) + b) * (n + 1) + c) * (n + 1) + d;
    let mut dims = vec![0u8; (n + 1).pow(4)];
    let mut mgs_a = Mgs::new(n, RANK_TOL);
    for a in 0..=n {
        let mut mgs_b = mgs_a.clone();
        for b in 0..=n {
            let mut mgs_c = mgs_b.clone();
            for c in 0..=n {
                let mut mgs_d = mgs_c.clone();
                for d in 0..=n {
                    dims[idx(a, b, c, d)] = mgs_d.rank() as u8;
                    if d < n {
                        mgs_d.extend(&flags[3].flag().col(d));
                    }
                }
                if c < n {
                    mgs_c.extend(&flags[2].flag().col(c));
                }
            }
            if b < n {
                mgs_b.extend(&flags[1].flag().col(b));
            }
        }
        if a < n {
            mgs_a.extend(&flags[0].flag().col(a));
        }
    }

    let mut terms = Vec::new();
    for j0 in 0..n {
        for j1 in 0..n {
            for j2 in 0..n {
                for j3 in 0..n {
                    let m = dims[idx(j0 + 1, j1 + 1, j2 + 1, j3 + 1)] as i32
                        - dims[idx(j0, j1, j2, j3)] as i32;
                    if m != 2 {
                        continue;
                    }
                    let v = strat_value(flags, MultiIndex([j0, j1, j2, j3]))?;
                    if v != 0.0 {
                        terms.push(v);
                    }
                }
            }
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `B_n` of a complete flag 4-tuple, using the stored bases as decorations.
/// The result does not depend on that choice.
pub fn borel_from_complete(flags: &[CompleteFlag; 4]) -> Result<f64> {
    let decorated = [
        AffineFlag::new(flags[0].clone()),
        AffineFlag::new(flags[1].clone()),
        AffineFlag::new(flags[2].clone()),
        AffineFlag::new(flags[3].clone()),
    ];
    borel_value(&decorated)
}

/// The sharp bound `C(n+1,3)·ν₃` on `|B_n|`.
pub fn borel_bound(n: usize) -> f64 {
    comb(n + 1, 3) * nu3()
}

/// Classify a flag 4-tuple: `+1` when `B_n` is within `tol` of the maximum
/// `C(n+1,3)·ν₃`, `−1` when within `tol` of the minimum, `0` otherwise.
pub fn is_maximal(flags: &[CompleteFlag; 4], tol: f64) -> Result<i8> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "maximality tolerance must be positive, got {tol}"
        )));
    }
    let b = borel_from_complete(flags)?;
    let bound = borel_bound(flags[0].n());
    if (b - bound).abs() <= tol {
        Ok(1)
    } else if (b + bound).abs() <= tol {
        Ok(-1)
    } else {
        Ok(0)
    }
}

fn check_common_dimension(flags: &[AffineFlag; 4]) -> Result<usize> {
    let n = flags[0].n();
    if flags.iter().any(|f| f.n() != n) {
        return Err(Error::DimensionMismatch(format!(
            "flag 4-tuple mixes ambient dimensions {:?}",
            flags.iter().map(|f| f.n()).collect::<Vec<_>>()
        )));
    }
    Ok(n)
}
