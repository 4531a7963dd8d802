//! The constructive content of the rigidity theorem: certify maximality of
//! the slices of a boundary map, align each slice to the Veronese embedding,
//! and assemble the measurable map f trivializing the cocycle, so that
//! π_n(γ) = f(γx)⁻¹·σ(γ,x)·f(x) for every generator γ and point x (or the
//! complex-conjugate representation, on the conjugated branch).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::borel::is_maximal;
use crate::cocycle::{BoundaryMap, Cocycle, TwistMap};
use crate::error::{Error, Result};
use crate::invariant::EQUIVARIANCE_REFUSAL_TOL;
use crate::linalg::orth_complement;
use crate::projflag::{sym_power, veronese, CompleteFlag, GroupElement, ProjPoint, RANK_TOL};

/// Minimum pairwise chordal distance between alignment sample points.
const SAMPLE_SEPARATION: f64 = 1e-3;

/// Condition-number cap of the tetrahedron sampler used by the certificate.
const CERTIFICATE_COND_CAP: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlignmentStatus {
    Success,
    /// The best candidate leaves a residual above tolerance.
    NoSolution,
    /// The homogeneous system has (numerically) more than one solution:
    /// second-smallest singular value below 10·tol, typically from degenerate
    /// or coincident sample points.
    Ambiguous,
}

/// Outcome of aligning sampled flags to the Veronese embedding.
#[derive(Clone, Debug)]
pub struct AlignmentResult {
    pub g: GroupElement,
    /// Max flag distance of g·F_k from V_n(ξ_k) over the samples.
    pub residual: f64,
    pub status: AlignmentStatus,
    /// Ratio of second-smallest to smallest singular value; large on
    /// well-posed instances (the nullspace is 1-dimensional).
    pub sv_gap: f64,
}

/// Find g ∈ PSL(n,C) with g·F_k = V_n(ξ_k) as flags for all samples.
///
/// Each containment g·F_k^j ⊆ V_n^j(ξ_k) is linear in the entries of g: for
/// w in the annihilator of V_n^j(ξ_k) and a in a basis of F_k^j, the form
/// wᴴ·g·a must vanish, giving j(n−j) equations per level per sample. The
/// stacked system is solved by a smallest-singular-vector computation;
/// requires at least n² samples at pairwise generic points.
pub fn align_to_veronese(
    samples: &[(ProjPoint, CompleteFlag)],
    tol: f64,
) -> Result<AlignmentResult> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("alignment needs samples".into()));
    }
    let n = samples[0].1.n();
    if samples.iter().any(|(_, f)| f.n() != n) {
        return Err(Error::DimensionMismatch(
            "alignment samples mix flag dimensions".into(),
        ));
    }
    if n == 1 {
        return Ok(AlignmentResult {
            g: GroupElement::identity(1),
            residual: 0.0,
            status: AlignmentStatus::Success,
            sv_gap: f64::INFINITY,
        });
    }
    if samples.len() < n * n {
        return Err(Error::InvalidInput(format!(
            "alignment needs at least n² = {} samples, got {}",
            n * n,
            samples.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(
            "alignment tolerance must be positive".into(),
        ));
    }

    let rows_per_sample = (n * n * n - n) / 6;
    let mut m = DMatrix::<Complex64>::zeros(samples.len() * rows_per_sample, n * n);
    let mut row = 0;
    for (xi, flag) in samples {
        let v = veronese(xi, n);
        for j in 1..n {
            let compl = orth_complement(v.level(j), RANK_TOL);
            for w in compl.column_iter() {
                for a in flag.level(j).column_iter() {
                    let an = a.norm();
                    for p in 0..n {
                        for q in 0..n {
                            m[(row, p * n + q)] = w[p].conj() * a[q] / an;
                        }
                    }
                    row += 1;
                }
            }
        }
    }
    debug_assert_eq!(row, m.nrows());

    let svd = m.svd(false, true);
    let sv = &svd.singular_values;
    let (mut i_min, mut i_second) = (0usize, 1usize);
    if sv[i_second] < sv[i_min] {
        std::mem::swap(&mut i_min, &mut i_second);
    }
    for i in 2..sv.len() {
        if sv[i] < sv[i_min] {
            i_second = i_min;
            i_min = i;
        } else if sv[i] < sv[i_second] {
            i_second = i;
        }
    }
    let v_t = svd.v_t.expect("right singular vectors were requested");
    // A = U Σ Vᴴ, so the right singular vector is the conjugate of the row.
    let g_mat = DMatrix::from_fn(n, n, |p, q| v_t[(i_min, p * n + q)].conj());
    let sv_gap = sv[i_second] / sv[i_min].max(f64::MIN_POSITIVE);
    let ambiguous = sv[i_second] < 10.0 * tol;

    let (g, residual) = match GroupElement::new(g_mat) {
        Err(_) => (GroupElement::identity(n), 1.0),
        Ok(g) => {
            let mut worst = 0.0f64;
            for (xi, flag) in samples {
                match flag.apply(&g) {
                    Ok(moved) => worst = worst.max(moved.distance(&veronese(xi, n))),
                    Err(_) => {
                        worst = 1.0;
                        break;
                    }
                }
            }
            (g, worst)
        }
    };
    let status = if ambiguous {
        AlignmentStatus::Ambiguous
    } else if residual <= tol {
        AlignmentStatus::Success
    } else {
        AlignmentStatus::NoSolution
    };
    Ok(AlignmentResult {
        g,
        residual,
        status,
        sv_gap,
    })
}

/// Certificate data for one slice φ_x.
#[derive(Clone, Debug)]
pub struct SliceCertificate {
    pub x: usize,
    /// Fraction of sampled regular tetrahedra whose image under φ_x is
    /// maximal within tolerance (of either sign).
    pub fraction: f64,
    /// +1 or −1 when every sample is maximal with that sign, else 0.
    pub sign: i8,
    pub certified: bool,
}

/// Per-slice maximality report.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub slices: Vec<SliceCertificate>,
    pub samples_per_slice: usize,
    pub tol: f64,
}

impl CertificateReport {
    pub fn all_certified(&self) -> bool {
        self.slices.iter().all(|s| s.certified)
    }

    /// The orientation sign shared by all certified slices, if any.
    pub fn common_sign(&self) -> Option<i8> {
        let first = self.slices.first()?.sign;
        if first != 0 && self.slices.iter().all(|s| s.certified && s.sign == first) {
            Some(first)
        } else {
            None
        }
    }
}

/// For each x ∈ X, sample random regular ideal tetrahedra g·(0,1,e^{iπ/3},∞)
/// and report the fraction whose image flags under φ_x are maximal within
/// `tol`; a slice is certified when the fraction is 1 with a consistent sign.
pub fn maximality_certificate(
    sigma: &Cocycle,
    phi: &BoundaryMap,
    samples_per_slice: usize,
    tol: f64,
    seed: u64,
) -> Result<CertificateReport> {
    if samples_per_slice == 0 {
        return Err(Error::InvalidInput(
            "certificate needs at least one sample per slice".into(),
        ));
    }
    if phi.n()? != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "boundary map dimension {} does not match cocycle dimension {}",
            phi.n()?,
            sigma.n()
        )));
    }
    let base = ProjPoint::regular_tetrahedron();
    let mut slices = Vec::with_capacity(sigma.space().len());
    for x in 0..sigma.space().len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x1000 + x as u64);
        let (mut pos, mut neg) = (0usize, 0usize);
        for _ in 0..samples_per_slice {
            let g = GroupElement::random_psl2(&mut rng, CERTIFICATE_COND_CAP);
            let flags = [
                phi.eval(&base[0].apply_mobius(&g), x)?,
                phi.eval(&base[1].apply_mobius(&g), x)?,
                phi.eval(&base[2].apply_mobius(&g), x)?,
                phi.eval(&base[3].apply_mobius(&g), x)?,
            ];
            match is_maximal(&flags, tol)? {
                1 => pos += 1,
                -1 => neg += 1,
                _ => {}
            }
        }
        let sign = if pos == samples_per_slice {
            1
        } else if neg == samples_per_slice {
            -1
        } else {
            0
        };
        slices.push(SliceCertificate {
            x,
            fraction: (pos + neg) as f64 / samples_per_slice as f64,
            sign,
            certified: sign != 0,
        });
    }
    Ok(CertificateReport {
        slices,
        samples_per_slice,
        tol,
    })
}

/// Which representation the trivialization closes over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// π_n itself.
    Plain,
    /// The complex conjugate of π_n (certificate sign −1).
    Conjugated,
}

/// Per-slice alignment diagnostics.
#[derive(Clone, Debug)]
pub struct SliceAlignment {
    pub x: usize,
    pub residual: f64,
    pub sv_gap: f64,
}

/// A recovered trivializing map with its verification data.
#[derive(Clone, Debug)]
pub struct Trivialization {
    /// f: X → PSL(n,C) with π_n(γ) = f(γx)⁻¹·σ(γ,x)·f(x) (up to `residual`,
    /// with π̄_n on the conjugated branch).
    pub f: TwistMap,
    /// Max projective deviation of the closing identity over (γ, x).
    pub residual: f64,
    pub branch: Branch,
    pub slices: Vec<SliceAlignment>,
    /// Deviations indexed \[generator\]\[point\].
    pub deviations: Vec<Vec<f64>>,
}

/// Knobs of the trivialization pipeline. The tolerance hierarchy is derived
/// from the single `tol` knob: alignment runs at tol/10 and the maximality
/// certificate at 10·tol, so each stage has headroom for the previous one.
#[derive(Clone, Debug)]
pub struct TrivializeParams {
    pub samples_per_slice: usize,
    pub tol: f64,
    pub seed: u64,
    pub workers: usize,
    pub certificate_samples: usize,
}

impl Default for TrivializeParams {
    fn default() -> Self {
        TrivializeParams {
            samples_per_slice: 40,
            tol: 1e-6,
            seed: 7,
            workers: 1,
            certificate_samples: 50,
        }
    }
}

/// Recover the measurable map f trivializing a maximal cocycle:
/// runs the equivariance and maximality gates, aligns every slice φ_x to the
/// Veronese embedding (after entrywise conjugation when the certificate sign
/// is −1), sets f(x) = g_x⁻¹, and verifies the closing identity against π_n
/// (or π̄_n) for every generator and point.
///
/// Refusals (failed equivariance or certificate) map to exit code 2;
/// alignment failures on certified input are numerical errors naming the
/// slice.
pub fn trivialize(
    sigma: &Cocycle,
    phi: &BoundaryMap,
    params: &TrivializeParams,
) -> Result<Trivialization> {
    let n = sigma.n();
    if phi.n()? != n {
        return Err(Error::DimensionMismatch(format!(
            "boundary map dimension {} does not match cocycle dimension {n}",
            phi.n()?
        )));
    }
    if params.samples_per_slice < n * n {
        return Err(Error::InvalidInput(format!(
            "trivialize needs at least n² = {} samples per slice, got {}",
            n * n,
            params.samples_per_slice
        )));
    }

    let equiv = phi.check_equivariance(sigma, params.certificate_samples.max(1), params.seed)?;
    if equiv > EQUIVARIANCE_REFUSAL_TOL {
        return Err(Error::Refused(format!(
            "boundary map is not sigma-equivariant: residual {equiv:.3e} exceeds {EQUIVARIANCE_REFUSAL_TOL:.0e}"
        )));
    }

    let cert = maximality_certificate(
        sigma,
        phi,
        params.certificate_samples,
        params.tol * 10.0,
        params.seed,
    )?;
    if let Some(bad) = cert.slices.iter().find(|s| !s.certified) {
        return Err(Error::Refused(format!(
            "maximality certificate failed on slice {} (fraction {:.3}, sign {})",
            sigma.space().point_name(bad.x),
            bad.fraction,
            bad.sign
        )));
    }
    let sign = cert.common_sign().ok_or_else(|| {
        Error::Refused("slices are maximal but disagree on orientation sign".into())
    })?;
    let branch = if sign < 0 {
        Branch::Conjugated
    } else {
        Branch::Plain
    };

    let space = sigma.space();
    type SliceOutput = (GroupElement, SliceAlignment);
    let slice_job = |x: usize| -> Result<SliceOutput> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(0x2000 + x as u64);
        let mut pts: Vec<ProjPoint> = Vec::with_capacity(params.samples_per_slice);
        while pts.len() < params.samples_per_slice {
            let p = ProjPoint::random_fubini_study(&mut rng);
            if pts
                .iter()
                .all(|q| q.chordal_distance(&p) > SAMPLE_SEPARATION)
            {
                pts.push(p);
            }
        }
        let mut samples = Vec::with_capacity(pts.len());
        for p in pts {
            let mut flag = phi.eval(&p, x)?;
            if branch == Branch::Conjugated {
                flag = flag.conjugated();
            }
            samples.push((p, flag));
        }
        let aligned = align_to_veronese(&samples, params.tol / 10.0)?;
        if aligned.status != AlignmentStatus::Success {
            return Err(Error::Numerical(format!(
                "alignment failed on slice {} ({:?}, residual {:.3e}, sv gap {:.3e})",
                space.point_name(x),
                aligned.status,
                aligned.residual,
                aligned.sv_gap
            )));
        }
        let g_x = if branch == Branch::Conjugated {
            aligned.g.conjugated()
        } else {
            aligned.g.clone()
        };
        Ok((
            g_x.inverse()?,
            SliceAlignment {
                x,
                residual: aligned.residual,
                sv_gap: aligned.sv_gap,
            },
        ))
    };

    let workers = params.workers.max(1).min(space.len());
    let mut per_slice: Vec<Option<SliceOutput>> = vec![None; space.len()];
    if workers == 1 {
        for (x, slot) in per_slice.iter_mut().enumerate() {
            *slot = Some(slice_job(x)?);
        }
    } else {
        let results: Vec<Result<Vec<(usize, SliceOutput)>>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let slice_job = &slice_job;
                    s.spawn(move || {
                        let mut out = Vec::new();
                        let mut x = w;
                        while x < space.len() {
                            out.push((x, slice_job(x)?));
                            x += workers;
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("trivialize worker panicked"))
                .collect()
        });
        for r in results {
            for (x, item) in r? {
                per_slice[x] = Some(item);
            }
        }
    }
    let mut fs = Vec::with_capacity(space.len());
    let mut slices = Vec::with_capacity(space.len());
    for item in per_slice.into_iter() {
        let (f_x, diag) = item.expect("every slice was aligned");
        fs.push(f_x);
        slices.push(diag);
    }
    let f = TwistMap::new(fs)?;

    // Closing identity: f(γx)⁻¹·σ(γ,x)·f(x) against π_n(γ) (or conjugate).
    let pres = sigma.presentation();
    let mut deviations = Vec::with_capacity(pres.generator_count());
    let mut worst = 0.0f64;
    for (gi, gname) in pres.generator_names().iter().enumerate() {
        let target = {
            let t = sym_power(pres.generator(gname)?, n)?;
            if branch == Branch::Conjugated {
                t.conjugated()
            } else {
                t
            }
        };
        let mut row = Vec::with_capacity(space.len());
        for x in 0..space.len() {
            let gx = space.apply_gen(gname, x)?;
            let lhs = &(&f.get(gx).inverse()? * sigma.entry(gi, x)) * f.get(x);
            let dev = lhs.proj_distance(&target);
            worst = worst.max(dev);
            row.push(dev);
        }
        deviations.push(row);
    }

    Ok(Trivialization {
        f,
        residual: worst,
        branch,
        slices,
        deviations,
    })
}
