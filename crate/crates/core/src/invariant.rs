//! Pullback cochains, integration over X, the empirical Borel-invariant
//! estimator, and the parabolic bound.
//!
//! The estimator realizes λ = β_n(σ)/Vol(M) through the multiplicative
//! formula: it averages B_n(φ(g·ξ_i, x))/ν₃ over random g ∈ PSL(2,C) and the
//! (exact, finite) integral over X, where ξ is the regular positively
//! oriented ideal tetrahedron (0, 1, e^{iπ/3}, ∞).
//!
//! Sampling g from Haar measure on a fundamental domain of Γ is out of reach
//! at desk scale. Every integrand handled here is Γ-invariant, and in the
//! maximal, twisted, and representation cases it is constant, so any sampling
//! distribution returns the exact constant; we use complex-Gaussian 2×2
//! matrices projected to determinant 1 with a condition-number cap (the cap
//! only limits floating-point error). For other boundary maps the report is
//! labeled a heuristic estimate.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::borel::borel_from_complete;
use crate::cocycle::{BoundaryMap, Cocycle, FiniteGammaSpace, GroupPresentation};
use crate::dilog::nu3;
use crate::error::{Error, Result};
use crate::linalg::{comb, pairwise_sum};
use crate::projflag::{sym_power, GroupElement, ProjPoint};

pub use crate::projflag::block_flag;

/// Boundary maps whose equivariance residual exceeds this are refused by the
/// estimator and by the rigidity pipeline.
pub const EQUIVARIANCE_REFUSAL_TOL: f64 = 1e-6;

/// A partition (n₁,…,n_r) of n, indexing a standard parabolic subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidInput(
                "partition needs at least one positive part".into(),
            ));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The parabolic bound Σ_i C(n_i+1, 3) on |β_n(σ)|/ν₃ for cocycles preserved
/// by the parabolic of the partition; strictly below C(n+1,3) when r ≥ 2.
pub fn parabolic_bound(p: &Partition) -> f64 {
    p.parts().iter().map(|&ni| comb(ni + 1, 3)).sum()
}

/// The block-diagonal cocycle of a partition: σ(γ, x) =
/// diag(π_{n₁}(ρ(γ)), …, π_{n_r}(ρ(γ))) where ρ is the presentation's own
/// 2×2 holonomy. Constant in x.
pub fn block_cocycle(
    presentation: Arc<GroupPresentation>,
    space: Arc<FiniteGammaSpace>,
    partition: &Partition,
) -> Result<Cocycle> {
    let n = partition.n();
    let mut rho = Vec::with_capacity(presentation.generator_count());
    for name in presentation.generator_names() {
        let g = presentation.generator(name)?;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let mut off = 0;
        for &ni in partition.parts() {
            let block = sym_power(g, ni)?;
            m.view_mut((off, off), (ni, ni)).copy_from(block.matrix());
            off += ni;
        }
        rho.push(GroupElement::new(m)?);
    }
    Cocycle::from_representation(presentation, space, rho)
}

/// The pullback of the Borel cocycle along a boundary map:
/// c(ξ0,…,ξ3; x) = B_n(φ(ξ0, x), …, φ(ξ3, x)), a Γ-invariant cochain.
#[derive(Clone, Debug)]
pub struct PullbackCochain {
    phi: BoundaryMap,
    space: Arc<FiniteGammaSpace>,
}

impl PullbackCochain {
    pub fn new(phi: BoundaryMap, space: Arc<FiniteGammaSpace>) -> Result<Self> {
        phi.n()?;
        Ok(PullbackCochain { phi, space })
    }

    pub fn boundary_map(&self) -> &BoundaryMap {
        &self.phi
    }

    pub fn eval(&self, pts: &[ProjPoint; 4], x: usize) -> Result<f64> {
        let flags = [
            self.phi.eval(&pts[0], x)?,
            self.phi.eval(&pts[1], x)?,
            self.phi.eval(&pts[2], x)?,
            self.phi.eval(&pts[3], x)?,
        ];
        borel_from_complete(&flags)
    }

    /// Σ_x μ_X(x)·c(ξ; x), an exact weighted sum. When φ does not depend on
    /// x the sum collapses to a single evaluation (the weights sum to 1).
    pub fn integrate_over_x(&self, pts: &[ProjPoint; 4]) -> Result<f64> {
        if self.phi.x_independent() {
            return self.eval(pts, 0);
        }
        let mut acc = 0.0;
        for x in 0..self.space.len() {
            acc += self.space.weight(x) * self.eval(pts, x)?;
        }
        Ok(acc)
    }
}

/// Knobs of the empirical estimator. All randomness flows from `seed`; runs
/// are bit-reproducible for a fixed `(seed, workers)` pair.
#[derive(Clone, Debug)]
pub struct EstimatorParams {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Condition-number cap of the Gaussian PSL(2,C) sampler. Purely a
    /// floating-point guard: the integrands are Γ-invariant and constant in
    /// the cases the acceptance criteria rely on, so the cap does not bias
    /// those estimates.
    pub cond_cap: f64,
    /// Tolerance of the maximality verdict λ̂ > C(n+1,3) − tol.
    pub tol: f64,
    /// Sample count of the equivariance pre-check.
    pub equivariance_samples: usize,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            samples: 200,
            seed: 7,
            workers: 1,
            cond_cap: 20.0,
            tol: 1e-6,
            equivariance_samples: 100,
        }
    }
}

/// Result of one estimator run.
#[derive(Clone, Debug)]
pub struct EstimatorReport {
    pub n: usize,
    /// λ̂: the empirical mean of B_n(φ(g·ξ, ·))/ν₃.
    pub lambda_hat: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Range of the per-sample normalized integrand.
    pub integrand_min: f64,
    pub integrand_max: f64,
    /// max_k |v_k − λ̂| over the per-sample values.
    pub max_deviation: f64,
    /// The ratio bound C(n+1,3).
    pub bound: f64,
    /// λ̂ > C(n+1,3) − tol.
    pub maximal_verdict: bool,
    /// Set when the integrand is not of the known-constant (Veronese-family)
    /// type, in which case λ̂ is a heuristic estimate rather than an exact
    /// normalized integral.
    pub heuristic: bool,
    /// Residual of the equivariance pre-check.
    pub equivariance_residual: f64,
}

/// Estimate λ = β_n(σ)/Vol(M) for a cocycle with boundary map φ; refuses
/// boundary maps that fail the σ-equivariance pre-check.
pub fn empirical_borel_ratio(
    sigma: &Cocycle,
    phi: &BoundaryMap,
    params: &EstimatorParams,
) -> Result<EstimatorReport> {
    if params.samples == 0 || params.workers == 0 {
        return Err(Error::InvalidInput(
            "estimator needs samples >= 1 and workers >= 1".into(),
        ));
    }
    let n = phi.n()?;
    if n != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "boundary map dimension {n} does not match cocycle dimension {}",
            sigma.n()
        )));
    }

    let residual = phi.check_equivariance(sigma, params.equivariance_samples, params.seed)?;
    if residual > EQUIVARIANCE_REFUSAL_TOL {
        return Err(Error::Refused(format!(
            "boundary map is not sigma-equivariant: residual {residual:.3e} exceeds {EQUIVARIANCE_REFUSAL_TOL:.0e}"
        )));
    }

    let cochain = PullbackCochain::new(phi.clone(), sigma.space().clone())?;
    let values = sample_normalized_integrand(&cochain, params)?;

    let lambda_hat = pairwise_sum(&values) / params.samples as f64;
    let mut var = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut dev = 0.0f64;
    for &v in &values {
        var += (v - lambda_hat).powi(2);
        lo = lo.min(v);
        hi = hi.max(v);
        dev = dev.max((v - lambda_hat).abs());
    }
    let std_error = if params.samples > 1 {
        (var / ((params.samples - 1) as f64 * params.samples as f64)).sqrt()
    } else {
        0.0
    };
    let bound = comb(n + 1, 3);

    Ok(EstimatorReport {
        n,
        lambda_hat,
        std_error,
        samples: params.samples,
        seed: params.seed,
        workers: params.workers,
        integrand_min: lo,
        integrand_max: hi,
        max_deviation: dev,
        bound,
        maximal_verdict: lambda_hat > bound - params.tol,
        heuristic: !matches!(
            phi,
            BoundaryMap::Veronese { .. } | BoundaryMap::TwistedVeronese { .. }
        ),
        equivariance_residual: residual,
    })
}

/// The per-sample normalized integrand values that [`empirical_borel_ratio`]
/// averages, in deterministic (seed, worker) order. Exposed so callers can
/// compare estimates pointwise (twist invariance is per-sample exact, not
/// just in the mean).
pub fn normalized_integrands(
    sigma: &Cocycle,
    phi: &BoundaryMap,
    params: &EstimatorParams,
) -> Result<Vec<f64>> {
    if params.samples == 0 || params.workers == 0 {
        return Err(Error::InvalidInput(
            "estimator needs samples >= 1 and workers >= 1".into(),
        ));
    }
    let n = phi.n()?;
    if n != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "boundary map dimension {n} does not match cocycle dimension {}",
            sigma.n()
        )));
    }
    let cochain = PullbackCochain::new(phi.clone(), sigma.space().clone())?;
    sample_normalized_integrand(&cochain, params)
}

/// The direct evaluation of β_n(ρ)/Vol(M) for a representation ρ: Γ →
/// PSL(n,C) (one matrix per generator): the associated cocycle over the
/// one-point space with the Veronese boundary map. Shares every code path
/// with [`empirical_borel_ratio`], so for equal parameters the two agree
/// bitwise (Prop. "β_n(σ_ρ) = β_n(ρ)" at the estimator level).
pub fn representation_borel_ratio(
    presentation: Arc<GroupPresentation>,
    rho: Vec<GroupElement>,
    params: &EstimatorParams,
) -> Result<EstimatorReport> {
    if rho.is_empty() {
        return Err(Error::InvalidInput(
            "representation needs at least one generator image".into(),
        ));
    }
    let n = rho[0].n();
    let space = Arc::new(FiniteGammaSpace::single_point(&presentation));
    let sigma = Cocycle::from_representation(presentation, space, rho)?;
    let phi = BoundaryMap::Veronese {
        n,
        conjugate: false,
    };
    empirical_borel_ratio(&sigma, &phi, params)
}

/// Draw `params.samples` elements g and return B_n(φ(g·ξ, ·))/ν₃ for each,
/// in deterministic (seed, worker) order.
fn sample_normalized_integrand(
    cochain: &PullbackCochain,
    params: &EstimatorParams,
) -> Result<Vec<f64>> {
    let workers = params.workers.min(params.samples);
    let base = ProjPoint::regular_tetrahedron();
    let counts: Vec<usize> = (0..workers)
        .map(|w| params.samples / workers + usize::from(w < params.samples % workers))
        .collect();

    let worker_run = |w: usize, count: usize| -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(w as u64);
        let mut vals = Vec::with_capacity(count);
        for _ in 0..count {
            let g = GroupElement::random_psl2(&mut rng, params.cond_cap);
            let moved = [
                base[0].apply_mobius(&g),
                base[1].apply_mobius(&g),
                base[2].apply_mobius(&g),
                base[3].apply_mobius(&g),
            ];
            vals.push(cochain.integrate_over_x(&moved)? / nu3());
        }
        Ok(vals)
    };

    let per_worker: Vec<Result<Vec<f64>>> = if workers == 1 {
        vec![worker_run(0, counts[0])]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = counts
                .iter()
                .enumerate()
                .map(|(w, &count)| s.spawn(move || worker_run(w, count)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("estimator worker panicked"))
                .collect()
        })
    };

    let mut values = Vec::with_capacity(params.samples);
    for r in per_worker {
        values.extend(r?);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::borel_bound;
    use crate::cocycle::TwistMap;
    use crate::dilog::ideal_volume;
    use crate::projflag::{veronese, CompleteFlag};
    use rand::Rng;

    fn fig8() -> (Arc<GroupPresentation>, Arc<FiniteGammaSpace>) {
        let p = Arc::new(GroupPresentation::figure_eight());
        let x = Arc::new(FiniteGammaSpace::cyclic(&p, 5, &[1, 1]).unwrap());
        (p, x)
    }

    #[test]
    fn partition_validation_and_bound() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        for n in 1..=6 {
            let trivial = Partition::new(vec![n]).unwrap();
            assert_eq!(parabolic_bound(&trivial), comb(n + 1, 3));
        }
        let ones = Partition::new(vec![1, 1, 1]).unwrap();
        assert_eq!(parabolic_bound(&ones), 0.0);
        let p21 = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(parabolic_bound(&p21), 1.0);
        assert!(parabolic_bound(&p21) < comb(4, 3));
    }

    #[test]
    fn block_flag_examples() {
        let f = CompleteFlag::random_gaussian(&mut ChaCha8Rng::seed_from_u64(41), 3, 100.0);
        let single = block_flag(std::slice::from_ref(&f)).unwrap();
        assert!(single.distance(&f) < 1e-14);

        let parts = [CompleteFlag::standard(2), CompleteFlag::standard(3)];
        let std5 = block_flag(&parts).unwrap();
        assert!(std5.distance(&CompleteFlag::standard(5)) < 1e-14);
    }

    #[test]
    fn block21_volume_matches_base_volume() {
        // For the partition (2,1) the Borel sum of block Veronese flags
        // collapses to the single (2,1)-compatible stratum, so B_3 equals the
        // plain ideal volume; in particular it obeys the parabolic bound.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let pts = [
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
            ];
            let flags: Vec<CompleteFlag> = pts
                .iter()
                .map(|p| block_flag(&[veronese(p, 2), veronese(p, 1)]).unwrap())
                .collect();
            let flags: [CompleteFlag; 4] = flags.try_into().unwrap();
            let b = borel_from_complete(&flags).unwrap();
            let vol = ideal_volume(&pts[0], &pts[1], &pts[2], &pts[3]);
            assert!((b - vol).abs() < 1e-8, "B3 {b} vs vol {vol}");
            let p21 = Partition::new(vec![2, 1]).unwrap();
            assert!(b.abs() <= parabolic_bound(&p21) * nu3() + 1e-6);
        }
    }

    #[test]
    fn integration_is_weighted_mean() {
        let (p, _) = fig8();
        // A two-point space with unequal weights and trivial action.
        let x = Arc::new(
            FiniteGammaSpace::new(
                &p,
                vec!["u".into(), "v".into()],
                vec![0.3, 0.7],
                vec![("a".into(), vec![0, 1]), ("b".into(), vec![0, 1])],
            )
            .unwrap(),
        );
        let pts = ProjPoint::regular_tetrahedron();
        // Genuinely x-dependent boundary map: different sampled flags per x.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let other = [
            ProjPoint::random_fubini_study(&mut rng),
            ProjPoint::random_fubini_study(&mut rng),
            ProjPoint::random_fubini_study(&mut rng),
            ProjPoint::random_fubini_study(&mut rng),
        ];
        let mut entries = Vec::new();
        for i in 0..4 {
            entries.push(crate::cocycle::TableEntry {
                xi: pts[i].clone(),
                x: 0,
                flag: veronese(&pts[i], 2),
            });
            entries.push(crate::cocycle::TableEntry {
                xi: pts[i].clone(),
                x: 1,
                flag: veronese(&other[i], 2),
            });
        }
        let phi = BoundaryMap::Table { entries };
        let c = PullbackCochain::new(phi, x).unwrap();
        let v0 = c.eval(&pts, 0).unwrap();
        let v1 = c.eval(&pts, 1).unwrap();
        let integral = c.integrate_over_x(&pts).unwrap();
        assert!((integral - (0.3 * v0 + 0.7 * v1)).abs() < 1e-14);
        assert!((v0 - nu3()).abs() < 1e-12);
    }

    #[test]
    fn single_point_integration_is_eval() {
        let (p, _) = fig8();
        let x1 = Arc::new(FiniteGammaSpace::single_point(&p));
        let c = PullbackCochain::new(
            BoundaryMap::Veronese {
                n: 3,
                conjugate: false,
            },
            x1,
        )
        .unwrap();
        let pts = ProjPoint::regular_tetrahedron();
        assert_eq!(c.integrate_over_x(&pts).unwrap(), c.eval(&pts, 0).unwrap());
    }

    #[test]
    fn pullback_cochain_is_gamma_invariant() {
        let (p, x) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let n = 3;
        let f = TwistMap::random(&mut rng, x.len(), n, 20.0);
        let cochains = [
            PullbackCochain::new(
                BoundaryMap::Veronese {
                    n,
                    conjugate: false,
                },
                x.clone(),
            )
            .unwrap(),
            PullbackCochain::new(
                BoundaryMap::TwistedVeronese {
                    twist: f,
                    conjugate: false,
                },
                x.clone(),
            )
            .unwrap(),
            PullbackCochain::new(BoundaryMap::Block { sizes: vec![2, 1] }, x.clone()).unwrap(),
        ];
        for c in &cochains {
            for _ in 0..10 {
                let pts = [
                    ProjPoint::random_fubini_study(&mut rng),
                    ProjPoint::random_fubini_study(&mut rng),
                    ProjPoint::random_fubini_study(&mut rng),
                    ProjPoint::random_fubini_study(&mut rng),
                ];
                let xi = rng.gen_range(0..x.len());
                let gi = rng.gen_range(0..p.generator_count());
                let gname = &p.generator_names()[gi];
                let moved = [
                    pts[0].apply_mobius(p.generator_at(gi)),
                    pts[1].apply_mobius(p.generator_at(gi)),
                    pts[2].apply_mobius(p.generator_at(gi)),
                    pts[3].apply_mobius(p.generator_at(gi)),
                ];
                let gx = x.apply_gen(gname, xi).unwrap();
                let lhs = c.eval(&moved, gx).unwrap();
                let rhs = c.eval(&pts, xi).unwrap();
                assert!((lhs - rhs).abs() < 1e-7, "invariance broke: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn twist_neutrality_of_cochain() {
        let (p, x) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let n = 3;
        let plain = PullbackCochain::new(
            BoundaryMap::Veronese {
                n,
                conjugate: false,
            },
            x.clone(),
        )
        .unwrap();
        let f = TwistMap::random(&mut rng, x.len(), n, 20.0);
        let twisted = PullbackCochain::new(
            BoundaryMap::TwistedVeronese {
                twist: f,
                conjugate: false,
            },
            x.clone(),
        )
        .unwrap();
        let _ = p;
        for _ in 0..10 {
            let pts = [
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
                ProjPoint::random_fubini_study(&mut rng),
            ];
            let xi = rng.gen_range(0..x.len());
            let a = plain.eval(&pts, xi).unwrap();
            let b = twisted.eval(&pts, xi).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn estimator_is_exact_for_maximal_cocycles() {
        let (p, x) = fig8();
        let params = EstimatorParams {
            samples: 50,
            ..Default::default()
        };
        for n in 2..=3 {
            let sigma = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();
            let phi = BoundaryMap::Veronese {
                n,
                conjugate: false,
            };
            let rep = empirical_borel_ratio(&sigma, &phi, &params).unwrap();
            let expect = comb(n + 1, 3);
            assert!(
                (rep.lambda_hat - expect).abs() < 1e-9,
                "n={n}: lambda {}",
                rep.lambda_hat
            );
            assert!(rep.max_deviation < 1e-7);
            assert!(rep.std_error < 1e-9);
            assert!(rep.maximal_verdict);
            assert!(!rep.heuristic);
            // The bound holds on every run (tiny float headroom).
            assert!(rep.lambda_hat <= rep.bound + 3.0 * rep.std_error + 1e-9);
            // lambda * Vol(M) = C(n+1,3) * 2 nu3 for the figure-eight.
            let beta = rep.lambda_hat * 2.0 * nu3();
            assert!((beta - 2.0 * borel_bound(n)).abs() < 1e-8);
        }
    }

    #[test]
    fn estimator_twist_invariance_and_bitwise_representation_path() {
        let (p, x) = fig8();
        let n = 3;
        let params = EstimatorParams {
            samples: 40,
            ..Default::default()
        };
        let sigma = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();
        let phi = BoundaryMap::Veronese {
            n,
            conjugate: false,
        };
        let base = empirical_borel_ratio(&sigma, &phi, &params).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..3 {
            let f = TwistMap::random(&mut rng, x.len(), n, 20.0);
            let tw = empirical_borel_ratio(
                &sigma.twist(&f).unwrap(),
                &BoundaryMap::TwistedVeronese {
                    twist: f,
                    conjugate: false,
                },
                &params,
            )
            .unwrap();
            assert!(
                (tw.lambda_hat - base.lambda_hat).abs() < 1e-9,
                "twist moved lambda: {} vs {}",
                tw.lambda_hat,
                base.lambda_hat
            );
        }

        // Direct representation path agrees bitwise for equal parameters.
        let rho = p
            .generator_names()
            .iter()
            .map(|g| sym_power(p.generator(g).unwrap(), n).unwrap())
            .collect();
        let direct = representation_borel_ratio(p.clone(), rho, &params).unwrap();
        assert_eq!(direct.lambda_hat.to_bits(), base.lambda_hat.to_bits());
    }

    #[test]
    fn estimator_refuses_non_equivariant_pairs() {
        let (p, x) = fig8();
        let n = 3;
        let sigma = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let f = TwistMap::random(&mut rng, x.len(), n, 20.0);
        // Twisted cocycle against the untwisted boundary map.
        let err = empirical_borel_ratio(
            &sigma.twist(&f).unwrap(),
            &BoundaryMap::Veronese {
                n,
                conjugate: false,
            },
            &EstimatorParams::default(),
        );
        match err {
            Err(e @ Error::Refused(_)) => assert_eq!(e.exit_code(), 2),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_cocycle_estimates_zero() {
        let (p, x) = fig8();
        let ones = Partition::new(vec![1, 1, 1]).unwrap();
        let sigma = block_cocycle(p.clone(), x.clone(), &ones).unwrap();
        let phi = BoundaryMap::Block {
            sizes: vec![1, 1, 1],
        };
        let rep = empirical_borel_ratio(&sigma, &phi, &EstimatorParams::default()).unwrap();
        assert_eq!(rep.lambda_hat, 0.0);
        assert_eq!(rep.std_error, 0.0);
        assert!(rep.heuristic);
        assert!(!rep.maximal_verdict);
    }

    #[test]
    fn block21_estimator_respects_parabolic_bound() {
        let (p, x) = fig8();
        let p21 = Partition::new(vec![2, 1]).unwrap();
        let sigma = block_cocycle(p.clone(), x.clone(), &p21).unwrap();
        let phi = BoundaryMap::Block { sizes: vec![2, 1] };
        let params = EstimatorParams {
            samples: 60,
            ..Default::default()
        };
        let rep = empirical_borel_ratio(&sigma, &phi, &params).unwrap();
        assert!(rep.lambda_hat <= parabolic_bound(&p21) + 1e-9);
        assert!((rep.lambda_hat - 1.0).abs() < 1e-9);
        assert!(!rep.maximal_verdict, "partition (2,1) cannot be maximal");
    }

    #[test]
    fn worker_partitioning_is_deterministic() {
        let (p, x) = fig8();
        let n = 2;
        let sigma = Cocycle::from_sym_power(p, x, n).unwrap();
        let phi = BoundaryMap::Veronese {
            n,
            conjugate: false,
        };
        let one = EstimatorParams {
            samples: 33,
            workers: 1,
            ..Default::default()
        };
        let three = EstimatorParams {
            samples: 33,
            workers: 3,
            ..Default::default()
        };
        let a = empirical_borel_ratio(&sigma, &phi, &one).unwrap();
        let b = empirical_borel_ratio(&sigma, &phi, &three).unwrap();
        let b2 = empirical_borel_ratio(&sigma, &phi, &three).unwrap();
        assert_eq!(b.lambda_hat.to_bits(), b2.lambda_hat.to_bits());
        assert!((a.lambda_hat - b.lambda_hat).abs() < 1e-12);
    }
}
