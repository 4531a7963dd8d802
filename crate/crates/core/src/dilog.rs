//! Bloch–Wigner dilogarithm and ideal tetrahedron volumes.
//!
//! `bloch_wigner` is the atomic quantity of the whole crate: every Borel
//! cocycle value is a signed sum of ideal volumes, and every ideal volume is
//! D evaluated at a cross-ratio.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::projflag::ProjPoint;

/// Two points of `P¹(C)` closer than this (in the normalized determinant
/// metric) are treated as coincident and give degenerate, exactly-zero
/// volumes.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Volume of the positively oriented regular ideal tetrahedron,
/// `ν₃ = D(e^{iπ/3})`. Computed on first use, never hard-coded.
pub fn nu3() -> f64 {
    static NU3: OnceLock<f64> = OnceLock::new();
    *NU3.get_or_init(|| {
        let corner = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        bloch_wigner(corner).expect("corner point is finite")
    })
}

/// The Bloch–Wigner dilogarithm `D(z) = Im(Li₂(z)) + arg(1−z)·log|z|`.
///
/// `D` vanishes on the real axis (degenerate flat tetrahedra) and is extended
/// by 0 at 0, 1 and ∞. Antisymmetric under conjugation: `D(z̄) = −D(z)`.
pub fn bloch_wigner(z: Complex64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bloch_wigner: non-finite argument {z}"
        )));
    }
    if z.im == 0.0 {
        return Ok(0.0);
    }
    let li2 = li2(z);
    Ok(li2.im + (Complex64::new(1.0, 0.0) - z).arg() * z.norm().ln())
}

/// Even-index Bernoulli numbers `B₂, B₄, …, B₂₆` for the `−ln(1−z)` series.
const BERNOULLI_EVEN: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// Complex dilogarithm `Li₂(z)`.
///
/// The argument is first reduced into `{|z| ≤ 1, Re z ≤ 1/2}` by the
/// inversion and reflection identities; the reduced value is then summed by
/// the direct Taylor series for `|z| ≤ 1/2` and otherwise by the Bernoulli
/// series in `u = −ln(1−z)`, which converges fast on the remaining lune
/// (|u| stays below 1.8 there).
fn li2(z: Complex64) -> Complex64 {
    let pi2_6 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(pi2_6, 0.0);
    }

    let mut z = z;
    let mut extra = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    if z.norm() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ln²(−z)/2
        let lz = (-z).ln();
        extra += Complex64::new(-pi2_6, 0.0) - 0.5 * lz * lz;
        sign = -sign;
        z = 1.0 / z;
    }
    if z.re > 0.5 {
        // Li₂(z) = π²/6 − ln(z)·ln(1−z) − Li₂(1−z)
        extra += sign * (Complex64::new(pi2_6, 0.0) - z.ln() * (1.0 - z).ln());
        sign = -sign;
        z = 1.0 - z;
    }

    if z.norm() <= 0.5 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zk = z;
        for k in 1..80u32 {
            sum += zk / ((k * k) as f64);
            zk *= z;
            if zk.norm() < 1e-20 {
                break;
            }
        }
        return sign * sum + extra;
    }

    // Li₂(z) = u − u²/4 + Σ_{m≥1} B₂ₘ u^{2m+1}/(2m+1)!
    let u = -(1.0 - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 / 4.0;
    let mut upow = u * u2; // u^{2m+1}, starting at m = 1
    let mut fact = 6.0; // (2m+1)!, starting at 3!
    for (m, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b * upow / fact;
        sum += term;
        if term.norm() < 1e-19 {
            break;
        }
        upow *= u2;
        fact *= ((2 * m + 4) * (2 * m + 5)) as f64;
    }
    sign * sum + extra
}

/// Hyperbolic volume of the ideal tetrahedron with vertices
/// `(ξ0, ξ1, ξ2, ξ3) ∈ P¹(C)⁴`.
///
/// Equals `D(λ)` where `λ` is the image of `ξ2` under the Möbius map sending
/// `(ξ0, ξ1, ξ3) ↦ (0, 1, ∞)`; in particular `ideal_volume(0,1,z,∞) = D(z)`.
/// Total: coincident points give exactly 0.
pub fn ideal_volume(p0: &ProjPoint, p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint) -> f64 {
    let pts = [p0, p1, p2, p3];
    for i in 0..4 {
        for j in (i + 1)..4 {
            // Stored representatives are normalized (max modulus 1), so the
            // determinant is an absolute measure of projective separation.
            if det2(pts[i], pts[j]).norm() <= COINCIDENCE_TOL {
                return 0.0;
            }
        }
    }
    let num = det2(p2, p0) * det2(p1, p3);
    let den = det2(p2, p3) * det2(p1, p0);
    bloch_wigner(num / den).expect("cross-ratio is finite away from coincidences")
}

pub(crate) fn det2(p: &ProjPoint, q: &ProjPoint) -> Complex64 {
    p.x() * q.y() - q.x() * p.y()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Frozen high-precision reference values for D, independent of this
    /// implementation. Kept verbatim at the precision they were computed at,
    /// one or two digits past what f64 resolves.
    #[allow(clippy::excessive_precision)]
    const ORACLE: [(f64, f64, f64); 10] = [
        (0.5, 0.8660254037844386, 1.014941606409653625), // e^{iπ/3} = ν₃
        (0.3, 0.4, 0.8212075572077376136),
        (-1.7, 0.2, 0.07702124195185460935),
        (2.5, -1.3, -0.4385246122533462932),
        (0.1, 2.0, 0.8200186617049690498),
        (-0.37, -0.93, -0.753042836011887034),
        (0.92, 0.39, 0.7682805619249535982),
        (0.001, 0.001, 0.007568247466728796662),
        (-0.5, 0.8660254037844386, 0.6766277376064357372),
        (1.25, 0.5, 0.659652521422345754),
    ];

    #[test]
    fn matches_frozen_oracle() {
        for &(re, im, want) in &ORACLE {
            let got = bloch_wigner(c(re, im)).unwrap();
            assert!(
                (got - want).abs() < 1e-13,
                "D({re}+{im}i) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn vanishes_on_reals_and_special_points() {
        for re in [-3.0, 0.0, 0.5, 1.0, 7.25] {
            assert_eq!(bloch_wigner(c(re, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn conjugation_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if z.im == 0.0 {
                continue;
            }
            let d = bloch_wigner(z).unwrap();
            let dc = bloch_wigner(z.conj()).unwrap();
            assert!((d + dc).abs() < 1e-13, "antisymmetry failed at {z}");
        }
    }

    #[test]
    fn six_fold_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0));
            let one = Complex64::new(1.0, 0.0);
            let d = bloch_wigner(z).unwrap();
            for w in [one - one / z, one / (one - z)] {
                assert!((bloch_wigner(w).unwrap() - d).abs() < 1e-12);
            }
            for w in [one / z, one - z, z / (z - one)] {
                assert!((bloch_wigner(w).unwrap() + d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(bloch_wigner(c(f64::NAN, 0.0)).is_err());
        assert!(bloch_wigner(c(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn nu3_value() {
        assert!((nu3() - 1.0149416064096536).abs() < 1e-14);
    }

    fn pt(z: Complex64) -> ProjPoint {
        ProjPoint::new(z, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn volume_normalization_convention() {
        let zero = pt(c(0.0, 0.0));
        let one = pt(c(1.0, 0.0));
        let inf = ProjPoint::infinity();
        for z in [c(0.3, 1.1), c(0.5, 0.8660254037844386), c(2.0, -0.5)] {
            let v = ideal_volume(&zero, &one, &pt(z), &inf);
            assert!((v - bloch_wigner(z).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn volume_degenerate_is_exactly_zero() {
        let zero = pt(c(0.0, 0.0));
        let one = pt(c(1.0, 0.0));
        let inf = ProjPoint::infinity();
        assert_eq!(ideal_volume(&zero, &one, &one, &inf), 0.0);
        assert_eq!(ideal_volume(&zero, &zero, &zero, &zero), 0.0);
    }

    #[test]
    fn volume_alternates_under_permutations() {
        let pts = [
            pt(c(0.2, 0.9)),
            pt(c(1.4, -0.3)),
            pt(c(-0.7, 0.2)),
            pt(c(3.1, 1.0)),
        ];
        let base = ideal_volume(&pts[0], &pts[1], &pts[2], &pts[3]);
        assert!(base.abs() > 0.01, "test tuple should be non-degenerate");
        // All 24 permutations, sign = parity.
        let perms = permutations();
        for p in perms {
            let v = ideal_volume(&pts[p[0]], &pts[p[1]], &pts[p[2]], &pts[p[3]]);
            let sign = perm_sign(&p);
            assert!(
                (v - sign * base).abs() < 1e-12,
                "permutation {p:?}: {v} vs {}",
                sign * base
            );
        }
    }

    #[test]
    fn volume_mobius_invariance_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pts: Vec<ProjPoint> = (0..4)
                .map(|_| ProjPoint::random_fubini_study(&mut rng))
                .collect();
            let v = ideal_volume(&pts[0], &pts[1], &pts[2], &pts[3]);
            assert!(v.abs() <= nu3() + 1e-9, "|vol| = {} exceeds ν₃", v.abs());
            let g = crate::projflag::GroupElement::random_psl2(&mut rng, 20.0);
            let moved: Vec<ProjPoint> = pts.iter().map(|p| p.apply_mobius(&g)).collect();
            let vg = ideal_volume(&moved[0], &moved[1], &moved[2], &moved[3]);
            assert!((v - vg).abs() < 1e-9, "Möbius invariance: {v} vs {vg}");
        }
    }

    pub(crate) fn permutations() -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, c, d];
                        let mut seen = [false; 4];
                        for &i in &p {
                            seen[i] = true;
                        }
                        if seen.iter().all(|&s| s) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn perm_sign(p: &[usize; 4]) -> f64 {
        let mut s = 1.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }
}
