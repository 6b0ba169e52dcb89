//! Simultaneous translation of separated spheres and the all-t avoidance
//! certificate.
//!
//! Centers move by lattice vectors so the first pairwise distances are
//! realized; the certificate condition `<u,λ> + |λ|² >= 0` is decided by
//! finite enumeration (any violator is shorter than `u`), which upgrades
//! the for-all-real-t claim to an exact, checkable statement.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::enumeration::{closest_vectors, enumerate_ball};
use crate::error::{invalid, Error, Result};
use crate::linalg::{bilinear, quad_form, sub_qvec, zvec_to_qvec, Mat, QVec};
use crate::rat::{rat, rat_int, Rat};
use crate::types::{InnerProductSpace, Lattice};

/// Sharp separation test `d² > (r_i + r_j)²` on squared quantities:
/// with `s = d² - ρ_i - ρ_j`, strict separation is `s > 0` and `s² > 4 ρ_i ρ_j`.
pub(crate) fn separates_strictly(d_sq: &Rat, r1_sq: &Rat, r2_sq: &Rat) -> bool {
    let s = d_sq - r1_sq - r2_sq;
    s.is_positive() && &s * &s > rat_int(4) * r1_sq * r2_sq
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sphere {
    pub center: QVec,
    pub radius: Rat,
}

/// A family of same-space spheres whose pairwise coset distances are meant
/// to exceed the radius sums (the separation hypothesis; checked by
/// `translate_spheres`, not at construction).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpherePack {
    space: InnerProductSpace,
    lattice: Lattice,
    spheres: Vec<Sphere>,
}

impl SpherePack {
    pub fn new(
        space: InnerProductSpace,
        lattice: Lattice,
        spheres: Vec<Sphere>,
    ) -> Result<SpherePack> {
        if space.dim() != lattice.dim() {
            return Err(invalid("space and lattice dimensions differ"));
        }
        if spheres.is_empty() {
            return Err(invalid("sphere pack must contain at least one sphere"));
        }
        for s in &spheres {
            if s.center.len() != space.dim() {
                return Err(invalid("sphere center dimension mismatch"));
            }
            if !s.radius.is_positive() {
                return Err(invalid("sphere radius must be positive"));
            }
        }
        Ok(SpherePack {
            space,
            lattice,
            spheres,
        })
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn spheres(&self) -> &[Sphere] {
        &self.spheres
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    fn coefficient_gram(&self) -> Mat {
        let b = self.lattice.basis().to_rational();
        b.transpose().mul(self.space.form()).mul(&b)
    }

    /// First violating pair `(i, j)` of the separation hypothesis, if any.
    pub fn separation_violation(&self) -> Result<Option<(usize, usize)>> {
        for i in 0..self.spheres.len() {
            for j in i + 1..self.spheres.len() {
                let diff = sub_qvec(&self.spheres[i].center, &self.spheres[j].center);
                let d_sq = coset_distance_sq(&self.space, &self.lattice, &diff)?;
                let sum = &self.spheres[i].radius + &self.spheres[j].radius;
                if d_sq <= &sum * &sum {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

/// Simultaneously translated centers, with the original pairwise coset
/// distances and the outcome of the all-t certificate over all pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TranslationResult {
    pub u: Vec<QVec>,
    pub d_sq: Vec<Vec<Rat>>,
    pub certified_all_t: bool,
}

/// `min over λ ∈ Λ of |x + λ|²` in the space's form.
pub fn coset_distance_sq(space: &InnerProductSpace, lattice: &Lattice, x: &[Rat]) -> Result<Rat> {
    if x.len() != space.dim() || lattice.dim() != space.dim() {
        return Err(invalid("coset distance dimension mismatch"));
    }
    let g = gram(space, lattice);
    let t: QVec = lattice.coefficients(x)?.iter().map(|c| -c).collect();
    Ok(closest_vectors(&g, &t)?.dist_sq)
}

/// `min over λ ∈ Λ of |x + tλ|²` for rational `t > 0`.
pub fn coset_distance_sq_scaled(
    space: &InnerProductSpace,
    lattice: &Lattice,
    x: &[Rat],
    t: &Rat,
) -> Result<Rat> {
    if !t.is_positive() {
        return Err(invalid("scale must be positive"));
    }
    let g = gram(space, lattice);
    let coeff = lattice.coefficients(x)?;
    let target: QVec = coeff.iter().map(|c| -(c / t)).collect();
    Ok(closest_vectors(&g, &target)?.dist_sq * t * t)
}

fn gram(space: &InnerProductSpace, lattice: &Lattice) -> Mat {
    let b = lattice.basis().to_rational();
    b.transpose().mul(space.form()).mul(&b)
}

/// Coefficient-space translation core shared with the slicing recursion.
///
/// Works over the sublattice `scale * Z^d` of the coefficient space with
/// Gram `g`; keeps the first center fixed and moves every other center to
/// realize its coset distance to the first. Separation (with squared radii)
/// is a hypothesis and its violation a distinguished error.
pub(crate) fn translate_centers_coeff(
    g: &Mat,
    centers: &[QVec],
    radii_sq: &[Rat],
    scale: &BigInt,
) -> Result<Vec<QVec>> {
    assert_eq!(centers.len(), radii_sq.len());
    assert!(scale >= &BigInt::one());
    let scale_rat = Rat::from_integer(scale.clone());
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let d_sq = coset_distance_sq_coeff(g, &sub_qvec(&centers[i], &centers[j]), scale)?;
            if !separates_strictly(&d_sq, &radii_sq[i], &radii_sq[j]) {
                return Err(Error::HypothesisViolation(format!(
                    "spheres {i} and {j} are not separated across the lattice"
                )));
            }
        }
    }
    let mut u = Vec::with_capacity(centers.len());
    u.push(centers[0].clone());
    for i in 1..centers.len() {
        let target: QVec = sub_qvec(&centers[i], &centers[0])
            .iter()
            .map(|c| c / &scale_rat)
            .collect();
        let z = closest_vectors(g, &target)?.selected;
        let shift: QVec = zvec_to_qvec(&z).iter().map(|c| c * &scale_rat).collect();
        u.push(sub_qvec(&centers[i], &shift));
    }
    Ok(u)
}

pub(crate) fn coset_distance_sq_coeff(g: &Mat, x: &[Rat], scale: &BigInt) -> Result<Rat> {
    let scale_rat = Rat::from_integer(scale.clone());
    let target: QVec = x.iter().map(|c| -(c / &scale_rat)).collect();
    Ok(closest_vectors(g, &target)?.dist_sq * &scale_rat * &scale_rat)
}

/// Decides `<u, λ> + |λ|² >= 0` for all `λ` in `scale * Z^d` under `g`.
/// Any violator satisfies `|λ| < |u|`, so the check is finite.
pub(crate) fn certify_all_t_coeff(g: &Mat, u: &[Rat], scale: &BigInt) -> Result<bool> {
    let norm_u = quad_form(g, u);
    if norm_u.is_zero() {
        return Ok(true);
    }
    let scale_rat = Rat::from_integer(scale.clone());
    let scale_sq = &scale_rat * &scale_rat;
    let radius = &norm_u / &scale_sq;
    let zero_t = vec![Rat::zero(); u.len()];
    for z in enumerate_ball(g, &zero_t, &radius)? {
        let zq = zvec_to_qvec(&z);
        let value = &scale_rat * bilinear(g, u, &zq) + &scale_sq * quad_form(g, &zq);
        if value.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Moves every sphere center by a lattice vector so that
/// `|u_1 - u_i| = d_1i` exactly, keeping the first sphere fixed.
///
/// The chosen shift is the lexicographically smallest closest lattice point
/// to `w_i - u_1`, subtracted from `w_i`.
pub fn translate_spheres(pack: &SpherePack) -> Result<TranslationResult> {
    if let Some((i, j)) = pack.separation_violation()? {
        return Err(Error::HypothesisViolation(format!(
            "spheres {i} and {j} fail the separation hypothesis"
        )));
    }
    let n = pack.len();
    let g = pack.coefficient_gram();
    let mut d_sq = vec![vec![Rat::zero(); n]; n];
    for (i, row) in d_sq.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let diff = sub_qvec(&pack.spheres[i].center, &pack.spheres[j].center);
            *slot = coset_distance_sq(&pack.space, &pack.lattice, &diff)?;
        }
    }
    let centers: Vec<QVec> = pack
        .spheres
        .iter()
        .map(|s| pack.lattice.coefficients(&s.center))
        .collect::<Result<_>>()?;
    let radii_sq: Vec<Rat> = pack.spheres.iter().map(|s| &s.radius * &s.radius).collect();
    let u_coeff = translate_centers_coeff(&g, &centers, &radii_sq, &BigInt::one())?;
    let basis = pack.lattice.basis().to_rational();
    let u: Vec<QVec> = u_coeff.iter().map(|c| basis.mul_vec(c)).collect();
    let mut certified_all_t = true;
    for i in 0..n {
        for j in i + 1..n {
            let diff = lattice_coeff_diff(&u_coeff, i, j);
            if !certify_all_t_coeff(&g, &diff, &BigInt::one())? {
                certified_all_t = false;
            }
        }
    }
    Ok(TranslationResult {
        u,
        d_sq,
        certified_all_t,
    })
}

fn lattice_coeff_diff(u_coeff: &[QVec], i: usize, j: usize) -> QVec {
    sub_qvec(&u_coeff[i], &u_coeff[j])
}

/// Exact decision of the certificate condition for an ambient vector `u`.
pub fn certify_all_t(space: &InnerProductSpace, lattice: &Lattice, u: &[Rat]) -> Result<bool> {
    if u.len() != space.dim() || lattice.dim() != space.dim() {
        return Err(invalid("certificate dimension mismatch"));
    }
    let g = gram(space, lattice);
    let coeff = lattice.coefficients(u)?;
    certify_all_t_coeff(&g, &coeff, &BigInt::one())
}

/// The spot-check grid for `t`, mixing integer and half-integer scales.
pub fn default_t_samples() -> Vec<Rat> {
    [(1, 1), (3, 2), (2, 1), (5, 2), (7, 1)]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SampleCheck {
    pub t: Rat,
    pub dt_sq: Rat,
    pub monotone: bool,
    pub separated: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub d_sq: Rat,
    pub certified: bool,
    pub samples: Vec<SampleCheck>,
    pub passed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TranslationReport {
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

/// Re-verifies a translation: per pair, the exact all-t certificate, and per
/// sampled `t >= 1` both monotonicity `d^t² >= d²` and strict separation.
pub fn verify_translation(
    pack: &SpherePack,
    result: &TranslationResult,
    t_samples: &[Rat],
) -> Result<TranslationReport> {
    if result.u.len() != pack.len() {
        return Err(invalid("translation result does not match the pack"));
    }
    for t in t_samples {
        if t < &Rat::one() {
            return Err(invalid("t samples must be >= 1"));
        }
    }
    for (s, u) in pack.spheres.iter().zip(&result.u) {
        let shift = sub_qvec(u, &s.center);
        if !pack.lattice.contains_point(&shift)? {
            return Err(invalid("translated center is not in the original coset"));
        }
    }
    let mut pairs = Vec::new();
    let mut passed = true;
    for i in 0..pack.len() {
        for j in i + 1..pack.len() {
            let diff = sub_qvec(&result.u[i], &result.u[j]);
            let certified = certify_all_t(&pack.space, &pack.lattice, &diff)?;
            let d_sq = &result.d_sq[i][j];
            let r_sum = &pack.spheres[i].radius + &pack.spheres[j].radius;
            let r_sum_sq = &r_sum * &r_sum;
            let mut samples = Vec::new();
            let mut pair_ok = certified;
            for t in t_samples {
                let dt_sq = coset_distance_sq_scaled(&pack.space, &pack.lattice, &diff, t)?;
                let monotone = &dt_sq >= d_sq;
                let separated = dt_sq > r_sum_sq;
                pair_ok &= monotone && separated;
                samples.push(SampleCheck {
                    t: t.clone(),
                    dt_sq,
                    monotone,
                    separated,
                });
            }
            passed &= pair_ok;
            pairs.push(PairCheck {
                i,
                j,
                d_sq: d_sq.clone(),
                certified,
                samples,
                passed: pair_ok,
            });
        }
    }
    Ok(TranslationReport { pairs, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn qv(v: &[i64]) -> QVec {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    fn euclid_pack(dim: usize, data: &[(&[Rat], Rat)]) -> SpherePack {
        SpherePack::new(
            InnerProductSpace::euclidean(dim),
            Lattice::standard(dim),
            data.iter()
                .map(|(c, r)| Sphere {
                    center: c.to_vec(),
                    radius: r.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn coset_distance_examples() {
        let s = InnerProductSpace::euclidean(2);
        let l = Lattice::standard(2);
        assert_eq!(
            coset_distance_sq(&s, &l, &[rat(5, 2), rat_int(0)]).unwrap(),
            rat(1, 4)
        );
        assert_eq!(coset_distance_sq(&s, &l, &qv(&[3, -2])).unwrap(), rat_int(0));

        let s1 = InnerProductSpace::euclidean(1);
        let l1 = Lattice::standard(1);
        assert_eq!(coset_distance_sq(&s1, &l1, &[rat(1, 2)]).unwrap(), rat(1, 4));
    }

    #[test]
    fn translate_single_sphere() {
        let pack = euclid_pack(2, &[(&qv(&[1, 1]), rat(1, 3))]);
        let r = translate_spheres(&pack).unwrap();
        assert_eq!(r.u, vec![qv(&[1, 1])]);
        assert!(r.certified_all_t);
    }

    #[test]
    fn translate_one_dimensional_pair() {
        let pack = euclid_pack(1, &[(&[rat_int(0)], rat(1, 5)), (&[rat(1, 2)], rat(1, 5))]);
        let r = translate_spheres(&pack).unwrap();
        assert_eq!(r.u, vec![vec![rat_int(0)], vec![rat(1, 2)]]);
        assert_eq!(r.d_sq[0][1], rat(1, 4));
        assert!(r.certified_all_t);
    }

    #[test]
    fn translate_pulls_far_center_close() {
        let pack = euclid_pack(
            2,
            &[
                (&qv(&[0, 0]), rat(1, 8)),
                (&[rat(5, 2), rat_int(0)], rat(1, 8)),
            ],
        );
        let r = translate_spheres(&pack).unwrap();
        assert_eq!(r.u[1], vec![rat(1, 2), rat_int(0)]);
        let diff = sub_qvec(&r.u[0], &r.u[1]);
        let space = InnerProductSpace::euclidean(2);
        assert_eq!(space.norm_sq(&diff).unwrap(), r.d_sq[0][1]);
    }

    #[test]
    fn translate_rejects_overlapping_cosets() {
        // same coset: coset distance 0 <= r_i + r_j
        let pack = euclid_pack(2, &[(&qv(&[0, 0]), rat(1, 8)), (&qv(&[1, 0]), rat(1, 8))]);
        let err = translate_spheres(&pack).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation(_)));

        // boundary case: d = 1/2 equals r_1 + r_2 exactly; not strict
        let pack = euclid_pack(
            2,
            &[(&qv(&[0, 0]), rat(1, 4)), (&[rat(1, 2), rat_int(0)], rat(1, 4))],
        );
        assert!(matches!(
            translate_spheres(&pack).unwrap_err(),
            Error::HypothesisViolation(_)
        ));
    }

    #[test]
    fn certify_examples() {
        let s = InnerProductSpace::euclidean(1);
        let l = Lattice::standard(1);
        assert!(certify_all_t(&s, &l, &[rat_int(0)]).unwrap());
        assert!(certify_all_t(&s, &l, &[rat(1, 2)]).unwrap());
        assert!(!certify_all_t(&s, &l, &[rat(3, 2)]).unwrap());
    }

    #[test]
    fn verify_translation_one_dimensional_pack() {
        let pack = euclid_pack(1, &[(&[rat_int(0)], rat(1, 5)), (&[rat(1, 2)], rat(1, 5))]);
        let result = translate_spheres(&pack).unwrap();
        let ts = vec![rat_int(1), rat(3, 2), rat_int(2), rat_int(7)];
        let report = verify_translation(&pack, &result, &ts).unwrap();
        assert!(report.passed);
        assert_eq!(report.pairs.len(), 1);
        for s in &report.pairs[0].samples {
            assert!(s.dt_sq >= rat(1, 4));
        }
    }

    #[test]
    fn verify_translation_rejects_bad_t() {
        let pack = euclid_pack(1, &[(&[rat_int(0)], rat(1, 5)), (&[rat(1, 2)], rat(1, 5))]);
        let result = translate_spheres(&pack).unwrap();
        assert!(verify_translation(&pack, &result, &[rat(1, 2)]).is_err());
    }

    #[test]
    fn verify_translation_three_spheres() {
        let pack = euclid_pack(
            2,
            &[
                (&qv(&[0, 0]), rat(1, 10)),
                (&[rat(1, 2), rat_int(0)], rat(1, 10)),
                (&[rat_int(0), rat(1, 2)], rat(1, 10)),
            ],
        );
        let result = translate_spheres(&pack).unwrap();
        let ts = vec![rat_int(1), rat(3, 2), rat_int(2), rat(5, 2), rat_int(7)];
        let report = verify_translation(&pack, &result, &ts).unwrap();
        assert!(report.passed);
        assert_eq!(report.pairs.len(), 3);
        assert!(report.pairs.iter().all(|p| p.certified));
    }

    #[test]
    fn separation_predicate_edges() {
        // d² = 1/4 vs radii² 1/16 each: boundary, not strict
        assert!(!separates_strictly(&rat(1, 4), &rat(1, 16), &rat(1, 16)));
        // 1/4 > (2/5)²: radii 1/5 each
        assert!(separates_strictly(&rat(1, 4), &rat(1, 25), &rat(1, 25)));
        // zero radius on one side reduces to d² > r²
        assert!(separates_strictly(&rat(1, 4), &rat(1, 25), &rat_int(0)));
        assert!(!separates_strictly(&rat(1, 25), &rat(1, 25), &rat_int(0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn common_shift_preserves_distances(cx in -4i64..4, cy in -4i64..4, sx in -3i64..3, sy in -3i64..3) {
            let base = euclid_pack(
                2,
                &[
                    (&[rat(cx, 3), rat(cy, 3)], rat(1, 20)),
                    (&[rat(cx, 3) + rat(1, 2), rat(cy, 3)], rat(1, 20)),
                ],
            );
            let shifted = euclid_pack(
                2,
                &[
                    (&[rat(cx, 3) + rat_int(sx), rat(cy, 3) + rat_int(sy)], rat(1, 20)),
                    (&[rat(cx, 3) + rat(1, 2) + rat_int(sx), rat(cy, 3) + rat_int(sy)], rat(1, 20)),
                ],
            );
            let a = translate_spheres(&base).unwrap();
            let b = translate_spheres(&shifted).unwrap();
            prop_assert_eq!(&a.d_sq, &b.d_sq);
        }

        #[test]
        fn first_row_distances_are_realized(ox in -6i64..6, oy in -6i64..6) {
            let pack = euclid_pack(
                2,
                &[
                    (&qv(&[0, 0]), rat(1, 20)),
                    (&[rat(ox, 4) + rat(1, 8), rat(oy, 4)], rat(1, 20)),
                ],
            );
            let r = translate_spheres(&pack).unwrap();
            let diff = sub_qvec(&r.u[0], &r.u[1]);
            let space = InnerProductSpace::euclidean(2);
            prop_assert_eq!(space.norm_sq(&diff).unwrap(), r.d_sq[0][1].clone());
            // translated centers stay in their cosets
            for (s, u) in pack.spheres().iter().zip(&r.u) {
                let shift = sub_qvec(u, &s.center);
                prop_assert!(pack.lattice().contains_point(&shift).unwrap());
            }
        }

        #[test]
        fn midpoint_minimality_follows_certificate(ux in -9i64..9, den in 1i64..5) {
            // whenever the certificate holds, the midpoint is coset-minimal
            // over the enumerated range (the parallelogram-law consequence)
            let s = InnerProductSpace::euclidean(1);
            let l = Lattice::standard(1);
            let u = vec![rat(ux, den)];
            if certify_all_t(&s, &l, &u).unwrap() {
                let g = Mat::identity(1);
                let norm_u = quad_form(&g, &u);
                let half: QVec = u.iter().map(|x| x / rat_int(2)).collect();
                let half_norm = quad_form(&g, &half);
                for z in enumerate_ball(&g, &[Rat::zero()], &norm_u).unwrap() {
                    let shifted: QVec = vec![&half[0] + Rat::from_integer(z[0].clone())];
                    prop_assert!(quad_form(&g, &shifted) >= half_norm);
                }
            }
        }

        #[test]
        fn sampled_monotonicity_always_holds(ox in -8i64..8, t_num in 2i64..14) {
            let pack = euclid_pack(
                1,
                &[
                    (&[rat_int(0)], rat(1, 20)),
                    (&[rat(ox, 4) + rat(1, 8)], rat(1, 20)),
                ],
            );
            let result = translate_spheres(&pack).unwrap();
            let ts = vec![rat_int(1), rat(t_num, 2)];
            let report = verify_translation(&pack, &result, &ts).unwrap();
            prop_assert!(report.passed);
        }
    }
}
