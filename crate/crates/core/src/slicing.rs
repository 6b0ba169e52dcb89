//! Executable form of the inductive slicing proof for sphere families.
//!
//! Everything happens in flag coordinates: the flag basis is unimodular, so
//! the prefix sublattices are just "trailing coordinates zero" and a slice
//! of height m lives in the leading (d-1)-dimensional coefficient block.
//! Each recursion level checks its hypotheses (C1/C2), runs the translation
//! step over the scaled sublattice, slices, groups by residue, recurses,
//! and finally confirms the partition identity and the product bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use rayon::prelude::*;

use crate::bhw::{q_values, QValues};
use crate::enumeration::{enumerate_ball, minima_of_body};
use crate::error::{invalid, Error, Result};
use crate::linalg::{sub_qvec, Mat, QVec, ZVec};
use crate::rat::{ceil_minus_sqrt, floor_plus_sqrt, Rat};
use crate::reduction::extend_to_flag_basis;
use crate::translation::{
    certify_all_t_coeff, coset_distance_sq_coeff, separates_strictly, translate_centers_coeff,
};
use crate::types::{Ball, FlagBasis, InnerProductSpace, Lattice};

/// One slice of a parent ball: the intersection with the hyperplane of
/// height `m`, viewed inside the leading (d-1)-dimensional block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Slice {
    pub parent_index: usize,
    pub height: BigInt,
    pub ball: Ball,
}

/// Slices of one residue class, as (parent sphere, height, section).
type ResidueClass = Vec<(usize, BigInt, SliceSection)>;

/// Raw slice section data; the squared radius is negative exactly when the
/// hyperplane misses the ball.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SliceSection {
    pub center: QVec,
    pub radius_sq: Rat,
}

impl SliceSection {
    pub fn is_empty(&self) -> bool {
        self.radius_sq.is_negative()
    }
}

/// Completed-square machinery for slicing one ball at many heights.
struct Slicer {
    w: QVec,
    schur: Rat,
    t_head: QVec,
    t_last: Rat,
    r_sq: Rat,
}

impl Slicer {
    fn new(g: &Mat, t: &[Rat], r_sq: &Rat) -> Result<Slicer> {
        let d = g.rows();
        if d < 2 {
            return Err(invalid("slicing needs dimension at least 2"));
        }
        if t.len() != d {
            return Err(invalid("center dimension does not match Gram matrix"));
        }
        let g11 = Mat::from_fn(d - 1, d - 1, |i, j| g[(i, j)].clone());
        let col: QVec = (0..d - 1).map(|i| g[(i, d - 1)].clone()).collect();
        let w = g11.inverse()?.mul_vec(&col);
        let mut schur = g[(d - 1, d - 1)].clone();
        for i in 0..d - 1 {
            schur -= &col[i] * &w[i];
        }
        if !schur.is_positive() {
            return Err(invalid("Gram matrix is not positive definite"));
        }
        Ok(Slicer {
            w,
            schur,
            t_head: t[..d - 1].to_vec(),
            t_last: t[d - 1].clone(),
            r_sq: r_sq.clone(),
        })
    }

    fn section(&self, m: &BigInt) -> SliceSection {
        let h = Rat::from_integer(m.clone()) - &self.t_last;
        let center: QVec = self
            .t_head
            .iter()
            .zip(&self.w)
            .map(|(t, w)| t - &h * w)
            .collect();
        let radius_sq = &self.r_sq - &h * &h * &self.schur;
        SliceSection { center, radius_sq }
    }

    /// Inclusive height range of the nonempty slices; `None` when no
    /// hyperplane of integer height meets the ball.
    fn height_range(&self) -> Option<(BigInt, BigInt)> {
        if self.r_sq.is_negative() {
            return None;
        }
        let bound = &self.r_sq / &self.schur;
        let lo = ceil_minus_sqrt(&self.t_last, &bound);
        let hi = floor_plus_sqrt(&self.t_last, &bound);
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }
}

/// Slices `(t, r_sq)` under `g` at height `m`, by completing the square
/// against the last coordinate.
pub fn slice_ball(g: &Mat, t: &[Rat], r_sq: &Rat, m: &BigInt) -> Result<SliceSection> {
    Ok(Slicer::new(g, t, r_sq)?.section(m))
}

/// Input to the strong verifier: same-space balls, a flag basis, and the
/// non-increasing positive integers `q_1 >= ... >= q_d >= q_{d+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrongInstance {
    balls: Vec<Ball>,
    flag: FlagBasis,
    q: Vec<BigInt>,
}

impl StrongInstance {
    pub fn new(balls: Vec<Ball>, flag: FlagBasis, q: Vec<BigInt>) -> Result<StrongInstance> {
        let d = flag.dim();
        if balls.is_empty() {
            return Err(invalid("strong instance needs at least one ball"));
        }
        if balls.iter().any(|b| b.dim() != d) {
            return Err(invalid("ball dimension does not match flag"));
        }
        let form = balls[0].space().form();
        if balls.iter().any(|b| b.space().form() != form) {
            return Err(invalid("balls must share one inner product space"));
        }
        if q.len() != d + 1 {
            return Err(invalid("need q_1..q_{d+1}, one more than the dimension"));
        }
        if q.iter().any(|x| x < &BigInt::one()) {
            return Err(invalid("q values must be positive"));
        }
        if q.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("q values must be non-increasing"));
        }
        Ok(StrongInstance { balls, flag, q })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn flag(&self) -> &FlagBasis {
        &self.flag
    }

    pub fn q(&self) -> &[BigInt] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.flag.dim()
    }

    /// Flag-coordinate view: Gram matrix, centers, squared radii.
    fn to_ctx(&self) -> Result<Ctx> {
        let lattice = self.flag.lattice();
        let b = lattice.basis().to_rational();
        let g_coeff = b
            .transpose()
            .mul(self.balls[0].space().form())
            .mul(&b);
        let e = self.flag.matrix();
        let e_inv = e.unimodular_inverse()?.to_rational();
        let eq = e.to_rational();
        let gram = eq.transpose().mul(&g_coeff).mul(&eq);
        let spheres = self
            .balls
            .iter()
            .map(|ball| {
                let coeff = lattice.coefficients(ball.center())?;
                Ok((e_inv.mul_vec(&coeff), ball.radius_sq().clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            gram,
            spheres,
            q: self.q.clone(),
        })
    }
}

/// Flag-coordinate working state of one recursion level.
struct Ctx {
    gram: Mat,
    spheres: Vec<(QVec, Rat)>,
    q: Vec<BigInt>,
}

impl Ctx {
    fn dim(&self) -> usize {
        self.gram.rows()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct C1Violation {
    pub sphere: usize,
    pub index: usize,
    pub lambda: ZVec,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct C1Check {
    pub holds: bool,
    pub violation: Option<C1Violation>,
}

/// Condition (C1): for every ball j and every index i, the difference body
/// of ball j avoids `q_i` times the lattice vectors outside the (i-1)-st
/// prefix. In flag coordinates: every lambda with
/// `|lambda|² <= 4 r_j² / q_i²` has zero trailing coordinates from i on.
pub fn check_c1(instance: &StrongInstance) -> Result<C1Check> {
    check_c1_ctx(&instance.to_ctx()?)
}

fn check_c1_ctx(ctx: &Ctx) -> Result<C1Check> {
    let d = ctx.dim();
    let zero_t = vec![Rat::zero(); d];
    for (j, (_, rho)) in ctx.spheres.iter().enumerate() {
        for i in 1..=d {
            let qi = &ctx.q[i - 1];
            let qi_sq = Rat::from_integer(qi * qi);
            let radius = crate::rat::rat_int(4) * rho / qi_sq;
            for lambda in enumerate_ball(&ctx.gram, &zero_t, &radius)? {
                let in_prefix = lambda[i - 1..].iter().all(|x| x.is_zero());
                if !in_prefix {
                    return Ok(C1Check {
                        holds: false,
                        violation: Some(C1Violation {
                            sphere: j,
                            index: i,
                            lambda,
                        }),
                    });
                }
            }
        }
    }
    Ok(C1Check {
        holds: true,
        violation: None,
    })
}

/// Condition (C2) at a given scale: distinct balls stay strictly separated
/// across the sublattice `scale * Λ`. Vacuous for a single ball.
pub fn check_c2(instance: &StrongInstance, scale: &BigInt) -> Result<bool> {
    check_c2_ctx(&instance.to_ctx()?, scale)
}

fn check_c2_ctx(ctx: &Ctx, scale: &BigInt) -> Result<bool> {
    for j in 0..ctx.spheres.len() {
        for k in j + 1..ctx.spheres.len() {
            let diff = sub_qvec(&ctx.spheres[j].0, &ctx.spheres[k].0);
            let d_sq = coset_distance_sq_coeff(&ctx.gram, &diff, scale)?;
            if !separates_strictly(&d_sq, &ctx.spheres[j].1, &ctx.spheres[k].1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TranslationStep {
    pub scale: BigInt,
    pub certified_all_t: bool,
    pub count_invariant: bool,
    pub c1_invariant: bool,
    pub strengthened_c2: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SliceMeta {
    pub parent: usize,
    pub height: BigInt,
    pub radius_sq: Rat,
    pub count: u64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResidueStep {
    pub residue: BigInt,
    pub slices: Vec<SliceMeta>,
    pub sum: u64,
    pub bound: BigInt,
    pub within_bound: bool,
    pub sub: Option<Box<StrongReport>>,
}

/// Full trace of one recursion level of the strong verifier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrongReport {
    pub dim: usize,
    pub q: Vec<BigInt>,
    pub sphere_counts: Vec<u64>,
    pub total: u64,
    pub bound: BigInt,
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub translation: Option<TranslationStep>,
    pub residues: Vec<ResidueStep>,
    pub partition_ok: bool,
    pub bound_ok: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Runs the inductive argument and records every asserted step.
///
/// The instance hypotheses (C1 and C2 at scale `q_{d+1}`) are checked up
/// front and their failure is a hypothesis violation; any check failing
/// deeper in the recursion is recorded in the report and flips `passed`.
pub fn verify_strong(instance: &StrongInstance) -> Result<StrongReport> {
    let ctx = instance.to_ctx()?;
    let c1 = check_c1_ctx(&ctx)?;
    if !c1.holds {
        let v = c1.violation.expect("violation accompanies a failed check");
        return Err(Error::HypothesisViolation(format!(
            "condition C1 fails for ball {} at index {} with witness {:?}",
            v.sphere, v.index, v.lambda
        )));
    }
    let scale = ctx.q[ctx.dim()].clone();
    if !check_c2_ctx(&ctx, &scale)? {
        return Err(Error::HypothesisViolation(
            "condition C2 fails at the instance scale".into(),
        ));
    }
    verify_ctx(&ctx)
}

fn verify_ctx(ctx: &Ctx) -> Result<StrongReport> {
    let d = ctx.dim();
    let n = ctx.spheres.len();
    let q = &ctx.q;
    let mut failures = Vec::new();

    let sphere_counts = count_spheres(ctx)?;
    let total: u64 = sphere_counts.iter().sum();
    let bound: BigInt = q[..d].iter().product();
    let bound_ok = BigInt::from(total) <= bound;
    if !bound_ok {
        failures.push(format!("total {total} exceeds the bound {bound}"));
    }

    let c1 = check_c1_ctx(ctx)?;
    if !c1.holds {
        failures.push("condition C1 fails at this level".into());
    }
    let c2 = check_c2_ctx(ctx, &q[d])?;
    if !c2 {
        failures.push(format!("condition C2 fails at scale {}", q[d]));
    }

    if d == 1 {
        let passed = c1.holds && c2 && bound_ok;
        return Ok(StrongReport {
            dim: d,
            q: q.clone(),
            sphere_counts,
            total,
            bound,
            c1_ok: c1.holds,
            c2_ok: c2,
            translation: None,
            residues: Vec::new(),
            partition_ok: true,
            bound_ok,
            passed,
            failures,
        });
    }

    if !(c1.holds && c2) {
        // hypotheses of the inductive step are broken; deeper steps would
        // be meaningless, so stop at this level with the failures recorded
        return Ok(StrongReport {
            dim: d,
            q: q.clone(),
            sphere_counts,
            total,
            bound,
            c1_ok: c1.holds,
            c2_ok: c2,
            translation: None,
            residues: Vec::new(),
            partition_ok: false,
            bound_ok,
            passed: false,
            failures,
        });
    }

    // translation step over the sublattice q_{d+1} * Λ, first ball fixed
    let scale = q[d].clone();
    let centers: Vec<QVec> = ctx.spheres.iter().map(|(c, _)| c.clone()).collect();
    let radii_sq: Vec<Rat> = ctx.spheres.iter().map(|(_, r)| r.clone()).collect();
    let translated = translate_centers_coeff(&ctx.gram, &centers, &radii_sq, &scale)?;
    let moved = Ctx {
        gram: ctx.gram.clone(),
        spheres: translated
            .iter()
            .cloned()
            .zip(radii_sq.iter().cloned())
            .collect(),
        q: q.clone(),
    };

    let mut certified_all_t = true;
    for i in 0..n {
        for j in i + 1..n {
            let diff = sub_qvec(&translated[i], &translated[j]);
            if !certify_all_t_coeff(&ctx.gram, &diff, &scale)? {
                certified_all_t = false;
            }
        }
    }
    if !certified_all_t {
        failures.push("translation certificate failed for some pair".into());
    }

    let counts_after = count_spheres(&moved)?;
    let total_after: u64 = counts_after.iter().sum();
    let count_invariant = total_after == total;
    if !count_invariant {
        failures.push(format!(
            "translation changed the total count: {total} -> {total_after}"
        ));
    }
    let c1_after = check_c1_ctx(&moved)?;
    let c1_invariant = c1_after.holds == c1.holds;
    if !c1_invariant {
        failures.push("translation changed the C1 status".into());
    }
    let strengthened_c2 = check_c2_ctx(&moved, &q[d - 1])?;
    if !strengthened_c2 {
        failures.push(format!(
            "strengthened separation at scale {} fails after translation",
            q[d - 1]
        ));
    }
    let translation = Some(TranslationStep {
        scale,
        certified_all_t,
        count_invariant,
        c1_invariant,
        strengthened_c2,
    });

    // slice the translated balls and group by height residue mod q_d
    let qd = q[d - 1].clone();
    let mut classes: BTreeMap<BigInt, ResidueClass> = BTreeMap::new();
    for (j, (center, rho)) in moved.spheres.iter().enumerate() {
        let slicer = Slicer::new(&moved.gram, center, rho)?;
        if let Some((lo, hi)) = slicer.height_range() {
            let mut m = lo;
            while m <= hi {
                let section = slicer.section(&m);
                debug_assert!(!section.is_empty(), "height range must be exact");
                classes
                    .entry(m.mod_floor(&qd))
                    .or_default()
                    .push((j, m.clone(), section));
                m += 1;
            }
        }
    }

    let g11 = Mat::from_fn(d - 1, d - 1, |i, j| moved.gram[(i, j)].clone());
    let sub_bound: BigInt = q[..d - 1].iter().product();
    let residue_inputs: Vec<(BigInt, ResidueClass)> = (0..)
        .map(BigInt::from)
        .take_while(|r| r < &qd)
        .map(|r| {
            let class = classes.remove(&r).unwrap_or_default();
            (r, class)
        })
        .collect();

    let residues: Vec<ResidueStep> = residue_inputs
        .into_par_iter()
        .map(|(residue, class)| verify_residue(ctx, &g11, residue, class, &sub_bound))
        .collect::<Result<Vec<_>>>()?;

    for r in &residues {
        if !r.within_bound {
            failures.push(format!(
                "residue {} sum {} exceeds the per-residue bound {}",
                r.residue, r.sum, r.bound
            ));
        }
        if let Some(sub) = &r.sub {
            if !sub.passed {
                failures.push(format!("recursion failed in residue {}", r.residue));
            }
        }
    }

    let slice_total: u64 = residues.iter().map(|r| r.sum).sum();
    let partition_ok = slice_total == total_after && total_after == total;
    if !partition_ok {
        failures.push(format!(
            "slice sums {slice_total} do not partition the direct count {total}"
        ));
    }

    let passed = failures.is_empty();
    Ok(StrongReport {
        dim: d,
        q: q.clone(),
        sphere_counts,
        total,
        bound,
        c1_ok: c1.holds,
        c2_ok: c2,
        translation,
        residues,
        partition_ok,
        bound_ok,
        passed,
        failures,
    })
}

fn verify_residue(
    ctx: &Ctx,
    g11: &Mat,
    residue: BigInt,
    class: ResidueClass,
    sub_bound: &BigInt,
) -> Result<ResidueStep> {
    if class.is_empty() {
        return Ok(ResidueStep {
            residue,
            slices: Vec::new(),
            sum: 0,
            bound: sub_bound.clone(),
            within_bound: true,
            sub: None,
        });
    }
    let d = ctx.dim();
    let sub_ctx = Ctx {
        gram: g11.clone(),
        spheres: class
            .iter()
            .map(|(_, _, s)| (s.center.clone(), s.radius_sq.clone()))
            .collect(),
        q: ctx.q[..d].to_vec(),
    };
    let sub = verify_ctx(&sub_ctx)?;
    let slices = class
        .iter()
        .zip(&sub.sphere_counts)
        .map(|((parent, height, section), count)| SliceMeta {
            parent: *parent,
            height: height.clone(),
            radius_sq: section.radius_sq.clone(),
            count: *count,
        })
        .collect();
    let sum = sub.total;
    let within_bound = BigInt::from(sum) <= *sub_bound;
    Ok(ResidueStep {
        residue,
        slices,
        sum,
        bound: sub_bound.clone(),
        within_bound,
        sub: Some(Box::new(sub)),
    })
}

fn count_spheres(ctx: &Ctx) -> Result<Vec<u64>> {
    ctx.spheres
        .iter()
        .map(|(center, rho)| Ok(enumerate_ball(&ctx.gram, center, rho)?.len() as u64))
        .collect()
}

/// End-to-end report: the product bound data, the strong recursion, and the
/// cross-check between the two counting routes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ViaStrongReport {
    pub count: u64,
    pub q: QValues,
    pub bound: BigInt,
    pub bound_holds: bool,
    pub strong: StrongReport,
    pub count_matches: bool,
    pub passed: bool,
}

/// Verifies the product bound for a single ball by actually running the
/// inductive proof: minima, flag basis, q values, then the full recursion,
/// with the final count cross-checked against direct enumeration.
pub fn verify_theorem1_via_strong(lattice: &Lattice, ball: &Ball) -> Result<ViaStrongReport> {
    let count = crate::enumeration::count_ball(lattice, ball)?;
    let minima = minima_of_body(lattice, ball)?;
    let q = q_values(&minima)?;
    let flag = match minima.finite_witnesses() {
        Some(witnesses) => extend_to_flag_basis(lattice, &witnesses)?,
        None => FlagBasis::standard(lattice.clone()),
    };
    let mut q_list = q.values().to_vec();
    q_list.push(BigInt::one());
    let instance = StrongInstance::new(vec![ball.clone()], flag, q_list)?;
    let strong = verify_strong(&instance)?;
    let bound = q.product();
    let bound_holds = BigInt::from(count) <= bound;
    let count_matches = strong.total == count;
    let passed = strong.passed && bound_holds && count_matches;
    Ok(ViaStrongReport {
        count,
        q,
        bound,
        bound_holds,
        strong,
        count_matches,
        passed,
    })
}

/// The (d-1)-dimensional inner product space of the leading block, used
/// when materializing `Slice` values.
pub fn leading_space(g: &Mat) -> Result<InnerProductSpace> {
    let d = g.rows();
    if d < 2 {
        return Err(invalid("no leading block in dimension 1"));
    }
    InnerProductSpace::new(Mat::from_fn(d - 1, d - 1, |i, j| g[(i, j)].clone()))
}

/// Materializes the nonempty slice of height `m` as a first-class value.
pub fn slice_at(
    g: &Mat,
    t: &[Rat],
    r_sq: &Rat,
    parent_index: usize,
    m: &BigInt,
) -> Result<Option<Slice>> {
    let section = slice_ball(g, t, r_sq, m)?;
    if section.is_empty() {
        return Ok(None);
    }
    let space = leading_space(g)?;
    Ok(Some(Slice {
        parent_index,
        height: m.clone(),
        ball: Ball::new(space, section.center, section.radius_sq)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use proptest::prelude::*;

    fn qv(v: &[i64]) -> QVec {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    fn qm(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn euclidean_ball(dim: usize, center: Vec<Rat>, r_sq: Rat) -> Ball {
        Ball::new(InnerProductSpace::euclidean(dim), center, r_sq).unwrap()
    }

    fn qs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn single_ball_instance(ball: Ball, q: &[i64]) -> StrongInstance {
        let d = ball.dim();
        StrongInstance::new(
            vec![ball],
            FlagBasis::standard(Lattice::standard(d)),
            qs(q),
        )
        .unwrap()
    }

    #[test]
    fn slice_radius_examples() {
        let g = Mat::identity(2);
        let t = qv(&[0, 0]);
        let r = rat_int(4);
        let s = slice_ball(&g, &t, &r, &BigInt::from(1)).unwrap();
        assert_eq!(s.radius_sq, rat_int(3));
        assert_eq!(s.center, qv(&[0]));
        assert!(!s.is_empty());

        for m in [-2i64, 2] {
            let s = slice_ball(&g, &t, &r, &BigInt::from(m)).unwrap();
            assert_eq!(s.radius_sq, rat_int(0));
            assert!(!s.is_empty());
        }

        let s = slice_ball(&g, &t, &r, &BigInt::from(3)).unwrap();
        assert_eq!(s.radius_sq, rat_int(-5));
        assert!(s.is_empty());

        assert!(slice_ball(&Mat::identity(1), &qv(&[0]), &r, &BigInt::one()).is_err());
    }

    #[test]
    fn slice_with_cross_terms_preserves_layer_counts() {
        let g = qm(&[&[2, 1], &[1, 2]]);
        let t = vec![rat(1, 3), rat(1, 2)];
        let r = rat_int(6);
        let all = enumerate_ball(&g, &t, &r).unwrap();
        for m in -3i64..=3 {
            let mb = BigInt::from(m);
            let layer = all.iter().filter(|z| z[1] == mb).count();
            let section = slice_ball(&g, &t, &r, &mb).unwrap();
            let sliced = if section.is_empty() {
                0
            } else {
                enumerate_ball(&qm(&[&[2]]), &section.center, &section.radius_sq)
                    .unwrap()
                    .len()
            };
            assert_eq!(layer, sliced, "layer {m}");
        }
    }

    #[test]
    fn slice_objects_carry_parent_and_height() {
        let g = Mat::identity(2);
        let s = slice_at(&g, &qv(&[0, 0]), &rat_int(4), 7, &BigInt::from(2))
            .unwrap()
            .unwrap();
        assert_eq!(s.parent_index, 7);
        assert_eq!(s.height, BigInt::from(2));
        assert_eq!(s.ball.radius_sq(), &rat_int(0));
        assert!(slice_at(&g, &qv(&[0, 0]), &rat_int(4), 0, &BigInt::from(3))
            .unwrap()
            .is_none());
    }

    #[test]
    fn c1_examples() {
        let unit = single_ball_instance(
            euclidean_ball(2, qv(&[0, 0]), rat_int(1)),
            &[3, 3, 1],
        );
        assert!(check_c1(&unit).unwrap().holds);

        let wide = single_ball_instance(
            euclidean_ball(2, qv(&[0, 0]), rat_int(4)),
            &[1, 1, 1],
        );
        let check = check_c1(&wide).unwrap();
        assert!(!check.holds);
        let v = check.violation.unwrap();
        assert_eq!(v.sphere, 0);
        assert_eq!(v.index, 1);
        assert!(v.lambda.iter().any(|x| !x.is_zero()));

        let point = single_ball_instance(
            euclidean_ball(2, qv(&[0, 0]), rat_int(0)),
            &[1, 1, 1],
        );
        assert!(check_c1(&point).unwrap().holds);
    }

    #[test]
    fn c2_examples() {
        let one = single_ball_instance(euclidean_ball(2, qv(&[0, 0]), rat_int(1)), &[3, 3, 1]);
        assert!(check_c2(&one, &BigInt::one()).unwrap());

        let space = InnerProductSpace::euclidean(2);
        let flag = FlagBasis::standard(Lattice::standard(2));
        // radius 1/4 each, centers distance 1/2: exact tangency, not strict
        let touching = StrongInstance::new(
            vec![
                Ball::new(space.clone(), qv(&[0, 0]), rat(1, 16)).unwrap(),
                Ball::new(space.clone(), vec![rat(1, 2), rat_int(0)], rat(1, 16)).unwrap(),
            ],
            flag.clone(),
            qs(&[1, 1, 1]),
        )
        .unwrap();
        assert!(!check_c2(&touching, &BigInt::one()).unwrap());

        let separated = StrongInstance::new(
            vec![
                Ball::new(space.clone(), qv(&[0, 0]), rat(1, 25)).unwrap(),
                Ball::new(space, vec![rat(1, 2), rat_int(0)], rat(1, 25)).unwrap(),
            ],
            flag,
            qs(&[1, 1, 1]),
        )
        .unwrap();
        assert!(check_c2(&separated, &BigInt::one()).unwrap());
    }

    #[test]
    fn strong_instance_validates_q() {
        let ball = euclidean_ball(2, qv(&[0, 0]), rat_int(1));
        let flag = FlagBasis::standard(Lattice::standard(2));
        assert!(StrongInstance::new(vec![ball.clone()], flag.clone(), qs(&[3, 3])).is_err());
        assert!(StrongInstance::new(vec![ball.clone()], flag.clone(), qs(&[1, 2, 1])).is_err());
        assert!(StrongInstance::new(vec![ball.clone()], flag.clone(), qs(&[2, 1, 0])).is_err());
        assert!(StrongInstance::new(vec![ball], flag, qs(&[3, 3, 1])).is_ok());
    }

    #[test]
    fn strong_unit_disk_recursion() {
        let inst = single_ball_instance(euclidean_ball(2, qv(&[0, 0]), rat_int(1)), &[3, 3, 1]);
        let report = verify_strong(&inst).unwrap();
        assert!(report.passed, "failures: {:?}", report.failures);
        assert_eq!(report.total, 5);
        assert_eq!(report.bound, BigInt::from(9));
        assert_eq!(report.sphere_counts, vec![5]);
        assert_eq!(report.residues.len(), 3);
        let sums: Vec<u64> = report.residues.iter().map(|r| r.sum).collect();
        assert_eq!(sums, vec![3, 1, 1]);
        assert!(report.partition_ok);
        let t = report.translation.as_ref().unwrap();
        assert!(t.count_invariant && t.c1_invariant && t.strengthened_c2);
    }

    #[test]
    fn strong_point_ball() {
        let inst = single_ball_instance(euclidean_ball(2, qv(&[0, 0]), rat_int(0)), &[1, 1, 1]);
        let report = verify_strong(&inst).unwrap();
        assert!(report.passed);
        assert_eq!(report.total, 1);
        assert_eq!(report.bound, BigInt::one());
    }

    #[test]
    fn strong_one_dimensional_base() {
        let space = InnerProductSpace::euclidean(1);
        let flag = FlagBasis::standard(Lattice::standard(1));
        let inst = StrongInstance::new(
            vec![
                Ball::new(space.clone(), vec![rat_int(0)], rat(1, 25)).unwrap(),
                Ball::new(space, vec![rat(1, 2)], rat(1, 25)).unwrap(),
            ],
            flag,
            qs(&[3, 1]),
        )
        .unwrap();
        let report = verify_strong(&inst).unwrap();
        assert!(report.passed);
        assert_eq!(report.sphere_counts, vec![1, 0]);
        assert_eq!(report.total, 1);
        assert_eq!(report.bound, BigInt::from(3));
        assert!(report.residues.is_empty());
        assert!(report.translation.is_none());
    }

    #[test]
    fn strong_rejects_violated_hypotheses() {
        // C1 violated: big ball, q = 1
        let inst = single_ball_instance(euclidean_ball(2, qv(&[0, 0]), rat_int(4)), &[1, 1, 1]);
        assert!(matches!(
            verify_strong(&inst).unwrap_err(),
            Error::HypothesisViolation(_)
        ));

        // C2 violated: tangent balls
        let space = InnerProductSpace::euclidean(2);
        let inst = StrongInstance::new(
            vec![
                Ball::new(space.clone(), qv(&[0, 0]), rat(1, 16)).unwrap(),
                Ball::new(space, vec![rat(1, 2), rat_int(0)], rat(1, 16)).unwrap(),
            ],
            FlagBasis::standard(Lattice::standard(2)),
            qs(&[6, 6, 1]),
        )
        .unwrap();
        assert!(matches!(
            verify_strong(&inst).unwrap_err(),
            Error::HypothesisViolation(_)
        ));
    }

    #[test]
    fn via_strong_unit_disk() {
        let l = Lattice::standard(2);
        let ball = euclidean_ball(2, qv(&[0, 0]), rat_int(1));
        let report = verify_theorem1_via_strong(&l, &ball).unwrap();
        assert!(report.passed, "failures: {:?}", report.strong.failures);
        assert_eq!(report.count, 5);
        assert_eq!(report.bound, BigInt::from(9));
        assert!(report.count_matches);
    }

    #[test]
    fn via_strong_radius_two_disk() {
        let l = Lattice::standard(2);
        let ball = euclidean_ball(2, qv(&[0, 0]), rat_int(4));
        let report = verify_theorem1_via_strong(&l, &ball).unwrap();
        assert!(report.passed, "failures: {:?}", report.strong.failures);
        assert_eq!(report.count, 13);
        assert_eq!(report.bound, BigInt::from(25));
    }

    #[test]
    fn via_strong_hexagonal_form() {
        let l = Lattice::standard(2);
        let space = InnerProductSpace::new(qm(&[&[2, 1], &[1, 2]])).unwrap();
        let ball = Ball::new(space, qv(&[0, 0]), rat(1, 2)).unwrap();
        let report = verify_theorem1_via_strong(&l, &ball).unwrap();
        assert!(report.passed, "failures: {:?}", report.strong.failures);
        assert_eq!(report.count, 1);
        assert_eq!(report.q.values(), &[BigInt::from(2), BigInt::from(2)]);
        assert_eq!(report.bound, BigInt::from(4));
    }

    #[test]
    fn via_strong_point_ball() {
        let l = Lattice::standard(2);
        let ball = euclidean_ball(2, qv(&[0, 0]), rat_int(0));
        let report = verify_theorem1_via_strong(&l, &ball).unwrap();
        assert!(report.passed);
        assert_eq!(report.count, 1);
        assert_eq!(report.bound, BigInt::one());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn partition_identity(cx in -4i64..4, cy in -4i64..4, den in 1i64..4, r in 0i64..10) {
            let g = qm(&[&[2, 1], &[1, 3]]);
            let t = vec![rat(cx, den), rat(cy, den)];
            let r_sq = rat(r, 2);
            let direct = enumerate_ball(&g, &t, &r_sq).unwrap().len();
            let slicer = Slicer::new(&g, &t, &r_sq).unwrap();
            let mut sliced = 0usize;
            if let Some((lo, hi)) = slicer.height_range() {
                let g11 = Mat::from_fn(1, 1, |i, j| g[(i, j)].clone());
                let mut m = lo;
                while m <= hi {
                    let s = slicer.section(&m);
                    prop_assert!(!s.is_empty());
                    sliced += enumerate_ball(&g11, &s.center, &s.radius_sq).unwrap().len();
                    m += 1;
                }
            }
            prop_assert_eq!(direct, sliced);
        }

        #[test]
        fn via_strong_passes_on_random_euclidean_disks(cx in -6i64..6, cy in -6i64..6, r_num in 0i64..18) {
            let l = Lattice::standard(2);
            let ball = euclidean_ball(2, vec![rat(cx, 2), rat(cy, 3)], rat(r_num, 2));
            let report = verify_theorem1_via_strong(&l, &ball).unwrap();
            prop_assert!(report.passed);
        }
    }
}
