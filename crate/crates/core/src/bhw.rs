//! The q-values, the product bound on lattice points in an ellipsoid, and a
//! floating-point Minkowski sanity check.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumeration::{count_ball, minima_of_body, LambdaSq, MinimaProfile};
use crate::error::{invalid, Result};
use crate::rat::{floor_sqrt, rat_int};
use crate::types::{Ball, Lattice};

/// The per-minimum integers `q_i = floor(2/lambda_i) + 1`, non-increasing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QValues {
    q: Vec<BigInt>,
}

impl QValues {
    pub fn new(q: Vec<BigInt>) -> Result<QValues> {
        if q.is_empty() {
            return Err(invalid("q values must be nonempty"));
        }
        if q.iter().any(|x| x < &BigInt::one()) {
            return Err(invalid("q values must be positive"));
        }
        if q.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("q values must be non-increasing"));
        }
        Ok(QValues { q })
    }

    pub fn values(&self) -> &[BigInt] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `prod q_i` over all i.
    pub fn product(&self) -> BigInt {
        self.q.iter().product()
    }

    /// `q_1^d`, the bound that needs no symmetry assumption.
    pub fn first_power(&self) -> BigInt {
        num_traits::pow(self.q[0].clone(), self.q.len())
    }
}

/// `1 + max{k >= 0 : k^2 * lambda_sq <= 4}`; an infinite minimum gives 1.
pub fn q_from_lambda_sq(lambda_sq: &LambdaSq) -> Result<BigInt> {
    match lambda_sq {
        LambdaSq::Infinite => Ok(BigInt::one()),
        LambdaSq::Finite(l) => {
            if !l.is_positive() {
                return Err(invalid("lambda squared must be positive"));
            }
            Ok(floor_sqrt(&(rat_int(4) / l)) + 1)
        }
    }
}

pub fn q_values(profile: &MinimaProfile) -> Result<QValues> {
    QValues::new(
        profile
            .lambda_sq
            .iter()
            .map(q_from_lambda_sq)
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Everything the product-bound inequality needs, in one record.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BhwReport {
    pub count: u64,
    pub minima: MinimaProfile,
    pub q: QValues,
    pub bound: BigInt,
    pub first_theorem_bound: BigInt,
    pub holds: bool,
    pub holds_first: bool,
}

/// Counts lattice points in the ball and checks the product bound
/// `|ball ∩ Λ| <= prod q_i` together with the weaker `q_1^d` bound.
///
/// `holds` is expected true on every valid instance; a false value signals
/// an implementation bug, which callers surface as a verification failure.
pub fn verify_theorem1(lattice: &Lattice, ball: &Ball) -> Result<BhwReport> {
    let count = count_ball(lattice, ball)?;
    let minima = minima_of_body(lattice, ball)?;
    let q = q_values(&minima)?;
    let bound = q.product();
    let first_theorem_bound = q.first_power();
    let holds = BigInt::from(count) <= bound;
    let holds_first = BigInt::from(count) <= first_theorem_bound;
    Ok(BhwReport {
        count,
        minima,
        q,
        bound,
        first_theorem_bound,
        holds,
        holds_first,
    })
}

/// The no-symmetry-needed inequality `count <= q_1^d` alone.
pub fn verify_first_theorem(lattice: &Lattice, ball: &Ball) -> Result<bool> {
    Ok(verify_theorem1(lattice, ball)?.holds_first)
}

/// Euclidean unit-ball volumes, `omega_d = omega_{d-2} * 2 pi / d`.
fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Advisory floating-point check of `vol(ball)/det(Λ) <= prod 2/lambda_i`.
///
/// The unit-ball volume is transcendental, so this one check runs in f64
/// with a relative tolerance; it is a sanity check outside the exact chain.
pub fn check_minkowski_second(lattice: &Lattice, ball: &Ball, rel_tol: f64) -> Result<bool> {
    if ball.radius_sq().is_zero() {
        return Err(invalid("Minkowski check needs a nondegenerate ball"));
    }
    if lattice.dim() != ball.dim() {
        return Err(invalid("lattice and ball dimensions differ"));
    }
    let d = lattice.dim();
    let det_lambda = lattice
        .basis()
        .det()
        .abs()
        .to_f64()
        .ok_or_else(|| invalid("lattice determinant overflows f64"))?;
    let det_q = ball
        .space()
        .form()
        .det()
        .to_f64()
        .ok_or_else(|| invalid("form determinant overflows f64"))?;
    let r = ball
        .radius_sq()
        .to_f64()
        .ok_or_else(|| invalid("radius overflows f64"))?
        .sqrt();
    let volume = unit_ball_volume(d) * r.powi(d as i32) / det_q.sqrt();
    let lhs = volume / det_lambda;
    let minima = minima_of_body(lattice, ball)?;
    let mut rhs = 1.0;
    for l in &minima.lambda_sq {
        let lsq = l
            .as_finite()
            .expect("nondegenerate ball has finite minima")
            .to_f64()
            .ok_or_else(|| invalid("minimum overflows f64"))?;
        rhs *= 2.0 / lsq.sqrt();
    }
    Ok(lhs <= rhs * (1.0 + rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{IMat, Mat};
    use crate::rat::{rat, rat_int, Rat};
    use crate::types::InnerProductSpace;
    use proptest::prelude::*;

    fn euclidean_ball(dim: usize, center: Vec<Rat>, r_sq: Rat) -> Ball {
        Ball::new(InnerProductSpace::euclidean(dim), center, r_sq).unwrap()
    }

    fn fin(n: i64, d: i64) -> LambdaSq {
        LambdaSq::Finite(rat(n, d))
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_from_lambda_sq(&fin(1, 1)).unwrap(), BigInt::from(3));
        assert_eq!(q_from_lambda_sq(&fin(4, 1)).unwrap(), BigInt::from(2));
        assert_eq!(q_from_lambda_sq(&fin(8, 1)).unwrap(), BigInt::from(1));
        assert_eq!(q_from_lambda_sq(&LambdaSq::Infinite).unwrap(), BigInt::from(1));
        assert_eq!(q_from_lambda_sq(&fin(1, 4)).unwrap(), BigInt::from(5));
        assert!(q_from_lambda_sq(&fin(0, 1)).is_err());
        assert!(q_from_lambda_sq(&fin(-1, 1)).is_err());
    }

    #[test]
    fn q_values_require_monotone_positive() {
        assert!(QValues::new(vec![BigInt::from(3), BigInt::from(3)]).is_ok());
        assert!(QValues::new(vec![BigInt::from(2), BigInt::from(3)]).is_err());
        assert!(QValues::new(vec![BigInt::from(0)]).is_err());
        assert!(QValues::new(vec![]).is_err());
        let q = QValues::new(vec![BigInt::from(3), BigInt::from(2)]).unwrap();
        assert_eq!(q.product(), BigInt::from(6));
        assert_eq!(q.first_power(), BigInt::from(9));
    }

    #[test]
    fn unit_disk_report() {
        let l = Lattice::standard(2);
        let b = euclidean_ball(2, vec![rat_int(0), rat_int(0)], rat_int(1));
        let r = verify_theorem1(&l, &b).unwrap();
        assert_eq!(r.count, 5);
        assert_eq!(
            r.minima.lambda_sq,
            vec![fin(1, 1), fin(1, 1)]
        );
        assert_eq!(r.q.values(), &[BigInt::from(3), BigInt::from(3)]);
        assert_eq!(r.bound, BigInt::from(9));
        assert_eq!(r.first_theorem_bound, BigInt::from(9));
        assert!(r.holds);
        assert!(r.holds_first);
        assert!(verify_first_theorem(&l, &b).unwrap());
    }

    #[test]
    fn radius_two_disk_report() {
        let l = Lattice::standard(2);
        let b = euclidean_ball(2, vec![rat_int(0), rat_int(0)], rat_int(4));
        let r = verify_theorem1(&l, &b).unwrap();
        assert_eq!(r.count, 13);
        assert_eq!(r.minima.lambda_sq, vec![fin(1, 4), fin(1, 4)]);
        assert_eq!(r.q.values(), &[BigInt::from(5), BigInt::from(5)]);
        assert_eq!(r.bound, BigInt::from(25));
        assert!(r.holds);
    }

    #[test]
    fn point_body_at_lattice_site() {
        let basis = IMat::from_rows(vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(3)],
        ])
        .unwrap();
        let l = Lattice::new(basis).unwrap();
        let b = euclidean_ball(2, vec![rat_int(1), rat_int(-3)], rat_int(0));
        let r = verify_theorem1(&l, &b).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.q.values(), &[BigInt::one(), BigInt::one()]);
        assert_eq!(r.bound, BigInt::one());
        assert!(r.holds, "point body meets the bound with equality");
    }

    #[test]
    fn minkowski_examples() {
        let l = Lattice::standard(2);
        let unit = euclidean_ball(2, vec![rat_int(0), rat_int(0)], rat_int(1));
        assert!(check_minkowski_second(&l, &unit, 1e-9).unwrap());
        let big = euclidean_ball(2, vec![rat_int(0), rat_int(0)], rat_int(4));
        assert!(check_minkowski_second(&l, &big, 1e-9).unwrap());

        // 1-D segment [-1,1]: exactly tight, tolerance absorbs it
        let l1 = Lattice::standard(1);
        let seg = euclidean_ball(1, vec![rat_int(0)], rat_int(1));
        assert!(check_minkowski_second(&l1, &seg, 1e-9).unwrap());

        let point = euclidean_ball(1, vec![rat_int(0)], rat_int(0));
        assert!(check_minkowski_second(&l1, &point, 1e-9).is_err());
    }

    #[test]
    fn unit_ball_volumes_are_classical() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
    }

    fn small_gram(dim: usize) -> impl Strategy<Value = Mat> {
        proptest::collection::vec(-3i64..=3, dim * dim).prop_map(move |entries| {
            let a = Mat::from_fn(dim, dim, |i, j| rat_int(entries[i * dim + j]));
            let mut g = a.transpose().mul(&a);
            for i in 0..dim {
                let bump = &g[(i, i)] + rat_int(1);
                g[(i, i)] = bump;
            }
            g
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn q_exceeds_two_over_lambda(p in 1i64..200, q in 1i64..40) {
            // (q_i)^2 * lambda^2 > 4 exactly, the Lemma-4 hypothesis
            let lsq = rat(p, q);
            let qi = q_from_lambda_sq(&LambdaSq::Finite(lsq.clone())).unwrap();
            let qi_rat = Rat::from_integer(qi);
            prop_assert!(&qi_rat * &qi_rat * &lsq > rat_int(4));
        }

        #[test]
        fn scaling_divides_minima(g in small_gram(2), s_num in 1i64..6, s_den in 1i64..6) {
            let l = Lattice::standard(2);
            let space = InnerProductSpace::new(g).unwrap();
            let base = Ball::new(space.clone(), vec![rat_int(0), rat_int(0)], rat_int(1)).unwrap();
            let s = rat(s_num, s_den);
            let scaled = Ball::new(space, vec![rat_int(0), rat_int(0)], &s * &s).unwrap();
            let p0 = minima_of_body(&l, &base).unwrap();
            let p1 = minima_of_body(&l, &scaled).unwrap();
            for (a, b) in p0.lambda_sq.iter().zip(&p1.lambda_sq) {
                let a = a.as_finite().unwrap();
                let b = b.as_finite().unwrap();
                prop_assert_eq!(&(a / (&s * &s)), b);
            }
        }

        #[test]
        fn product_bound_holds_on_random_instances(g in small_gram(2), cx in -6i64..6, cy in -6i64..6, r in 0i64..12) {
            let l = Lattice::standard(2);
            let space = InnerProductSpace::new(g).unwrap();
            let ball = Ball::new(space, vec![rat(cx, 2), rat(cy, 3)], rat(r, 2)).unwrap();
            let rep = verify_theorem1(&l, &ball).unwrap();
            prop_assert!(rep.holds);
            prop_assert!(rep.holds_first);
        }
    }
}
