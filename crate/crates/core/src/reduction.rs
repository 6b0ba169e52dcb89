//! Exact LLL preprocessing, Hermite normal forms, and flag-basis
//! construction from successive-minima witnesses.
//!
//! Reduction here only ever changes the lattice basis, never the ambient
//! coordinates: ellipsoids stay represented by their rational form, so no
//! irrational Cholesky factor is needed anywhere.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::enumeration::ldlt;
use crate::error::{invalid, Result};
use crate::linalg::{IMat, Mat, QVec, ZVec};
use crate::rat::{rat, round_int, Rat};
use crate::types::{Ball, FlagBasis, InnerProductSpace, Lattice};

/// Change of lattice basis: an integer matrix with determinant ±1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnimodularTransform {
    u: IMat,
}

impl UnimodularTransform {
    pub fn new(u: IMat) -> Result<UnimodularTransform> {
        if !u.is_unimodular() {
            return Err(invalid("transform matrix is not unimodular"));
        }
        Ok(UnimodularTransform { u })
    }

    pub fn identity(n: usize) -> UnimodularTransform {
        UnimodularTransform {
            u: IMat::identity(n),
        }
    }

    pub fn matrix(&self) -> &IMat {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn inverse(&self) -> UnimodularTransform {
        UnimodularTransform {
            u: self.u.unimodular_inverse().expect("validated unimodular"),
        }
    }

    /// `U^T G U`, the Gram matrix after the change of basis.
    pub fn apply_gram(&self, g: &Mat) -> Mat {
        let uq = self.u.to_rational();
        uq.transpose().mul(g).mul(&uq)
    }

    /// Coefficient vector in the old basis of the new-basis vector `w`.
    pub fn apply_coords(&self, w: &[BigInt]) -> ZVec {
        self.u.mul_zvec(w)
    }

    /// Old-basis rational coordinates mapped to new-basis coordinates.
    pub fn pullback_point(&self, t: &[Rat]) -> QVec {
        self.inverse().u.to_rational().mul_vec(t)
    }
}

/// Exact LLL reduction of a positive definite Gram matrix, δ = 3/4.
///
/// Returns `(U, G')` with `G' = U^T G U` size-reduced (|μ_ij| <= 1/2) and
/// satisfying the Lovász condition. All arithmetic is rational.
pub fn lll_reduce(g: &Mat) -> Result<(UnimodularTransform, Mat)> {
    ldlt(g)?;
    let d = g.rows();
    let delta = rat(3, 4);
    let mut u = IMat::identity(d);
    let mut gc = g.clone();
    let mut k = 1;
    while k < d {
        size_reduce_column(&mut u, &mut gc, g, k)?;
        let f = ldlt(&gc)?;
        let mu = f.l[(k, k - 1)].clone();
        let lhs = f.d[k].clone();
        let rhs = (&delta - &mu * &mu) * &f.d[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            u.swap_cols(k - 1, k);
            gc = retransform(&u, g);
            k = std::cmp::max(1, k - 1);
        }
    }
    Ok((UnimodularTransform::new(u)?, gc))
}

fn retransform(u: &IMat, g: &Mat) -> Mat {
    let uq = u.to_rational();
    uq.transpose().mul(g).mul(&uq)
}

/// Makes |μ_kj| <= 1/2 for all j < k by integer column operations on `u`.
fn size_reduce_column(u: &mut IMat, gc: &mut Mat, g: &Mat, k: usize) -> Result<()> {
    let f = ldlt(gc)?;
    let mut mu: Vec<QVec> = (0..=k).map(|i| f.l.row(i)).collect();
    let mut changed = false;
    for j in (0..k).rev() {
        let r = round_int(&mu[k][j]);
        if r.is_zero() {
            continue;
        }
        changed = true;
        u.add_col_multiple(k, j, &(-&r));
        let rq = Rat::from_integer(r);
        let (head, tail) = mu.split_at_mut(k);
        for (dst, src) in tail[0].iter_mut().zip(head[j].iter().take(j + 1)) {
            *dst -= &rq * src;
        }
    }
    if changed {
        *gc = retransform(u, g);
    }
    Ok(())
}

/// Column-style Hermite normal form: `A V = H` with `V` unimodular.
///
/// `H` is in column echelon form with positive pivots; in each pivot row the
/// entries in earlier columns are reduced into `[0, pivot)`. Requires full
/// column rank.
pub fn hnf(a: &IMat) -> Result<(IMat, UnimodularTransform)> {
    let (rows, cols) = (a.rows(), a.cols());
    if a.to_rational().rank() != cols {
        return Err(invalid("matrix does not have full column rank"));
    }
    let mut h = a.clone();
    let mut v = IMat::identity(cols);
    let mut row = 0;
    for col in 0..cols {
        // find the pivot row: first row with a nonzero entry in columns col..
        while row < rows && (col..cols).all(|j| h[(row, j)].is_zero()) {
            row += 1;
        }
        assert!(row < rows, "rank was checked; pivot must exist");
        // gcd elimination across columns col..cols in this row
        loop {
            let jmin = (col..cols)
                .filter(|&j| !h[(row, j)].is_zero())
                .min_by_key(|&j| h[(row, j)].abs())
                .expect("at least one nonzero entry in pivot row");
            if jmin != col {
                h.swap_cols(col, jmin);
                v.swap_cols(col, jmin);
            }
            if h[(row, col)].is_negative() {
                h.negate_col(col);
                v.negate_col(col);
            }
            let pivot = h[(row, col)].clone();
            let mut done = true;
            for j in col + 1..cols {
                if h[(row, j)].is_zero() {
                    continue;
                }
                let q = div_floor_bigint(&h[(row, j)], &pivot);
                if !q.is_zero() {
                    h.add_col_multiple(j, col, &(-&q));
                    v.add_col_multiple(j, col, &(-&q));
                }
                if !h[(row, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        // canonical reduction of earlier columns against this pivot
        let pivot = h[(row, col)].clone();
        for j in 0..col {
            let q = div_floor_bigint(&h[(row, j)], &pivot);
            if !q.is_zero() {
                h.add_col_multiple(j, col, &(-&q));
                v.add_col_multiple(j, col, &(-&q));
            }
        }
        row += 1;
    }
    Ok((h, UnimodularTransform::new(v)?))
}

fn div_floor_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

/// Row-style Hermite normal form `R A = T` (upper triangular for square
/// nonsingular `A`), via the column-style form of the transpose.
fn row_hnf(a: &IMat) -> Result<(UnimodularTransform, IMat)> {
    let (h, v) = hnf(&a.transpose())?;
    let r = UnimodularTransform::new(v.matrix().transpose())?;
    Ok((r, h.transpose()))
}

/// Completes successive-minima witnesses `a^1..a^d` to a lattice basis whose
/// prefixes span the same subspaces.
///
/// Writes `A = E T` with `T` the (unique) upper-triangular row Hermite form,
/// and returns the unimodular `E`: each `a^i` is then a `T`-combination of
/// `e^1..e^i`, so prefix spans match, and prefix sublattices are saturated
/// because `E` is a full basis. The Hermite form makes the completion
/// canonical.
pub fn extend_to_flag_basis(lattice: &Lattice, witnesses: &[ZVec]) -> Result<FlagBasis> {
    let d = lattice.dim();
    if witnesses.len() != d {
        return Err(invalid("need exactly one witness per dimension"));
    }
    if witnesses.iter().any(|w| w.len() != d) {
        return Err(invalid("witness dimension mismatch"));
    }
    let a = IMat::from_cols(witnesses.to_vec())?;
    if a.det().is_zero() {
        return Err(invalid("witnesses are linearly dependent"));
    }
    let (r, _t) = row_hnf(&a)?;
    let e = r.inverse();
    let vectors = (0..d).map(|j| e.matrix().col(j)).collect();
    FlagBasis::new(lattice.clone(), vectors, witnesses.to_vec())
}

/// Packages an ellipsoid `(x-c)^T Q (x-c) <= 1` as the unit ball around `c`
/// in the inner product defined by `Q`. No coordinate change is performed.
pub fn ellipsoid_to_ball_form(center: &[Rat], form: Mat) -> Result<(InnerProductSpace, Ball)> {
    let space = InnerProductSpace::new(form)?;
    let ball = Ball::new(space.clone(), center.to_vec(), Rat::one())?;
    Ok((space, ball))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn im(rows: &[&[i64]]) -> IMat {
        IMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn qm(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn zv(v: &[i64]) -> ZVec {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn assert_reduced(g: &Mat) {
        let f = ldlt(g).unwrap();
        let half = rat(1, 2);
        for i in 0..g.rows() {
            for j in 0..i {
                assert!(
                    f.l[(i, j)].abs() <= half,
                    "size reduction violated at ({i},{j})"
                );
            }
        }
        let delta = rat(3, 4);
        for k in 1..g.rows() {
            let mu = &f.l[(k, k - 1)];
            assert!(
                f.d[k] >= (&delta - mu * mu) * &f.d[k - 1],
                "Lovasz condition violated at {k}"
            );
        }
    }

    #[test]
    fn lll_identity_is_fixed_point() {
        let g = Mat::identity(3);
        let (u, gp) = lll_reduce(&g).unwrap();
        assert_eq!(u.matrix(), &IMat::identity(3));
        assert_eq!(gp, g);
    }

    #[test]
    fn lll_shears_off_long_vector() {
        // basis columns (1,0) and (100,1): Gram [[1,100],[100,10001]]
        let g = qm(&[&[1, 100], &[100, 10001]]);
        let (u, gp) = lll_reduce(&g).unwrap();
        assert_eq!(gp, u.apply_gram(&g));
        assert_eq!(gp[(0, 0)], rat_int(1));
        assert_eq!(gp.det(), g.det());
        assert_reduced(&gp);
    }

    #[test]
    fn lll_sorts_diagonal_form() {
        let g = qm(&[&[4, 0], &[0, 1]]);
        let (u, gp) = lll_reduce(&g).unwrap();
        assert_eq!(gp[(0, 0)], rat_int(1));
        assert_eq!(gp[(1, 1)], rat_int(4));
        assert_eq!(gp, u.apply_gram(&g));
        assert_reduced(&gp);
    }

    #[test]
    fn lll_preserves_determinant() {
        let g = qm(&[&[10, 3, 1], &[3, 6, 2], &[1, 2, 5]]);
        let (u, gp) = lll_reduce(&g).unwrap();
        assert_eq!(gp.det(), g.det());
        assert_eq!(gp, u.apply_gram(&g));
        assert_reduced(&gp);
    }

    #[test]
    fn lll_rejects_indefinite() {
        assert!(lll_reduce(&qm(&[&[1, 2], &[2, 1]])).is_err());
    }

    #[test]
    fn hnf_identity() {
        let a = IMat::identity(3);
        let (h, v) = hnf(&a).unwrap();
        assert_eq!(h, IMat::identity(3));
        assert_eq!(v.matrix(), &IMat::identity(3));
    }

    #[test]
    fn hnf_single_column() {
        let a = im(&[&[2], &[4]]);
        let (h, v) = hnf(&a).unwrap();
        assert_eq!(h, a);
        assert_eq!(v.matrix(), &IMat::identity(1));
    }

    #[test]
    fn hnf_preserves_determinant_magnitude() {
        let a = im(&[&[2, 1], &[0, 3]]);
        let (h, v) = hnf(&a).unwrap();
        assert_eq!(a.mul(v.matrix()), h);
        assert_eq!(h.det().abs(), BigInt::from(6));
        // lower triangular with positive pivots
        assert!(h[(0, 1)].is_zero());
        assert!(h[(0, 0)].is_positive());
        assert!(h[(1, 1)].is_positive());
        // entry left of the second pivot is reduced
        assert!(!h[(1, 0)].is_negative() && h[(1, 0)] < h[(1, 1)]);
    }

    #[test]
    fn hnf_rejects_rank_deficient() {
        assert!(hnf(&im(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn hnf_is_canonical_under_column_scrambles() {
        let a = im(&[&[4, 7], &[2, 9], &[0, 3]]);
        let mut b = a.clone();
        b.swap_cols(0, 1);
        b.negate_col(0);
        let (ha, _) = hnf(&a).unwrap();
        let (hb, _) = hnf(&b).unwrap();
        assert_eq!(ha, hb);
    }

    #[test]
    fn flag_basis_standard_witnesses() {
        let l = Lattice::standard(2);
        let f = extend_to_flag_basis(&l, &[zv(&[1, 0]), zv(&[0, 1])]).unwrap();
        assert_eq!(f.vectors(), &[zv(&[1, 0]), zv(&[0, 1])]);
    }

    #[test]
    fn flag_basis_saturates_spans() {
        let l = Lattice::standard(2);
        let f = extend_to_flag_basis(&l, &[zv(&[2, 0]), zv(&[0, 1])]).unwrap();
        assert_eq!(f.vectors(), &[zv(&[1, 0]), zv(&[0, 1])]);
    }

    #[test]
    fn flag_basis_general_witnesses() {
        let l = Lattice::standard(2);
        let f = extend_to_flag_basis(&l, &[zv(&[2, 1]), zv(&[1, 1])]).unwrap();
        // e^1 must span lin((2,1)) over the rationals
        let e1 = &f.vectors()[0];
        assert_eq!(&e1[0] * BigInt::from(1), &e1[1] * BigInt::from(2));
        assert!(f.matrix().is_unimodular());
    }

    #[test]
    fn flag_basis_rejects_dependent_witnesses() {
        let l = Lattice::standard(2);
        assert!(extend_to_flag_basis(&l, &[zv(&[1, 1]), zv(&[2, 2])]).is_err());
        assert!(extend_to_flag_basis(&l, &[zv(&[1, 1])]).is_err());
    }

    #[test]
    fn ellipsoid_packaging() {
        let (space, ball) =
            ellipsoid_to_ball_form(&[rat_int(1), rat_int(0)], qm(&[&[1, 0], &[0, 4]]).clone())
                .unwrap();
        assert_eq!(space.dim(), 2);
        assert_eq!(ball.radius_sq(), &rat_int(1));
        assert_eq!(ball.center(), &[rat_int(1), rat_int(0)]);
        assert!(ellipsoid_to_ball_form(&[rat_int(0)], qm(&[&[-1]]).clone()).is_err());
    }

    #[test]
    fn ellipsoid_with_cross_term() {
        // (x-1)^2 + (x-1)y + y^2 <= 1 has form [[1,1/2],[1/2,1]]
        let form = Mat::from_rows(vec![
            vec![rat_int(1), rat(1, 2)],
            vec![rat(1, 2), rat_int(1)],
        ])
        .unwrap();
        let (_, ball) = ellipsoid_to_ball_form(&[rat_int(1), rat_int(0)], form).unwrap();
        assert!(ball.contains(&[rat_int(1), rat_int(0)]).unwrap());
        assert!(ball.contains(&[rat_int(0), rat_int(0)]).unwrap());
        assert!(!ball.contains(&[rat_int(2), rat_int(1)]).unwrap());
    }
}
