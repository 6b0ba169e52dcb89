//! Lattices, inner product spaces, balls, and flagged bases.
//!
//! A `Ball` is stored by its squared radius so that slices of spheres,
//! whose radii are generally irrational, remain exactly representable.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};
use crate::linalg::{quad_form, sub_qvec, IMat, Mat, QVec, ZVec};
use crate::rat::Rat;

/// Full-rank lattice `B * Z^d` given by an integer basis matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    dim: usize,
    basis: IMat,
    basis_inv: Mat,
}

impl Lattice {
    pub fn new(basis: IMat) -> Result<Lattice> {
        if basis.rows() != basis.cols() {
            return Err(invalid("lattice basis must be square"));
        }
        let dim = basis.rows();
        if dim == 0 {
            return Err(invalid("lattice dimension must be positive"));
        }
        if basis.det().is_zero() {
            return Err(invalid("lattice basis is singular"));
        }
        let basis_inv = basis.to_rational().inverse()?;
        Ok(Lattice {
            dim,
            basis,
            basis_inv,
        })
    }

    /// The integer lattice `Z^d`.
    pub fn standard(dim: usize) -> Lattice {
        Lattice::new(IMat::identity(dim)).expect("identity basis is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn basis_inv(&self) -> &Mat {
        &self.basis_inv
    }

    /// Ambient coordinates of the lattice point with coefficient vector `z`.
    pub fn point(&self, z: &[BigInt]) -> QVec {
        assert_eq!(z.len(), self.dim);
        let iz = self.basis.mul_zvec(z);
        iz.into_iter().map(Rat::from_integer).collect()
    }

    /// Coefficients of an ambient point, exact; integral iff the point is in the lattice.
    pub fn coefficients(&self, x: &[Rat]) -> Result<QVec> {
        if x.len() != self.dim {
            return Err(invalid("point dimension does not match lattice"));
        }
        Ok(self.basis_inv.mul_vec(x))
    }

    pub fn contains_point(&self, x: &[Rat]) -> Result<bool> {
        Ok(self.coefficients(x)?.iter().all(|c| c.is_integer()))
    }
}

/// Positive definite symmetric form defining the ambient inner product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InnerProductSpace {
    dim: usize,
    q: Mat,
}

impl InnerProductSpace {
    pub fn new(q: Mat) -> Result<InnerProductSpace> {
        if !q.is_square() {
            return Err(invalid("inner product form must be square"));
        }
        if !q.is_symmetric() {
            return Err(invalid("inner product form must be symmetric"));
        }
        if !is_positive_definite(&q) {
            return Err(invalid("inner product form is not positive definite"));
        }
        Ok(InnerProductSpace { dim: q.rows(), q })
    }

    pub fn euclidean(dim: usize) -> InnerProductSpace {
        InnerProductSpace::new(Mat::identity(dim)).expect("identity form is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &Mat {
        &self.q
    }

    pub fn norm_sq(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.dim {
            return Err(invalid("vector dimension does not match form"));
        }
        Ok(quad_form(&self.q, x))
    }

    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Result<Rat> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(invalid("vector dimension does not match form"));
        }
        Ok(crate::linalg::bilinear(&self.q, x, y))
    }

    pub fn dist_sq(&self, x: &[Rat], y: &[Rat]) -> Result<Rat> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(invalid("vector dimension does not match form"));
        }
        self.norm_sq(&sub_qvec(x, y))
    }
}

/// Checks positive definiteness via leading principal minors.
///
/// This is deliberately a different route than the `LDL^T` factorization used
/// by the enumerator, so the two validations cross-check each other.
pub fn is_positive_definite(q: &Mat) -> bool {
    q.is_square()
        && q.is_symmetric()
        && q.leading_principal_minors().iter().all(|m| m.is_positive())
}

/// Closed metric ball, stored by squared radius.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ball {
    space: InnerProductSpace,
    center: QVec,
    radius_sq: Rat,
}

impl Ball {
    pub fn new(space: InnerProductSpace, center: QVec, radius_sq: Rat) -> Result<Ball> {
        if center.len() != space.dim() {
            return Err(invalid("ball center dimension does not match form"));
        }
        if radius_sq.is_negative() {
            return Err(invalid("ball radius squared must be nonnegative"));
        }
        Ok(Ball {
            space,
            center,
            radius_sq,
        })
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn center(&self) -> &[Rat] {
        &self.center
    }

    pub fn radius_sq(&self) -> &Rat {
        &self.radius_sq
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        Ok(self.space.dist_sq(x, &self.center)? <= self.radius_sq)
    }

    /// Difference body `B - B`: the origin-centered ball of doubled radius.
    pub fn difference_body(&self) -> Ball {
        Ball {
            space: self.space.clone(),
            center: vec![Rat::zero(); self.space.dim()],
            radius_sq: &self.radius_sq * crate::rat::rat_int(4),
        }
    }

    /// `(1/2)(B - B)`: the origin-centered ball of the same radius.
    pub fn half_difference_body(&self) -> Ball {
        Ball {
            space: self.space.clone(),
            center: vec![Rat::zero(); self.space.dim()],
            radius_sq: self.radius_sq.clone(),
        }
    }
}

/// Unimodular basis `e^1..e^d` (coefficient vectors w.r.t. a lattice basis)
/// whose prefixes span the same subspaces as the recorded witness vectors.
///
/// Prefix sublattices `span(e^1..e^i) \cap Lambda` are saturated by
/// construction: membership is just "trailing coefficients vanish".
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlagBasis {
    lattice: Lattice,
    vectors: Vec<ZVec>,
    witnesses: Vec<ZVec>,
}

impl FlagBasis {
    pub fn new(lattice: Lattice, vectors: Vec<ZVec>, witnesses: Vec<ZVec>) -> Result<FlagBasis> {
        let d = lattice.dim();
        if vectors.len() != d {
            return Err(invalid("flag basis must have one vector per dimension"));
        }
        if vectors.iter().any(|v| v.len() != d) {
            return Err(invalid("flag basis vector dimension mismatch"));
        }
        let e = IMat::from_cols(vectors.clone())?;
        if !e.is_unimodular() {
            return Err(invalid("flag basis is not unimodular"));
        }
        if !witnesses.is_empty() {
            if witnesses.len() != d || witnesses.iter().any(|w| w.len() != d) {
                return Err(invalid("flag witnesses must form a full set"));
            }
            let a = IMat::from_cols(witnesses.clone())?;
            if a.det().is_zero() {
                return Err(invalid("flag witnesses are linearly dependent"));
            }
            for i in 1..=d {
                if !prefix_spans_match(&e, &a, i) {
                    return Err(invalid(format!(
                        "flag basis prefix {i} does not span the witness prefix"
                    )));
                }
            }
        }
        Ok(FlagBasis {
            lattice,
            vectors,
            witnesses,
        })
    }

    /// The identity flag on a lattice: `e^i` is the i-th standard coefficient vector.
    pub fn standard(lattice: Lattice) -> FlagBasis {
        let d = lattice.dim();
        let vectors = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        FlagBasis {
            lattice,
            vectors,
            witnesses: Vec::new(),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn vectors(&self) -> &[ZVec] {
        &self.vectors
    }

    pub fn witnesses(&self) -> &[ZVec] {
        &self.witnesses
    }

    /// Column matrix of the flag vectors.
    pub fn matrix(&self) -> IMat {
        IMat::from_cols(self.vectors.clone()).expect("validated at construction")
    }
}

fn prefix_spans_match(e: &IMat, a: &IMat, k: usize) -> bool {
    let d = e.rows();
    // rank of [e^1..e^k | a^1..a^k] must equal k
    let stacked = Mat::from_fn(d, 2 * k, |i, j| {
        let m = if j < k { e } else { a };
        let col = if j < k { j } else { j - k };
        Rat::from_integer(m[(i, col)].clone())
    });
    stacked.rank() == k
}
