//! Exact lattice enumeration over a rational LDL^T factorization.
//!
//! Point counting, closest vectors, and successive minima all reduce to the
//! same depth-first scan in which every interval endpoint is an exact
//! integer computed square-root-free. A brute-force box oracle provides an
//! independent second route for counts.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg::{colex_cmp, quad_form, sub_qvec, zvec_sign_normalize, zvec_to_qvec, Mat, QVec, ZVec};
use crate::rat::{ceil_minus_sqrt, floor_plus_sqrt, rat_int, Rat};
use crate::reduction::lll_reduce;
use crate::types::{Ball, Lattice};

/// `G = L D L^T` with unit lower-triangular `L` and positive diagonal `D`,
/// so the form rewrites as `sum_i D_i (z_i + sum_{j>i} L_ji z_j)^2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LdltDecomposition {
    pub d: Vec<Rat>,
    pub l: Mat,
}

pub fn ldlt(g: &Mat) -> Result<LdltDecomposition> {
    if !g.is_square() || !g.is_symmetric() {
        return Err(invalid("Gram matrix must be symmetric"));
    }
    let n = g.rows();
    let mut d = vec![Rat::zero(); n];
    let mut l = Mat::identity(n);
    for i in 0..n {
        let mut di = g[(i, i)].clone();
        for k in 0..i {
            di -= &d[k] * &l[(i, k)] * &l[(i, k)];
        }
        if !di.is_positive() {
            return Err(invalid("Gram matrix is not positive definite"));
        }
        for j in i + 1..n {
            let mut num = g[(j, i)].clone();
            for k in 0..i {
                num -= &l[(j, k)] * &d[k] * &l[(i, k)];
            }
            l[(j, i)] = num / &di;
        }
        d[i] = di;
    }
    Ok(LdltDecomposition { d, l })
}

impl LdltDecomposition {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Reassembles `L D L^T`.
    pub fn reconstruct(&self) -> Mat {
        let n = self.dim();
        let mut diag = Mat::zeros(n, n);
        for i in 0..n {
            diag[(i, i)] = self.d[i].clone();
        }
        self.l.mul(&diag).mul(&self.l.transpose())
    }
}

/// All `z` in `Z^d` with `(z-t)^T G (z-t) <= r_sq`, in lexicographic order.
///
/// A negative `r_sq` yields the empty list.
pub fn enumerate_ball(g: &Mat, t: &[Rat], r_sq: &Rat) -> Result<Vec<ZVec>> {
    if t.len() != g.rows() {
        return Err(invalid("center dimension does not match Gram matrix"));
    }
    let f = ldlt(g)?;
    if r_sq.is_negative() {
        return Ok(Vec::new());
    }
    let n = f.dim();
    let mut out = Vec::new();
    let mut z = vec![BigInt::zero(); n];
    descend(&f, t, n, r_sq.clone(), &mut z, &mut out);
    out.sort();
    Ok(out)
}

/// Exact `min over z in Z^d of (z-t)^T G (z-t)` for the factored form,
/// seeded with a realizable bound.
///
/// Depth-first with the bound tightened at every improving leaf; candidates
/// at each level fan outward from the interval midpoint, so the first leaf
/// is the nearest-plane point and the bound collapses immediately. This
/// keeps the tree near the size of the optimal ball, where a fixed-radius
/// scan can visit combinatorially many points on skewed inputs.
fn nearest_dist_sq(f: &LdltDecomposition, t: &[Rat], seed: Rat) -> Rat {
    let n = f.dim();
    let mut best = seed;
    let mut z = vec![BigInt::zero(); n];
    nearest_descend(f, t, n, Rat::zero(), &mut z, &mut best);
    best
}

/// Chooses `z[level-1]` given fixed `z[level..]` and cost spent so far,
/// pruning against the best full distance found anywhere in the scan.
fn nearest_descend(
    f: &LdltDecomposition,
    t: &[Rat],
    level: usize,
    spent: Rat,
    z: &mut Vec<BigInt>,
    best: &mut Rat,
) {
    if level == 0 {
        if spent < *best {
            *best = spent;
        }
        return;
    }
    let i = level - 1;
    // c_i = t_i - sum_{j>i} L_ji (z_j - t_j)
    let mut c = t[i].clone();
    for j in level..f.dim() {
        c -= &f.l[(j, i)] * (Rat::from_integer(z[j].clone()) - &t[j]);
    }
    let level_cost = |zi: &BigInt| {
        let y = Rat::from_integer(zi.clone()) - &c;
        &f.d[i] * &y * &y
    };
    // Fan outward: the per-side cost is monotone, so each side stops for
    // good once it exceeds the remaining budget.
    let mut up = crate::rat::round_int(&c);
    let mut down = &up - 1;
    let mut up_alive = true;
    let mut down_alive = true;
    while up_alive || down_alive {
        if up_alive {
            let total = &spent + level_cost(&up);
            if total < *best {
                z[i] = up.clone();
                nearest_descend(f, t, i, total, z, best);
                up += 1;
            } else {
                up_alive = false;
            }
        }
        if down_alive {
            let total = &spent + level_cost(&down);
            if total < *best {
                z[i] = down.clone();
                nearest_descend(f, t, i, total, z, best);
                down -= 1;
            } else {
                down_alive = false;
            }
        }
    }
    z[i] = BigInt::zero();
}

/// Chooses `z[level-1]` given fixed `z[level..]` and remaining budget.
fn descend(f: &LdltDecomposition, t: &[Rat], level: usize, rem: Rat, z: &mut Vec<BigInt>, out: &mut Vec<ZVec>) {
    if level == 0 {
        out.push(z.clone());
        return;
    }
    let i = level - 1;
    // c_i = t_i - sum_{j>i} L_ji (z_j - t_j)
    let mut c = t[i].clone();
    for j in level..f.dim() {
        c -= &f.l[(j, i)] * (Rat::from_integer(z[j].clone()) - &t[j]);
    }
    let bound = &rem / &f.d[i];
    let lo = ceil_minus_sqrt(&c, &bound);
    let hi = floor_plus_sqrt(&c, &bound);
    let mut zi = lo;
    while zi <= hi {
        let y = Rat::from_integer(zi.clone()) - &c;
        let used = &f.d[i] * &y * &y;
        let next = &rem - &used;
        debug_assert!(!next.is_negative(), "range endpoints must be exact");
        z[i] = zi.clone();
        descend(f, t, i, next, z, out);
        zi += 1;
    }
    z[i] = BigInt::zero();
}

/// `|ball ∩ lattice|` by enumeration in coefficient space, after a basis
/// reduction that keeps the search tree narrow on skewed bases.
pub fn count_ball(lattice: &Lattice, ball: &Ball) -> Result<u64> {
    if lattice.dim() != ball.dim() {
        return Err(invalid("lattice and ball dimensions differ"));
    }
    let g = gram_of(lattice, ball);
    let t = lattice.coefficients(ball.center())?;
    let (u, gp) = lll_reduce(&g)?;
    let s = u.pullback_point(&t);
    let pts = enumerate_ball(&gp, &s, ball.radius_sq())?;
    Ok(pts.len() as u64)
}

fn gram_of(lattice: &Lattice, ball: &Ball) -> Mat {
    let b = lattice.basis().to_rational();
    b.transpose().mul(ball.space().form()).mul(&b)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CvpResult {
    pub dist_sq: Rat,
    pub minimizers: Vec<ZVec>,
    pub selected: ZVec,
}

/// Distance from `t` to `Z^d` under `G`, with the complete minimizer set in
/// lexicographic order and the lexicographically smallest one selected.
pub fn closest_vectors(g: &Mat, t: &[Rat]) -> Result<CvpResult> {
    if t.len() != g.rows() {
        return Err(invalid("target dimension does not match Gram matrix"));
    }
    let (u, gp) = lll_reduce(g)?;
    let s = u.pullback_point(t);
    let f = ldlt(&gp)?;
    // Babai rounding gives a realizable starting bound; the scan tightens
    // it to the exact minimum, and the ball of that radius is then exactly
    // the minimizer set.
    let w0: ZVec = s.iter().map(crate::rat::round_int).collect();
    let diff = sub_qvec(&zvec_to_qvec(&w0), &s);
    let best = nearest_dist_sq(&f, &s, quad_form(&gp, &diff));
    let mut minimizers: Vec<ZVec> = enumerate_ball(&gp, &s, &best)?
        .into_iter()
        .map(|w| u.apply_coords(&w))
        .collect();
    minimizers.sort();
    let selected = minimizers[0].clone();
    Ok(CvpResult {
        dist_sq: best,
        minimizers,
        selected,
    })
}

/// Squared successive minima with witness vectors. The distinguished
/// infinite value appears only in profiles of radius-zero bodies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LambdaSq {
    Finite(Rat),
    Infinite,
}

impl LambdaSq {
    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            LambdaSq::Finite(r) => Some(r),
            LambdaSq::Infinite => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinimaProfile {
    pub lambda_sq: Vec<LambdaSq>,
    pub witnesses: Vec<Option<ZVec>>,
}

impl MinimaProfile {
    pub fn dim(&self) -> usize {
        self.lambda_sq.len()
    }

    pub fn finite_witnesses(&self) -> Option<Vec<ZVec>> {
        self.witnesses.iter().cloned().collect()
    }
}

/// Successive minima of the quadratic form `G` over `Z^d`.
///
/// Enumerates by doubling radius from the smallest diagonal entry of the
/// LLL-reduced form, sign-normalizes candidates, sorts by norm with
/// colexicographic tie-breaking, and greedily takes independent vectors.
pub fn successive_minima(g: &Mat) -> Result<MinimaProfile> {
    let (u, gp) = lll_reduce(g)?;
    let n = g.rows();
    let diag_min = (0..n).map(|i| gp[(i, i)].clone()).min().expect("nonempty");
    let diag_max = (0..n).map(|i| gp[(i, i)].clone()).max().expect("nonempty");
    let mut radius = diag_min;
    loop {
        if let Some(profile) = try_minima_at_radius(&u, &gp, &radius)? {
            return Ok(profile);
        }
        radius *= rat_int(2);
        debug_assert!(
            radius <= &diag_max * rat_int(4),
            "reduced diagonal must bound the last minimum"
        );
    }
}

fn try_minima_at_radius(
    u: &crate::reduction::UnimodularTransform,
    gp: &Mat,
    radius: &Rat,
) -> Result<Option<MinimaProfile>> {
    let n = gp.rows();
    let zero_t = vec![Rat::zero(); n];
    let mut seen = std::collections::BTreeSet::new();
    let mut candidates: Vec<(Rat, ZVec)> = Vec::new();
    for w in enumerate_ball(gp, &zero_t, radius)? {
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        let norm = quad_form(gp, &zvec_to_qvec(&w));
        let z = zvec_sign_normalize(&u.apply_coords(&w));
        if seen.insert(z.clone()) {
            candidates.push((norm, z));
        }
    }
    candidates.sort_by(|(na, va), (nb, vb)| na.cmp(nb).then_with(|| colex_cmp(va, vb)));
    let mut picked: Vec<(Rat, ZVec)> = Vec::new();
    let mut span = Mat::zeros(n, n);
    let mut span_rank = 0;
    for (norm, v) in candidates {
        let mut trial = span.clone();
        for (i, x) in v.iter().enumerate() {
            trial[(i, span_rank)] = Rat::from_integer(x.clone());
        }
        if trial.rank() == span_rank + 1 {
            span = trial;
            span_rank += 1;
            picked.push((norm, v));
            if span_rank == n {
                break;
            }
        }
    }
    if span_rank < n {
        return Ok(None);
    }
    Ok(Some(MinimaProfile {
        lambda_sq: picked
            .iter()
            .map(|(norm, _)| LambdaSq::Finite(norm.clone()))
            .collect(),
        witnesses: picked.into_iter().map(|(_, v)| Some(v)).collect(),
    }))
}

/// Successive minima of a body `ball` w.r.t. `lattice`, defined through the
/// half difference body: for a ball of squared radius `rho > 0` these are
/// `nu_i / rho` where `nu_i` are the minima of the coefficient form. A
/// radius-zero body has every minimum infinite.
pub fn minima_of_body(lattice: &Lattice, ball: &Ball) -> Result<MinimaProfile> {
    if lattice.dim() != ball.dim() {
        return Err(invalid("lattice and ball dimensions differ"));
    }
    let rho = ball.radius_sq();
    if rho.is_zero() {
        let n = lattice.dim();
        return Ok(MinimaProfile {
            lambda_sq: (0..n).map(|_| LambdaSq::Infinite).collect(),
            witnesses: vec![None; n],
        });
    }
    let g = gram_of(lattice, ball);
    let profile = successive_minima(&g)?;
    Ok(MinimaProfile {
        lambda_sq: profile
            .lambda_sq
            .into_iter()
            .map(|l| match l {
                LambdaSq::Finite(nu) => LambdaSq::Finite(nu / rho),
                LambdaSq::Infinite => LambdaSq::Infinite,
            })
            .collect(),
        witnesses: profile.witnesses,
    })
}

const ORACLE_BOX_LIMIT: u64 = 10_000_000;

fn oracle_box(g: &Mat, t: &[Rat], r_sq: &Rat) -> Result<(Vec<BigInt>, Vec<BigInt>, BigInt)> {
    if t.len() != g.rows() {
        return Err(invalid("center dimension does not match Gram matrix"));
    }
    if !crate::types::is_positive_definite(g) {
        return Err(invalid("Gram matrix is not positive definite"));
    }
    let n = g.rows();
    let ginv = g.inverse()?;
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut box_size = BigInt::one();
    for i in 0..n {
        let bound = r_sq * &ginv[(i, i)];
        let l = ceil_minus_sqrt(&t[i], &bound);
        let h = floor_plus_sqrt(&t[i], &bound);
        box_size *= std::cmp::max(BigInt::zero(), &h - &l + 1);
        lo.push(l);
        hi.push(h);
    }
    Ok((lo, hi, box_size))
}

/// Number of candidates the box oracle would scan for this input.
pub fn oracle_box_size(g: &Mat, t: &[Rat], r_sq: &Rat) -> Result<BigInt> {
    if r_sq.is_negative() {
        return Ok(BigInt::zero());
    }
    Ok(oracle_box(g, t, r_sq)?.2)
}

/// Brute-force count over the bounding box `|z_i - t_i| <= sqrt(r_sq * (G^{-1})_ii)`.
///
/// Intentionally shares no machinery with `enumerate_ball`; used to
/// cross-validate it. Refuses boxes above 10^7 candidates.
pub fn oracle_count(g: &Mat, t: &[Rat], r_sq: &Rat) -> Result<u64> {
    if t.len() != g.rows() {
        return Err(invalid("center dimension does not match Gram matrix"));
    }
    if !crate::types::is_positive_definite(g) {
        return Err(invalid("Gram matrix is not positive definite"));
    }
    if r_sq.is_negative() {
        return Ok(0);
    }
    let (lo, hi, box_size) = oracle_box(g, t, r_sq)?;
    let n = g.rows();
    if box_size > BigInt::from(ORACLE_BOX_LIMIT) {
        return Err(Error::CapacityExceeded(format!(
            "oracle box has {box_size} candidates (limit {ORACLE_BOX_LIMIT})"
        )));
    }
    let mut count = 0u64;
    let mut z = lo.clone();
    if z.iter().zip(&hi).any(|(a, b)| a > b) {
        return Ok(0);
    }
    loop {
        let diff: QVec = z
            .iter()
            .zip(t)
            .map(|(zi, ti)| Rat::from_integer(zi.clone()) - ti)
            .collect();
        if quad_form(g, &diff) <= *r_sq {
            count += 1;
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(count);
            }
            z[i] += 1;
            if z[i] <= hi[i] {
                break;
            }
            z[i] = lo[i].clone();
            i += 1;
        }
    }
}
