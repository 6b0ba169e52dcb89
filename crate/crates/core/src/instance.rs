//! JSON instance files: a lattice basis, an optional ambient form, and a
//! body that is either a single ellipsoid or a family of spheres.
//!
//! All numbers travel as rational strings ("p/q" or "p"), never floats, so
//! files round-trip exactly. Parse errors name the offending field.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::bhw::q_values;
use crate::enumeration::minima_of_body;
use crate::error::{Error, Result};
use crate::linalg::{IMat, Mat, QVec};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::reduction::{ellipsoid_to_ball_form, extend_to_flag_basis};
use crate::slicing::StrongInstance;
use crate::translation::{Sphere, SpherePack};
use crate::types::{Ball, FlagBasis, InnerProductSpace, Lattice};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InstanceFile {
    pub dim: usize,
    pub lattice_basis: IMat,
    pub form: Option<Mat>,
    pub body: Body,
    pub q_override: Option<Vec<BigInt>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Body {
    Ellipsoid(EllipsoidSpec),
    Spheres(Vec<SphereSpec>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EllipsoidSpec {
    pub center: QVec,
    pub shape: EllipsoidShape,
}

/// An ellipsoid is given either by its own quadratic form (unit level set)
/// or by a squared radius measured in the ambient form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EllipsoidShape {
    Form(Mat),
    RadiusSq(Rat),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SphereSpec {
    pub center: QVec,
    pub radius: Rat,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    dim: usize,
    lattice_basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    form: Option<Vec<Vec<String>>>,
    body: RawBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_override: Option<Vec<u64>>,
}

#[derive(Deserialize, Serialize)]
enum RawBody {
    #[serde(rename = "ellipsoid")]
    Ellipsoid(RawEllipsoid),
    #[serde(rename = "spheres")]
    Spheres(Vec<RawSphere>),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawEllipsoid {
    center: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    form: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_sq: Option<String>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSphere {
    center: Vec<String>,
    radius: String,
}

fn at(path: &str, err: Error) -> Error {
    let msg = match err {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn fail(path: &str, msg: &str) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn rat_at(s: &str, path: &str) -> Result<Rat> {
    parse_rat(s).map_err(|e| at(path, e))
}

fn vec_at(v: &[String], dim: usize, path: &str) -> Result<QVec> {
    if v.len() != dim {
        return Err(fail(path, &format!("expected {dim} entries, got {}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| rat_at(s, &format!("{path}[{i}]")))
        .collect()
}

fn mat_at(rows: &[Vec<String>], dim: usize, path: &str) -> Result<Mat> {
    if rows.len() != dim {
        return Err(fail(path, &format!("expected {dim} rows, got {}", rows.len())));
    }
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| vec_at(row, dim, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(parsed).map_err(|e| at(path, e))
}

fn imat_at(rows: &[Vec<String>], dim: usize, path: &str) -> Result<IMat> {
    let q = mat_at(rows, dim, path)?;
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let e = &q[(i, j)];
            if !e.is_integer() {
                return Err(fail(
                    &format!("{path}[{i}][{j}]"),
                    "lattice basis entries must be integers",
                ));
            }
            row.push(e.to_integer());
        }
        out.push(row);
    }
    IMat::from_rows(out).map_err(|e| at(path, e))
}

fn format_qvec(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn format_mat(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| format_rat(&m[(i, j)])).collect())
        .collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile> {
        let raw: RawInstance = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
        raw.validate()
    }

    pub fn to_json(&self) -> String {
        let raw = self.to_raw();
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }

    fn to_raw(&self) -> RawInstance {
        RawInstance {
            dim: self.dim,
            lattice_basis: format_mat(&self.lattice_basis.to_rational()),
            form: self.form.as_ref().map(format_mat),
            body: match &self.body {
                Body::Ellipsoid(e) => RawBody::Ellipsoid(RawEllipsoid {
                    center: format_qvec(&e.center),
                    form: match &e.shape {
                        EllipsoidShape::Form(f) => Some(format_mat(f)),
                        EllipsoidShape::RadiusSq(_) => None,
                    },
                    radius_sq: match &e.shape {
                        EllipsoidShape::Form(_) => None,
                        EllipsoidShape::RadiusSq(r) => Some(format_rat(r)),
                    },
                }),
                Body::Spheres(spheres) => RawBody::Spheres(
                    spheres
                        .iter()
                        .map(|s| RawSphere {
                            center: format_qvec(&s.center),
                            radius: format_rat(&s.radius),
                        })
                        .collect(),
                ),
            },
            q_override: self.q_override.as_ref().map(|q| {
                q.iter()
                    .map(|x| u64::try_from(x).expect("validated positive and small"))
                    .collect()
            }),
        }
    }

    /// The lattice described by the file.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.lattice_basis.clone()).map_err(|e| at("lattice_basis", e))
    }

    /// The ambient inner product space (identity form when absent).
    pub fn space(&self) -> Result<InnerProductSpace> {
        match &self.form {
            Some(f) => InnerProductSpace::new(f.clone()).map_err(|e| at("form", e)),
            None => Ok(InnerProductSpace::euclidean(self.dim)),
        }
    }

    /// The single ball of an ellipsoid body, in whichever space defines it.
    pub fn ball(&self) -> Result<Ball> {
        match &self.body {
            Body::Ellipsoid(e) => match &e.shape {
                EllipsoidShape::RadiusSq(r) => {
                    Ball::new(self.space()?, e.center.clone(), r.clone())
                        .map_err(|err| at("body.ellipsoid", err))
                }
                EllipsoidShape::Form(f) => {
                    let (_, ball) = ellipsoid_to_ball_form(&e.center, f.clone())
                        .map_err(|err| at("body.ellipsoid.form", err))?;
                    Ok(ball)
                }
            },
            Body::Spheres(_) => Err(fail("body", "this command needs an ellipsoid body")),
        }
    }

    /// The sphere pack of a spheres body, in the ambient space.
    pub fn sphere_pack(&self) -> Result<SpherePack> {
        match &self.body {
            Body::Spheres(spheres) => SpherePack::new(
                self.space()?,
                self.lattice()?,
                spheres
                    .iter()
                    .map(|s| Sphere {
                        center: s.center.clone(),
                        radius: s.radius.clone(),
                    })
                    .collect(),
            )
            .map_err(|e| at("body.spheres", e)),
            Body::Ellipsoid(_) => Err(fail("body", "this command needs a spheres body")),
        }
    }

    /// All bodies as balls sharing one space: the single ellipsoid, or each
    /// sphere with its radius squared.
    pub fn balls(&self) -> Result<Vec<Ball>> {
        match &self.body {
            Body::Ellipsoid(_) => Ok(vec![self.ball()?]),
            Body::Spheres(spheres) => {
                let space = self.space()?;
                spheres
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        Ball::new(space.clone(), s.center.clone(), &s.radius * &s.radius)
                            .map_err(|e| at(&format!("body.spheres[{i}]"), e))
                    })
                    .collect()
            }
        }
    }

    /// Assembles the strong-verifier input. The q list comes from
    /// `q_override` (a final 1 is appended when one entry short) or else
    /// from the successive minima of the largest ball, which dominate the
    /// per-ball q values componentwise; the flag basis extends the minima
    /// witnesses, falling back to the standard flag for point bodies.
    pub fn strong_instance(&self) -> Result<StrongInstance> {
        let lattice = self.lattice()?;
        let balls = self.balls()?;
        let largest = balls
            .iter()
            .max_by(|a, b| a.radius_sq().cmp(b.radius_sq()))
            .expect("balls is nonempty")
            .clone();
        let minima = minima_of_body(&lattice, &largest)?;
        let flag = match minima.finite_witnesses() {
            Some(witnesses) => extend_to_flag_basis(&lattice, &witnesses)?,
            None => FlagBasis::standard(lattice.clone()),
        };
        let q = match &self.q_override {
            Some(q) => {
                let mut q = q.clone();
                if q.len() == self.dim {
                    q.push(BigInt::one());
                }
                q
            }
            None => {
                let mut q = q_values(&minima)?.values().to_vec();
                q.push(BigInt::one());
                q
            }
        };
        StrongInstance::new(balls, flag, q).map_err(|e| at("q_override", e))
    }
}

impl RawInstance {
    fn validate(self) -> Result<InstanceFile> {
        if self.dim == 0 {
            return Err(fail("dim", "dimension must be positive"));
        }
        let dim = self.dim;
        let lattice_basis = imat_at(&self.lattice_basis, dim, "lattice_basis")?;
        Lattice::new(lattice_basis.clone()).map_err(|e| at("lattice_basis", e))?;
        let form = match &self.form {
            Some(rows) => {
                let m = mat_at(rows, dim, "form")?;
                InnerProductSpace::new(m.clone()).map_err(|e| at("form", e))?;
                Some(m)
            }
            None => None,
        };
        let body = match &self.body {
            RawBody::Ellipsoid(e) => {
                let center = vec_at(&e.center, dim, "body.ellipsoid.center")?;
                let shape = match (&e.form, &e.radius_sq) {
                    (Some(rows), None) => {
                        let m = mat_at(rows, dim, "body.ellipsoid.form")?;
                        InnerProductSpace::new(m.clone())
                            .map_err(|err| at("body.ellipsoid.form", err))?;
                        EllipsoidShape::Form(m)
                    }
                    (None, Some(r)) => {
                        let r = rat_at(r, "body.ellipsoid.radius_sq")?;
                        if r.is_negative() {
                            return Err(fail(
                                "body.ellipsoid.radius_sq",
                                "squared radius must be nonnegative",
                            ));
                        }
                        EllipsoidShape::RadiusSq(r)
                    }
                    _ => {
                        return Err(fail(
                            "body.ellipsoid",
                            "exactly one of form and radius_sq is required",
                        ))
                    }
                };
                Body::Ellipsoid(EllipsoidSpec { center, shape })
            }
            RawBody::Spheres(spheres) => {
                if spheres.is_empty() {
                    return Err(fail("body.spheres", "at least one sphere is required"));
                }
                let parsed = spheres
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let path = format!("body.spheres[{i}]");
                        let center = vec_at(&s.center, dim, &format!("{path}.center"))?;
                        let radius = rat_at(&s.radius, &format!("{path}.radius"))?;
                        if !radius.is_positive() {
                            return Err(fail(
                                &format!("{path}.radius"),
                                "radius must be positive",
                            ));
                        }
                        Ok(SphereSpec { center, radius })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Body::Spheres(parsed)
            }
        };
        let q_override = match &self.q_override {
            Some(q) => {
                if q.len() != dim && q.len() != dim + 1 {
                    return Err(fail(
                        "q_override",
                        &format!("expected {dim} or {} entries, got {}", dim + 1, q.len()),
                    ));
                }
                for (i, x) in q.iter().enumerate() {
                    if *x == 0 {
                        return Err(fail(&format!("q_override[{i}]"), "must be positive"));
                    }
                }
                if q.windows(2).any(|w| w[0] < w[1]) {
                    return Err(fail("q_override", "entries must be non-increasing"));
                }
                Some(q.iter().map(|&x| BigInt::from(x)).collect())
            }
            None => None,
        };
        Ok(InstanceFile {
            dim,
            lattice_basis,
            form,
            body,
            q_override,
        })
    }
}
