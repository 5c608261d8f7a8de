//! The flat pseudohermitian manifold `H_n`.
//!
//! Points are stored with interleaved coordinates `(x_1, y_1, ..., x_n, y_n, z)`.
//! Contact vectors are stored by their coefficients on the left-invariant
//! frame `e_{x_j} = d/dx_j + y_j d/dz`, `e_{y_j} = d/dy_j - x_j d/dz`, which is
//! orthonormal for the Levi metric. Because the frame is left-invariant, the
//! pushforward of a left translation moves the base point and leaves the
//! coefficients untouched; no Jacobian is formed at runtime.
//!
//! For reference, the differential of `L_p` in coordinates is the identity on
//! the `x, y` block plus the row `dz' = dz + sum_j (y_j dx_j - x_j dy_j)`
//! (see [`pushforward_coords`]), and applying it to `e_{x_j}(q)` gives
//! `d/dx_j + (q_{y_j} + p_{y_j}) d/dz = e_{x_j}(L_p q)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{gamma, unit_ball_volume, unit_sphere_area};

/// Per-coordinate tolerance when deciding that two base points coincide.
pub const BASE_TOL: f64 = 1e-12;

/// Heisenberg index `n`; the ambient dimension is `2n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "Heisenberg index must be at least 1"));
        }
        Ok(Dim(n))
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// Dimension of the contact plane, `2n`.
    pub fn contact(self) -> usize {
        2 * self.0
    }

    /// Ambient dimension, `2n + 1`.
    pub fn ambient(self) -> usize {
        2 * self.0 + 1
    }

    fn check(self, other: Dim) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.0,
                found: other.0,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPoint {
    dim: Dim,
    coords: Vec<f64>,
}

impl HPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let len = coords.len();
        if len < 3 || len % 2 == 0 {
            return Err(Error::BadCoordinateLength(len));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("point coordinate {bad}")));
        }
        Ok(HPoint {
            dim: Dim((len - 1) / 2),
            coords,
        })
    }

    pub fn origin(dim: Dim) -> Self {
        HPoint {
            dim,
            coords: vec![0.0; dim.ambient()],
        }
    }

    /// Builds a point from its planar part (interleaved `x_j, y_j`) and height.
    pub fn from_planar(planar: &[f64], z: f64) -> Result<Self> {
        let mut coords = Vec::with_capacity(planar.len() + 1);
        coords.extend_from_slice(planar);
        coords.push(z);
        HPoint::new(coords)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The `(x_1, y_1, ..., x_n, y_n)` block.
    pub fn planar(&self) -> &[f64] {
        &self.coords[..self.dim.contact()]
    }

    pub fn z(&self) -> f64 {
        self.coords[self.dim.contact()]
    }

    pub fn approx_eq(&self, other: &HPoint, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A vector of the contact plane, given by frame coefficients
/// `(a_1, b_1, ..., a_n, b_n)` at `base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactVector {
    base: HPoint,
    xi: Vec<f64>,
}

impl ContactVector {
    pub fn new(base: HPoint, xi: Vec<f64>) -> Result<Self> {
        if xi.len() != base.dim.contact() {
            return Err(Error::DimensionMismatch {
                expected: base.dim.n(),
                found: xi.len() / 2,
            });
        }
        Ok(ContactVector { base, xi })
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn levi_norm(&self) -> f64 {
        self.xi.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A tangent vector split into its contact part and a coefficient on the
/// Reeb direction `T = d/dz`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbientVector {
    base: HPoint,
    xi: Vec<f64>,
    t: f64,
}

impl AmbientVector {
    pub fn new(base: HPoint, xi: Vec<f64>, t: f64) -> Result<Self> {
        if xi.len() != base.dim.contact() {
            return Err(Error::DimensionMismatch {
                expected: base.dim.n(),
                found: xi.len() / 2,
            });
        }
        if !t.is_finite() || xi.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("ambient vector".into()));
        }
        Ok(AmbientVector { base, xi, t })
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn contact_part(&self) -> ContactVector {
        ContactVector {
            base: self.base.clone(),
            xi: self.xi.clone(),
        }
    }

    /// Left translation by `p`. The vertical coefficient is carried along
    /// unchanged; it never enters a Levi pairing.
    pub fn pushforward(&self, p: &HPoint) -> Result<AmbientVector> {
        Ok(AmbientVector {
            base: group_mul(p, &self.base)?,
            xi: self.xi.clone(),
            t: self.t,
        })
    }
}

/// The group law `L_p(q)`.
pub fn group_mul(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    p.dim.check(q.dim)?;
    let m = p.dim.contact();
    let mut coords = Vec::with_capacity(m + 1);
    let mut twist = 0.0;
    for j in 0..p.dim.n() {
        let (x, y) = (p.coords[2 * j], p.coords[2 * j + 1]);
        let (xq, yq) = (q.coords[2 * j], q.coords[2 * j + 1]);
        coords.push(x + xq);
        coords.push(y + yq);
        twist += y * xq - x * yq;
    }
    coords.push(p.coords[m] + q.coords[m] + twist);
    Ok(HPoint { dim: p.dim, coords })
}

pub fn group_inv(p: &HPoint) -> HPoint {
    HPoint {
        dim: p.dim,
        coords: p.coords.iter().map(|c| -c).collect(),
    }
}

/// `L_{p*} v`: the base moves to `p v.base`, the frame coefficients stay.
pub fn pushforward(p: &HPoint, v: &ContactVector) -> Result<ContactVector> {
    Ok(ContactVector {
        base: group_mul(p, &v.base)?,
        xi: v.xi.clone(),
    })
}

/// Differential of `L_p` applied to a coordinate tangent vector.
pub fn pushforward_coords(p: &HPoint, w: &[f64]) -> Result<Vec<f64>> {
    if w.len() != p.dim.ambient() {
        return Err(Error::BadCoordinateLength(w.len()));
    }
    let m = p.dim.contact();
    let mut out = w.to_vec();
    for j in 0..p.dim.n() {
        out[m] += p.coords[2 * j + 1] * w[2 * j] - p.coords[2 * j] * w[2 * j + 1];
    }
    Ok(out)
}

pub fn levi_inner(u: &ContactVector, v: &ContactVector) -> Result<f64> {
    u.base.dim.check(v.base.dim)?;
    if !u.base.approx_eq(&v.base, BASE_TOL) {
        return Err(Error::BaseMismatch);
    }
    Ok(dot(&u.xi, &v.xi))
}

/// The almost complex structure: `(a_j, b_j) -> (-b_j, a_j)`.
pub fn apply_j(v: &ContactVector) -> ContactVector {
    ContactVector {
        base: v.base.clone(),
        xi: rotate_j(&v.xi),
    }
}

/// `J` acting on interleaved coefficient vectors of `R^{2n}`.
pub fn rotate_j(xi: &[f64]) -> Vec<f64> {
    xi.chunks_exact(2).flat_map(|ab| [-ab[1], ab[0]]).collect()
}

/// The contact form `dz + sum_j (x_j dy_j - y_j dx_j)` at `p`, applied to `w`.
pub fn theta_eval(p: &HPoint, w: &[f64]) -> Result<f64> {
    if w.len() != p.dim.ambient() {
        return Err(Error::BadCoordinateLength(w.len()));
    }
    let m = p.dim.contact();
    let mut acc = w[m];
    for j in 0..p.dim.n() {
        acc += p.coords[2 * j] * w[2 * j + 1] - p.coords[2 * j + 1] * w[2 * j];
    }
    Ok(acc)
}

/// Coordinate components of a contact vector.
pub fn frame_to_coords(v: &ContactVector) -> Vec<f64> {
    let m = v.base.dim.contact();
    let mut out = v.xi.clone();
    let mut z = 0.0;
    for j in 0..v.base.dim.n() {
        let (x, y) = (v.base.coords[2 * j], v.base.coords[2 * j + 1]);
        z += v.xi[2 * j] * y - v.xi[2 * j + 1] * x;
    }
    out.push(z);
    debug_assert_eq!(out.len(), m + 1);
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dimensional constants attached to `(n, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub n: Dim,
    pub lambda: f64,
    /// `sqrt(pi) Gamma(n + 1/2) / (lambda^{2n+1} Gamma(n + 1))`.
    pub c_n: f64,
    /// Volume of the unit ball in `R^{2n-1}`.
    pub omega: f64,
    /// Area of the unit sphere `S^{2n-1}` in `R^{2n}`.
    pub s: f64,
}

impl Constants {
    pub fn new(n: Dim, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        let k = n.n() as f64;
        let c_n = std::f64::consts::PI.sqrt() * gamma(k + 0.5)
            / (lambda.powi(2 * n.n() as i32 + 1) * gamma(k + 1.0));
        Ok(Constants {
            n,
            lambda,
            c_n,
            omega: unit_ball_volume(2 * n.n() - 1),
            s: unit_sphere_area(2 * n.n() - 1),
        })
    }

    /// p-area of the Pansu sphere, `S_{2n-1} C_n`.
    pub fn pansu_area(&self) -> f64 {
        self.s * self.c_n
    }

    /// Projected p-area of the Pansu sphere along any of its p-normals, `2 C_n omega`.
    pub fn pansu_projection(&self) -> f64 {
        2.0 * self.c_n * self.omega
    }
}

pub fn constants(n: Dim, lambda: f64) -> Result<Constants> {
    Constants::new(n, lambda)
}

/// Maps a unit direction of the contact plane at the origin to the equator
/// point `p = dir / lambda` of the Pansu sphere and its p-normal there, whose
/// frame coefficients are `dir` itself.
pub fn direction_to_pansu_point(dir: &[f64], lambda: f64) -> Result<(HPoint, ContactVector)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let norm = dot(dir, dir).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection(norm));
    }
    let planar: Vec<f64> = dir.iter().map(|d| d / lambda).collect();
    let p = HPoint::from_planar(&planar, 0.0)?;
    let normal = ContactVector::new(p.clone(), dir.to_vec())?;
    Ok((p, normal))
}
