//! Hypersurfaces of `H_n` given as graphs over a closed disk of `R^{2n}`:
//! general graphs `z = +-f(x, y)`, rotationally symmetric pairs `h^+(r)`,
//! `h^-(r)`, and Pansu spheres.
//!
//! A nonsingular point carries the p-area density
//! `D = [sum_j (f_{x_j} - y_j)^2 + (f_{y_j} + x_j)^2]^{1/2}` and the p-normal
//! `N = -(1/D) sum_j [(f_{x_j} - y_j) e_{x_j} + (f_{y_j} + x_j) e_{y_j}]`,
//! leading minus sign included.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Ast, Bindings};
use crate::heisenberg::{ContactVector, Dim, HPoint};
use crate::integrate::{self, IntegralResult, QuadratureSpec};
use crate::special::unit_sphere_area;

/// Densities at or below this value mark singular points.
pub const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Upper,
    Lower,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Upper => 1.0,
            Sheet::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
    #[default]
    Both,
}

impl Side {
    pub fn sheets(self) -> &'static [Sheet] {
        match self {
            Side::Upper => &[Sheet::Upper],
            Side::Lower => &[Sheet::Lower],
            Side::Both => &[Sheet::Upper, Sheet::Lower],
        }
    }
}

/// A height function over `R^{2n}` returning its value and planar gradient.
pub trait HeightField: Send + Sync + fmt::Debug {
    fn eval(&self, planar: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// Height given by an expression in `x1..xn, y1..yn, R, lambda, pi`;
/// the gradient comes from one dual-number pass per coordinate.
#[derive(Debug, Clone)]
pub struct ExprHeight {
    ast: Ast,
    names: Vec<String>,
    radius: f64,
    lambda: f64,
}

impl ExprHeight {
    pub fn new(ast: Ast, dim: Dim, radius: f64, lambda: f64) -> Result<Self> {
        let names: Vec<String> = (1..=dim.n())
            .flat_map(|j| [format!("x{j}"), format!("y{j}")])
            .collect();
        let mut allowed: Vec<&str> = names.iter().map(String::as_str).collect();
        allowed.extend(["R", "lambda"]);
        ast.check_variables(&allowed)?;
        Ok(ExprHeight {
            ast,
            names,
            radius,
            lambda,
        })
    }
}

impl HeightField for ExprHeight {
    fn eval(&self, planar: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut b = Bindings::new().with("R", self.radius).with("lambda", self.lambda);
        for (name, v) in self.names.iter().zip(planar) {
            b.set(name, *v);
        }
        let value = expr::eval(&self.ast, &b)?;
        let grad = self
            .names
            .iter()
            .map(|name| expr::eval_dual(&self.ast, name, &b).map(|d| d.deriv))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok((value, grad))
    }
}

/// Upper half of the Pansu sphere as a height field.
#[derive(Debug, Clone, Copy)]
pub struct PansuHeight {
    pub lambda: f64,
}

impl HeightField for PansuHeight {
    fn eval(&self, planar: &[f64]) -> Result<(f64, Vec<f64>)> {
        let r = norm(planar);
        Ok((pansu_height(self.lambda, r)?, pansu_gradient(self.lambda, planar)?))
    }
}

#[derive(Debug, Clone)]
pub struct GraphSurface {
    dim: Dim,
    radius: f64,
    height: Arc<dyn HeightField>,
    side: Side,
}

impl GraphSurface {
    pub fn new(dim: Dim, radius: f64, height: Arc<dyn HeightField>, side: Side) -> Result<Self> {
        check_radius(radius)?;
        Ok(GraphSurface {
            dim,
            radius,
            height,
            side,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn side(&self) -> Side {
        self.side
    }

    fn sheet_height(&self, planar: &[f64], sheet: Sheet) -> Result<(f64, Vec<f64>)> {
        if planar.len() != self.dim.contact() {
            return Err(Error::BadCoordinateLength(planar.len() + 1));
        }
        if norm(planar) > self.radius * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain(format!(
                "|(x, y)| = {} exceeds R = {}",
                norm(planar),
                self.radius
            )));
        }
        let (f, mut grad) = self.height.eval(planar)?;
        let s = sheet.sign();
        grad.iter_mut().for_each(|g| *g *= s);
        Ok((s * f, grad))
    }

    pub fn p_area_element(&self, planar: &[f64], sheet: Sheet) -> Result<f64> {
        let (_, grad) = self.sheet_height(planar, sheet)?;
        Ok(norm(&unnormalized_normal(planar, &grad)))
    }

    pub fn p_normal(&self, planar: &[f64], sheet: Sheet) -> Result<ContactVector> {
        let (f, grad) = self.sheet_height(planar, sheet)?;
        let raw = unnormalized_normal(planar, &grad);
        let d = norm(&raw);
        if d <= SINGULAR_TOL {
            return Err(Error::SingularPoint { density: d });
        }
        ContactVector::new(
            HPoint::from_planar(planar, f)?,
            raw.iter().map(|c| c / d).collect(),
        )
    }
}

/// p-area density of the upper sheet of a graph.
pub fn p_area_element_graph(s: &GraphSurface, planar: &[f64]) -> Result<f64> {
    s.p_area_element(planar, Sheet::Upper)
}

/// p-normal of the upper sheet of a graph.
pub fn p_normal_graph(s: &GraphSurface, planar: &[f64]) -> Result<ContactVector> {
    s.p_normal(planar, Sheet::Upper)
}

/// `-(f_{x_j} - y_j, f_{y_j} + x_j)` interleaved; its length is `D`.
fn unnormalized_normal(planar: &[f64], grad: &[f64]) -> Vec<f64> {
    planar
        .chunks_exact(2)
        .zip(grad.chunks_exact(2))
        .flat_map(|(xy, g)| [-(g[0] - xy[1]), -(g[1] + xy[0])])
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("R", format!("must be positive, got {radius}")));
    }
    Ok(())
}

/// Radial profile shapes. Built-in shapes carry analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// `0`
    Flat,
    /// `sqrt(R^2 - r^2)`
    Sphere,
    /// `c (R^2 - r^2)`
    Paraboloid(f64),
    /// Pansu height with the surface's `lambda`.
    Pansu,
    /// Expression in `r, R, lambda, pi`.
    Expr(Ast),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    shape: ProfileShape,
    /// Built-in shapes are non-negative; `-1` mirrors them for lower sheets.
    sign: f64,
}

impl Profile {
    pub fn new(shape: ProfileShape) -> Self {
        Profile { shape, sign: 1.0 }
    }

    pub fn mirrored(mut self) -> Self {
        if !matches!(self.shape, ProfileShape::Expr(_)) {
            self.sign = -self.sign;
        }
        self
    }

    pub fn expression(src: &str) -> Result<Self> {
        let ast = expr::parse_str(src)?;
        ast.check_variables(&["r", "R", "lambda"])?;
        Ok(Profile::new(ProfileShape::Expr(ast)))
    }

    /// Built-in names (`pansu`, `sphere`, `paraboloid:<c>`, `flat`) or an expression.
    pub fn parse(src: &str) -> Result<Self> {
        let s = src.trim();
        match s {
            "flat" => Ok(Profile::new(ProfileShape::Flat)),
            "sphere" => Ok(Profile::new(ProfileShape::Sphere)),
            "pansu" => Ok(Profile::new(ProfileShape::Pansu)),
            _ => {
                if let Some(c) = s.strip_prefix("paraboloid:") {
                    let c: f64 = c.trim().parse().map_err(|_| {
                        Error::invalid("profile", format!("bad paraboloid coefficient in {s:?}"))
                    })?;
                    return Ok(Profile::new(ProfileShape::Paraboloid(c)));
                }
                Profile::expression(s)
            }
        }
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    /// Value and radial derivative at `r`.
    pub fn eval(&self, r: f64, radius: f64, lambda: f64) -> Result<(f64, f64)> {
        let (h, hr) = match &self.shape {
            ProfileShape::Flat => (0.0, 0.0),
            ProfileShape::Sphere => {
                let q = ((radius - r) * (radius + r)).max(0.0);
                let s = q.sqrt();
                (s, -r / s)
            }
            ProfileShape::Paraboloid(c) => (c * (radius * radius - r * r), -2.0 * c * r),
            ProfileShape::Pansu => {
                let s = pansu_root(lambda, r)?;
                (pansu_height(lambda, r)?, -lambda * r * r / s)
            }
            ProfileShape::Expr(ast) => {
                let b = Bindings::new()
                    .with("r", r)
                    .with("R", radius)
                    .with("lambda", lambda);
                let d = expr::eval_dual(ast, "r", &b)?;
                (d.value, d.deriv)
            }
        };
        Ok((self.sign * h, self.sign * hr))
    }
}

/// Rotationally symmetric surface `z = h^+(r)` (and optionally `z = h^-(r)`)
/// over the disk of radius `R`.
#[derive(Debug, Clone)]
pub struct RotationalSurface {
    dim: Dim,
    radius: f64,
    lambda: f64,
    h_plus: Profile,
    h_minus: Option<Profile>,
}

impl RotationalSurface {
    /// Checks `h^+ >= 0` and `h^- <= 0` on a 200-point grid with 1e-12 slack.
    pub fn new(
        dim: Dim,
        radius: f64,
        lambda: f64,
        h_plus: Profile,
        h_minus: Option<Profile>,
    ) -> Result<Self> {
        check_radius(radius)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        let s = RotationalSurface {
            dim,
            radius,
            lambda,
            h_plus,
            h_minus,
        };
        const GRID: usize = 200;
        for i in 0..=GRID {
            let r = radius * i as f64 / GRID as f64;
            for (sheet, profile) in s.profiles() {
                let (h, _) = profile.eval(r, radius, lambda)?;
                if sheet.sign() * h < -1e-12 {
                    return Err(Error::InvalidSurface(format!(
                        "{sheet:?} profile has the wrong sign at r = {r}: h = {h}"
                    )));
                }
            }
        }
        Ok(s)
    }

    /// Mirror-symmetric pair `h^- = -h^+` for a built-in or expression profile.
    pub fn symmetric(dim: Dim, radius: f64, profile: Profile) -> Result<Self> {
        let lower = match profile.shape() {
            ProfileShape::Expr(ast) => {
                let neg = Ast::Neg(Box::new(ast.clone()));
                Profile::new(ProfileShape::Expr(neg))
            }
            _ => profile.clone().mirrored(),
        };
        RotationalSurface::new(dim, radius, 1.0, profile, Some(lower))
    }

    pub fn flat_pair(dim: Dim, radius: f64) -> Result<Self> {
        RotationalSurface::symmetric(dim, radius, Profile::new(ProfileShape::Flat))
    }

    pub fn sphere_pair(dim: Dim, radius: f64) -> Result<Self> {
        RotationalSurface::symmetric(dim, radius, Profile::new(ProfileShape::Sphere))
    }

    pub fn paraboloid_pair(dim: Dim, radius: f64, c: f64) -> Result<Self> {
        RotationalSurface::symmetric(dim, radius, Profile::new(ProfileShape::Paraboloid(c)))
    }

    /// The Pansu sphere written with rotational profiles.
    pub fn pansu(dim: Dim, lambda: f64) -> Result<Self> {
        let p = Profile::new(ProfileShape::Pansu);
        RotationalSurface::new(dim, 1.0 / lambda, lambda, p.clone(), Some(p.mirrored()))
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn profiles(&self) -> Vec<(Sheet, &Profile)> {
        let mut out = vec![(Sheet::Upper, &self.h_plus)];
        if let Some(m) = &self.h_minus {
            out.push((Sheet::Lower, m));
        }
        out
    }

    pub fn profile(&self, sheet: Sheet) -> Result<&Profile> {
        match sheet {
            Sheet::Upper => Ok(&self.h_plus),
            Sheet::Lower => self
                .h_minus
                .as_ref()
                .ok_or_else(|| Error::InvalidSurface("surface has no lower sheet".into())),
        }
    }

    pub(crate) fn eval_profile(&self, r: f64, sheet: Sheet) -> Result<(f64, f64)> {
        if !(0.0..=self.radius * (1.0 + 1e-12)).contains(&r) {
            return Err(Error::OutOfDomain(format!("r = {r} outside [0, {}]", self.radius)));
        }
        self.profile(sheet)?.eval(r, self.radius, self.lambda)
    }
}

/// `sqrt(h_r^2 + r^2)`; the cross terms of the graph density cancel.
pub fn p_area_element_rotational(s: &RotationalSurface, r: f64, sheet: Sheet) -> Result<f64> {
    let (_, hr) = s.eval_profile(r, sheet)?;
    Ok(hr.hypot(r))
}

/// p-normal at radius `r` in unit planar direction `dir`.
pub fn p_normal_rotational(
    s: &RotationalSurface,
    r: f64,
    dir: &[f64],
    sheet: Sheet,
) -> Result<ContactVector> {
    let (h, hr) = s.eval_profile(r, sheet)?;
    let planar: Vec<f64> = dir.iter().map(|d| r * d).collect();
    let grad: Vec<f64> = dir.iter().map(|d| hr * d).collect();
    let raw = unnormalized_normal(&planar, &grad);
    let d = norm(&raw);
    if d <= SINGULAR_TOL {
        return Err(Error::SingularPoint { density: d });
    }
    ContactVector::new(
        HPoint::from_planar(&planar, h)?,
        raw.iter().map(|c| c / d).collect(),
    )
}

/// Pansu sphere `P^n_lambda`: the double graph of [`pansu_height`] over the
/// disk of radius `1/lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PansuSphere {
    dim: Dim,
    lambda: f64,
}

impl PansuSphere {
    pub fn new(dim: Dim, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        Ok(PansuSphere { dim, lambda })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn as_graph(&self) -> GraphSurface {
        GraphSurface {
            dim: self.dim,
            radius: 1.0 / self.lambda,
            height: Arc::new(PansuHeight { lambda: self.lambda }),
            side: Side::Both,
        }
    }

    pub fn as_rotational(&self) -> RotationalSurface {
        let p = Profile::new(ProfileShape::Pansu);
        RotationalSurface {
            dim: self.dim,
            radius: 1.0 / self.lambda,
            lambda: self.lambda,
            h_plus: p.clone(),
            h_minus: Some(p.mirrored()),
        }
    }
}

/// `sqrt(1 - lambda^2 r^2)`, factored to keep precision near the equator.
fn pansu_root(lambda: f64, r: f64) -> Result<f64> {
    let lr = lambda * r;
    if lr > 1.0 + 1e-12 || r < 0.0 {
        return Err(Error::OutOfDomain(format!("lambda r = {lr} outside [0, 1]")));
    }
    Ok(((1.0 - lr) * (1.0 + lr)).max(0.0).sqrt())
}

/// `f(r) = (lambda r sqrt(1 - lambda^2 r^2) + acos(lambda r)) / (2 lambda^2)`.
pub fn pansu_height(lambda: f64, r: f64) -> Result<f64> {
    let s = pansu_root(lambda, r)?;
    let lr = (lambda * r).min(1.0);
    Ok((lr * s + lr.acos()) / (2.0 * lambda * lambda))
}

/// Planar gradient of the Pansu height: `-lambda r (x_j, y_j) / sqrt(1 - lambda^2 r^2)`.
pub fn pansu_gradient(lambda: f64, planar: &[f64]) -> Result<Vec<f64>> {
    let r = norm(planar);
    if lambda * r >= 1.0 {
        return Err(Error::OutOfDomain(format!(
            "Pansu gradient is unbounded at lambda r = {}",
            lambda * r
        )));
    }
    let s = pansu_root(lambda, r)?;
    Ok(planar.iter().map(|c| -lambda * c * r / s).collect())
}

/// Frame coefficients of the upper-sheet Pansu p-normal,
/// `(lambda x_j + k y_j, lambda y_j - k x_j)` with `k = sqrt(1 - lambda^2 r^2) / r`.
pub fn pansu_normal_coeffs(lambda: f64, planar: &[f64]) -> Result<Vec<f64>> {
    let r = norm(planar);
    if r <= 0.0 {
        return Err(Error::SingularPoint { density: 0.0 });
    }
    let k = pansu_root(lambda, r)? / r;
    Ok(planar
        .chunks_exact(2)
        .flat_map(|xy| [lambda * xy[0] + k * xy[1], lambda * xy[1] - k * xy[0]])
        .collect())
}

/// `S_{2n-1} sqrt(pi) Gamma(n + 1/2) / (lambda^{2n+1} Gamma(n + 1))`.
pub fn pansu_area_closed_form(n: Dim, lambda: f64) -> Result<f64> {
    Ok(crate::heisenberg::constants(n, lambda)?.pansu_area())
}

#[derive(Debug, Clone)]
pub enum Surface {
    Graph(GraphSurface),
    Rotational(RotationalSurface),
    Pansu(PansuSphere),
}

/// A point of a surface with its parameters, p-area density and p-normal.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub r: f64,
    /// Unit vector of `S^{2n-1}`; the planar coordinates are `r * dir`.
    pub dir: Vec<f64>,
    pub sheet: Sheet,
    pub coords: HPoint,
    /// `D` at the point.
    pub density: f64,
    /// `D r^{2n-1}`, the density against `dr dS^{2n-1}`.
    pub area_density: f64,
    /// Present iff `density > SINGULAR_TOL`.
    pub normal: Option<ContactVector>,
}

impl From<GraphSurface> for Surface {
    fn from(s: GraphSurface) -> Self {
        Surface::Graph(s)
    }
}

impl From<RotationalSurface> for Surface {
    fn from(s: RotationalSurface) -> Self {
        Surface::Rotational(s)
    }
}

impl From<PansuSphere> for Surface {
    fn from(s: PansuSphere) -> Self {
        Surface::Pansu(s)
    }
}

impl Surface {
    pub fn dim(&self) -> Dim {
        match self {
            Surface::Graph(g) => g.dim,
            Surface::Rotational(s) => s.dim,
            Surface::Pansu(p) => p.dim,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            Surface::Graph(g) => g.radius,
            Surface::Rotational(s) => s.radius,
            Surface::Pansu(p) => 1.0 / p.lambda,
        }
    }

    pub fn sheets(&self) -> Vec<Sheet> {
        match self {
            Surface::Graph(g) => g.side.sheets().to_vec(),
            Surface::Rotational(s) => s.profiles().into_iter().map(|(sh, _)| sh).collect(),
            Surface::Pansu(_) => vec![Sheet::Upper, Sheet::Lower],
        }
    }

    pub fn as_rotational(&self) -> Option<RotationalSurface> {
        match self {
            Surface::Graph(_) => None,
            Surface::Rotational(s) => Some(s.clone()),
            Surface::Pansu(p) => Some(p.as_rotational()),
        }
    }

    /// p-area density as a function of `r` alone, for rotational surfaces.
    pub fn radial_density(&self, r: f64, sheet: Sheet) -> Option<Result<f64>> {
        match self {
            Surface::Graph(_) => None,
            Surface::Rotational(s) => Some(p_area_element_rotational(s, r, sheet)),
            Surface::Pansu(p) => Some(pansu_root(p.lambda, r).map(|s| r / s)),
        }
    }

    /// Evaluates the surface at planar point `r * dir` on `sheet`.
    pub fn point(&self, r: f64, dir: &[f64], sheet: Sheet) -> Result<SurfacePoint> {
        let dim = self.dim();
        if dir.len() != dim.contact() {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                found: dir.len() / 2,
            });
        }
        let planar: Vec<f64> = dir.iter().map(|d| r * d).collect();
        let (z, grad, exact_density) = match self {
            Surface::Graph(g) => {
                let (z, grad) = g.sheet_height(&planar, sheet)?;
                (z, grad, None)
            }
            Surface::Rotational(s) => {
                let (h, hr) = s.eval_profile(r, sheet)?;
                (h, dir.iter().map(|d| hr * d).collect(), None)
            }
            Surface::Pansu(p) => {
                let root = pansu_root(p.lambda, r)?;
                let sign = sheet.sign();
                let hr = -sign * p.lambda * r * r / root;
                let z = sign * pansu_height(p.lambda, r)?;
                (z, dir.iter().map(|d| hr * d).collect(), Some(r / root))
            }
        };
        let raw = unnormalized_normal(&planar, &grad);
        let raw_norm = norm(&raw);
        let density = exact_density.unwrap_or(raw_norm);
        if !density.is_finite() {
            return Err(Error::NonFinite(format!("p-area density at r = {r}")));
        }
        let coords = HPoint::from_planar(&planar, z)?;
        let normal = if density > SINGULAR_TOL {
            Some(ContactVector::new(
                coords.clone(),
                raw.iter().map(|c| c / raw_norm).collect(),
            )?)
        } else {
            None
        };
        Ok(SurfacePoint {
            r,
            dir: dir.to_vec(),
            sheet,
            coords,
            density,
            area_density: density * r.powi(2 * dim.n() as i32 - 1),
            normal,
        })
    }
}

/// p-area of a surface. Rotational surfaces reduce to
/// `S_{2n-1} sum_sheets int_0^R D(r) r^{2n-1} dr`; graphs go through the full
/// surface integral.
pub fn p_area(s: &Surface, spec: &QuadratureSpec) -> Result<IntegralResult> {
    p_area_excised(s, 0.0, spec)
}

/// p-area with the parameter ball `r < eps` removed from every sheet.
pub fn p_area_excised(s: &Surface, eps: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let radius = s.radius();
    if !(0.0..radius).contains(&eps) {
        return Err(Error::invalid("eps", format!("must lie in [0, {radius})")));
    }
    if s.as_rotational().is_none() {
        return integrate::surface_integral_range(s, &|_: &SurfacePoint| 1.0, eps, spec);
    }
    let k = 2 * s.dim().n() - 1;
    let sphere = unit_sphere_area(k);
    let mut total: Option<IntegralResult> = None;
    for sheet in s.sheets() {
        let g = |r: f64| -> f64 {
            match s.radial_density(r, sheet) {
                Some(Ok(d)) => d * r.powi(k as i32),
                _ => f64::NAN,
            }
        };
        let part = integrate::radial_integral_range(&g, eps, radius, spec)?.scaled(sphere);
        total = Some(match total {
            None => part,
            Some(t) => t.combine(&part),
        });
    }
    let mut out = total.expect("surfaces have at least one sheet");
    out.method = format!("radial x S^{k} ({})", out.method);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_str;
    use crate::heisenberg::dot;
    use std::f64::consts::PI;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    fn flat_graph(n: usize) -> GraphSurface {
        let h = ExprHeight::new(parse_str("0").unwrap(), dim(n), 2.0, 1.0).unwrap();
        GraphSurface::new(dim(n), 2.0, Arc::new(h), Side::Upper).unwrap()
    }

    #[test]
    fn pansu_height_values() {
        assert!((pansu_height(1.0, 0.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((pansu_height(2.0, 0.0).unwrap() - PI / 16.0).abs() < 1e-15);
        assert_eq!(pansu_height(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(pansu_height(2.0, 0.5).unwrap(), 0.0);
        let v = pansu_height(1.0, 0.5f64.sqrt()).unwrap();
        assert!((v - 0.5 * (0.5 + PI / 4.0)).abs() < 1e-15);
        assert!(pansu_height(1.0, 1.5).is_err());
    }

    #[test]
    fn pansu_gradient_values() {
        assert_eq!(pansu_gradient(1.0, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let g = pansu_gradient(1.0, &[0.6, 0.0]).unwrap();
        assert!((g[0] + 0.45).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        assert!(pansu_gradient(1.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn graph_density_and_normal() {
        let g = flat_graph(1);
        assert!((p_area_element_graph(&g, &[0.3, 0.4]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p_area_element_graph(&g, &[0.0, 0.0]).unwrap(), 0.0);
        let nrm = p_normal_graph(&g, &[0.0, 1.0]).unwrap();
        assert_eq!(nrm.xi(), &[1.0, 0.0]);
        assert_eq!(nrm.base().coords(), &[0.0, 1.0, 0.0]);
        assert!(matches!(
            p_normal_graph(&g, &[0.0, 0.0]),
            Err(Error::SingularPoint { .. })
        ));
        assert!(matches!(
            p_area_element_graph(&g, &[3.0, 0.0]),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn pansu_graph_density_and_poles() {
        let p = PansuSphere::new(dim(1), 1.0).unwrap().as_graph();
        let planar = [0.3, -0.4];
        let d = p_area_element_graph(&p, &planar).unwrap();
        assert!((d - 0.5 / 0.75f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            p_normal_graph(&p, &[0.0, 0.0]),
            Err(Error::SingularPoint { .. })
        ));
        let nrm = p_normal_graph(&p, &planar).unwrap();
        let expected = pansu_normal_coeffs(1.0, &planar).unwrap();
        for (a, b) in nrm.xi().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rotational_elements() {
        let pansu = RotationalSurface::pansu(dim(1), 1.0).unwrap();
        for &r in &[0.1, 0.5, 0.9] {
            let d = p_area_element_rotational(&pansu, r, Sheet::Upper).unwrap();
            assert!((d - r / (1.0 - r * r).sqrt()).abs() < 1e-14);
        }
        let flat = RotationalSurface::flat_pair(dim(1), 1.0).unwrap();
        assert_eq!(p_area_element_rotational(&flat, 0.7, Sheet::Lower).unwrap(), 0.7);
        let sphere = RotationalSurface::sphere_pair(dim(1), 1.0).unwrap();
        let r: f64 = 0.6;
        let d = p_area_element_rotational(&sphere, r, Sheet::Upper).unwrap();
        assert!((d - r * ((1.0 + 1.0 - r * r) / (1.0 - r * r)).sqrt()).abs() < 1e-14);

        // verbatim sign convention: -(h_r cos - r sin, h_r sin + r cos) / D
        let nrm = p_normal_rotational(&flat, 1.0, &[1.0, 0.0], Sheet::Upper).unwrap();
        assert_eq!(nrm.xi(), &[0.0, -1.0]);
        assert!(matches!(
            p_normal_rotational(&flat, 0.0, &[1.0, 0.0], Sheet::Upper),
            Err(Error::SingularPoint { .. })
        ));
        let nrm = p_normal_rotational(&pansu, 0.5, &[0.6, 0.8], Sheet::Upper).unwrap();
        let expected = pansu_normal_coeffs(1.0, &[0.3, 0.4]).unwrap();
        for (a, b) in nrm.xi().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rotational_sign_checks() {
        let up = Profile::parse("r^2 - 1").unwrap();
        assert!(matches!(
            RotationalSurface::new(dim(1), 1.0, 1.0, up, None),
            Err(Error::InvalidSurface(_))
        ));
        let down = Profile::parse("sphere").unwrap();
        assert!(RotationalSurface::new(dim(1), 1.0, 1.0, down.clone(), Some(down)).is_err());
        assert!(Profile::parse("paraboloid:x").is_err());
        assert!(matches!(
            Profile::parse("sqrt(q)"),
            Err(Error::Expr(crate::expr::ExprError::UnboundVariable { position: 5, .. }))
        ));
    }

    #[test]
    fn surface_points_have_unit_normals() {
        let s = Surface::Pansu(PansuSphere::new(dim(2), 1.5).unwrap());
        let dir = [0.5, -0.5, 0.5, 0.5];
        let q = s.point(0.4, &dir, Sheet::Lower).unwrap();
        let nrm = q.normal.unwrap();
        assert!((dot(nrm.xi(), nrm.xi()) - 1.0).abs() < 1e-14);
        assert!((q.area_density - q.density * 0.4f64.powi(3)).abs() < 1e-15);
        let pole = s.point(0.0, &dir, Sheet::Upper).unwrap();
        assert!(pole.normal.is_none());
        assert!((pole.coords.z() - PI / (4.0 * 2.25)).abs() < 1e-15);
    }
}
