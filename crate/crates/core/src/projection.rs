//! Projected p-areas.
//!
//! The projected p-area of `S` along a unit p-normal `N~(p)` of a Pansu
//! sphere is `int_S |L_{q p^-1 *} N~(p) . N(q)| dA_q`. Left translations keep
//! frame coefficients, so the pairing only depends on the coefficient vector
//! `dir` of `N~(p)`, and the integrand is `|dir . xi(N(q))|`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{
    direction_to_pansu_point, dot, group_inv, group_mul, levi_inner, pushforward, AmbientVector,
    ContactVector, Dim, HPoint,
};
use crate::integrate::{
    radial_integral, sphere_integral, surface_integral, AbsDot, AbsOf, IntegralResult,
    QuadratureSpec, SphereRule,
};
use crate::special::unit_ball_volume;
use crate::surfaces::{PansuSphere, RotationalSurface, Sheet, Surface, SurfacePoint};

/// A unit p-normal of a Pansu sphere, with its coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PansuDirection {
    pub p: HPoint,
    pub normal: ContactVector,
    pub dir: Vec<f64>,
}

impl PansuDirection {
    /// The equator point `dir / lambda` with normal coefficients `dir`.
    pub fn from_dir(dir: &[f64], lambda: f64) -> Result<Self> {
        let (p, normal) = direction_to_pansu_point(dir, lambda)?;
        Ok(PansuDirection {
            p,
            normal,
            dir: dir.to_vec(),
        })
    }

    /// The p-normal at an arbitrary nonsingular point `r * unit` of the
    /// Pansu sphere.
    pub fn at_point(sphere: &PansuSphere, r: f64, unit: &[f64], sheet: Sheet) -> Result<Self> {
        let q = Surface::Pansu(*sphere).point(r, unit, sheet)?;
        let normal = q.normal.ok_or(Error::SingularPoint { density: q.density })?;
        let dir = normal.xi().to_vec();
        Ok(PansuDirection {
            p: q.coords,
            normal,
            dir,
        })
    }

    /// `count` directions drawn uniformly from `S^{2n-1}`.
    pub fn random(n: Dim, lambda: f64, count: usize, seed: u64) -> Result<Vec<Self>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let dir = crate::integrate::random_unit_vector(&mut rng, n.contact());
                PansuDirection::from_dir(&dir, lambda)
            })
            .collect()
    }
}

/// The vector `u(0) = (sin a cos b, sin a sin b, cos a)` at the origin of `H_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientDirection {
    pub alpha: f64,
    pub beta: f64,
}

impl AmbientDirection {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::NonFinite("ambient direction angles".into()));
        }
        Ok(AmbientDirection { alpha, beta })
    }

    pub fn at_origin(&self) -> Result<AmbientVector> {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        AmbientVector::new(HPoint::origin(Dim::new(1)?), vec![sa * cb, sa * sb], ca)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionDecomposition {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub phase: f64,
}

fn check_direction(s: &Surface, dir: &[f64]) -> Result<()> {
    let dim = s.dim();
    if dir.len() != dim.contact() {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            found: dir.len() / 2,
        });
    }
    let norm = dot(dir, dir).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection(norm));
    }
    Ok(())
}

/// Projected p-area of `s` along `d`.
pub fn projected_parea(s: &Surface, d: &PansuDirection, spec: &QuadratureSpec) -> Result<IntegralResult> {
    projected_parea_dir(s, &d.dir, spec)
}

/// Projected p-area along the contact direction with coefficients `dir`.
pub fn projected_parea_dir(s: &Surface, dir: &[f64], spec: &QuadratureSpec) -> Result<IntegralResult> {
    check_direction(s, dir)?;
    let f = AbsOf(|q: &SurfacePoint| q.normal.as_ref().map_or(0.0, |nq| dot(dir, nq.xi())));
    surface_integral(s, &f, spec)
}

/// `L_{q p^-1 *} N~(p) . N(q)` computed by composing the translations.
pub fn transported_pairing(d: &PansuDirection, q: &SurfacePoint) -> Result<f64> {
    let nq = q
        .normal
        .as_ref()
        .ok_or(Error::SingularPoint { density: q.density })?;
    let g = group_mul(&q.coords, &group_inv(&d.p))?;
    let moved = pushforward(&g, &d.normal)?;
    levi_inner(&moved, nq)
}

/// Projected p-area of an `H_1` surface along an arbitrary tangent vector
/// `u(0)` at the origin, left translated to each point.
pub fn projected_parea_ambient(
    s: &Surface,
    u: &AmbientDirection,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    if s.dim().n() != 1 {
        return Err(Error::invalid("n", "ambient directions are implemented for n = 1 only"));
    }
    let u0 = u.at_origin()?;
    let f = AbsOf(|q: &SurfacePoint| {
        let Some(nq) = q.normal.as_ref() else {
            return 0.0;
        };
        match u0.pushforward(&q.coords) {
            Ok(moved) => levi_inner(&moved.contact_part(), nq).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    });
    surface_integral(s, &f, spec)
}

/// Which sufficient condition on the profiles was found to hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCheck {
    pub continuous: Vec<Sheet>,
    pub bounded: Vec<Sheet>,
}

impl ProfileCheck {
    pub fn satisfied(&self) -> bool {
        !self.continuous.is_empty() || !self.bounded.is_empty()
    }
}

/// Samples `h_r` on a 1000-point grid of `[0, R]` and tests, per sheet,
/// whether it looks continuous up to the rim (finite, with no increment
/// more than 50 times the median one) and whether
/// `|h_r| <= r / sqrt(R^2 - r^2)` on `[0, R)`.
pub fn check_profile_conditions(s: &RotationalSurface) -> ProfileCheck {
    const GRID: usize = 1000;
    let radius = s.radius();
    let mut out = ProfileCheck {
        continuous: Vec::new(),
        bounded: Vec::new(),
    };
    for (sheet, _) in s.profiles() {
        let hr: Vec<f64> = (0..=GRID)
            .map(|i| {
                let r = radius * i as f64 / GRID as f64;
                s.eval_profile(r, sheet).map_or(f64::NAN, |(_, d)| d)
            })
            .collect();
        let bounded = hr[..GRID].iter().enumerate().all(|(i, d)| {
            let r = radius * i as f64 / GRID as f64;
            let bound = r / (radius * radius - r * r).sqrt();
            d.is_finite() && d.abs() <= bound * (1.0 + 1e-9) + 1e-12
        });
        if bounded {
            out.bounded.push(sheet);
        }
        if hr.iter().all(|d| d.is_finite()) {
            let mut inc: Vec<f64> = hr.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            let max = inc.iter().cloned().fold(0.0, f64::max);
            inc.sort_by(f64::total_cmp);
            let median = inc[inc.len() / 2];
            if max <= 50.0 * median + 1e-9 {
                out.continuous.push(sheet);
            }
        }
    }
    out
}

/// Closed form of the projected p-area of a rotational surface, the same
/// along every contact direction:
/// `2 omega_{2n-1} sum_sheets int_0^R r^{2n-1} sqrt(h_r^2 + r^2) dr`.
/// For `n = 1` the prefactor is 4.
pub fn rotational_projection_closed_form(
    s: &RotationalSurface,
    spec: &QuadratureSpec,
) -> Result<(IntegralResult, ProfileCheck)> {
    let check = check_profile_conditions(s);
    let k = 2 * s.dim().n() - 1;
    let mut total: Option<IntegralResult> = None;
    for (sheet, _) in s.profiles() {
        let g = |r: f64| {
            s.eval_profile(r, sheet)
                .map_or(f64::NAN, |(_, hr)| r.powi(k as i32) * hr.hypot(r))
        };
        let part = radial_integral(&g, s.radius(), spec)?;
        total = Some(match total {
            None => part,
            Some(t) => t.combine(&part),
        });
    }
    let out = total
        .expect("rotational surfaces have an upper sheet")
        .scaled(2.0 * unit_ball_volume(k));
    Ok((out, check))
}

/// The coefficients `A`, `B` of `|L_{q p^-1 *} N~(p) . N~(q)| D(q)` on a Pansu
/// sphere, for `p` at radius `r` and `q` at radius `rbar`.
pub fn decompose_ab(r: f64, rbar: f64, lambda: f64) -> Result<ProjectionDecomposition> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    for (name, v) in [("r", r), ("rbar", rbar)] {
        if !(v > 0.0 && lambda * v < 1.0) {
            return Err(Error::OutOfDomain(format!("{name} = {v} outside (0, 1/lambda)")));
        }
    }
    let s = ((1.0 - lambda * r) * (1.0 + lambda * r)).sqrt();
    let sbar = ((1.0 - lambda * rbar) * (1.0 + lambda * rbar)).sqrt();
    let a = lambda * lambda * rbar * rbar * r / sbar + rbar * s;
    let b = -lambda * rbar * rbar * s / sbar + lambda * r * rbar;
    Ok(ProjectionDecomposition {
        a,
        b,
        amplitude: a.hypot(b),
        phase: b.atan2(a),
    })
}

/// `int_{S^{n-1}} |u . v| dS_v` in `R^n`.
pub fn euclid_sphere_projection(n: usize, u: &[f64], spec: &QuadratureSpec) -> Result<IntegralResult> {
    if n < 2 {
        return Err(Error::invalid("n", "need n >= 2"));
    }
    if u.len() != n {
        return Err(Error::invalid("u", format!("expected {n} components, got {}", u.len())));
    }
    let norm = dot(u, u).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection(norm));
    }
    let spec = QuadratureSpec {
        sphere_rule: match spec.sphere_rule {
            SphereRule::Auto => SphereRule::ProductAngles,
            r => r,
        },
        ..*spec
    };
    sphere_integral(&AbsDot { axis: u }, n - 1, &spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{GraphSurface, PansuHeight, Side};
    use std::f64::consts::{FRAC_PI_2, PI};
    use std::sync::Arc;

    fn d1() -> Dim {
        Dim::new(1).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn pansu_projection_is_two_pi() {
        let s: Surface = PansuSphere::new(d1(), 1.0).unwrap().into();
        for dir in [[1.0, 0.0], [0.6, -0.8]] {
            let d = PansuDirection::from_dir(&dir, 1.0).unwrap();
            let v = projected_parea(&s, &d, &spec()).unwrap();
            assert!((v.value / (2.0 * PI) - 1.0).abs() < 1e-10, "{}", v.value);
        }
    }

    #[test]
    fn flat_disks() {
        let pair: Surface = RotationalSurface::flat_pair(d1(), 1.0).unwrap().into();
        let v = projected_parea_dir(&pair, &[0.0, 1.0], &spec()).unwrap();
        assert!((v.value - 8.0 / 3.0).abs() < 1e-10);
        let one = RotationalSurface::new(d1(), 1.0, 1.0, crate::surfaces::Profile::parse("flat").unwrap(), None)
            .unwrap()
            .into();
        let v = projected_parea_dir(&one, &[1.0, 0.0], &spec()).unwrap();
        assert!((v.value - 4.0 / 3.0).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn ambient_sin_alpha_law() {
        let s: Surface = PansuSphere::new(d1(), 1.0).unwrap().into();
        let v = projected_parea_ambient(&s, &AmbientDirection::new(PI / 6.0, 0.4).unwrap(), &spec()).unwrap();
        assert!((v.value - PI).abs() < 1e-9, "{}", v.value);
        let v = projected_parea_ambient(&s, &AmbientDirection::new(0.0, 0.4).unwrap(), &spec()).unwrap();
        assert!(v.value.abs() < 1e-10);
        let h2: Surface = PansuSphere::new(Dim::new(2).unwrap(), 1.0).unwrap().into();
        assert!(projected_parea_ambient(&h2, &AmbientDirection::new(1.0, 0.0).unwrap(), &spec()).is_err());
    }

    #[test]
    fn closed_forms() {
        let (v, check) = rotational_projection_closed_form(&RotationalSurface::flat_pair(d1(), 1.0).unwrap(), &spec()).unwrap();
        assert!((v.value - 8.0 / 3.0).abs() < 1e-13);
        assert!(check.satisfied());
        let (v, _) = rotational_projection_closed_form(&RotationalSurface::pansu(d1(), 1.0).unwrap(), &spec()).unwrap();
        assert!((v.value - 2.0 * PI).abs() < 1e-10, "{}", v.value);
        let (v, check) = rotational_projection_closed_form(&RotationalSurface::sphere_pair(d1(), 1.0).unwrap(), &spec()).unwrap();
        assert!((v.value - 6.992_153_478_112_319).abs() < 1e-9, "{}", v.value);
        assert!(check.satisfied());
        assert!(check.continuous.is_empty());
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_ab(0.5, 0.5, 1.0).unwrap();
        let amp = 0.5 / 0.75f64.sqrt();
        assert!((d.amplitude - amp).abs() < 1e-15);
        assert!(d.b.abs() < 1e-15);
        assert!((d.a - amp).abs() < 1e-15);
        assert!(decompose_ab(1.0, 0.5, 1.0).is_err());
        assert!(decompose_ab(0.2, 0.3, 4.0).is_err());
        assert!(decompose_ab(0.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn euclid_baseline() {
        let v = euclid_sphere_projection(2, &[0.6, 0.8], &spec()).unwrap();
        assert!((v.value - 4.0).abs() < 1e-12);
        let v = euclid_sphere_projection(3, &[0.0, 0.6, 0.8], &spec()).unwrap();
        assert!((v.value - 2.0 * PI).abs() < 1e-10);
        assert!(euclid_sphere_projection(1, &[1.0], &spec()).is_err());
        assert!(euclid_sphere_projection(3, &[1.0, 1.0, 0.0], &spec()).is_err());
    }

    #[test]
    fn interior_and_equator_directions_agree() {
        let sphere = PansuSphere::new(d1(), 1.0).unwrap();
        let s: Surface = sphere.into();
        let unit = [FRAC_PI_2.cos(), FRAC_PI_2.sin()];
        let inner = PansuDirection::at_point(&sphere, 0.4, &unit, Sheet::Lower).unwrap();
        let equator = PansuDirection::from_dir(&inner.dir, 1.0).unwrap();
        let a = projected_parea(&s, &inner, &spec()).unwrap();
        let b = projected_parea(&s, &equator, &spec()).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn transport_chain_matches_shortcut() {
        let sphere = PansuSphere::new(d1(), 1.0).unwrap();
        let s: Surface = GraphSurface::new(d1(), 1.0, Arc::new(PansuHeight { lambda: 1.0 }), Side::Upper)
            .unwrap()
            .into();
        let d = PansuDirection::at_point(&sphere, 0.3, &[0.6, 0.8], Sheet::Upper).unwrap();
        for i in 1..20 {
            let t = i as f64 * 0.3;
            let q = s.point(0.05 * i as f64, &[t.cos(), t.sin()], Sheet::Upper).unwrap();
            let chain = transported_pairing(&d, &q).unwrap();
            let short = dot(&d.dir, q.normal.as_ref().unwrap().xi());
            assert!((chain - short).abs() <= 1e-14);
        }
    }
}
