//! Integrals over graph-like surfaces with respect to p-area.
//!
//! Every surface here is parametrised by the planar ball `|v| <= R` in polar
//! form `v = r * dir`, one or two sheets over it. The p-area measure becomes
//! `D(r, dir) r^{2n-1} dr d(dir)`, which is what [`SurfacePoint::area_density`]
//! carries.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use rayon::prelude::*;

use super::sphere::{circle_rule, product_axis_nodes, product_grid, random_unit_vector};
use super::{mc_stream, pairwise_sum, radial_nodes, CircleSample, IntegralResult, QuadratureSpec, SphereRule};
use crate::error::{Error, Result};
use crate::special::unit_sphere_area;
use crate::surfaces::{Sheet, Surface, SurfacePoint};

/// Integrand against p-area. As with sphere integrands, an integrand of the
/// form `|s(q)|` should report `s` as its kink.
pub trait SurfaceIntegrand: Sync {
    fn value(&self, q: &SurfacePoint) -> f64;

    fn kink(&self, _q: &SurfacePoint) -> Option<f64> {
        None
    }

    fn has_kink(&self) -> bool {
        false
    }
}

impl<F: Fn(&SurfacePoint) -> f64 + Sync> SurfaceIntegrand for F {
    fn value(&self, q: &SurfacePoint) -> f64 {
        self(q)
    }
}

/// `|f(q)|`, with `f` reported as the kink.
pub struct AbsOf<F>(pub F);

impl<F: Fn(&SurfacePoint) -> f64 + Sync> SurfaceIntegrand for AbsOf<F> {
    fn value(&self, q: &SurfacePoint) -> f64 {
        (self.0)(q).abs()
    }

    fn kink(&self, q: &SurfacePoint) -> Option<f64> {
        Some((self.0)(q))
    }

    fn has_kink(&self) -> bool {
        true
    }
}

/// `int_S f dA` over the whole surface.
pub fn surface_integral(
    s: &Surface,
    f: &dyn SurfaceIntegrand,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    surface_integral_range(s, f, 0.0, spec)
}

/// `int f dA` over the part of the surface with `r >= r_min`.
///
/// For `n = 1` the angular direction is a circle and the kink-splitting rule
/// makes `|.|` integrands exact up to smoothness. For `n >= 2`, kinked
/// integrands go to Monte Carlo unless the product rule is forced.
pub fn surface_integral_range(
    s: &Surface,
    f: &dyn SurfaceIntegrand,
    r_min: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    let radius = s.radius();
    if !(0.0..radius).contains(&r_min) {
        return Err(Error::invalid("r_min", format!("must lie in [0, {radius})")));
    }
    let n = s.dim().n();
    let use_mc = match spec.sphere_rule {
        SphereRule::MonteCarlo => true,
        SphereRule::ProductAngles => false,
        SphereRule::Auto => n >= 2 && f.has_kink(),
    };
    if use_mc {
        return monte_carlo(s, f, r_min, spec);
    }
    let fine = deterministic_pass(s, f, r_min, spec)?;
    let coarse = deterministic_pass(s, f, r_min, &spec.halved())?;
    let method = if n == 1 {
        "gauss_legendre x circle(kink split)"
    } else {
        "gauss_legendre x product_angles"
    };
    let mut out = IntegralResult::deterministic(fine.0, coarse.0, fine.1 + coarse.1, method, spec.rel_tol);
    if n >= 2 && f.has_kink() {
        out.method = format!("{method}(unaligned kink)");
        out.flagged = true;
    }
    Ok(out)
}

fn weighted(f: &dyn SurfaceIntegrand, q: &SurfacePoint) -> Result<f64> {
    let v = f.value(q) * q.area_density;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("surface integrand at r = {}", q.r)))
    }
}

fn deterministic_pass(
    s: &Surface,
    f: &dyn SurfaceIntegrand,
    r_min: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, u64)> {
    let n = s.dim().n();
    let k = 2 * n - 1;
    let nodes = radial_nodes(r_min, s.radius(), spec.radial_nodes, spec.singular_endpoint);
    let grid = if n >= 2 {
        let m = product_axis_nodes(k, spec.angular_nodes) * if f.has_kink() { 2 } else { 1 };
        product_grid(k, m, false)
    } else {
        Vec::new()
    };
    let mut total = 0.0;
    let mut evals = 0;
    for sheet in s.sheets() {
        let parts = nodes
            .par_iter()
            .map(|&(r, w)| -> Result<(f64, u64)> {
                let (inner, e) = if n == 1 {
                    circle_at(s, f, r, sheet, spec.angular_nodes)?
                } else {
                    let terms = grid
                        .iter()
                        .map(|(dir, dw)| Ok(dw * weighted(f, &s.point(r, dir, sheet)?)?))
                        .collect::<Result<Vec<f64>>>()?;
                    (pairwise_sum(&terms), grid.len() as u64)
                };
                Ok((w * inner, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<f64> = parts.iter().map(|p| p.0).collect();
        total += pairwise_sum(&terms);
        evals += parts.iter().map(|p| p.1).sum::<u64>();
    }
    Ok((total, evals))
}

fn circle_at(
    s: &Surface,
    f: &dyn SurfaceIntegrand,
    r: f64,
    sheet: Sheet,
    m: usize,
) -> Result<(f64, u64)> {
    let g = |theta: f64| -> Result<CircleSample> {
        let q = s.point(r, &[theta.cos(), theta.sin()], sheet)?;
        Ok(CircleSample {
            value: weighted(f, &q)?,
            kink: f.kink(&q),
        })
    };
    circle_rule(&g, m)
}

fn monte_carlo(
    s: &Surface,
    f: &dyn SurfaceIntegrand,
    r_min: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let n = s.dim().n();
    let k = 2 * n - 1;
    let radius = s.radius();
    let sphere = if k == 1 { TAU } else { unit_sphere_area(k) };
    let sheets = s.sheets();
    let u0 = (r_min / radius).clamp(0.0, 1.0).asin();
    let stream = mc_stream(spec.seed, spec.mc_samples);
    let est = stream.estimate(|rng| {
        let (r, jac) = if spec.singular_endpoint {
            let u = u0 + (FRAC_PI_2 - u0) * rng.random::<f64>();
            (radius * u.sin(), radius * u.cos() * (FRAC_PI_2 - u0))
        } else {
            (r_min + (radius - r_min) * rng.random::<f64>(), radius - r_min)
        };
        let dir = random_unit_vector(rng, 2 * n);
        let mut sum = 0.0;
        for &sheet in &sheets {
            sum += weighted(f, &s.point(r, &dir, sheet)?)?;
        }
        Ok(sum * jac * sphere)
    })?;
    Ok(IntegralResult::monte_carlo(est, "monte_carlo(disk x sphere)", spec.rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::Dim;
    use crate::surfaces::{PansuSphere, RotationalSurface};
    use std::f64::consts::PI;

    #[test]
    fn flat_pair_area_via_full_integral() {
        let s: Surface = RotationalSurface::flat_pair(Dim::new(1).unwrap(), 1.0).unwrap().into();
        let spec = QuadratureSpec {
            radial_nodes: 64,
            angular_nodes: 64,
            ..QuadratureSpec::default()
        };
        let r = surface_integral(&s, &|_: &SurfacePoint| 1.0, &spec).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn pansu_area_n2_product_rule() {
        let s: Surface = PansuSphere::new(Dim::new(2).unwrap(), 1.0).unwrap().into();
        let spec = QuadratureSpec {
            radial_nodes: 64,
            angular_nodes: 64,
            ..QuadratureSpec::default()
        };
        let r = surface_integral(&s, &|_: &SurfacePoint| 1.0, &spec).unwrap();
        let exact = crate::surfaces::pansu_area_closed_form(Dim::new(2).unwrap(), 1.0).unwrap();
        assert!((r.value / exact - 1.0).abs() < 1e-10, "{} vs {exact}", r.value);
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let s: Surface = RotationalSurface::flat_pair(Dim::new(1).unwrap(), 1.0).unwrap().into();
        let spec = QuadratureSpec {
            sphere_rule: SphereRule::MonteCarlo,
            mc_samples: 100_000,
            seed: 3,
            ..QuadratureSpec::default()
        };
        let r = surface_integral(&s, &|_: &SurfacePoint| 1.0, &spec).unwrap();
        assert!((r.value - 4.0 * PI / 3.0).abs() < 4.0 * r.std_error.unwrap());
    }

    #[test]
    fn rejects_bad_range() {
        let s: Surface = RotationalSurface::flat_pair(Dim::new(1).unwrap(), 1.0).unwrap().into();
        let spec = QuadratureSpec::default();
        assert!(surface_integral_range(&s, &|_: &SurfacePoint| 1.0, 1.0, &spec).is_err());
    }
}
