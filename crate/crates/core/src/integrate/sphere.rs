//! Integrals over unit spheres `S^k` in `R^{k+1}`.

use std::f64::consts::{PI, TAU};

use rand_distr::{Distribution, StandardNormal};

use super::{mc_stream, pairwise_sum, GaussLegendre, IntegralResult, QuadratureSpec, SphereRule};
use crate::error::{Error, Result};
use crate::heisenberg::dot;

/// Integrand on a unit sphere.
///
/// An integrand of the form `|s(v)| w(v)` should report `s` through
/// [`SphereIntegrand::kink`] so the circle rule can split at its zeros; when
/// `s` is linear, `v -> axis . v`, reporting the axis lets the product rule
/// align its pole with it.
pub trait SphereIntegrand: Sync {
    fn value(&self, v: &[f64]) -> f64;

    fn kink(&self, _v: &[f64]) -> Option<f64> {
        None
    }

    fn has_kink(&self) -> bool {
        false
    }

    fn kink_axis(&self) -> Option<&[f64]> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> SphereIntegrand for F {
    fn value(&self, v: &[f64]) -> f64 {
        self(v)
    }
}

/// `|axis . v|`.
#[derive(Debug, Clone)]
pub struct AbsDot<'a> {
    pub axis: &'a [f64],
}

impl SphereIntegrand for AbsDot<'_> {
    fn value(&self, v: &[f64]) -> f64 {
        dot(self.axis, v).abs()
    }

    fn kink(&self, v: &[f64]) -> Option<f64> {
        Some(dot(self.axis, v))
    }

    fn has_kink(&self) -> bool {
        true
    }

    fn kink_axis(&self) -> Option<&[f64]> {
        Some(self.axis)
    }
}

/// An arbitrary integrand together with the signed factor whose zero set
/// carries its kinks.
pub struct Kinked<V, K> {
    pub value: V,
    pub kink: K,
}

impl<V, K> SphereIntegrand for Kinked<V, K>
where
    V: Fn(&[f64]) -> f64 + Sync,
    K: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, v: &[f64]) -> f64 {
        (self.value)(v)
    }

    fn kink(&self, v: &[f64]) -> Option<f64> {
        Some((self.kink)(v))
    }

    fn has_kink(&self) -> bool {
        true
    }
}

/// One evaluation on the circle: the integrand and, if the integrand has a
/// kink, the signed factor that vanishes there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSample {
    pub value: f64,
    pub kink: Option<f64>,
}

/// `int_0^{2 pi} f(theta) d theta` with `m` samples.
///
/// Without sign changes of the kink factor this is the periodic trapezoid
/// rule. Otherwise the zeros are located by safeguarded regula falsi and each
/// arc between consecutive zeros gets its own Gauss-Legendre rule, so the
/// pieces are smooth. Returns the value and the number of evaluations.
pub fn circle_rule(
    f: &dyn Fn(f64) -> Result<CircleSample>,
    m: usize,
) -> Result<(f64, u64)> {
    let h = TAU / m as f64;
    let samples = (0..m)
        .map(|i| {
            let theta = h * i as f64;
            f(theta).map(|s| (theta, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut evals = m as u64;
    for (theta, s) in &samples {
        if !s.value.is_finite() {
            return Err(Error::NonFinite(format!("circle integrand at theta = {theta}")));
        }
    }

    let signed: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|(t, s)| s.kink.filter(|k| *k != 0.0).map(|k| (*t, k)))
        .collect();
    let mut roots = Vec::new();
    for i in 0..signed.len() {
        let (t0, k0) = signed[i];
        let (mut t1, k1) = signed[(i + 1) % signed.len()];
        if k0.signum() == k1.signum() {
            continue;
        }
        if t1 <= t0 {
            t1 += TAU;
        }
        let (root, used) = bracket_root(f, t0, k0, t1, k1)?;
        evals += used;
        roots.push(root.rem_euclid(TAU));
    }

    if roots.is_empty() {
        let values: Vec<f64> = samples.iter().map(|(_, s)| s.value).collect();
        return Ok((h * pairwise_sum(&values), evals));
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut arcs = Vec::new();
    for i in 0..roots.len() {
        let a = roots[i];
        let b = if i + 1 < roots.len() { roots[i + 1] } else { roots[0] + TAU };
        if b - a > 1e-15 {
            arcs.push((a, b));
        }
    }
    let mut terms = Vec::new();
    for (a, b) in arcs {
        let q = ((m as f64 * (b - a) / TAU).ceil() as usize).max(8);
        let rule = GaussLegendre::get(q);
        for (t, w) in rule.on_interval(a, b) {
            let v = f(t)?.value;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("circle integrand at theta = {t}")));
            }
            terms.push(w * v);
        }
        evals += q as u64;
    }
    Ok((pairwise_sum(&terms), evals))
}

/// Zero of the kink factor in `(t0, t1)` given opposite signs at the ends.
fn bracket_root(
    f: &dyn Fn(f64) -> Result<CircleSample>,
    mut t0: f64,
    mut k0: f64,
    mut t1: f64,
    mut k1: f64,
) -> Result<(f64, u64)> {
    let mut evals = 0;
    let mut side = 0i8;
    for _ in 0..200 {
        if (t1 - t0).abs() <= 4.0 * f64::EPSILON * t1.abs().max(1.0) {
            break;
        }
        // Illinois variant of regula falsi, falling back to bisection when
        // the secant step leaves the bracket.
        let mut t = t1 - k1 * (t1 - t0) / (k1 - k0);
        if !(t > t0.min(t1) && t < t0.max(t1)) {
            t = 0.5 * (t0 + t1);
        }
        let k = f(t)?.kink.unwrap_or(0.0);
        evals += 1;
        if k == 0.0 {
            return Ok((t, evals));
        }
        if k.signum() == k1.signum() {
            t1 = t;
            k1 = k;
            if side == -1 {
                k0 *= 0.5;
            }
            side = -1;
        } else {
            t0 = t;
            k0 = k;
            if side == 1 {
                k1 *= 0.5;
            }
            side = 1;
        }
    }
    Ok((0.5 * (t0 + t1), evals))
}

/// `int_{S^k} h dS`.
///
/// `k = 1` uses [`circle_rule`] with `spec.angular_nodes`. For `k >= 2` the
/// product rule runs over the spherical angles with `sin`-power Jacobians;
/// if the integrand reports a linear kink axis the grid pole is rotated onto
/// it and the first polar angle is split at the equator. Kinks without an
/// axis go to Monte Carlo under [`SphereRule::Auto`].
pub fn sphere_integral(
    h: &dyn SphereIntegrand,
    k: usize,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::invalid("k", "sphere dimension must be at least 1"));
    }
    if k == 1 {
        let f = |t: f64| -> Result<CircleSample> {
            let v = [t.cos(), t.sin()];
            Ok(CircleSample {
                value: h.value(&v),
                kink: h.kink(&v),
            })
        };
        let (fine, e1) = circle_rule(&f, spec.angular_nodes)?;
        let (coarse, e2) = circle_rule(&f, spec.halved().angular_nodes)?;
        return Ok(IntegralResult::deterministic(
            fine,
            coarse,
            e1 + e2,
            "circle(kink split)",
            spec.rel_tol,
        ));
    }
    let aligned = h.kink_axis().is_some();
    let use_mc = match spec.sphere_rule {
        SphereRule::MonteCarlo => true,
        SphereRule::ProductAngles => false,
        SphereRule::Auto => h.has_kink() && !aligned,
    };
    if use_mc {
        let stream = mc_stream(spec.seed, spec.mc_samples);
        let area = crate::special::unit_sphere_area(k);
        let est = stream.estimate(|rng| {
            let v = random_unit_vector(rng, k + 1);
            Ok(area * h.value(&v))
        })?;
        return Ok(IntegralResult::monte_carlo(est, "sphere monte_carlo", spec.rel_tol));
    }
    // a kink the grid cannot follow costs an order; double the nodes
    let unaligned_kink = h.has_kink() && !aligned;
    let m = product_axis_nodes(k, spec.angular_nodes) * if unaligned_kink { 2 } else { 1 };
    let frame = h.kink_axis().map(Householder::to_axis);
    let (fine, e1) = product_rule(h, k, m, frame.as_ref())?;
    let (coarse, e2) = product_rule(h, k, (m / 2).max(2), frame.as_ref())?;
    let mut out = IntegralResult::deterministic(fine, coarse, e1 + e2, "product_angles", spec.rel_tol);
    if unaligned_kink {
        out.method = "product_angles(unaligned kink)".into();
        out.flagged = true;
    }
    Ok(out)
}

/// Nodes per angle for the product rule on `S^k`, `k >= 2`.
pub(crate) fn product_axis_nodes(k: usize, angular_nodes: usize) -> usize {
    let per_axis = (angular_nodes as f64).powf(1.0 / k as f64).ceil() as usize;
    (2 * per_axis).max(16)
}

pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Reflection taking `e_1` to a given unit vector.
#[derive(Debug, Clone)]
pub(crate) struct Householder {
    w: Vec<f64>,
    ww: f64,
}

impl Householder {
    pub(crate) fn to_axis(axis: &[f64]) -> Householder {
        let norm = dot(axis, axis).sqrt();
        let mut w: Vec<f64> = axis.iter().map(|a| -a / norm).collect();
        w[0] += 1.0;
        let ww = dot(&w, &w);
        Householder { w, ww }
    }

    pub(crate) fn apply(&self, v: &[f64], out: &mut [f64]) {
        if self.ww < 1e-28 {
            out.copy_from_slice(v);
            return;
        }
        let c = 2.0 * dot(&self.w, v) / self.ww;
        for ((o, x), w) in out.iter_mut().zip(v).zip(&self.w) {
            *o = x - c * w;
        }
    }
}

/// Tensor rule on `S^k`, `k >= 2`: Gauss-Legendre in the polar angles
/// `phi_1..phi_{k-1}` (Jacobian `prod sin^{k-i} phi_i`) and the periodic
/// trapezoid in the azimuth. With a frame, `phi_1` is split at `pi/2` and the
/// grid is reflected so its pole lies on the frame axis.
pub(crate) fn product_rule(
    h: &dyn SphereIntegrand,
    k: usize,
    m: usize,
    frame: Option<&Householder>,
) -> Result<(f64, u64)> {
    let grid = product_grid(k, m, frame.is_some());
    let mut world = vec![0.0; k + 1];
    let mut terms = Vec::with_capacity(grid.len());
    for (v, w) in &grid {
        let x = match frame {
            Some(fr) => {
                fr.apply(v, &mut world);
                &world[..]
            }
            None => &v[..],
        };
        let val = h.value(x);
        if !val.is_finite() {
            return Err(Error::NonFinite("sphere integrand".into()));
        }
        terms.push(w * val);
    }
    Ok((pairwise_sum(&terms), grid.len() as u64))
}

/// Points and weights of the product rule on `S^k`.
pub(crate) fn product_grid(k: usize, m: usize, split_first: bool) -> Vec<(Vec<f64>, f64)> {
    let polar: Vec<(f64, f64)> = GaussLegendre::get(m).on_interval(0.0, PI).collect();
    let first: Vec<(f64, f64)> = if split_first {
        let rule = GaussLegendre::get(m.div_ceil(2).max(2));
        rule.on_interval(0.0, PI / 2.0)
            .chain(rule.on_interval(PI / 2.0, PI))
            .collect()
    } else {
        polar.clone()
    };
    let mut out = Vec::new();
    let mut v = vec![0.0; k + 1];
    fill_grid(0, k, m, &first, &polar, 1.0, 1.0, &mut v, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn fill_grid(
    level: usize,
    k: usize,
    m: usize,
    first: &[(f64, f64)],
    polar: &[(f64, f64)],
    sin_prefix: f64,
    weight: f64,
    v: &mut Vec<f64>,
    out: &mut Vec<(Vec<f64>, f64)>,
) {
    if level + 1 == k {
        let h = std::f64::consts::TAU / m as f64;
        for t in 0..m {
            let theta = h * t as f64;
            v[k - 1] = sin_prefix * theta.cos();
            v[k] = sin_prefix * theta.sin();
            out.push((v.clone(), weight * h));
        }
        return;
    }
    let nodes = if level == 0 { first } else { polar };
    let power = (k - 1 - level) as i32;
    for &(phi, w) in nodes {
        let (s, c) = phi.sin_cos();
        v[level] = sin_prefix * c;
        fill_grid(level + 1, k, m, first, polar, sin_prefix * s, weight * w * s.powi(power), v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{unit_ball_volume, unit_sphere_area};

    #[test]
    fn constant_integrands() {
        let spec = QuadratureSpec::default();
        let one = |_: &[f64]| 1.0;
        let r = sphere_integral(&one, 1, &spec).unwrap();
        assert!((r.value - TAU).abs() < 1e-13);
        let r = sphere_integral(&one, 3, &spec).unwrap();
        assert!((r.value - 2.0 * PI * PI).abs() < 1e-12);
        for k in 2..=5 {
            let r = sphere_integral(&one, k, &spec).unwrap();
            assert!((r.value / unit_sphere_area(k) - 1.0).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn abs_dot_is_twice_the_ball_volume() {
        let spec = QuadratureSpec::default();
        let u4 = [0.5, -0.5, 0.5, 0.5];
        let r = sphere_integral(&AbsDot { axis: &u4 }, 3, &spec).unwrap();
        assert!((r.value - 8.0 * PI / 3.0).abs() < 1e-10, "{}", r.value);
        assert!((r.value - 2.0 * unit_ball_volume(3)).abs() < 1e-10);
        let u2 = [0.6, 0.8];
        let r = sphere_integral(&AbsDot { axis: &u2 }, 1, &spec).unwrap();
        assert!((r.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn kinks_on_the_circle_are_exact() {
        let spec = QuadratureSpec {
            angular_nodes: 64,
            ..QuadratureSpec::default()
        };
        for i in 0..100 {
            let c = 0.0628 * i as f64 + 0.01;
            let h = Kinked {
                value: |v: &[f64]| (v[0] * c.cos() + v[1] * c.sin()).abs(),
                kink: |v: &[f64]| v[0] * c.cos() + v[1] * c.sin(),
            };
            let r = sphere_integral(&h, 1, &spec).unwrap();
            assert!((r.value - 4.0).abs() < 1e-14, "phase {c}: {}", r.value);
        }
    }

    #[test]
    fn unaligned_kink_uses_monte_carlo_under_auto() {
        let spec = QuadratureSpec {
            mc_samples: 200_000,
            seed: 9,
            ..QuadratureSpec::default()
        };
        let h = Kinked {
            value: |v: &[f64]| v[2].abs(),
            kink: |v: &[f64]| v[2],
        };
        let r = sphere_integral(&h, 2, &spec).unwrap();
        assert!(r.is_monte_carlo());
        assert!((r.value - TAU).abs() < 4.0 * r.std_error.unwrap());
        let forced = QuadratureSpec {
            sphere_rule: SphereRule::ProductAngles,
            ..spec
        };
        let r = sphere_integral(&h, 2, &forced).unwrap();
        assert!(r.flagged);
        assert!((r.value - TAU).abs() < 1e-2);
    }

    #[test]
    fn householder_maps_e1_to_axis() {
        let axis = [0.0, 0.6, 0.0, -0.8];
        let h = Householder::to_axis(&axis);
        let mut out = [0.0; 4];
        h.apply(&[1.0, 0.0, 0.0, 0.0], &mut out);
        for (a, b) in out.iter().zip(&axis) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
