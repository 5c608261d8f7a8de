//! Integration engines for the integrand classes that show up here:
//! inverse-square-root singularities at the rim of a disk, `|.|` kinks in the
//! angular direction, and products disk x sphere.
//!
//! Every deterministic rule sums in a fixed order (pairwise across parallel
//! parts), so results are bitwise reproducible for any thread count.

mod gauss;
mod mc;
mod sphere;
mod surface;

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gauss::GaussLegendre;
pub use mc::{mc_stream, McEstimate, McStream, CHUNK};
pub use sphere::{
    circle_rule, random_unit_vector, sphere_integral, AbsDot, CircleSample, Kinked, SphereIntegrand,
};
pub use surface::{surface_integral, surface_integral_range, AbsOf, SurfaceIntegrand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRule {
    /// Product rule for smooth integrands, Monte Carlo when a kink is
    /// declared and the sphere has dimension two or more.
    #[default]
    Auto,
    ProductAngles,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub sphere_rule: SphereRule,
    pub mc_samples: u64,
    pub seed: u64,
    pub rel_tol: f64,
    /// Substitute `r = R sin(u)` before the radial Gauss-Legendre rule.
    pub singular_endpoint: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 256,
            angular_nodes: 512,
            sphere_rule: SphereRule::Auto,
            mc_samples: 1_000_000,
            seed: 0,
            rel_tol: 1e-8,
            singular_endpoint: true,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 2 {
            return Err(Error::invalid("radial_nodes", "need at least 2 nodes"));
        }
        if self.angular_nodes < 2 {
            return Err(Error::invalid("angular_nodes", "need at least 2 nodes"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        Ok(())
    }

    /// Same rule at half the node counts, used for error estimates.
    pub(crate) fn halved(&self) -> QuadratureSpec {
        QuadratureSpec {
            radial_nodes: (self.radial_nodes / 2).max(1),
            angular_nodes: (self.angular_nodes / 2).max(2),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Absolute; node-halving difference for deterministic rules, standard
    /// error for Monte Carlo.
    pub error_estimate: f64,
    pub evaluations: u64,
    pub method: String,
    /// The error estimate exceeds `rel_tol * |value|`.
    pub flagged: bool,
    /// Present for Monte Carlo results.
    pub std_error: Option<f64>,
}

impl IntegralResult {
    pub(crate) fn deterministic(
        value: f64,
        coarse: f64,
        evaluations: u64,
        method: impl Into<String>,
        rel_tol: f64,
    ) -> Self {
        let error_estimate = (value - coarse).abs();
        IntegralResult {
            value,
            error_estimate,
            evaluations,
            method: method.into(),
            flagged: error_estimate > rel_tol * value.abs() + f64::MIN_POSITIVE,
            std_error: None,
        }
    }

    pub(crate) fn monte_carlo(est: McEstimate, method: impl Into<String>, rel_tol: f64) -> Self {
        IntegralResult {
            value: est.mean,
            error_estimate: est.std_error,
            evaluations: est.count,
            method: method.into(),
            flagged: est.std_error > rel_tol * est.mean.abs() + f64::MIN_POSITIVE,
            std_error: Some(est.std_error),
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.std_error.is_some()
    }

    pub fn scaled(mut self, k: f64) -> Self {
        self.value *= k;
        self.error_estimate *= k.abs();
        self.std_error = self.std_error.map(|s| s * k.abs());
        self
    }

    /// Sum of two independent results.
    pub fn combine(&self, other: &IntegralResult) -> IntegralResult {
        let std_error = match (self.std_error, other.std_error) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0).hypot(b.unwrap_or(0.0))),
        };
        IntegralResult {
            value: self.value + other.value,
            error_estimate: if std_error.is_some() {
                self.error_estimate.hypot(other.error_estimate)
            } else {
                self.error_estimate + other.error_estimate
            },
            evaluations: self.evaluations + other.evaluations,
            method: self.method.clone(),
            flagged: self.flagged || other.flagged,
            std_error,
        }
    }
}

/// Pairwise (cascade) summation; the order depends only on the slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Radial nodes and weights on `[a, b]`, `0 <= a < b`, including the
/// Jacobian of the sine substitution when it is enabled.
pub(crate) fn radial_nodes(a: f64, b: f64, nodes: usize, singular_endpoint: bool) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::get(nodes);
    if singular_endpoint {
        let u0 = (a / b).clamp(0.0, 1.0).asin();
        rule.on_interval(u0, FRAC_PI_2)
            .map(|(u, w)| (b * u.sin(), w * b * u.cos()))
            .collect()
    } else {
        rule.on_interval(a, b).collect()
    }
}

/// `int_0^R g(r) dr`.
///
/// With `spec.singular_endpoint` the substitution `r = R sin(u)` absorbs a
/// `1/sqrt(R^2 - r^2)` singularity at the rim before a fixed-order
/// Gauss-Legendre rule is applied; the error estimate compares against the
/// rule with half the nodes.
pub fn radial_integral(
    g: &(dyn Fn(f64) -> f64 + Sync),
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    radial_integral_range(g, 0.0, radius, spec)
}

/// `int_a^b g(r) dr`; the sine substitution is anchored at `r = 0`.
pub fn radial_integral_range(
    g: &(dyn Fn(f64) -> f64 + Sync),
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    spec.validate()?;
    if !(0.0 <= a && a < b && b.is_finite()) {
        return Err(Error::invalid("range", format!("need 0 <= a < b, got [{a}, {b}]")));
    }
    let pass = |nodes: usize| -> Result<f64> {
        let terms = radial_nodes(a, b, nodes, spec.singular_endpoint)
            .into_par_iter()
            .map(|(r, w)| {
                let v = g(r);
                if v.is_finite() {
                    Ok(w * v)
                } else {
                    Err(Error::NonFinite(format!("radial integrand at r = {r}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    };
    let fine = pass(spec.radial_nodes)?;
    let coarse = pass(spec.halved().radial_nodes)?;
    let method = if spec.singular_endpoint {
        "gauss_legendre(sine substitution)"
    } else {
        "gauss_legendre"
    };
    Ok(IntegralResult::deterministic(
        fine,
        coarse,
        (spec.radial_nodes + spec.halved().radial_nodes) as u64,
        method,
        spec.rel_tol,
    ))
}

/// `int_0^{2 pi} |amplitude cos(theta - phase)| d theta = 4 |amplitude|`,
/// independent of the phase.
pub fn angular_abs_cos_integral(amplitude: f64, _phase: f64) -> f64 {
    4.0 * amplitude.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn radial_examples() {
        let spec = QuadratureSpec::default();
        let r = radial_integral(&|r: f64| r * r / (1.0 - r * r).sqrt(), 1.0, &spec).unwrap();
        // 1 - r^2 loses digits next to the rim; the rule itself is exact here
        assert!((r.value - PI / 4.0).abs() < 1e-11, "{}", r.value);
        assert!(!r.flagged);
        let r = radial_integral(&|r: f64| r * r, 1.0, &spec).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
        let r = radial_integral(&|r: f64| r.powi(4) / (1.0 - r * r).sqrt(), 1.0, &spec).unwrap();
        assert!((r.value - 3.0 * PI / 16.0).abs() < 1e-11);
        let plain = QuadratureSpec {
            singular_endpoint: false,
            ..spec
        };
        let r = radial_integral(&|r: f64| r * r, 2.0, &plain).unwrap();
        assert!((r.value - 8.0 / 3.0).abs() < 1e-13);
        assert_eq!(r.evaluations, 384);
    }

    #[test]
    fn radial_rejects_bad_input() {
        let spec = QuadratureSpec::default();
        assert!(matches!(
            radial_integral(&|r: f64| 1.0 / (r - 0.5), 1.0, &QuadratureSpec {
                radial_nodes: 3,
                singular_endpoint: false,
                ..spec
            }),
            Err(Error::NonFinite(_))
        ));
        assert!(radial_integral(&|r: f64| r, -1.0, &spec).is_err());
        let bad = QuadratureSpec {
            radial_nodes: 1,
            ..spec
        };
        assert!(radial_integral(&|r: f64| r, 1.0, &bad).is_err());
    }

    #[test]
    fn abs_cos_closed_form() {
        assert_eq!(angular_abs_cos_integral(1.0, 0.3), 4.0);
        assert_eq!(angular_abs_cos_integral(0.0, 1.0), 0.0);
        let a = 0.5 / 0.75f64.sqrt();
        assert_eq!(angular_abs_cos_integral(a, 2.0), 4.0 * a);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_exact_data() {
        let v: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
