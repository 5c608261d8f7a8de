//! Verification runs: each compares computed quantities against closed forms
//! or independent oracles and records one [`ReportRow`] per comparison.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{Constants, Dim};
use crate::integrate::{sphere_integral, surface_integral, IntegralResult, QuadratureSpec, SphereRule};
use crate::projection::{
    euclid_sphere_projection, projected_parea, projected_parea_ambient, projected_parea_dir,
    rotational_projection_closed_form, AmbientDirection, PansuDirection,
};
use crate::special::{unit_ball_volume, unit_sphere_area};
use crate::surfaces::{p_area, PansuSphere, RotationalSurface, Surface, SurfacePoint};

/// Reference values computed once with 30-digit quadrature and frozen.
pub mod golden {
    /// `int_0^1 r^2 sqrt((2 - r^2) / (1 - r^2)) dr`
    pub const SPHERE_PAIR_RADIAL: f64 = 0.874_019_184_764_039_9;
    /// Projected p-area of the sphere pair `R = 1` in `H_1`.
    pub const SPHERE_PAIR_PROJECTION: f64 = 6.992_153_478_112_319;
    /// p-area of the sphere pair `R = 1` in `H_1`.
    pub const SPHERE_PAIR_AREA: f64 = 10.983_248_999_804_992;
    /// Projected p-area of the paraboloid pair `h = +-(1 - r^2)`: `8 sqrt(5) / 3`.
    pub const PARABOLOID_PAIR_PROJECTION: f64 = 5.962_847_939_999_439;
    /// p-area of the paraboloid pair: `4 pi sqrt(5) / 3`.
    pub const PARABOLOID_PAIR_AREA: f64 = 9.366_419_641_387_635;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    PansuProjection,
    Cauchy,
    Anydirection,
    RotationalConstancy,
    LemmaKr,
    ExpectedValue,
    PansuArea,
}

impl Which {
    pub const ALL: [Which; 7] = [
        Which::PansuArea,
        Which::PansuProjection,
        Which::Cauchy,
        Which::Anydirection,
        Which::RotationalConstancy,
        Which::LemmaKr,
        Which::ExpectedValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Which::PansuProjection => "pansu_projection",
            Which::Cauchy => "cauchy",
            Which::Anydirection => "anydirection",
            Which::RotationalConstancy => "rotational_constancy",
            Which::LemmaKr => "lemma_kr",
            Which::ExpectedValue => "expected_value",
            Which::PansuArea => "pansu_area",
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Which::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::invalid("which", format!("unknown verification {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub which: Which,
    pub n: Dim,
    pub lambda: f64,
    /// The surface under test; each run has a default.
    pub surface: Option<Surface>,
    /// Number of sampled directions (or unit vectors for `lemma_kr`).
    pub samples: usize,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    /// Overrides the per-run default tolerance.
    pub tol: Option<f64>,
    /// Record wall-clock seconds; off by default so reports are reproducible.
    pub timing: bool,
}

impl VerifyConfig {
    pub fn new(which: Which) -> Self {
        VerifyConfig {
            which,
            n: Dim::new(1).expect("1 is a valid dimension"),
            lambda: 1.0,
            surface: None,
            samples: 20,
            seed: 0,
            quadrature: QuadratureSpec::default(),
            tol: None,
            timing: false,
        }
    }

    fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::invalid("tol", "must be positive"));
            }
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", "must be positive"));
        }
        Ok(())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub case_id: String,
    pub computed: f64,
    pub expected: f64,
    /// Relative error, or absolute error when `expected == 0`.
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub evaluations: u64,
    pub seconds: f64,
    pub error_estimate: f64,
    pub std_error: Option<f64>,
}

impl ReportRow {
    pub fn new(case_id: impl Into<String>, computed: f64, expected: f64, tol: f64) -> Self {
        let diff = (computed - expected).abs();
        let rel_err = if expected == 0.0 { diff } else { diff / expected.abs() };
        ReportRow {
            case_id: case_id.into(),
            computed,
            expected,
            rel_err,
            tol,
            pass: rel_err.is_finite() && rel_err >= 0.0 && rel_err <= tol,
            evaluations: 0,
            seconds: 0.0,
            error_estimate: 0.0,
            std_error: None,
        }
    }

    /// Row for an integral; Monte Carlo rows must also lie within four
    /// standard errors of the expected value.
    pub fn from_result(case_id: impl Into<String>, r: &IntegralResult, expected: f64, tol: f64) -> Self {
        let mut row = ReportRow::new(case_id, r.value, expected, tol);
        row.evaluations = r.evaluations;
        row.error_estimate = r.error_estimate;
        row.std_error = r.std_error;
        if let Some(se) = r.std_error {
            row.pass &= (r.value - expected).abs() <= 4.0 * se;
        }
        row
    }

    fn timed(mut self, start: Option<Instant>) -> Self {
        if let Some(t) = start {
            self.seconds = t.elapsed().as_secs_f64();
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
}

pub const CSV_COLUMNS: [&str; 8] = [
    "case_id",
    "computed",
    "expected",
    "rel_err",
    "tol",
    "pass",
    "evaluations",
    "seconds",
];

impl Report {
    pub fn new() -> Self {
        Report {
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.notes.extend(other.notes);
    }

    pub fn sorted(mut self) -> Self {
        self.rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// CSV with the given header lines written first as `#` comments.
    pub fn to_csv(&self, header: &[String]) -> Result<String> {
        let mut out = String::new();
        for line in header.iter().chain(&self.notes) {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        };
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.case_id.clone(),
                r.computed.to_string(),
                r.expected.to_string(),
                r.rel_err.to_string(),
                r.tol.to_string(),
                r.pass.to_string(),
                r.evaluations.to_string(),
                r.seconds.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

fn clock(cfg: &VerifyConfig) -> Option<Instant> {
    cfg.timing.then(Instant::now)
}

fn d1() -> Dim {
    Dim::new(1).expect("1 is a valid dimension")
}

pub fn run(cfg: &VerifyConfig) -> Result<Report> {
    cfg.validate()?;
    let report = match cfg.which {
        Which::PansuProjection => verify_pansu_projection(cfg)?,
        Which::Cauchy => verify_cauchy(cfg)?,
        Which::Anydirection => verify_anydirection(cfg)?,
        Which::RotationalConstancy => verify_rotational_constancy(cfg)?,
        Which::LemmaKr => verify_lemma_kr(cfg)?,
        Which::ExpectedValue => expected_projection(cfg)?,
        Which::PansuArea => verify_pansu_area(cfg)?,
    };
    Ok(report.sorted())
}

/// Quadrature p-area of `P^n_lambda` against `S_{2n-1} C_n`.
pub fn verify_pansu_area(cfg: &VerifyConfig) -> Result<Report> {
    let t = clock(cfg);
    let c = Constants::new(cfg.n, cfg.lambda)?;
    let s: Surface = PansuSphere::new(cfg.n, cfg.lambda)?.into();
    let r = p_area(&s, &cfg.quadrature)?;
    let id = format!("pansu_area/n{}/lambda{}", cfg.n.n(), cfg.lambda);
    let mut report = Report::new();
    report
        .rows
        .push(ReportRow::from_result(id, &r, c.pansu_area(), cfg.tol_or(1e-8)).timed(t));
    Ok(report)
}

/// Projected p-area of `P^n_lambda` along sampled p-normals against
/// `2 C_n omega_{2n-1}`. For `n = 1` the deterministic engine is used and the
/// `lambda^{-(2n+1)}` scaling is checked as well; for `n >= 2` the angular
/// factor is sampled by Monte Carlo with a fresh seed per direction.
pub fn verify_pansu_projection(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.n;
    let c = Constants::new(n, cfg.lambda)?;
    let s: Surface = PansuSphere::new(n, cfg.lambda)?.into();
    let dirs = PansuDirection::random(n, cfg.lambda, cfg.samples, cfg.seed)?;
    let tol = cfg.tol_or(if n.n() == 1 { 1e-6 } else { 1e-2 });
    let mut report = Report::new();
    for (i, d) in dirs.iter().enumerate() {
        let t = clock(cfg);
        let spec = QuadratureSpec {
            seed: cfg.quadrature.seed.wrapping_add(i as u64),
            ..cfg.quadrature
        };
        let r = projected_parea(&s, d, &spec)?;
        let id = format!("pansu_projection/n{}/lambda{}/dir{:02}", n.n(), cfg.lambda, i);
        report
            .rows
            .push(ReportRow::from_result(id, &r, c.pansu_projection(), tol).timed(t));
    }
    if n.n() == 1 {
        let t = clock(cfg);
        let dir = dirs.first().map_or(vec![1.0, 0.0], |d| d.dir.clone());
        let at = |lambda: f64| -> Result<f64> {
            let s: Surface = PansuSphere::new(n, lambda)?.into();
            Ok(projected_parea_dir(&s, &dir, &cfg.quadrature)?.value)
        };
        let base = at(1.0)?;
        for lambda in [0.5, 2.0] {
            let ratio = at(lambda)? * lambda.powi(2 * n.n() as i32 + 1) / base;
            let id = format!("pansu_projection/n1/scaling/lambda{lambda}");
            report.rows.push(ReportRow::new(id, ratio, 1.0, 1e-6).timed(t));
        }
    }
    Ok(report)
}

/// Outer rule for the literal double integral over the Pansu sphere.
fn outer_spec(inner: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        radial_nodes: 8,
        angular_nodes: 16,
        sphere_rule: SphereRule::ProductAngles,
        ..*inner
    }
}

/// Inner rule for the double integral, coarser than the single integrals.
fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        radial_nodes: spec.radial_nodes.min(64),
        angular_nodes: spec.angular_nodes.min(128),
        ..*spec
    }
}

/// `int_P A(S | N~(p)^perp) dA_p` taken literally as a surface integral over
/// `P^n_lambda`, with the inner projection recomputed at every outer node.
pub fn pansu_outer_literal(sigma: &Surface, lambda: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let pansu: Surface = PansuSphere::new(sigma.dim(), lambda)?.into();
    let inner = inner_spec(spec);
    let f = |p: &SurfacePoint| -> f64 {
        match &p.normal {
            Some(np) => projected_parea_dir(sigma, np.xi(), &inner).map_or(f64::NAN, |r| r.value),
            None => 0.0,
        }
    };
    surface_integral(&pansu, &f, &outer_spec(spec))
}

/// The same integral written as `(A(P) / S_{2n-1}) int_{S^{2n-1}} A(S | u^perp) du`,
/// which holds because `p -> dir(p)` pushes p-area forward to a multiple of
/// the uniform measure.
pub fn pansu_outer_factored(sigma: &Surface, lambda: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let n = sigma.dim();
    let k = 2 * n.n() - 1;
    let c = Constants::new(n, lambda)?;
    let inner = inner_spec(spec);
    let h = |u: &[f64]| -> f64 { projected_parea_dir(sigma, u, &inner).map_or(f64::NAN, |r| r.value) };
    let r = sphere_integral(&h, k, &outer_spec(spec))?;
    Ok(r.scaled(c.pansu_area() / unit_sphere_area(k)))
}

fn named_surface(name: &str) -> Result<Surface> {
    Ok(match name {
        "pansu_lambda2" => PansuSphere::new(d1(), 2.0)?.into(),
        "pansu_lambda1" => PansuSphere::new(d1(), 1.0)?.into(),
        "sphere_pair" => RotationalSurface::sphere_pair(d1(), 1.0)?.into(),
        "paraboloid_pair" => RotationalSurface::paraboloid_pair(d1(), 1.0, 1.0)?.into(),
        "flat_pair" => RotationalSurface::flat_pair(d1(), 1.0)?.into(),
        _ => return Err(Error::invalid("surface", format!("unknown test surface {name:?}"))),
    })
}

/// Both sides of the Cauchy-type formula for one surface: the p-area against
/// `(1 / (2 C_n omega)) int_P A(S | N~(p)^perp)`, literal and factored, and
/// the ratio of the two normalisations, which must be 1.
pub fn verify_cauchy_surface(cfg: &VerifyConfig, label: &str, sigma: &Surface) -> Result<Report> {
    let n = sigma.dim();
    let c = Constants::new(n, cfg.lambda)?;
    let tol = cfg.tol_or(1e-3);
    let mut report = Report::new();

    let t = clock(cfg);
    let lhs = p_area(sigma, &cfg.quadrature)?;
    let norm1 = 1.0 / (2.0 * c.c_n * c.omega);
    let norm2 = c.s / (2.0 * c.omega * c.pansu_area());

    let factored = pansu_outer_factored(sigma, cfg.lambda, &cfg.quadrature)?;
    let rhs_f = factored.clone().scaled(norm1);
    report
        .rows
        .push(ReportRow::from_result(format!("cauchy/{label}/factored"), &rhs_f, lhs.value, tol).timed(t));

    let outer = if n.n() == 1 {
        let t = clock(cfg);
        let literal = pansu_outer_literal(sigma, cfg.lambda, &cfg.quadrature)?;
        let rhs1 = literal.clone().scaled(norm1);
        report
            .rows
            .push(ReportRow::from_result(format!("cauchy/{label}/literal"), &rhs1, lhs.value, tol).timed(t));
        literal
    } else {
        report
            .notes
            .push(format!("cauchy/{label}: literal double integral evaluated for n = 1 only"));
        factored
    };
    let rhs1 = outer.value * norm1;
    let rhs2 = outer.value * norm2;
    report.rows.push(ReportRow::new(
        format!("cauchy/{label}/formula1_over_formula2"),
        rhs1 / rhs2,
        1.0,
        1e-12,
    ));
    Ok(report)
}

pub fn verify_cauchy(cfg: &VerifyConfig) -> Result<Report> {
    match &cfg.surface {
        Some(s) => verify_cauchy_surface(cfg, "surface", s),
        None => {
            let mut report = Report::new();
            for name in ["pansu_lambda2", "sphere_pair", "paraboloid_pair"] {
                report.extend(verify_cauchy_surface(cfg, name, &named_surface(name)?)?);
            }
            Ok(report)
        }
    }
}

const ALPHAS: [(f64, &str); 5] = [
    (0.0, "0"),
    (FRAC_PI_6, "pi_6"),
    (FRAC_PI_4, "pi_4"),
    (FRAC_PI_3, "pi_3"),
    (FRAC_PI_2, "pi_2"),
];
const BETAS: [(f64, &str); 2] = [(0.0, "0"), (FRAC_PI_3, "pi_3")];

/// `|sin alpha|` law for ambient directions on one rotational `H_1` surface.
pub fn verify_anydirection_surface(cfg: &VerifyConfig, label: &str, sigma: &Surface) -> Result<Report> {
    let rot = sigma
        .as_rotational()
        .ok_or_else(|| Error::InvalidSurface("anydirection needs a rotational surface".into()))?;
    if rot.dim().n() != 1 {
        return Err(Error::invalid("n", "anydirection is implemented for n = 1"));
    }
    let tol = cfg.tol_or(1e-6);
    let mut report = Report::new();
    let t = clock(cfg);
    let c = projected_parea_ambient(sigma, &AmbientDirection::new(FRAC_PI_2, 0.0)?, &cfg.quadrature)?;
    let (closed, _) = rotational_projection_closed_form(&rot, &cfg.quadrature)?;
    report.rows.push(
        ReportRow::from_result(format!("anydirection/{label}/pi_2_vs_closed_form"), &c, closed.value, 1e-8)
            .timed(t),
    );
    let mut ratios = Vec::new();
    for (alpha, an) in ALPHAS {
        for (beta, bn) in BETAS {
            let t = clock(cfg);
            let r = projected_parea_ambient(sigma, &AmbientDirection::new(alpha, beta)?, &cfg.quadrature)?;
            let id = format!("anydirection/{label}/alpha_{an}/beta_{bn}");
            let row = if alpha == 0.0 {
                ReportRow::from_result(id, &r, 0.0, 1e-10)
            } else {
                let ratio = r.value / alpha.sin().abs();
                ratios.push(ratio);
                let mut row = ReportRow::new(id, ratio, c.value, tol);
                row.evaluations = r.evaluations;
                row.error_estimate = r.error_estimate;
                row
            };
            report.rows.push(row.timed(t));
        }
    }
    report
        .rows
        .push(ReportRow::new(format!("anydirection/{label}/ratio_spread"), spread(&ratios), 0.0, tol));
    Ok(report)
}

pub fn verify_anydirection(cfg: &VerifyConfig) -> Result<Report> {
    match &cfg.surface {
        Some(s) => verify_anydirection_surface(cfg, "surface", s),
        None => {
            let mut report = Report::new();
            for name in ["pansu_lambda1", "sphere_pair"] {
                report.extend(verify_anydirection_surface(cfg, name, &named_surface(name)?)?);
            }
            Ok(report)
        }
    }
}

/// `(max - min) / |mean|`.
pub fn spread(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean.abs()
}

/// Projected p-areas of a rotational surface along sampled Pansu normals:
/// each against the reference value and their relative spread against 0.
pub fn verify_rotational_constancy_surface(
    cfg: &VerifyConfig,
    label: &str,
    sigma: &Surface,
    reference: Option<f64>,
) -> Result<Report> {
    let rot = sigma
        .as_rotational()
        .ok_or_else(|| Error::InvalidSurface("rotational_constancy needs a rotational surface".into()))?;
    let n = rot.dim();
    let tol = cfg.tol_or(if n.n() == 1 { 1e-6 } else { 1e-2 });
    let mut report = Report::new();
    let (closed, check) = rotational_projection_closed_form(&rot, &cfg.quadrature)?;
    if !check.satisfied() {
        report.notes.push(format!(
            "rotational_constancy/{label}: neither profile condition detected on the sample grid"
        ));
    }
    let expected = reference.unwrap_or(closed.value);
    if reference.is_some() {
        report.rows.push(ReportRow::from_result(
            format!("rotational_constancy/{label}/closed_form"),
            &closed,
            expected,
            1e-10,
        ));
    }
    let dirs = PansuDirection::random(n, cfg.lambda, cfg.samples, cfg.seed)?;
    let mut values = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let t = clock(cfg);
        let spec = QuadratureSpec {
            seed: cfg.quadrature.seed.wrapping_add(i as u64),
            ..cfg.quadrature
        };
        let r = projected_parea(sigma, d, &spec)?;
        values.push(r.value);
        report.rows.push(
            ReportRow::from_result(format!("rotational_constancy/{label}/dir{i:02}"), &r, expected, tol).timed(t),
        );
    }
    report.rows.push(ReportRow::new(
        format!("rotational_constancy/{label}/spread"),
        spread(&values),
        0.0,
        tol,
    ));
    Ok(report)
}

pub fn verify_rotational_constancy(cfg: &VerifyConfig) -> Result<Report> {
    match &cfg.surface {
        Some(s) => verify_rotational_constancy_surface(cfg, "surface", s, None),
        None => {
            let pansu = Constants::new(d1(), 1.0)?.pansu_projection();
            let cases = [
                ("pansu_lambda1", Some(pansu)),
                ("sphere_pair", Some(golden::SPHERE_PAIR_PROJECTION)),
                ("paraboloid_pair", Some(golden::PARABOLOID_PAIR_PROJECTION)),
                ("flat_pair", Some(8.0 / 3.0)),
            ];
            let mut report = Report::new();
            for (name, reference) in cases {
                report.extend(verify_rotational_constancy_surface(cfg, name, &named_surface(name)?, reference)?);
            }
            Ok(report)
        }
    }
}

/// `int_{S^{n-1}} |u . v| dS_v` against `2 omega_{n-1}` for sampled `u`.
pub fn verify_lemma_kr(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.n.n();
    if n < 2 {
        return Err(Error::invalid("n", "lemma_kr needs n >= 2"));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let expected = 2.0 * unit_ball_volume(n - 1);
    let mut report = Report::new();
    for i in 0..cfg.samples.clamp(1, 5) {
        let u = crate::integrate::random_unit_vector(&mut rng, n);
        let t = clock(cfg);
        let r = euclid_sphere_projection(n, &u, &cfg.quadrature)?;
        report.rows.push(
            ReportRow::from_result(format!("lemma_kr/n{n}/u{i}"), &r, expected, cfg.tol_or(1e-6)).timed(t),
        );
    }
    Ok(report)
}

/// Average projected p-area over the Pansu sphere, checked through
/// `Exp * S_{2n-1} = 2 omega_{2n-1} A(S)`.
pub fn expected_projection_surface(cfg: &VerifyConfig, label: &str, sigma: &Surface) -> Result<Report> {
    let n = sigma.dim();
    let c = Constants::new(n, cfg.lambda)?;
    let mut report = Report::new();
    let t = clock(cfg);
    let outer = if n.n() == 1 {
        pansu_outer_literal(sigma, cfg.lambda, &cfg.quadrature)?
    } else {
        pansu_outer_factored(sigma, cfg.lambda, &cfg.quadrature)?
    };
    let exp = outer.value / c.pansu_area();
    let area = p_area(sigma, &cfg.quadrature)?;
    let mut row = ReportRow::new(
        format!("expected_value/{label}/identity"),
        exp * c.s,
        2.0 * c.omega * area.value,
        cfg.tol_or(1e-3),
    );
    row.evaluations = outer.evaluations + area.evaluations;
    report.rows.push(row.timed(t));
    report.notes.push(format!(
        "expected_value/{label}: Exp = {exp}; the product A(S) omega S = {} differs from it",
        area.value * c.omega * c.s
    ));
    Ok(report)
}

pub fn expected_projection(cfg: &VerifyConfig) -> Result<Report> {
    match &cfg.surface {
        Some(s) => expected_projection_surface(cfg, "surface", s),
        None => {
            let mut report = Report::new();
            let pansu = named_surface("pansu_lambda1")?;
            let t = clock(cfg);
            let outer = pansu_outer_literal(&pansu, 1.0, &cfg.quadrature)?;
            let c = Constants::new(d1(), 1.0)?;
            let mut row = ReportRow::new(
                "expected_value/pansu_lambda1/exp",
                outer.value / c.pansu_area(),
                2.0 * PI,
                cfg.tol_or(1e-6),
            );
            row.evaluations = outer.evaluations;
            report.rows.push(row.timed(t));
            report.extend(expected_projection_surface(cfg, "paraboloid_pair", &named_surface("paraboloid_pair")?)?);
            Ok(report)
        }
    }
}

/// The complete suite behind `report-all`.
pub fn run_all(base: &VerifyConfig) -> Result<Report> {
    let mut report = Report::new();
    let with = |which: Which, n: usize, lambda: f64| -> Result<VerifyConfig> {
        Ok(VerifyConfig {
            which,
            n: Dim::new(n)?,
            lambda,
            surface: None,
            ..base.clone()
        })
    };
    for n in 1..=3 {
        for lambda in [0.5, 1.0, 2.0] {
            report.extend(run(&with(Which::PansuArea, n, lambda)?)?);
        }
    }
    report.extend(run(&with(Which::PansuProjection, 1, 1.0)?)?);
    report.extend(run(&VerifyConfig {
        samples: 2,
        ..with(Which::PansuProjection, 2, 1.0)?
    })?);
    report.extend(run(&with(Which::Cauchy, 1, 1.0)?)?);
    report.extend(run(&with(Which::Anydirection, 1, 1.0)?)?);
    report.extend(run(&with(Which::RotationalConstancy, 1, 1.0)?)?);
    for n in 2..=4 {
        report.extend(run(&VerifyConfig {
            samples: 2,
            ..with(Which::LemmaKr, n, 1.0)?
        })?);
    }
    report.extend(run(&with(Which::ExpectedValue, 1, 1.0)?)?);
    Ok(report.sorted())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_pass_rules() {
        assert!(ReportRow::new("a", 1.0 + 1e-9, 1.0, 1e-8).pass);
        assert!(!ReportRow::new("a", 1.1, 1.0, 1e-8).pass);
        let zero = ReportRow::new("z", 1e-11, 0.0, 1e-10);
        assert!(zero.pass);
        assert_eq!(zero.rel_err, 1e-11);
        assert!(!ReportRow::new("nan", f64::NAN, 1.0, 1.0).pass);
        let mc = IntegralResult {
            value: 1.001,
            error_estimate: 1e-4,
            evaluations: 10,
            method: "mc".into(),
            flagged: false,
            std_error: Some(1e-4),
        };
        assert!(!ReportRow::from_result("mc", &mc, 1.0, 1e-2).pass);
    }

    #[test]
    fn which_round_trips() {
        for w in Which::ALL {
            assert_eq!(w.name().parse::<Which>().unwrap(), w);
        }
        assert!("nope".parse::<Which>().is_err());
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new();
        r.rows.push(ReportRow::new("b", 2.0, 2.0, 1e-6));
        r.rows.push(ReportRow::new("a", 1.0, 1.0, 1e-6));
        r.notes.push("note".into());
        let text = r.sorted().to_csv(&["spec".into()]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# spec");
        assert_eq!(lines[1], "# note");
        assert_eq!(lines[2], CSV_COLUMNS.join(","));
        assert!(lines[3].starts_with("a,1,1,0,"));
    }

    #[test]
    fn pansu_area_small() {
        let cfg = VerifyConfig::new(Which::PansuArea);
        let r = run(&cfg).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn lemma_kr_rows() {
        let cfg = VerifyConfig {
            n: Dim::new(2).unwrap(),
            samples: 2,
            ..VerifyConfig::new(Which::LemmaKr)
        };
        let r = run(&cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.all_pass());
        assert!((r.rows[0].computed - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spread_of_constant_is_zero() {
        assert_eq!(spread(&[2.0, 2.0, 2.0]), 0.0);
        assert!((spread(&[1.0, 1.1]) - 0.1 / 1.05).abs() < 1e-15);
    }
}
