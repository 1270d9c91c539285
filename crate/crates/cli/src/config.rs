//! Scenario files: one TOML document with `name`, `kind` and a `[params]`
//! table whose schema depends on the kind. Every default is explicit here and
//! echoed into the report.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use qew_core::Weight;

use crate::error::CliError;

/// A weight written as a number or as `"inf"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    Number(f64),
    Text(String),
}

impl WeightValue {
    pub fn resolve(&self) -> Result<Weight, CliError> {
        let w = match self {
            Self::Number(v) => Weight::finite(*v),
            Self::Text(t) => Weight::parse(t),
        };
        w.map_err(|e| CliError::Schema(format!("params.m: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChartParams {
    /// `logcosh-line`, `gaussian` or `random-analytic`.
    pub model: String,
    pub dim: usize,
    pub m: Option<WeightValue>,
    /// Rate `c` of the log-cosh potential.
    pub c: f64,
    /// Expected constant in `Ric_f^m = λg`; model default when absent.
    pub lambda: Option<f64>,
    pub m_tilde: f64,
    pub point: Option<Vec<f64>>,
    pub seed: u64,
    pub h: f64,
    pub tol: Option<f64>,
    pub bochner_tol: f64,
}

impl Default for ChartParams {
    fn default() -> Self {
        Self {
            model: "logcosh-line".into(),
            dim: 3,
            m: None,
            c: 1.0,
            lambda: None,
            m_tilde: 5.0,
            point: None,
            seed: 0,
            h: 1e-3,
            tol: None,
            bochner_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WarpedParams {
    /// Fibre dimension, which is also the weight.
    pub m: usize,
    pub c: f64,
    /// `hyperbolic`, `sphere` or `flat`.
    pub fiber: String,
    pub lambda: Option<f64>,
    /// Amplitude of `sin t` added to the base potential.
    pub perturbation: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub tol: Option<f64>,
}

impl Default for WarpedParams {
    fn default() -> Self {
        Self {
            m: 2,
            c: 1.0,
            fiber: "hyperbolic".into(),
            lambda: None,
            perturbation: 0.0,
            t_min: -3.0,
            t_max: 3.0,
            points: 100,
            tol: None,
        }
    }
}

/// Integrator settings shared by every kind that shoots a profile.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootParams {
    pub n: Option<usize>,
    pub m: Option<WeightValue>,
    pub lambda: f64,
    pub shoot_param: Option<f64>,
    pub r_max: f64,
    pub eps0: f64,
    pub seed_tol: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub blowup_threshold: f64,
    /// Expected classification label.
    pub expect: Option<String>,
    pub expect_r_star: Option<f64>,
    pub r_star_tol: f64,
    /// Relative tolerance on the constancy of `μ`.
    pub tol: Option<f64>,
    pub csv: bool,
}

impl Default for ShootParams {
    fn default() -> Self {
        Self {
            n: None,
            m: None,
            lambda: 0.0,
            shoot_param: None,
            r_max: 10.0,
            eps0: 1e-4,
            seed_tol: 1e-6,
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.05,
            blowup_threshold: 1e8,
            expect: None,
            expect_r_star: None,
            r_star_tol: 0.01,
            tol: None,
            csv: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateParams {
    pub n: Option<usize>,
    pub m: Option<WeightValue>,
    pub lambda: f64,
    pub shoot_param: Option<f64>,
    pub r_max: f64,
    /// `[centre, radius]` pairs.
    pub balls: Vec<[f64; 2]>,
    pub laplacian_center: f64,
    pub laplacian_radius: Option<f64>,
    /// `strict` or `report`.
    pub mode: String,
    pub tol: Option<f64>,
    pub hypothesis_tol: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            n: None,
            m: None,
            lambda: 0.0,
            shoot_param: None,
            r_max: 5.0,
            balls: vec![[0.0, 1.0]],
            laplacian_center: 0.0,
            laplacian_radius: None,
            mode: "strict".into(),
            tol: None,
            hypothesis_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkflowParams {
    pub n: usize,
    pub shoot_param: f64,
    pub r_max: f64,
    pub m_tilde: WeightValue,
    pub ball_radius: f64,
    pub comparison_radius: Option<f64>,
    pub segment: [f64; 2],
    pub tol: Option<f64>,
    pub hypothesis_tol: f64,
}

impl Default for WorkflowParams {
    fn default() -> Self {
        Self {
            n: 3,
            shoot_param: -0.5,
            r_max: 10.0,
            m_tilde: WeightValue::Number(31.0),
            ball_radius: 1.0,
            comparison_radius: None,
            segment: [0.0, 5.0],
            tol: None,
            hypothesis_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    ChartIdentities(ChartParams),
    WarpedProduct(WarpedParams),
    Shoot(ShootParams),
    EstimateSuite(EstimateParams),
    RescaleWorkflow(WorkflowParams),
}

impl ScenarioKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ChartIdentities(_) => "chart-identities",
            Self::WarpedProduct(_) => "warped-product",
            Self::Shoot(_) => "shoot",
            Self::EstimateSuite(_) => "estimate-suite",
            Self::RescaleWorkflow(_) => "rescale-workflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    /// Global verdict tolerance from the environment, used where the file
    /// leaves `tol` unset.
    pub env_tol: Option<f64>,
}

impl Scenario {
    /// Resolves a kind's `tol`: the file wins, then the environment, then the default.
    pub fn tol(&self, explicit: Option<f64>, default: f64) -> f64 {
        explicit.or(self.env_tol).unwrap_or(default)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    kind: String,
    #[serde(default)]
    params: toml::Table,
}

fn params<T: DeserializeOwned>(table: toml::Table) -> Result<T, CliError> {
    T::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Schema(format!("params: {}", e.message())))
}

fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Schema(format!("params.{key} is required")))
}

fn positive(v: f64, key: &str) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Schema(format!("params.{key} must be positive and finite, got {v}")))
    }
}

fn tolerance(v: Option<f64>, key: &str) -> Result<(), CliError> {
    v.map_or(Ok(()), |t| positive(t, key))
}

/// Parses the value of `QEW_TOL`.
pub fn parse_env_tol(text: Option<&str>) -> Result<Option<f64>, CliError> {
    let Some(text) = text else { return Ok(None) };
    let v: f64 = text.trim().parse().map_err(|_| CliError::Schema(format!("QEW_TOL is not a number: {text:?}")))?;
    positive(v, "QEW_TOL")?;
    Ok(Some(v))
}

impl ShootParams {
    pub fn validate(&self) -> Result<(), CliError> {
        let n = require(self.n, "n")?;
        if n == 0 {
            return Err(CliError::Schema("params.n must be at least 1".into()));
        }
        self.m.as_ref().ok_or_else(|| CliError::Schema("params.m is required".into()))?.resolve()?;
        require(self.shoot_param, "shoot_param")?;
        for (v, k) in [
            (self.r_max, "r_max"),
            (self.eps0, "eps0"),
            (self.seed_tol, "seed_tol"),
            (self.rtol, "rtol"),
            (self.atol, "atol"),
            (self.max_step, "max_step"),
            (self.blowup_threshold, "blowup_threshold"),
            (self.r_star_tol, "r_star_tol"),
        ] {
            positive(v, k)?;
        }
        tolerance(self.tol, "tol")?;
        if let Some(label) = &self.expect {
            const LABELS: [&str; 4] = ["complete_to_horizon", "potential_blow_up", "warping_degenerate", "trivial"];
            if !LABELS.contains(&label.as_str()) {
                return Err(CliError::Schema(format!("params.expect must be one of {LABELS:?}, got {label:?}")));
            }
        }
        Ok(())
    }
}

fn validate(kind: &ScenarioKind) -> Result<(), CliError> {
    match kind {
        ScenarioKind::ChartIdentities(p) => {
            if !["logcosh-line", "gaussian", "random-analytic"].contains(&p.model.as_str()) {
                return Err(CliError::Schema(format!("params.model: unknown model {:?}", p.model)));
            }
            if p.dim == 0 {
                return Err(CliError::Schema("params.dim must be at least 1".into()));
            }
            if let Some(m) = &p.m {
                m.resolve()?;
            }
            positive(p.h, "h")?;
            positive(p.m_tilde, "m_tilde")?;
            positive(p.bochner_tol, "bochner_tol")?;
            tolerance(p.tol, "tol")?;
        }
        ScenarioKind::WarpedProduct(p) => {
            if p.m == 0 {
                return Err(CliError::Schema("params.m: m = 0 is not supported (1/m is singular)".into()));
            }
            if !["hyperbolic", "sphere", "flat"].contains(&p.fiber.as_str()) {
                return Err(CliError::Schema(format!("params.fiber: unknown fibre {:?}", p.fiber)));
            }
            if p.points == 0 || !(p.t_min < p.t_max) {
                return Err(CliError::Schema("params: need points >= 1 and t_min < t_max".into()));
            }
            positive(p.c, "c")?;
            tolerance(p.tol, "tol")?;
        }
        ScenarioKind::Shoot(p) => p.validate()?,
        ScenarioKind::EstimateSuite(p) => {
            let n = require(p.n, "n")?;
            if n == 0 {
                return Err(CliError::Schema("params.n must be at least 1".into()));
            }
            let m = p.m.as_ref().ok_or_else(|| CliError::Schema("params.m is required".into()))?.resolve()?;
            if m.is_infinite() {
                return Err(CliError::Schema("params.m: the estimates need a finite weight".into()));
            }
            require(p.shoot_param, "shoot_param")?;
            positive(p.r_max, "r_max")?;
            for [_, a] in &p.balls {
                positive(*a, "balls[].radius")?;
            }
            if !["strict", "report"].contains(&p.mode.as_str()) {
                return Err(CliError::Schema(format!("params.mode must be strict or report, got {:?}", p.mode)));
            }
            tolerance(p.tol, "tol")?;
            positive(p.hypothesis_tol, "hypothesis_tol")?;
        }
        ScenarioKind::RescaleWorkflow(p) => {
            if p.n < 2 {
                return Err(CliError::Schema("params.n must be at least 2".into()));
            }
            if p.m_tilde.resolve()?.is_infinite() {
                return Err(CliError::Schema("params.m_tilde must be finite".into()));
            }
            positive(p.r_max, "r_max")?;
            positive(p.ball_radius, "ball_radius")?;
            if !(p.segment[0] <= p.segment[1]) {
                return Err(CliError::Schema("params.segment must be increasing".into()));
            }
            tolerance(p.tol, "tol")?;
            positive(p.hypothesis_tol, "hypothesis_tol")?;
        }
    }
    Ok(())
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str, env_tol: Option<f64>) -> Result<Scenario, CliError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Parse(e.message().to_string()))?;
    if raw.name.is_empty() || !raw.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
        return Err(CliError::Schema(format!("name must be non-empty and use [A-Za-z0-9._-], got {:?}", raw.name)));
    }
    let kind = match raw.kind.as_str() {
        "chart-identities" => ScenarioKind::ChartIdentities(params(raw.params)?),
        "warped-product" => ScenarioKind::WarpedProduct(params(raw.params)?),
        "shoot" => ScenarioKind::Shoot(params(raw.params)?),
        "estimate-suite" => ScenarioKind::EstimateSuite(params(raw.params)?),
        "rescale-workflow" => ScenarioKind::RescaleWorkflow(params(raw.params)?),
        other => return Err(CliError::Schema(format!("unknown kind {other:?}"))),
    };
    validate(&kind)?;
    Ok(Scenario { name: raw.name, kind, env_tol })
}

pub fn load_scenario(path: &Path, env_tol: Option<f64>) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text, env_tol)
}
