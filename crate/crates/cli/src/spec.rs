use std::path::Path;

use dini_core::verify::InjectivityOptions;
use dini_core::{ExprFunction, Matrix, ScalarOptions, SystemOptions};
use serde::{Deserialize, Serialize};

/// Problem description read from a JSON spec file.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub functions: Vec<String>,
    #[serde(default)]
    pub variables: Vec<String>,
    /// Number of independent variables; the rest are unknowns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<f64>>,
    #[serde(default)]
    pub options: SpecOptions,
    /// Matrix for the operator-bound and chain-rule checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// Offset `y` for the chain-rule check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    /// Sample points for the chain-rule check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// Segment endpoints for the mean value witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    pub tol_seed: Option<f64>,
    pub tol_root: Option<f64>,
    pub tol_sys: Option<f64>,
    pub max_iter: Option<usize>,
    pub box_halfwidth: Option<f64>,
    pub grid_density: Option<usize>,
    pub max_shrink: Option<usize>,
    pub max_dependent: Option<usize>,
    pub polish_steps: Option<usize>,
    /// Seed for every random stream.
    pub random_seed: Option<u64>,
    /// Random trials or samples for the lemma checks.
    pub trials: Option<usize>,
    /// Grid points for the mean value scan.
    pub mvt_grid: Option<usize>,
    pub initial_radius: Option<f64>,
    pub pair_samples: Option<usize>,
    pub determinant_samples: Option<usize>,
}

/// Problem or configuration error; exit status 1.
#[derive(Debug)]
pub struct SpecError(pub String);

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<dini_core::Error> for SpecError {
    fn from(e: dini_core::Error) -> Self {
        SpecError(e.to_string())
    }
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpecError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError(format!("invalid spec: {e}")))
    }

    pub fn function(&self) -> Result<ExprFunction, SpecError> {
        if self.functions.is_empty() {
            return Err(SpecError("spec has no functions".into()));
        }
        Ok(ExprFunction::parse(&self.functions, &self.variables)?)
    }

    pub fn seed(&self) -> Result<&[f64], SpecError> {
        let seed = self.seed.as_deref().ok_or_else(|| SpecError("spec has no seed".into()))?;
        if seed.len() != self.variables.len() {
            return Err(SpecError(format!(
                "seed has {} coordinates for {} variables",
                seed.len(),
                self.variables.len()
            )));
        }
        Ok(seed)
    }

    pub fn matrix(&self) -> Result<Matrix, SpecError> {
        let rows = self.matrix.as_ref().ok_or_else(|| SpecError("spec has no matrix".into()))?;
        Ok(Matrix::from_rows(rows)?)
    }

    pub fn system_options(&self) -> SystemOptions {
        let o = &self.options;
        let d = SystemOptions::default();
        let s = d.scalar.clone();
        SystemOptions {
            scalar: ScalarOptions {
                tol_seed: o.tol_seed.unwrap_or(s.tol_seed),
                tol_root: o.tol_root.unwrap_or(s.tol_root),
                max_iter: o.max_iter.unwrap_or(s.max_iter),
                half_width: o.box_halfwidth.unwrap_or(s.half_width),
                grid_density: o.grid_density.unwrap_or(s.grid_density),
                max_shrink: o.max_shrink.unwrap_or(s.max_shrink),
            },
            tol_sys: o.tol_sys.unwrap_or(d.tol_sys),
            max_dependent: o.max_dependent.unwrap_or(d.max_dependent),
            polish_steps: o.polish_steps.unwrap_or(d.polish_steps),
        }
    }

    pub fn injectivity_options(&self) -> InjectivityOptions {
        let o = &self.options;
        let d = InjectivityOptions::default();
        InjectivityOptions {
            initial_radius: o.initial_radius.unwrap_or(d.initial_radius),
            determinant_samples: o.determinant_samples.unwrap_or(d.determinant_samples),
            pair_samples: o.pair_samples.unwrap_or(d.pair_samples),
            min_radius: d.min_radius,
            rng_seed: o.random_seed.unwrap_or(d.rng_seed),
        }
    }
}
