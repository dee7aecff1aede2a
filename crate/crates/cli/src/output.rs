use std::io::Write;

use serde::Serialize;

use crate::spec::SpecError;

/// Box metadata attached to each row.
#[derive(Debug, Clone, Serialize)]
pub struct BoxInfo {
    pub independent_lo: Vec<f64>,
    pub independent_hi: Vec<f64>,
    pub dependent_lo: Vec<f64>,
    pub dependent_hi: Vec<f64>,
    /// Whether the query lies strictly inside the independent box.
    pub inside: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_kind: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Largest gap between the two inverse-Jacobian formulas.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobian_paths_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<dini_core::UniquenessReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub query: Vec<f64>,
    pub value: Option<Vec<f64>>,
    pub jacobian: Option<Vec<Vec<f64>>>,
    /// Largest componentwise residual.
    pub residual: Option<f64>,
    #[serde(rename = "box")]
    pub bx: BoxInfo,
    pub diagnostics: Diagnostics,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.diagnostics.status != "ok"
            || self
                .diagnostics
                .uniqueness
                .as_ref()
                .is_some_and(|u| !u.passed)
    }
}

pub fn error_kind(e: &dini_core::Error) -> &'static str {
    use dini_core::Error::*;
    match e {
        Syntax { .. } => "Syntax",
        UnknownIdentifier { .. } => "UnknownIdentifier",
        Domain { .. } => "Domain",
        DimensionMismatch(_) => "DimensionMismatch",
        NotSquare { .. } => "NotSquare",
        SingularMatrix { .. } => "SingularMatrix",
        SeedNotOnZeroSet { .. } => "SeedNotOnZeroSet",
        DegenerateDerivative { .. } => "DegenerateDerivative",
        BoxNotFound { .. } => "BoxNotFound",
        OutsideBox { .. } => "OutsideBox",
        NoConvergence { .. } => "NoConvergence",
        NoSignChange { .. } => "NoSignChange",
        DegenerateJacobian { .. } => "DegenerateJacobian",
        RadiusUnderflow { .. } => "RadiusUnderflow",
        Config(_) => "Config",
    }
}

pub fn write_json<T: Serialize>(doc: &T, out: &mut dyn Write) -> Result<(), SpecError> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| SpecError(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| SpecError(e.to_string()))
}

/// One line per row; Jacobian entries flattened row-major as
/// `jacobian_<r>_<c>` with 1-based indices.
pub fn write_csv(rows: &[Row], n: usize, m: usize, out: &mut dyn Write) -> Result<(), SpecError> {
    let io = |e: csv::Error| SpecError(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=n).map(|i| format!("query_{i}")).collect();
    header.extend((1..=m).map(|i| format!("value_{i}")));
    for r in 1..=m {
        header.extend((1..=n).map(|c| format!("jacobian_{r}_{c}")));
    }
    header.extend(["residual", "inside", "status", "error_kind", "error"].map(String::from));
    w.write_record(&header).map_err(io)?;

    let num = |v: f64| format!("{v:?}");
    for row in rows {
        let mut rec: Vec<String> = row.query.iter().copied().map(num).collect();
        match &row.value {
            Some(v) => rec.extend(v.iter().copied().map(num)),
            None => rec.extend(std::iter::repeat_n(String::new(), m)),
        }
        match &row.jacobian {
            Some(j) => rec.extend(j.iter().flatten().copied().map(num)),
            None => rec.extend(std::iter::repeat_n(String::new(), m * n)),
        }
        rec.push(row.residual.map(num).unwrap_or_default());
        rec.push(row.bx.inside.to_string());
        rec.push(row.diagnostics.status.to_string());
        rec.push(row.diagnostics.error_kind.unwrap_or("").to_string());
        rec.push(row.diagnostics.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| SpecError(e.to_string()))
}
