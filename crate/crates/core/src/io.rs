//! JSON file formats for matrices, states and run reports.
//!
//! A matrix document is `{"dim": d, "entries": [[[re, im], ...], ...], "kind": ...}`
//! with row-major entries; pure states use a flat `entries` vector of
//! `[re, im]` pairs. A file holds one document or an array of documents.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kd::{DensityMatrix, PureState, TransitionMatrix};
use crate::numerics::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Unitary,
    Density,
    Hermitian,
    PureState,
}

impl MatrixKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "unitary" => Some(Self::Unitary),
            "density" => Some(Self::Density),
            "hermitian" => Some(Self::Hermitian),
            "pure_state" => Some(Self::PureState),
            _ => None,
        }
    }
}

/// Parsed but not yet validated document.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub location: String,
    pub dim: usize,
    pub kind: Option<MatrixKind>,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Matrix(CMatrix),
    Vector(Vec<C64>),
}

/// A state read from a file: pure documents stay pure.
#[derive(Debug, Clone)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn dim(&self) -> usize {
        match self {
            StateInput::Pure(p) => p.dim(),
            StateInput::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StateInput::Pure(p) => DensityMatrix::from_pure(p),
            StateInput::Mixed(m) => m.clone(),
        }
    }
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn located(location: &str, err: Error) -> Error {
    match err {
        Error::Parse { .. } => err,
        other => parse_err(location, other.to_string()),
    }
}

fn parse_complex(v: &Value, loc: &str) -> Result<C64> {
    let pair = match v {
        Value::Array(a) if a.len() == 2 => a,
        Value::Number(n) => {
            let re = n
                .as_f64()
                .ok_or_else(|| parse_err(loc, "number out of range"))?;
            return Ok(C64::new(re, 0.0));
        }
        _ => return Err(parse_err(loc, "expected [re, im] or a real number")),
    };
    let part = |k: usize, name: &str| -> Result<f64> {
        let x = pair[k]
            .as_f64()
            .ok_or_else(|| parse_err(loc, format!("{name} part is not a number")))?;
        if !x.is_finite() {
            return Err(parse_err(loc, format!("{name} part is not finite")));
        }
        Ok(x)
    };
    Ok(C64::new(part(0, "real")?, part(1, "imaginary")?))
}

fn parse_document(v: &Value, loc: &str) -> Result<MatrixDocument> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err(loc, "expected an object with dim and entries"))?;
    let dim = obj
        .get("dim")
        .ok_or_else(|| parse_err(loc, "missing field dim"))?
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| parse_err(format!("{loc}.dim"), "expected a positive integer"))?
        as usize;
    let kind = match obj.get("kind") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(MatrixKind::parse(s).ok_or_else(|| {
            parse_err(
                format!("{loc}.kind"),
                format!("unknown kind {s:?}; expected unitary, density, hermitian or pure_state"),
            )
        })?),
        Some(_) => return Err(parse_err(format!("{loc}.kind"), "expected a string")),
    };
    let entries = obj
        .get("entries")
        .ok_or_else(|| parse_err(loc, "missing field entries"))?
        .as_array()
        .ok_or_else(|| parse_err(format!("{loc}.entries"), "expected an array"))?;
    if entries.len() != dim {
        return Err(parse_err(
            format!("{loc}.entries"),
            format!("expected {dim} entries, found {}", entries.len()),
        ));
    }
    let is_pair =
        |e: &Value| matches!(e, Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_number));
    // without a kind, a flat list of numbers or [re, im] pairs is a vector;
    // at d = 2 pairs are read as the rows of a real matrix
    let vector_kind = match kind {
        Some(k) => k == MatrixKind::PureState,
        None => entries
            .iter()
            .all(|e| e.is_number() || (dim != 2 && is_pair(e))),
    };
    let body = if vector_kind {
        let mut out = Vec::with_capacity(dim);
        for (i, e) in entries.iter().enumerate() {
            out.push(parse_complex(e, &format!("{loc}.entries[{i}]"))?);
        }
        Body::Vector(out)
    } else {
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in entries.iter().enumerate() {
            let row_loc = format!("{loc}.entries[{i}]");
            let row = row
                .as_array()
                .ok_or_else(|| parse_err(&row_loc, "expected a row array"))?;
            if row.len() != dim {
                return Err(parse_err(
                    &row_loc,
                    format!("expected {dim} columns, found {}", row.len()),
                ));
            }
            for (j, e) in row.iter().enumerate() {
                data.push(parse_complex(e, &format!("{row_loc}[{j}]"))?);
            }
        }
        Body::Matrix(CMatrix::from_vec(dim, dim, data)?)
    };
    Ok(MatrixDocument {
        location: loc.to_string(),
        dim,
        kind,
        body,
    })
}

/// Parses a JSON text holding one document or an array of documents.
/// `source` prefixes error locations, e.g. a file name.
pub fn parse_documents(text: &str, source: &str) -> Result<Vec<MatrixDocument>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        parse_err(
            format!("{source}:{}:{}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    match &value {
        Value::Array(docs) if docs.iter().all(Value::is_object) && !docs.is_empty() => docs
            .iter()
            .enumerate()
            .map(|(k, d)| parse_document(d, &format!("{source}[{k}]")))
            .collect(),
        Value::Array(_) => Err(parse_err(
            source,
            "expected a document or a nonempty array of documents",
        )),
        _ => Ok(vec![parse_document(&value, source)?]),
    }
}

fn expect_kind(doc: &MatrixDocument, allowed: &[MatrixKind], what: &str) -> Result<()> {
    match doc.kind {
        Some(k) if !allowed.contains(&k) => Err(parse_err(
            format!("{}.kind", doc.location),
            format!("{k:?} document where a {what} is required"),
        )),
        _ => Ok(()),
    }
}

impl MatrixDocument {
    fn matrix(&self, what: &str) -> Result<&CMatrix> {
        match &self.body {
            Body::Matrix(m) => Ok(m),
            Body::Vector(_) => Err(parse_err(
                &self.location,
                format!("a {what} needs a square entries array"),
            )),
        }
    }

    pub fn into_transition(&self, tol: f64) -> Result<TransitionMatrix> {
        expect_kind(self, &[MatrixKind::Unitary], "unitary")?;
        TransitionMatrix::with_tolerance(self.matrix("unitary")?.clone(), tol)
            .map_err(|e| located(&self.location, e))
    }

    pub fn into_pure(&self, tol: f64) -> Result<PureState> {
        expect_kind(self, &[MatrixKind::PureState], "pure state")?;
        match &self.body {
            Body::Vector(v) => {
                let norm = crate::numerics::vec_norm(v);
                if (norm - 1.0).abs() > tol {
                    return Err(located(&self.location, Error::NotNormalized { norm }));
                }
                // keep the amplitudes bit-for-bit unless rounding is visible
                if (norm - 1.0).abs() <= 1e-15 {
                    Ok(PureState::from_normalized_unchecked(v.clone()))
                } else {
                    PureState::normalized(v.clone()).map_err(|e| located(&self.location, e))
                }
            }
            Body::Matrix(_) => Err(parse_err(
                &self.location,
                "a pure state needs a flat entries vector",
            )),
        }
    }

    pub fn into_density(&self, tol: f64) -> Result<DensityMatrix> {
        Ok(self.into_state(tol)?.to_density())
    }

    /// Pure documents become [`StateInput::Pure`], matrices are validated as
    /// density matrices.
    pub fn into_state(&self, tol: f64) -> Result<StateInput> {
        expect_kind(
            self,
            &[
                MatrixKind::Density,
                MatrixKind::PureState,
                MatrixKind::Hermitian,
            ],
            "state",
        )?;
        match &self.body {
            Body::Vector(_) => Ok(StateInput::Pure(self.into_pure(tol)?)),
            Body::Matrix(m) => DensityMatrix::with_tolerance(m.clone(), tol)
                .map(StateInput::Mixed)
                .map_err(|e| located(&self.location, e)),
        }
    }

    pub fn into_hermitian(&self, tol: f64) -> Result<CMatrix> {
        let m = self.matrix("Hermitian matrix")?;
        let defect = m.hermitian_defect();
        if defect > tol {
            return Err(located(
                &self.location,
                Error::NotHermitian {
                    asymmetry: defect,
                    tolerance: tol,
                },
            ));
        }
        Ok(m.clone())
    }
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &CMatrix, kind: MatrixKind) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(|&z| complex_json(z)).collect()))
        .collect();
    json!({ "dim": m.rows(), "kind": kind, "entries": entries })
}

pub fn pure_state_json(psi: &PureState) -> Value {
    let entries: Vec<Value> = psi.amplitudes().iter().map(|&z| complex_json(z)).collect();
    json!({ "dim": psi.dim(), "kind": MatrixKind::PureState, "entries": entries })
}

/// Machine-readable record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Hex digest of the input files, in argument order.
    pub inputs_digest: String,
    /// Every tolerance, seed and option the command ran with.
    pub config: Value,
    pub results: Value,
    pub certificates: Value,
    pub timing: Option<Timing>,
    pub error: Option<ReportError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String, config: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs_digest,
            config,
            results: Value::Null,
            certificates: Value::Null,
            timing: None,
            error: None,
        }
    }

    /// JSON with the timing field removed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            timing: None,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_studies::Spin1Fixture;

    #[test]
    fn round_trip_unitary_and_state() {
        let fx = Spin1Fixture::new();
        let text = matrix_json(fx.u.matrix(), MatrixKind::Unitary).to_string();
        let docs = parse_documents(&text, "u.json").unwrap();
        assert_eq!(docs[0].into_transition(1e-9).unwrap(), fx.u);
        let psi = fx.psi(1);
        let text = pure_state_json(&psi).to_string();
        let StateInput::Pure(back) = parse_documents(&text, "p.json").unwrap()[0]
            .into_state(1e-9)
            .unwrap()
        else {
            panic!()
        };
        assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn qubit_pure_state_without_kind() {
        let text = r#"{"dim": 2, "entries": [[1, 0], [0, 0]]}"#;
        let doc = &parse_documents(text, "q").unwrap()[0];
        // ambiguous at d = 2: a 2x2 real matrix
        assert!(matches!(doc.body, Body::Matrix(_)));
        let text = r#"{"dim": 2, "kind": "pure_state", "entries": [[1, 0], [0, 0]]}"#;
        assert!(parse_documents(text, "q").unwrap()[0]
            .into_pure(1e-9)
            .is_ok());
    }

    #[test]
    fn located_errors() {
        let text =
            r#"{"dim": 2, "kind": "density", "entries": [[[1, 0], [0, 0]], [[0, 0], ["x", 0]]]}"#;
        let err = parse_documents(text, "rho.json").unwrap_err();
        assert_eq!(
            err.to_string(),
            "rho.json.entries[1][1]: real part is not a number"
        );
        let text =
            r#"{"dim": 2, "kind": "density", "entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}"#;
        let err = parse_documents(text, "rho.json").unwrap()[0]
            .into_density(1e-9)
            .unwrap_err();
        assert!(
            err.to_string()
                .starts_with("rho.json: not a density matrix: trace"),
            "{err}"
        );
        let err = parse_documents("[1,", "bad.json").unwrap_err();
        assert!(err.to_string().starts_with("bad.json:1:"));
        let text = r#"{"dim": 3, "kind": "unitary", "entries": [[[1, 0]]]}"#;
        assert!(parse_documents(text, "u")
            .unwrap_err()
            .to_string()
            .contains("expected 3 entries"));
    }

    #[test]
    fn report_round_trip() {
        let mut r = RunReport::new("table", "ab".into(), json!({"tol": 1e-9, "seed": 7}));
        r.results = json!({"n": 1.0000000000000002, "x": [0.1, 1e-300]});
        r.timing = Some(Timing { elapsed_ms: 1.5 });
        let back: RunReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.without_timing().timing, None);
    }
}
