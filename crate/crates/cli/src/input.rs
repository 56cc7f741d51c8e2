//! Input parsing: JSON vector/subspace/operator files and whitespace matrix
//! text. Every parsed object gets a canonical JSON echo (exact entries as
//! "p/q" strings, keys sorted) whose SHA-256 is the input digest.

use framecore::error::Error;
use framecore::frame::{Subspace, SubspaceFamily, VectorFamily};
use framecore::qmat::QMat;
use framecore::scalar::{q_display, q_from_f64, q_parse, CQ, Q};
use framecore::tol::{Field, Mode};
use num_traits::Zero;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub enum ParsedInput {
    Vectors(VectorFamily),
    Subspaces(SubspaceFamily),
    Operator(QMat),
}

impl ParsedInput {
    pub fn kind(&self) -> &'static str {
        match self {
            ParsedInput::Vectors(_) => "vectors",
            ParsedInput::Subspaces(_) => "subspaces",
            ParsedInput::Operator(_) => "operator",
        }
    }
}

pub fn read_source(path: &str) -> Result<String, Error> {
    if path == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        if buf.trim().is_empty() {
            return Err(Error::Parse("stdin was empty".into()));
        }
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }
}

/// Parse a file or stdin. JSON objects describe vector families, subspace
/// families or operators; anything else is treated as whitespace matrix
/// text with rows as vectors (float mode).
pub fn parse_input(source: &str) -> Result<ParsedInput, Error> {
    let trimmed = source.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let value: Value = serde_json::from_str(source).map_err(|e| {
            Error::Parse(format!(
                "invalid JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        parse_json(&value)
    } else {
        parse_matrix_text(source).map(ParsedInput::Vectors)
    }
}

fn parse_json(value: &Value) -> Result<ParsedInput, Error> {
    if let Some(arr) = value.as_array() {
        // A bare array of rows is a vector family.
        return parse_vectors_json(None, arr, None).map(ParsedInput::Vectors);
    }
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object or array".into()))?;
    if let Some(op) = obj.get("operator") {
        let rows = op
            .as_array()
            .ok_or_else(|| Error::Parse("operator must be an array of rows".into()))?;
        let mut parsed: Vec<Vec<Q>> = Vec::new();
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("operator rows must be arrays".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for v in row {
                let e = parse_entry(v)?;
                if !e.value.is_real() {
                    return Err(Error::Parse("operators must be real".into()));
                }
                out.push(e.value.re);
            }
            parsed.push(out);
        }
        let cols = parsed.first().map_or(0, |r| r.len());
        if parsed.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("ragged operator rows".into()));
        }
        return Ok(ParsedInput::Operator(QMat::from_rows(parsed)));
    }
    if let Some(subs) = obj.get("subspaces") {
        let dim = obj.get("dim").and_then(Value::as_u64).map(|d| d as usize);
        return parse_subspaces_json(dim, subs).map(ParsedInput::Subspaces);
    }
    if let Some(vecs) = obj.get("vectors") {
        let arr = vecs
            .as_array()
            .ok_or_else(|| Error::Parse("vectors must be an array of rows".into()))?;
        let dim = obj.get("dim").and_then(Value::as_u64).map(|d| d as usize);
        let field = match obj.get("field").and_then(Value::as_str) {
            None => None,
            Some("real") => Some(Field::Real),
            Some("complex") => Some(Field::Complex),
            Some(other) => {
                return Err(Error::Parse(format!(
                    "field must be \"real\" or \"complex\", got {other:?}"
                )))
            }
        };
        return parse_vectors_json(dim, arr, field).map(ParsedInput::Vectors);
    }
    Err(Error::Parse(
        "object must contain \"vectors\", \"subspaces\" or \"operator\"".into(),
    ))
}

struct Entry {
    value: CQ,
    was_string: bool,
}

fn parse_entry(v: &Value) -> Result<Entry, Error> {
    match v {
        Value::Number(n) => {
            let f = n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
            if !f.is_finite() {
                return Err(Error::Parse("entries must be finite".into()));
            }
            Ok(Entry {
                value: CQ::from_real(q_from_f64(f)),
                was_string: false,
            })
        }
        Value::String(s) => {
            let q = q_parse(s)
                .ok_or_else(|| Error::Parse(format!("cannot parse rational {s:?}")))?;
            Ok(Entry {
                value: CQ::from_real(q),
                was_string: true,
            })
        }
        Value::Array(pair) if pair.len() == 2 => {
            let re = parse_entry(&pair[0])?;
            let im = parse_entry(&pair[1])?;
            Ok(Entry {
                value: CQ::new(re.value.re, im.value.re),
                was_string: re.was_string || im.was_string,
            })
        }
        other => Err(Error::Parse(format!(
            "entry must be a number, \"p/q\" string or [re, im] pair, got {other}"
        ))),
    }
}

fn parse_vectors_json(
    dim: Option<usize>,
    rows: &[Value],
    field: Option<Field>,
) -> Result<VectorFamily, Error> {
    let mut parsed: Vec<Vec<CQ>> = Vec::new();
    let mut any_string = false;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("vector {} must be an array", i + 1)))?;
        let mut out = Vec::with_capacity(row.len());
        for v in row {
            let e = parse_entry(v)?;
            any_string |= e.was_string;
            out.push(e.value);
        }
        parsed.push(out);
    }
    let n = match dim {
        Some(d) => d,
        None => parsed.first().map_or(0, |r| r.len()),
    };
    if let Some(bad) = parsed.iter().position(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "vector {} has {} entries, expected {}",
            bad + 1,
            parsed[bad].len(),
            n
        )));
    }
    if let Some(i) = parsed.iter().position(|r| r.iter().all(CQ::is_zero)) {
        return Err(Error::ZeroVector(i + 1));
    }
    let has_complex = parsed.iter().any(|r| r.iter().any(|z| !z.is_real()));
    if field == Some(Field::Real) && has_complex {
        return Err(Error::Parse(
            "field is \"real\" but entries have imaginary parts".into(),
        ));
    }
    let mode = if any_string { Mode::Exact } else { Mode::Float };
    let family = VectorFamily::new_complex(n, parsed, mode)?;
    Ok(family)
}

fn parse_subspaces_json(dim: Option<usize>, subs: &Value) -> Result<SubspaceFamily, Error> {
    let arr = subs
        .as_array()
        .ok_or_else(|| Error::Parse("subspaces must be an array".into()))?;
    let mut any_string = false;
    let mut bases: Vec<Vec<Vec<Q>>> = Vec::new();
    for (i, s) in arr.iter().enumerate() {
        let basis = s
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| {
                Error::Parse(format!("subspace {} must have a \"basis\" array", i + 1))
            })?;
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for row in basis {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("basis rows must be arrays".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for v in row {
                let e = parse_entry(v)?;
                if !e.value.is_real() {
                    return Err(Error::Parse("subspaces must be real".into()));
                }
                any_string |= e.was_string;
                out.push(e.value.re);
            }
            rows.push(out);
        }
        bases.push(rows);
    }
    let n = match dim {
        Some(d) => d,
        None => bases
            .iter()
            .flat_map(|b| b.first())
            .map(|r| r.len())
            .next()
            .unwrap_or(0),
    };
    let mode = if any_string { Mode::Exact } else { Mode::Float };
    let mut subspaces = Vec::new();
    for (i, rows) in bases.into_iter().enumerate() {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "subspace {} has basis vectors of the wrong length",
                i + 1
            )));
        }
        let w = Subspace::from_span_rows(n, rows, mode)?;
        if w.dim() == 0 {
            return Err(Error::Parse(format!(
                "subspace {} has dimension zero",
                i + 1
            )));
        }
        subspaces.push(w);
    }
    SubspaceFamily::new(n, subspaces)
}

fn parse_matrix_text(source: &str) -> Result<VectorFamily, Error> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, tok) in line.split_whitespace().enumerate() {
            let q = match q_parse(tok) {
                Some(q) => q,
                None => {
                    let f: f64 = tok.parse().map_err(|_| {
                        Error::Parse(format!(
                            "line {}, column {}: cannot parse {tok:?}",
                            lineno + 1,
                            col + 1
                        ))
                    })?;
                    if !f.is_finite() {
                        return Err(Error::Parse(format!(
                            "line {}: entries must be finite",
                            lineno + 1
                        )));
                    }
                    q_from_f64(f)
                }
            };
            row.push(q);
        }
        rows.push(row);
    }
    let n = rows.first().map_or(0, |r| r.len());
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse(format!(
            "ragged rows: row {} has {} entries, expected {}",
            bad + 1,
            rows[bad].len(),
            n
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.iter().all(|q| q.is_zero())) {
        return Err(Error::ZeroVector(i + 1));
    }
    VectorFamily::new_real(n, rows, Mode::Float)
}


/// Canonical JSON echo of a parsed input: exact entries as strings, sorted
/// keys. Parsing the echo reproduces the same canonical form.
pub fn canonical_echo(input: &ParsedInput) -> Value {
    match input {
        ParsedInput::Vectors(f) => {
            let vectors: Vec<Value> = match f.data() {
                framecore::frame::FamilyData::Real(rows) => rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|q| json!(q_display(q))).collect()))
                    .collect(),
                framecore::frame::FamilyData::Complex(rows) => rows
                    .iter()
                    .map(|r| {
                        Value::Array(
                            r.iter()
                                .map(|z| {
                                    json!([q_display(&z.re), q_display(&z.im)])
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            };
            json!({
                "dim": f.ambient(),
                "field": match f.field() { Field::Real => "real", Field::Complex => "complex" },
                "vectors": vectors,
            })
        }
        ParsedInput::Subspaces(sf) => {
            let subspaces: Vec<Value> = sf
                .iter()
                .map(|w| {
                    json!({
                        "basis": w
                            .ortho_rows()
                            .iter()
                            .map(|r| Value::Array(
                                r.iter().map(|q| json!(q_display(q))).collect()
                            ))
                            .collect::<Vec<Value>>(),
                    })
                })
                .collect();
            json!({ "dim": sf.ambient(), "subspaces": subspaces })
        }
        ParsedInput::Operator(t) => json!({
            "operator": t
                .to_row_vecs()
                .iter()
                .map(|r| Value::Array(r.iter().map(|q| json!(q_display(q))).collect()))
                .collect::<Vec<Value>>(),
        }),
    }
}

pub fn digest_of(value: &Value) -> String {
    let bytes = serde_json::to_vec(value).expect("canonical echo serializes");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}
