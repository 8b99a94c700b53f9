//! JSON persistence for models and observation sequences.
//!
//! Model documents look like
//!
//! ```json
//! {"num_states": 2, "num_symbols": 2,
//!  "pi": [0.5, 0.5],
//!  "a": [[0.9, 0.1], [0.1, 0.9]],
//!  "b": [[0.9, 0.1], [0.1, 0.9]]}
//! ```
//!
//! and observation documents like `{"obs": [0, 0, 1]}`. Floats are written in
//! shortest round-trip form, so save followed by load reproduces the exact
//! values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    num_states: usize,
    num_symbols: usize,
    pi: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObsDoc {
    obs: Vec<usize>,
}

/// Parses and fully validates a model document.
pub fn load_model(json: &str) -> Result<HmmModel> {
    let model = load_model_unvalidated(json)?;
    model.validate().map_err(Error::InvalidModel)?;
    Ok(model)
}

/// Parses a model document checking dimensions only, so stochasticity
/// violations can be reported in full by [`HmmModel::validate`].
pub fn load_model_unvalidated(json: &str) -> Result<HmmModel> {
    let doc: ModelDoc =
        serde_json::from_str(json).map_err(|e| Error::Malformed(format!("model JSON: {e}")))?;
    let a = flatten_rows("a", doc.a, doc.num_states, doc.num_states)?;
    let b = flatten_rows("b", doc.b, doc.num_states, doc.num_symbols)?;
    HmmModel::new_unvalidated(doc.num_states, doc.num_symbols, doc.pi, a, b)
}

fn flatten_rows(name: &str, rows: Vec<Vec<f64>>, want_rows: usize, want_cols: usize) -> Result<Vec<f64>> {
    if rows.len() != want_rows {
        return Err(Error::Malformed(format!(
            "\"{name}\" has {} rows, expected {want_rows}",
            rows.len()
        )));
    }
    let mut flat = Vec::with_capacity(want_rows * want_cols);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != want_cols {
            return Err(Error::Malformed(format!(
                "\"{name}\" row {i} has {} entries, expected {want_cols}",
                row.len()
            )));
        }
        flat.extend(row);
    }
    Ok(flat)
}

pub fn save_model(model: &HmmModel) -> String {
    let n = model.num_states();
    let doc = ModelDoc {
        num_states: n,
        num_symbols: model.num_symbols(),
        pi: model.pi_row().to_vec(),
        a: (0..n).map(|i| model.a_row(i).to_vec()).collect(),
        b: (0..n).map(|i| model.b_row(i).to_vec()).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
    out.push('\n');
    out
}

/// Parses an observation document and checks every symbol against
/// `num_symbols`.
pub fn load_obs(json: &str, num_symbols: usize) -> Result<ObservationSeq> {
    let doc: ObsDoc = serde_json::from_str(json)
        .map_err(|e| Error::Malformed(format!("observation JSON: {e}")))?;
    for (t, &sym) in doc.obs.iter().enumerate() {
        if sym >= num_symbols {
            return Err(Error::Malformed(format!(
                "observation {sym} at step {t} out of range for {num_symbols} symbols"
            )));
        }
    }
    ObservationSeq::new(doc.obs)
}

pub fn save_obs(obs: &ObservationSeq) -> String {
    let doc = ObsDoc {
        obs: obs.symbols().to_vec(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("obs serialization cannot fail");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
