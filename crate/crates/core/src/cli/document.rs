//! JSON state documents.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "statistics": "fermion",
//!   "particles": 2,
//!   "dim": 3,
//!   "product": [[1, 0, 0], [0, [0, 1], 0]],
//!   "then_antisymmetrize": true
//! }
//! ```
//!
//! Exactly one of `amplitudes` (sparse `{index, re, im}` entries),
//! `product` (one vector per particle) or `named` must be present. Complex
//! numbers are written as a plain number or as `[re, im]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{antisymmetrize, make_factorized_in, symmetrize, ModeSpace, Statistics, StateVector};
use crate::linalg::{CMatrix, CVector, C64};
use crate::named::NamedState;

pub const SCHEMA_VERSION: u32 = 1;

/// A complex number in a document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Complex> for C64 {
    fn from(z: Complex) -> C64 {
        match z {
            Complex::Real(re) => C64::new(re, 0.0),
            Complex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub index: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub schema_version: u32,
    pub statistics: String,
    pub particles: usize,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub then_antisymmetrize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub then_symmetrize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<String>,
}

fn field_error(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{path}: {msg}"))
}

/// Parse JSON text, reporting the path of the offending field.
pub fn parse_document(text: &str) -> Result<StateDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        field_error(if path.is_empty() { "document" } else { &path }, e.inner())
    })
}

impl StateDocument {
    /// Build and validate the state the document describes.
    pub fn to_state(&self) -> Result<StateVector> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_error("schema_version", format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version)));
        }
        let statistics: Statistics = self.statistics.parse().map_err(|e| field_error("statistics", e))?;
        if self.particles == 0 {
            return Err(field_error("particles", "must be at least 1"));
        }
        if self.dim == 0 {
            return Err(field_error("dim", "must be at least 1"));
        }
        let present = [self.amplitudes.is_some(), self.product.is_some(), self.named.is_some()];
        if present.iter().filter(|&&p| p).count() != 1 {
            return Err(field_error("document", "exactly one of `amplitudes`, `product`, `named` is required"));
        }
        if self.product.is_none() && (self.then_antisymmetrize.is_some() || self.then_symmetrize.is_some()) {
            return Err(field_error("document", "`then_antisymmetrize`/`then_symmetrize` only apply to `product`"));
        }
        let space = match &self.labels {
            Some(l) if l.len() != self.dim => {
                return Err(field_error("labels", format!("{} labels for dimension {}", l.len(), self.dim)))
            }
            Some(l) => ModeSpace::with_labels(l.clone())?,
            None => ModeSpace::new(self.dim)?,
        };
        let modes = vec![space.clone(); self.particles];

        if let Some(name) = &self.named {
            let named: NamedState = name.parse().map_err(|e| field_error("named", e))?;
            let state = named.build();
            if state.particles() != self.particles || state.modes()[0].dim() != self.dim {
                return Err(field_error(
                    "named",
                    format!("'{name}' has {} particles of dimension {}", state.particles(), state.modes()[0].dim()),
                ));
            }
            let state = match &self.labels {
                Some(l) => state.with_labels(l.clone())?,
                None => state,
            };
            return state.with_statistics(statistics).map_err(|e| field_error("statistics", e));
        }

        if let Some(vectors) = &self.product {
            if vectors.len() != self.particles {
                return Err(field_error("product", format!("{} vectors for {} particles", vectors.len(), self.particles)));
            }
            let mut factors = Vec::with_capacity(vectors.len());
            for (k, v) in vectors.iter().enumerate() {
                if v.len() != self.dim {
                    return Err(field_error(&format!("product[{k}]"), format!("length {} but dim is {}", v.len(), self.dim)));
                }
                factors.push(CVector::from_iterator(v.len(), v.iter().map(|&z| C64::from(z))));
            }
            let product = make_factorized_in(modes, &factors).map_err(|e| field_error("product", e))?;
            let state = match (self.then_antisymmetrize.unwrap_or(false), self.then_symmetrize.unwrap_or(false)) {
                (true, true) => return Err(field_error("document", "cannot both antisymmetrize and symmetrize")),
                (true, false) => antisymmetrize(&product)?.ok_or_else(|| field_error("product", "annihilated by antisymmetrization"))?,
                (false, true) => symmetrize(&product)?,
                (false, false) => product,
            };
            return state.with_statistics(statistics).map_err(|e| field_error("statistics", e));
        }

        let entries = self.amplitudes.as_ref().expect("one construction is present");
        let total = self.dim.checked_pow(self.particles as u32).ok_or(Error::TooLarge { entries: usize::MAX, cap: crate::tol::MAX_ENTRIES })?;
        if total > crate::tol::MAX_ENTRIES {
            return Err(Error::TooLarge { entries: total, cap: crate::tol::MAX_ENTRIES });
        }
        let mut amps = vec![C64::new(0.0, 0.0); total];
        let mut seen = vec![false; total];
        for (e, entry) in entries.iter().enumerate() {
            let path = format!("amplitudes[{e}].index");
            if entry.index.len() != self.particles {
                return Err(field_error(&path, format!("{} indices for {} particles", entry.index.len(), self.particles)));
            }
            let mut flat = 0;
            for (k, &i) in entry.index.iter().enumerate() {
                if i >= self.dim {
                    return Err(field_error(&format!("{path}[{k}]"), format!("{i} out of range for dim {}", self.dim)));
                }
                flat = flat * self.dim + i;
            }
            if seen[flat] {
                return Err(field_error(&path, format!("duplicate index {:?}", entry.index)));
            }
            seen[flat] = true;
            amps[flat] = C64::new(entry.re, entry.im);
        }
        StateVector::new(modes, amps, statistics).map_err(|e| field_error("amplitudes", e))
    }
}

/// Read a document from `path` and build its state.
pub fn load_state(path: &std::path::Path) -> Result<StateVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    parse_document(&text)?.to_state()
}

/// Parse a square matrix written as JSON rows of complex entries.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex>> = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("matrix: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("matrix: expected a nonempty square array of rows".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::from(rows[i][j])))
}

/// An inline matrix, or `@path` to read it from a file.
pub fn load_matrix(arg: &str) -> Result<CMatrix> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))?;
            parse_matrix(&text)
        }
        None => parse_matrix(arg),
    }
}

/// A sparse document for `state`, listing its nonzero amplitudes.
pub fn document_for(state: &StateVector) -> Result<StateDocument> {
    let d = state.common_dim().ok_or(Error::UnequalModeSpaces)?;
    let n = state.particles();
    let mut entries = Vec::new();
    for (flat, z) in state.amplitudes().iter().enumerate() {
        if z.norm() == 0.0 {
            continue;
        }
        let mut index = vec![0; n];
        let mut rest = flat;
        for slot in (0..n).rev() {
            index[slot] = rest % d;
            rest /= d;
        }
        entries.push(AmplitudeEntry { index, re: z.re, im: z.im });
    }
    Ok(StateDocument {
        schema_version: SCHEMA_VERSION,
        statistics: state.statistics().to_string(),
        particles: n,
        dim: d,
        labels: state.modes()[0].labels().map(<[String]>::to_vec),
        amplitudes: Some(entries),
        product: None,
        then_antisymmetrize: None,
        then_symmetrize: None,
        named: None,
    })
}
