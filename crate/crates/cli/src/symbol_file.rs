//! Symbol specification files.
//!
//! A symbol is given either literally, as a finite list of Fourier
//! coefficients,
//!
//! ```json
//! {
//!   "block_size": 1,
//!   "coefficients": [
//!     { "k": -1, "matrix": [[[-0.5, 0.0]]] },
//!     { "k":  0, "matrix": [[[ 1.25, 0.0]]] },
//!     { "k":  1, "matrix": [[[-0.5, 0.0]]] }
//!   ],
//!   "tail_tol": 1e-12
//! }
//! ```
//!
//! or as a builder applied to other specifications:
//!
//! ```json
//! { "kind": "exp", "of": { "block_size": 1, "coefficients": [ ... ] } }
//! ```
//!
//! `kind` is one of `exp`, `product`, `inverse`; `of` takes a single
//! specification or, for `product`, a list of them. Builders nest.

use std::path::Path;

use serde::Deserialize;
use szegolab_core::matrix::DenseMatrix;
use szegolab_core::symbol::{exp_symbol_auto, invert_symbol_auto, DoublingPolicy, DEFAULT_TAIL_TOL};
use szegolab_core::{BlockSymbol, C64};

use crate::runner::CliError;

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum SymbolSpec {
    Builder {
        kind: BuilderKind,
        of: OneOrMany,
    },
    Literal {
        block_size: usize,
        coefficients: Vec<CoeffEntry>,
        #[serde(default)]
        tail_tol: Option<f64>,
    },
}

#[derive(Deserialize, Debug, Copy, Clone)]
#[serde(rename_all = "lowercase")]
enum BuilderKind {
    Exp,
    Product,
    Inverse,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum OneOrMany {
    One(Box<SymbolSpec>),
    Many(Vec<SymbolSpec>),
}

#[derive(Deserialize, Debug)]
struct CoeffEntry {
    k: i64,
    /// Row-major complex entries, each as a `[re, im]` pair.
    matrix: Vec<Vec<[f64; 2]>>,
}

/// A parsed specification plus the raw file bytes (reports hash them).
/// Parsing and numeric construction are separate steps so that a failed
/// build can still be attributed to the file that caused it.
pub struct SymbolFile {
    spec: SymbolSpec,
    pub file_bytes: Vec<u8>,
}

pub fn read_spec(path: &Path) -> Result<SymbolFile, CliError> {
    let file_bytes = std::fs::read(path)
        .map_err(|e| CliError::usage(format!("cannot read symbol file `{}`: {e}", path.display())))?;
    let spec: SymbolSpec = serde_json::from_slice(&file_bytes)
        .map_err(|e| CliError::usage(format!("symbol file `{}` is malformed: {e}", path.display())))?;
    Ok(SymbolFile { spec, file_bytes })
}

impl SymbolFile {
    pub fn build(&self, policy: DoublingPolicy) -> Result<BlockSymbol, CliError> {
        build(&self.spec, policy)
    }
}

fn build(spec: &SymbolSpec, policy: DoublingPolicy) -> Result<BlockSymbol, CliError> {
    match spec {
        SymbolSpec::Literal { block_size, coefficients, tail_tol } => {
            literal(*block_size, coefficients, tail_tol.unwrap_or(DEFAULT_TAIL_TOL))
        }
        SymbolSpec::Builder { kind, of } => {
            let parts: Vec<&SymbolSpec> = match of {
                OneOrMany::One(s) => vec![s.as_ref()],
                OneOrMany::Many(v) => v.iter().collect(),
            };
            if parts.is_empty() {
                return Err(CliError::usage("builder `of` list is empty".to_string()));
            }
            match kind {
                BuilderKind::Product => {
                    let mut acc = build(parts[0], policy)?;
                    for part in &parts[1..] {
                        let next = build(part, policy)?;
                        acc = acc
                            .multiply(&next)
                            .map_err(|e| CliError::usage(format!("product of symbols: {e}")))?;
                    }
                    Ok(acc)
                }
                BuilderKind::Exp | BuilderKind::Inverse => {
                    if parts.len() != 1 {
                        return Err(CliError::usage(format!(
                            "builder `{}` takes exactly one operand, got {}",
                            match kind {
                                BuilderKind::Exp => "exp",
                                _ => "inverse",
                            },
                            parts.len()
                        )));
                    }
                    let inner = build(parts[0], policy)?;
                    let out = match kind {
                        BuilderKind::Exp => exp_symbol_auto(&inner, policy),
                        _ => invert_symbol_auto(&inner, policy),
                    };
                    out.map(|t| t.symbol).map_err(|e| CliError::classify("build-symbol", e))
                }
            }
        }
    }
}

fn literal(block_size: usize, coefficients: &[CoeffEntry], tail_tol: f64) -> Result<BlockSymbol, CliError> {
    let mut coeffs = std::collections::BTreeMap::new();
    for entry in coefficients {
        if entry.matrix.len() != block_size
            || entry.matrix.iter().any(|row| row.len() != block_size)
        {
            return Err(CliError::usage(format!(
                "coefficient k={} is not a {block_size}x{block_size} matrix",
                entry.k
            )));
        }
        let mat = DenseMatrix::from_fn(block_size, block_size, |i, j| {
            let [re, im] = entry.matrix[i][j];
            C64::new(re, im)
        });
        if coeffs.insert(entry.k, mat).is_some() {
            return Err(CliError::usage(format!("coefficient k={} appears twice", entry.k)));
        }
    }
    BlockSymbol::new(block_size, coeffs, tail_tol)
        .map_err(|e| CliError::usage(format!("invalid symbol: {e}")))
}
