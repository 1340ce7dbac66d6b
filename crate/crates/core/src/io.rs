//! JSON schemas shared by the CLI and the bindings.
//!
//! Matrices: `{ "dim": n, "entries": [[re, im], ...] }`, row-major. Non-square
//! matrices use `"rows"` and `"cols"` in place of `"dim"`.
//! Pure states: `{ "dim": n, "amplitudes": [[re, im], ...] }`.
//! Channels: `{ "dim_in": n, "dim_out": m, "kraus": [matrix, ...] }`.

use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::states::{density_from_pure, DensityOperator, PureState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let entries = m.row_major().iter().map(|z| [z.re, z.im]).collect();
        if m.is_square() {
            Self {
                dim: Some(m.rows()),
                rows: None,
                cols: None,
                entries,
            }
        } else {
            Self {
                dim: None,
                rows: Some(m.rows()),
                cols: Some(m.cols()),
                entries,
            }
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            (Some(d), Some(r), Some(c)) if r == d && c == d => (d, d),
            _ => {
                return Err(Error::Input(
                    "field `dim`: give either `dim` or both `rows` and `cols`".into(),
                ))
            }
        };
        ComplexMatrix::from_row_major(rows, cols, complex_entries(&self.entries))
    }
}

fn complex_entries(raw: &[[f64; 2]]) -> Vec<C64> {
    raw.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureStateJson {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&PureState> for PureStateJson {
    fn from(psi: &PureState) -> Self {
        Self {
            dim: psi.dim(),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl PureStateJson {
    pub fn to_state(&self) -> Result<PureState> {
        if self.amplitudes.len() != self.dim {
            return Err(Error::Input(format!(
                "field `amplitudes`: expected {} values for dim {}, found {}",
                self.dim,
                self.dim,
                self.amplitudes.len()
            )));
        }
        PureState::new(complex_entries(&self.amplitudes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(e: &QuantumChannel) -> Self {
        Self {
            dim_in: e.dim_in(),
            dim_out: e.dim_out(),
            kraus: e.kraus().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix().map_err(|e| Error::Input(format!("kraus[{i}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let channel = QuantumChannel::new(kraus)?;
        if channel.dim_in() != self.dim_in {
            return Err(Error::Input(format!(
                "field `dim_in`: declared {}, kraus operators have {}",
                self.dim_in,
                channel.dim_in()
            )));
        }
        if channel.dim_out() != self.dim_out {
            return Err(Error::Input(format!(
                "field `dim_out`: declared {}, kraus operators have {}",
                self.dim_out,
                channel.dim_out()
            )));
        }
        Ok(channel)
    }
}

/// A state file holds either a density matrix (`entries`) or a pure state (`amplitudes`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dim: usize,
    #[serde(default)]
    entries: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    amplitudes: Option<Vec<[f64; 2]>>,
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Input(format!("malformed {what} JSON: {e}"))
}

/// Parses a density-matrix or pure-state document into a validated density operator.
pub fn parse_state(text: &str) -> Result<DensityOperator> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| json_error("state", e))?;
    match (file.entries, file.amplitudes) {
        (Some(entries), None) => {
            let m = MatrixJson {
                dim: Some(file.dim),
                rows: None,
                cols: None,
                entries,
            };
            DensityOperator::new(m.to_matrix()?)
        }
        (None, Some(amplitudes)) => {
            let psi = PureStateJson {
                dim: file.dim,
                amplitudes,
            }
            .to_state()?;
            Ok(density_from_pure(&psi))
        }
        (Some(_), Some(_)) => Err(Error::Input(
            "field `entries`: state has both `entries` and `amplitudes`".into(),
        )),
        (None, None) => Err(Error::Input("field `entries`: state needs `entries` or `amplitudes`".into())),
    }
}

pub fn parse_channel(text: &str) -> Result<QuantumChannel> {
    let file: ChannelJson = serde_json::from_str(text).map_err(|e| json_error("channel", e))?;
    file.to_channel()
}

pub fn density_to_json(rho: &DensityOperator) -> String {
    serde_json::to_string(&MatrixJson::from(rho.matrix())).expect("plain data serializes")
}

pub fn channel_to_json(e: &QuantumChannel) -> String {
    serde_json::to_string(&ChannelJson::from(e)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_channel;
    use crate::states::random_density;

    #[test]
    fn density_round_trip_is_exact() {
        let rho = random_density(3, 2, 4).unwrap();
        let text = density_to_json(&rho);
        assert_eq!(parse_state(&text).unwrap(), rho);
        assert!(text.starts_with("{\"dim\":3,\"entries\":[["));
    }

    #[test]
    fn channel_round_trip_is_exact() {
        let e = random_channel(2, 3, 9).unwrap();
        assert_eq!(parse_channel(&channel_to_json(&e)).unwrap(), e);
    }

    #[test]
    fn pure_state_document() {
        let rho = parse_state(r#"{"dim": 2, "amplitudes": [[0.6, 0.0], [0.0, 0.8]]}"#).unwrap();
        assert!((rho.matrix().get(0, 1) - C64::new(0.0, -0.48)).norm() < 1e-15);
    }

    #[test]
    fn bad_documents_name_the_field() {
        let err = parse_state(r#"{"dim": 2, "entries": [[0.9,0],[0,0],[0,0],[0,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
        let err = parse_state(r#"{"dim": 2, "entries": [[1,0],[0,0],[0,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("entries"), "{err}");
        let err = parse_state(r#"{"entries": [[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
        let err = parse_state(r#"{"dim": 2, "amplitudes": [[1,0],[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("amplitudes"), "{err}");
        let err = parse_channel(r#"{"dim_in": 2, "dim_out": 2, "kraus": [{"dim": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("kraus"), "{err}");
        let err = parse_channel(r#"{"dim_in": 3, "dim_out": 2, "kraus": [{"dim": 2, "entries": [[1,0],[0,0],[0,0],[1,0]]}]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("dim_in"), "{err}");
    }
}
