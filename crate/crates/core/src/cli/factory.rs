//! Compact factory specs: `name[:key=value,...]`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::channels::{random_channel, standard_channel, QuantumChannel, StandardChannel};
use crate::error::{Error, Result};
use crate::io::{parse_channel, parse_state};
use crate::numerics::partial_trace;
use crate::states::{density_from_pure, random_density, random_pure, DensityOperator, PureState};

pub const STATE_SPECS: &str = "\
mixed:d=N            maximally mixed state I/N
basis:d=N,k=K        basis state |K>
random:d=N,rank=R,seed=S
random_pure:d=N,seed=S
epr_half             reduced state of (|01> - |10>)/sqrt(2) on the first qubit";

pub const CHANNEL_SPECS: &str = "\
identity[:d=N]
depolarizing:p=P[,d=N]     (1-p) rho + p I/d
dephasing:p=P[,d=N]        off-diagonal entries scaled by 1-p
amplitude_damping:gamma=G  qubit only
replace_mixed[:d=N]        rho -> I/d
random:k=K,seed=S[,d=N]    Haar-random channel with K Kraus operators
(d defaults to the dimension of the state when one is given)";

/// A parsed `name:key=value,...` spec.
#[derive(Debug)]
pub struct Spec {
    pub name: String,
    params: BTreeMap<String, String>,
}

impl Spec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (text, None),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Input(format!("spec `{text}`: bad name `{name}`")));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Input(format!("spec `{text}`: expected key=value, found `{item}`")))?;
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty() || v.is_empty() {
                    return Err(Error::Input(format!("spec `{text}`: empty key or value in `{item}`")));
                }
                if params.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(Error::Input(format!("spec `{text}`: key `{k}` given twice")));
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            params,
        })
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(Error::Input(format!(
                "spec `{}`: unknown key `{k}` (allowed: {})",
                self.name,
                if keys.is_empty() { "none".to_string() } else { keys.join(", ") }
            ))),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn missing(&self, key: &str) -> Error {
        Error::Input(format!("spec `{}`: missing key `{key}`", self.name))
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Input(format!("spec `{}`: `{key}` is not a number: `{v}`", self.name)))
            })
            .transpose()
    }

    pub fn uint(&self, key: &str) -> Result<Option<u64>> {
        self.raw(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    Error::Input(format!("spec `{}`: `{key}` is not a non-negative integer: `{v}`", self.name))
                })
            })
            .transpose()
    }

    fn required_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| self.missing(key))
    }

    fn required_uint(&self, key: &str) -> Result<u64> {
        self.uint(key)?.ok_or_else(|| self.missing(key))
    }

    fn dim(&self, default: Option<usize>) -> Result<usize> {
        match (self.uint("d")?, default) {
            (Some(d), _) => Ok(d as usize),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.missing("d")),
        }
    }
}

fn read_if_file(arg: &str) -> Result<Option<String>> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path)
            .map(Some)
            .map_err(|e| Error::Input(format!("cannot read `{arg}`: {e}")))
    } else {
        Ok(None)
    }
}

/// Loads a state from a JSON file path or builds it from a spec.
pub fn load_state(arg: &str) -> Result<DensityOperator> {
    if let Some(text) = read_if_file(arg)? {
        return parse_state(&text).map_err(|e| Error::Input(format!("{arg}: {e}")));
    }
    state_from_spec(arg)
}

pub fn state_from_spec(text: &str) -> Result<DensityOperator> {
    let spec = Spec::parse(text)?;
    match spec.name.as_str() {
        "mixed" => {
            spec.allow(&["d"])?;
            let d = spec.dim(None)?;
            if d == 0 {
                return Err(Error::Parameter { name: "d", value: 0.0 });
            }
            Ok(DensityOperator::maximally_mixed(d))
        }
        "basis" => {
            spec.allow(&["d", "k"])?;
            let psi = PureState::basis(spec.dim(None)?, spec.required_uint("k")? as usize)?;
            Ok(density_from_pure(&psi))
        }
        "random" => {
            spec.allow(&["d", "rank", "seed"])?;
            random_density(
                spec.dim(None)?,
                spec.required_uint("rank")? as usize,
                spec.required_uint("seed")?,
            )
        }
        "random_pure" => {
            spec.allow(&["d", "seed"])?;
            let d = spec.dim(None)?;
            if d == 0 {
                return Err(Error::Parameter { name: "d", value: 0.0 });
            }
            Ok(density_from_pure(&random_pure(d, spec.required_uint("seed")?)))
        }
        "epr_half" => {
            spec.allow(&[])?;
            epr_half()
        }
        other => Err(Error::Input(format!(
            "unknown state `{other}` (not a file either); known specs:\n{STATE_SPECS}"
        ))),
    }
}

/// `tr_B |psi><psi|` for the singlet.
pub fn epr_half() -> Result<DensityOperator> {
    let joint = density_from_pure(&PureState::epr());
    DensityOperator::new(partial_trace(
        joint.matrix(),
        &crate::numerics::SubsystemShape::bipartite(2, 2)?,
        &[0],
    )?)
}

/// Loads a channel from a JSON file path or builds it from a spec.
pub fn load_channel(arg: &str, default_dim: Option<usize>) -> Result<QuantumChannel> {
    if let Some(text) = read_if_file(arg)? {
        return parse_channel(&text).map_err(|e| Error::Input(format!("{arg}: {e}")));
    }
    channel_from_spec(arg, default_dim)
}

pub fn channel_from_spec(text: &str, default_dim: Option<usize>) -> Result<QuantumChannel> {
    let spec = Spec::parse(text)?;
    let kind = match spec.name.as_str() {
        "identity" => {
            spec.allow(&["d"])?;
            StandardChannel::Identity
        }
        "depolarizing" => {
            spec.allow(&["p", "d"])?;
            StandardChannel::Depolarizing(spec.required_float("p")?)
        }
        "dephasing" => {
            spec.allow(&["p", "d"])?;
            StandardChannel::Dephasing(spec.required_float("p")?)
        }
        "amplitude_damping" => {
            spec.allow(&["gamma", "d"])?;
            StandardChannel::AmplitudeDamping(spec.required_float("gamma")?)
        }
        "replace_mixed" => {
            spec.allow(&["d"])?;
            let d = spec.dim(default_dim)?;
            if d == 0 {
                return Err(Error::Parameter { name: "d", value: 0.0 });
            }
            StandardChannel::ReplaceWith(DensityOperator::maximally_mixed(d))
        }
        "random" => {
            spec.allow(&["k", "seed", "d"])?;
            return random_channel(
                spec.dim(default_dim)?,
                spec.required_uint("k")? as usize,
                spec.required_uint("seed")?,
            );
        }
        other => {
            return Err(Error::Input(format!(
                "unknown channel `{other}` (not a file either); known specs:\n{CHANNEL_SPECS}"
            )))
        }
    };
    let d = match kind {
        StandardChannel::AmplitudeDamping(_) => spec.dim(Some(2))?,
        _ => spec.dim(default_dim)?,
    };
    standard_channel(&kind, d)
}

/// Channel family for `sweep`, instantiated at one parameter value.
pub fn family_member(family: &str, parameter: f64, dim: usize) -> Result<QuantumChannel> {
    let kind = match family {
        "identity" => StandardChannel::Identity,
        "depolarizing" => StandardChannel::Depolarizing(parameter),
        "dephasing" => StandardChannel::Dephasing(parameter),
        "amplitude_damping" => StandardChannel::AmplitudeDamping(parameter),
        "replace_mixed" => StandardChannel::ReplaceWith(DensityOperator::maximally_mixed(dim)),
        other => {
            return Err(Error::Input(format!(
                "unknown family `{other}` (identity, depolarizing, dephasing, amplitude_damping, replace_mixed)"
            )))
        }
    };
    standard_channel(&kind, dim)
}
