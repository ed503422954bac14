//! JSON file schemas shared by the subcommands.

use ldpopt_core::{Channel, Distribution, Error as CoreError};
use serde::{Deserialize, Serialize};

/// `{"p": [...], "q": [...]}`
#[derive(Serialize, Deserialize)]
pub struct PairFile {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// `{"matrix": [[row-major l x k]]}`
#[derive(Serialize, Deserialize)]
pub struct ChannelFile {
    pub matrix: Vec<Vec<f64>>,
}

/// `{"gamma": [...], "nu": [...], "k": k, "l": l}`
#[derive(Serialize, Deserialize)]
pub struct FamilyFile {
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
    pub k: usize,
    pub l: usize,
}

impl PairFile {
    pub fn load(path: &str) -> Result<(Distribution, Distribution), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let file: PairFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        let p = Distribution::new(file.p).map_err(|e| format!("{path}: p: {e}"))?;
        let q = Distribution::new(file.q).map_err(|e| format!("{path}: q: {e}"))?;
        if p.len() != q.len() {
            return Err(format!("{path}: p and q have different lengths"));
        }
        Ok((p, q))
    }

    pub fn from_pair(p: &Distribution, q: &Distribution) -> Self {
        PairFile {
            p: p.probs().to_vec(),
            q: q.probs().to_vec(),
        }
    }
}

impl ChannelFile {
    pub fn load(path: &str) -> Result<Channel, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let file: ChannelFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        Channel::new(file.matrix).map_err(|e: CoreError| format!("{path}: {e}"))
    }

    pub fn from_channel(t: &Channel) -> Self {
        ChannelFile { matrix: t.rows() }
    }
}

/// Print a float with 17 significant digits (CSV convention).
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
