use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QpError, Result};
use crate::potential::Potential;
use crate::quiver::QuiverSpec;
use crate::rational::{fmt_q, parse_q};

pub const DEFAULT_TRUNCATION: u32 = 64;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct QuiverJson {
    pub n: usize,
    #[serde(default)]
    pub loopless: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub arrows: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PotentialJson {
    pub quiver: QuiverJson,
    #[serde(default)]
    pub truncation: Option<u32>,
    pub terms: Vec<TermJson>,
}

impl PotentialJson {
    pub fn to_potential(&self) -> Result<Potential> {
        let spec = Arc::new(QuiverSpec::new(self.quiver.n, self.quiver.loopless.iter().copied())?);
        let trunc = self.truncation.unwrap_or(DEFAULT_TRUNCATION);
        let mut f = Potential::zero(spec, trunc);
        for t in &self.terms {
            if t.arrows.is_empty() {
                return Err(QpError::Invalid("term without arrows".into()));
            }
            let ids = t.arrows.iter().map(|a| f.spec.quiver.arrow_id(a)).collect::<Result<Vec<_>>>()?;
            f.add_word(&ids, parse_q(&t.coeff)?)?;
        }
        Ok(f)
    }

    pub fn from_potential(f: &Potential) -> Self {
        PotentialJson {
            quiver: QuiverJson { n: f.spec.n, loopless: f.spec.loopless.iter().copied().collect() },
            truncation: Some(f.trunc()),
            terms: f
                .elem
                .terms
                .iter()
                .map(|(p, c)| TermJson { coeff: fmt_q(c), arrows: p.names(&f.spec.quiver) })
                .collect(),
        }
    }
}

pub fn parse_potential(text: &str) -> Result<Potential> {
    if text.trim().is_empty() {
        return Err(QpError::Invalid("empty input: expected a potential object".into()));
    }
    let j: PotentialJson = serde_json::from_str(text)?;
    j.to_potential()
}

pub fn potential_to_json(f: &Potential) -> serde_json::Value {
    serde_json::to_value(PotentialJson::from_potential(f)).expect("serializable")
}
