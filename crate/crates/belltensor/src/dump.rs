//! JSON dump of an SDP, for replaying solver issues outside the program that
//! built it.

use belltensor_core::sdp::{Sense, SdpProblem};
use belltensor_core::HermitianMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::format::HermitianJson;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDump {
    pub label: String,
    pub dim: usize,
    pub objective: Option<HermitianJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDump {
    pub block: usize,
    pub matrix: HermitianJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDump {
    pub terms: Vec<TermDump>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpDump {
    pub sense: String,
    pub blocks: Vec<BlockDump>,
    pub constraints: Vec<ConstraintDump>,
}

impl From<&SdpProblem> for SdpDump {
    fn from(p: &SdpProblem) -> Self {
        SdpDump {
            sense: match p.sense() {
                Sense::Minimize => "minimize",
                Sense::Maximize => "maximize",
            }
            .into(),
            blocks: p
                .blocks()
                .iter()
                .enumerate()
                .map(|(k, b)| BlockDump {
                    label: b.label.clone(),
                    dim: b.dim,
                    objective: p.objective(k).map(HermitianJson::from),
                })
                .collect(),
            constraints: p
                .constraints()
                .iter()
                .map(|c| ConstraintDump {
                    terms: c
                        .terms
                        .iter()
                        .map(|(block, m)| TermDump {
                            block: *block,
                            matrix: HermitianJson::from(m),
                        })
                        .collect(),
                    rhs: c.rhs,
                })
                .collect(),
        }
    }
}

impl SdpDump {
    pub fn to_problem(&self) -> Result<SdpProblem> {
        let sense = match self.sense.as_str() {
            "minimize" => Sense::Minimize,
            "maximize" => Sense::Maximize,
            other => {
                return Err(crate::Error::Format {
                    what: "SDP dump",
                    reason: format!("unknown sense '{other}'"),
                })
            }
        };
        let mut p = SdpProblem::new(sense);
        for b in &self.blocks {
            let k = p.add_block(b.label.clone(), b.dim);
            if let Some(c) = &b.objective {
                p.set_objective(k, HermitianMatrix::try_from(c)?)?;
            }
        }
        for c in &self.constraints {
            let terms = c
                .terms
                .iter()
                .map(|t| Ok((t.block, HermitianMatrix::try_from(&t.matrix)?)))
                .collect::<Result<Vec<_>>>()?;
            p.add_constraint(terms, c.rhs)?;
        }
        Ok(p)
    }
}
