//! JSON instance files.
//!
//! Numbers may be JSON numbers or strings (`"5/13"`, `"0.125"`). A file with
//! any string number is loaded in exact rational mode, otherwise in floating
//! mode. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comb::{CombModel, ExplicitFamily, Family, Terminal};
use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::indices::Item;
use crate::instance::Instance;
use crate::real::{Rational, Real};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn is_text(&self) -> bool {
        matches!(self, Number::Text(_))
    }

    fn parse<T: Real>(&self, what: &str) -> Result<T> {
        match self {
            Number::Float(x) => T::from_f64(*x)
                .filter(|v| v.is_finite_value())
                .ok_or_else(|| Error::Parse(format!("{what}: {x} is not a finite number"))),
            Number::Text(s) => {
                T::parse_literal(s).ok_or_else(|| Error::Parse(format!("{what}: cannot parse {s:?} as a number")))
            }
        }
    }

    fn from_real<T: Real>(x: &T) -> Number {
        if T::EXACT {
            Number::Text(x.to_string())
        } else {
            Number::Float(x.to_f64_lossy())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAtom {
    pub value: Number,
    pub prob: Number,
}

/// Claimed indices that replace the computed ones during verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawClaimed {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_hedge: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_local: Option<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawItem {
    pub cost: Number,
    pub dist: Vec<RawAtom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<RawClaimed>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawFamily {
    UniformMatroid {
        k: usize,
    },
    Explicit {
        sets: Vec<Vec<usize>>,
        /// Accept the listed sets as generators of their upward closure.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        upward_closure: bool,
    },
    Graphic {
        edges: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawTerminal {
    #[default]
    Zero,
    FacilityLocation {
        distances: Vec<Vec<Number>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub family: RawFamily,
    #[serde(default)]
    pub terminal: RawTerminal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub items: Vec<RawItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<RawModel>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub metadata: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Claimed<T> {
    pub p_hedge: Option<T>,
    pub alpha_local: Option<T>,
}

/// A parsed and validated instance file.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem<T> {
    pub instance: Instance<T>,
    pub model: Option<CombModel<T>>,
    /// Per-item claimed indices (fault-injection fixtures).
    pub claimed: Vec<Option<Claimed<T>>>,
    pub metadata: serde_json::Value,
}

/// A problem in whichever scalar mode its file selected.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedProblem {
    Float(Problem<f64>),
    Exact(Problem<Rational>),
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// `true` when any number is written as a string.
    pub fn is_exact(&self) -> bool {
        let item_text = self.items.iter().any(|it| {
            it.cost.is_text()
                || it.dist.iter().any(|a| a.value.is_text() || a.prob.is_text())
                || it.claimed.as_ref().is_some_and(|c| {
                    c.p_hedge.as_ref().is_some_and(Number::is_text)
                        || c.alpha_local.as_ref().is_some_and(Number::is_text)
                })
        });
        let model_text = matches!(
            &self.model,
            Some(RawModel { terminal: RawTerminal::FacilityLocation { distances }, .. })
                if distances.iter().flatten().any(Number::is_text)
        );
        item_text || model_text
    }

    pub fn load(&self) -> Result<LoadedProblem> {
        if self.is_exact() {
            self.to_problem().map(LoadedProblem::Exact)
        } else {
            self.to_problem().map(LoadedProblem::Float)
        }
    }

    pub fn to_problem<T: Real>(&self) -> Result<Problem<T>> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported version {:?} (expected {FORMAT_VERSION:?})",
                self.version
            )));
        }
        let mut items = Vec::with_capacity(self.items.len());
        let mut claimed = Vec::with_capacity(self.items.len());
        for (id, raw) in self.items.iter().enumerate() {
            let wrap = |e: Error| match e {
                Error::InvalidDistribution(m) | Error::Parse(m) => Error::InvalidItem { item: id, message: m },
                other => other,
            };
            let cost: T = raw.cost.parse("cost").map_err(wrap)?;
            let pairs = raw
                .dist
                .iter()
                .map(|a| Ok((a.value.parse("value")?, a.prob.parse("prob")?)))
                .collect::<Result<Vec<(T, T)>>>()
                .map_err(wrap)?;
            let dist = DiscreteDist::new(pairs).map_err(wrap)?;
            items.push(Item::new(id, cost, dist).map_err(wrap)?);
            claimed.push(
                raw.claimed
                    .as_ref()
                    .map(|c| -> Result<Claimed<T>> {
                        Ok(Claimed {
                            p_hedge: c.p_hedge.as_ref().map(|x| x.parse("claimed p_hedge")).transpose()?,
                            alpha_local: c
                                .alpha_local
                                .as_ref()
                                .map(|x| x.parse("claimed alpha_local"))
                                .transpose()?,
                        })
                    })
                    .transpose()
                    .map_err(wrap)?,
            );
        }
        let instance = Instance::new(items)?;
        let model = self
            .model
            .as_ref()
            .map(|m| raw_model_to_model(m, instance.len()))
            .transpose()?;
        Ok(Problem {
            instance,
            model,
            claimed,
            metadata: self.metadata.clone(),
        })
    }

    /// Canonical file for a problem: atoms sorted and merged, exact numbers
    /// as reduced fractions.
    pub fn from_problem<T: Real>(problem: &Problem<T>, model: Option<RawModel>) -> Self {
        let items = problem
            .instance
            .items()
            .iter()
            .zip(&problem.claimed)
            .map(|(it, cl)| RawItem {
                cost: Number::from_real(it.cost()),
                dist: it
                    .dist()
                    .atoms()
                    .iter()
                    .map(|a| RawAtom {
                        value: Number::from_real(&a.value),
                        prob: Number::from_real(&a.prob),
                    })
                    .collect(),
                claimed: cl.as_ref().map(|c| RawClaimed {
                    p_hedge: c.p_hedge.as_ref().map(Number::from_real),
                    alpha_local: c.alpha_local.as_ref().map(Number::from_real),
                }),
            })
            .collect();
        InstanceFile {
            version: FORMAT_VERSION.to_string(),
            items,
            model,
            metadata: problem.metadata.clone(),
        }
    }

    /// One normalization pass: parse, validate, write back canonically.
    pub fn canonical(&self) -> Result<Self> {
        let model = self.model.clone().map(|m| canonical_model(m, self.is_exact()));
        Ok(match self.load()? {
            LoadedProblem::Float(p) => Self::from_problem(&p, model),
            LoadedProblem::Exact(p) => Self::from_problem(&p, model),
        })
    }
}

fn canonical_model(mut m: RawModel, exact: bool) -> RawModel {
    if let RawFamily::Explicit { sets, .. } = &mut m.family {
        for s in sets.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        sets.sort();
        sets.dedup();
    }
    if let RawTerminal::FacilityLocation { distances } = &mut m.terminal {
        for d in distances.iter_mut().flatten() {
            *d = if exact {
                match d.parse::<Rational>("distance") {
                    Ok(q) => Number::from_real(&q),
                    Err(_) => d.clone(),
                }
            } else {
                match d.parse::<f64>("distance") {
                    Ok(x) => Number::Float(x),
                    Err(_) => d.clone(),
                }
            };
        }
    }
    m
}

pub fn raw_model_to_model<T: Real>(raw: &RawModel, n: usize) -> Result<CombModel<T>> {
    let family = match &raw.family {
        RawFamily::UniformMatroid { k } => Family::UniformMatroid { k: *k },
        RawFamily::Explicit { sets, upward_closure } => Family::Explicit(if *upward_closure {
            ExplicitFamily::upward_closure(n, sets)?
        } else {
            ExplicitFamily::new(n, sets)?
        }),
        RawFamily::Graphic { edges } => Family::Graphic { edges: edges.clone() },
    };
    let terminal = match &raw.terminal {
        RawTerminal::Zero => Terminal::Zero,
        RawTerminal::FacilityLocation { distances } => Terminal::FacilityLocation {
            distances: distances
                .iter()
                .map(|row| row.iter().map(|d| d.parse("distance")).collect::<Result<Vec<T>>>())
                .collect::<Result<_>>()?,
        },
    };
    CombModel::new(n, family, terminal)
}

/// Reads and validates an instance file.
pub fn load_file(path: &Path) -> Result<(InstanceFile, LoadedProblem)> {
    let file = InstanceFile::read(path)?;
    let problem = file
        .load()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((file, problem))
}
