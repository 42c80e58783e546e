use super::{int_from_json, json_int, sum_maps, OpfError, PerBitMap};
use crate::bitcore::BitString;
use crate::scalar::OpfScalar;

/// Per-bit maps indexed from the least significant position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralOpf<V> {
    maps: Vec<PerBitMap<V>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Gap must exceed the sum of all lower gaps.
    DominatesLowerGaps,
    /// `f_i(1) > f_i(0)`.
    PositiveGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Valid,
    /// First failing position (1-based) and the constraint it breaks.
    Invalid {
        position: usize,
        constraint: Constraint,
    },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

impl<V: OpfScalar> GeneralOpf<V> {
    /// Wraps maps without checking them; see [`validate_general`].
    pub fn new(maps: Vec<PerBitMap<V>>) -> Self {
        GeneralOpf { maps }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, V)>) -> Self {
        GeneralOpf {
            maps: pairs
                .into_iter()
                .map(|(z, o)| PerBitMap::new(z, o))
                .collect(),
        }
    }

    pub fn maps(&self) -> &[PerBitMap<V>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `{"maps": [[f_1(0), f_1(1)], ...]}`
    pub fn to_json(&self) -> serde_json::Value {
        let maps: Vec<serde_json::Value> = self
            .maps
            .iter()
            .map(|m| serde_json::Value::Array(vec![json_int(&m.zero_val), json_int(&m.one_val)]))
            .collect();
        serde_json::json!({ "maps": maps })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, OpfError> {
        let bad = || OpfError::BadParams("expected {\"maps\": [[f0, f1], ...]}".into());
        let rows = v.get("maps").and_then(|m| m.as_array()).ok_or_else(bad)?;
        let maps = rows
            .iter()
            .map(|row| match row.as_array().map(Vec::as_slice) {
                Some([z, o]) => Ok(PerBitMap::new(
                    int_from_json(z).ok_or_else(bad)?,
                    int_from_json(o).ok_or_else(bad)?,
                )),
                _ => Err(bad()),
            })
            .collect::<Result<_, _>>()?;
        Ok(GeneralOpf { maps })
    }

    /// Running sums of the gaps, position 1 first.
    pub fn cumulative_gaps(&self) -> Result<Vec<V>, OpfError> {
        let mut acc = V::zero();
        self.maps
            .iter()
            .map(|m| {
                acc = acc.checked_add(&m.gap()?).ok_or(OpfError::Overflow)?;
                Ok(acc.clone())
            })
            .collect()
    }
}

/// Positive-gap is reported ahead of dominance at the same position.
pub fn validate_general<V: OpfScalar>(f: &GeneralOpf<V>) -> Validation {
    let mut lower = V::zero();
    for (i, m) in f.maps.iter().enumerate() {
        let position = i + 1;
        if m.one_val <= m.zero_val {
            return Validation::Invalid {
                position,
                constraint: Constraint::PositiveGap,
            };
        }
        // An overflowing gap cannot be compared, so treat it as a violation.
        let Ok(gap) = m.gap() else {
            return Validation::Invalid {
                position,
                constraint: Constraint::DominatesLowerGaps,
            };
        };
        if gap <= lower {
            return Validation::Invalid {
                position,
                constraint: Constraint::DominatesLowerGaps,
            };
        }
        lower = match lower.checked_add(&gap) {
            Some(v) => v,
            None => {
                return Validation::Invalid {
                    position: position + 1,
                    constraint: Constraint::DominatesLowerGaps,
                }
            }
        };
    }
    Validation::Valid
}

pub fn eval<V: OpfScalar>(f: &GeneralOpf<V>, x: &BitString) -> Result<V, OpfError> {
    sum_maps(&f.maps, x)
}
