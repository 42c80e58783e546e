use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{int_from_json, json_int, sum_maps, OpfError, PerBitMap};
use crate::bitcore::BitString;
use crate::prg::{expand, int_in_range, Seed};
use crate::scalar::OpfScalar;

/// Whether a position's gap is a rise (anchor bit 0) or a fall (anchor bit 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    Rise,
    Fall,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionGap<V> {
    pub position: usize,
    pub kind: GapKind,
    pub amount: V,
}

/// A function that preserves order relative to the anchor `b` only.
///
/// Built in one pass from the least significant position. At each position
/// the value for the anchor's own bit is drawn from `[range_lo, range_hi]`.
/// The other value is drawn from an open window of width `l`:
///
/// * anchor bit 1: `f_i(0) ∈ (f_i(1) - v_i - l, f_i(1) - v_i)`, `v_i` the
///   sum of rises below `i`;
/// * anchor bit 0: `f_i(1) ∈ (f_i(0) + u_i, f_i(0) + u_i + l)`, `u_i` the
///   sum of falls below `i`.
///
/// Each fall then exceeds every lower rise combined and vice versa, which is
/// exactly what comparing against `b` at the first differing bit needs.
/// Orderings between two non-anchor inputs are not preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointOpf<V> {
    b: BitString,
    maps: Vec<PerBitMap<V>>,
    l: V,
    range_lo: V,
    range_hi: V,
    seed: Option<Seed>,
}

#[derive(Clone, Copy)]
enum Slot {
    Anchor,
    Partner,
}

fn check_params<V: OpfScalar>(l: &V, lo: &V, hi: &V) -> Result<(), OpfError> {
    let two = V::one() + V::one();
    if *l < two {
        return Err(OpfError::BadParams(format!(
            "l must be at least 2, got {l}"
        )));
    }
    if hi <= lo {
        return Err(OpfError::BadParams(format!(
            "sampling range [{lo}, {hi}] must have range_hi > range_lo"
        )));
    }
    Ok(())
}

fn build<V, D>(
    b: &BitString,
    l: &V,
    range_lo: &V,
    range_hi: &V,
    mut draw: D,
) -> Result<Vec<PerBitMap<V>>, OpfError>
where
    V: OpfScalar,
    D: FnMut(usize, Slot, &V, &V, bool) -> Result<V, OpfError>,
{
    check_params(l, range_lo, range_hi)?;
    let add = |a: &V, b: &V| a.checked_add(b).ok_or(OpfError::Overflow);
    let sub = |a: &V, b: &V| a.checked_sub(b).ok_or(OpfError::Overflow);

    let mut rises = V::zero();
    let mut falls = V::zero();
    let mut maps = Vec::with_capacity(b.width());
    for i in 1..=b.width() {
        let anchor = draw(i, Slot::Anchor, range_lo, range_hi, false)?;
        if b.bit(i) {
            let hi = sub(&anchor, &rises)?;
            let lo = sub(&hi, l)?;
            let zero = draw(i, Slot::Partner, &lo, &hi, true)?;
            falls = add(&falls, &sub(&anchor, &zero)?)?;
            maps.push(PerBitMap::new(zero, anchor));
        } else {
            let lo = add(&anchor, &falls)?;
            let hi = add(&lo, l)?;
            let one = draw(i, Slot::Partner, &lo, &hi, true)?;
            rises = add(&rises, &sub(&one, &anchor)?)?;
            maps.push(PerBitMap::new(anchor, one));
        }
    }
    Ok(maps)
}

/// Builds the function at `b` (its width is the input bound `d`) with every
/// draw taken from the subseed schedule of `seed`.
pub fn construct_at_point<V: OpfScalar>(
    b: &BitString,
    l: V,
    range_lo: V,
    range_hi: V,
    seed: &Seed,
) -> Result<PointOpf<V>, OpfError> {
    let schedule = expand(seed, b.width());
    let maps = build(b, &l, &range_lo, &range_hi, |i, slot, lo, hi, exclusive| {
        let sub = match slot {
            Slot::Anchor => schedule.anchor(i),
            Slot::Partner => schedule.partner(i),
        };
        let v = int_in_range(sub, &lo.to_bigint(), &hi.to_bigint(), exclusive).map_err(|_| {
            OpfError::EmptyInterval {
                position: i,
                lo: lo.to_string(),
                hi: hi.to_string(),
            }
        })?;
        V::from_bigint(&v).ok_or(OpfError::Overflow)
    })?;
    Ok(PointOpf {
        b: b.clone(),
        maps,
        l,
        range_lo,
        range_hi,
        seed: Some(seed.clone()),
    })
}

/// Like [`construct_at_point`] but with explicit draws. `draws[i-1]` is
/// `(f_i(b_i), f_i(1 - b_i))`; each value must lie in the interval the
/// random construction would have sampled from.
pub fn construct_at_point_injected<V: OpfScalar>(
    b: &BitString,
    l: V,
    range_lo: V,
    range_hi: V,
    draws: &[(V, V)],
) -> Result<PointOpf<V>, OpfError> {
    if draws.len() != b.width() {
        return Err(OpfError::DrawCount {
            expected: b.width(),
            got: draws.len(),
        });
    }
    let maps = build(b, &l, &range_lo, &range_hi, |i, slot, lo, hi, exclusive| {
        let v = match slot {
            Slot::Anchor => &draws[i - 1].0,
            Slot::Partner => &draws[i - 1].1,
        };
        let inside = if exclusive {
            v > lo && v < hi
        } else {
            v >= lo && v <= hi
        };
        if !inside {
            let interval = if exclusive {
                format!("({lo}, {hi})")
            } else {
                format!("[{lo}, {hi}]")
            };
            return Err(OpfError::DrawOutOfRange {
                position: i,
                value: v.to_string(),
                interval,
            });
        }
        Ok(v.clone())
    })?;
    Ok(PointOpf {
        b: b.clone(),
        maps,
        l,
        range_lo,
        range_hi,
        seed: None,
    })
}

pub fn eval_point<V: OpfScalar>(f: &PointOpf<V>, x: &BitString) -> Result<V, OpfError> {
    sum_maps(&f.maps, x)
}

/// `(Σ min(f_i(0), f_i(1)), Σ max(f_i(0), f_i(1)))`.
pub fn output_bounds<V: OpfScalar>(f: &PointOpf<V>) -> Result<(V, V), OpfError> {
    let mut lo = V::zero();
    let mut hi = V::zero();
    for m in &f.maps {
        lo = lo.checked_add(m.min()).ok_or(OpfError::Overflow)?;
        hi = hi.checked_add(m.max()).ok_or(OpfError::Overflow)?;
    }
    Ok((lo, hi))
}

/// Bits needed to hold `v` in two's complement.
fn signed_width(v: &BigInt) -> usize {
    let magnitude = if v.sign() == num_bigint::Sign::Minus {
        -v - 1
    } else {
        v.clone()
    };
    magnitude.bits() as usize + 1
}

impl<V: OpfScalar> PointOpf<V> {
    pub fn anchor(&self) -> &BitString {
        &self.b
    }

    /// Input bound `d`.
    pub fn d(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[PerBitMap<V>] {
        &self.maps
    }

    pub fn l(&self) -> &V {
        &self.l
    }

    pub fn range(&self) -> (&V, &V) {
        (&self.range_lo, &self.range_hi)
    }

    pub fn seed(&self) -> Option<&Seed> {
        self.seed.as_ref()
    }

    /// `F(b)`.
    pub fn anchor_value(&self) -> Result<V, OpfError> {
        eval_point(self, &self.b)
    }

    pub fn gaps(&self) -> Result<Vec<PositionGap<V>>, OpfError> {
        self.maps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Ok(PositionGap {
                    position: i + 1,
                    kind: if self.b.bit(i + 1) {
                        GapKind::Fall
                    } else {
                        GapKind::Rise
                    },
                    amount: m.gap()?,
                })
            })
            .collect()
    }

    /// Two's complement width that holds every `f_i` value and both output
    /// bounds; the payload width for transferring single mappings.
    pub fn value_width(&self) -> Result<usize, OpfError> {
        let (lo, hi) = output_bounds(self)?;
        Ok(self
            .maps
            .iter()
            .flat_map(|m| [&m.zero_val, &m.one_val])
            .chain([&lo, &hi])
            .map(|v| signed_width(&v.to_bigint()))
            .max()
            .unwrap_or(1))
    }

    pub fn to_document(&self) -> PointOpfDocument {
        PointOpfDocument {
            maps: self
                .maps
                .iter()
                .map(|m| [json_int(&m.zero_val), json_int(&m.one_val)])
                .collect(),
            b: self.b.to_string(),
            l: json_int(&self.l),
            range: [json_int(&self.range_lo), json_int(&self.range_hi)],
            seed_hex: self.seed.as_ref().map(Seed::to_hex),
        }
    }

    /// Rebuilds from a document, re-checking every window constraint.
    pub fn from_document(doc: &PointOpfDocument) -> Result<Self, OpfError> {
        let bad = |what: &str| OpfError::BadParams(format!("unreadable {what} in document"));
        let b: BitString = doc.b.parse()?;
        let l = int_from_json(&doc.l).ok_or_else(|| bad("l"))?;
        let lo = int_from_json(&doc.range[0]).ok_or_else(|| bad("range"))?;
        let hi = int_from_json(&doc.range[1]).ok_or_else(|| bad("range"))?;
        let mut draws = Vec::with_capacity(doc.maps.len());
        for (i, [z, o]) in doc.maps.iter().enumerate() {
            let z: V = int_from_json(z).ok_or_else(|| bad("map"))?;
            let o: V = int_from_json(o).ok_or_else(|| bad("map"))?;
            draws.push(if b.bit(i + 1) { (o, z) } else { (z, o) });
        }
        let mut f = construct_at_point_injected(&b, l, lo, hi, &draws)?;
        f.seed = match &doc.seed_hex {
            Some(h) => Some(Seed::from_hex(h)?),
            None => None,
        };
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOpfDocument {
    pub maps: Vec<[serde_json::Value; 2]>,
    pub b: String,
    pub l: serde_json::Value,
    pub range: [serde_json::Value; 2],
    pub seed_hex: Option<String>,
}
