use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::fit::{fit, Fit, Model};
use crate::protocols::{run_protocol, Protocol, ProtocolConfig, ProtocolError};
use crate::simnet::OpTag;

#[derive(Debug, Clone, Serialize)]
pub struct BenchPoint {
    pub n: usize,
    pub bytes: usize,
    pub messages: usize,
    pub rounds: u32,
    pub bytes_by_label: BTreeMap<String, usize>,
    pub counters: BTreeMap<OpTag, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub protocol: String,
    pub points: Vec<BenchPoint>,
    /// The growth model the protocol is expected to follow.
    pub expected_model: Model,
    pub fits: Vec<Fit>,
    /// Labels of the messages that carry input-dependent values.
    pub payload_labels: Vec<String>,
}

impl BenchReport {
    pub fn fit_for(&self, model: Model) -> Option<&Fit> {
        self.fits.iter().find(|f| f.model == model)
    }

    /// `bytes / (n·log2 n)` per point.
    pub fn nlogn_ratios(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.bytes as f64 / (p.n as f64 * (p.n as f64).log2()))
            .collect()
    }

    /// Every point lies on or below `c·n·log2 n`, with `c` calibrated on
    /// the smallest size.
    pub fn within_nlogn_envelope(&self) -> bool {
        let r = self.nlogn_ratios();
        r.first()
            .is_some_and(|c| r.iter().all(|x| *x <= c * (1.0 + 1e-12)))
    }

    /// `bytes / n` strictly increases with `n`.
    pub fn superlinear(&self) -> bool {
        let per: Vec<f64> = self
            .points
            .iter()
            .map(|p| p.bytes as f64 / p.n as f64)
            .collect();
        per.windows(2).all(|w| w[1] > w[0])
    }

    pub fn bytes_for_label(&self, label: &str) -> Vec<usize> {
        self.points
            .iter()
            .map(|p| p.bytes_by_label.get(label).copied().unwrap_or(0))
            .collect()
    }

    /// Bytes under [`Self::payload_labels`] per point.
    pub fn payload_bytes(&self) -> Vec<usize> {
        let mut total = vec![0; self.points.len()];
        for label in &self.payload_labels {
            for (t, b) in total.iter_mut().zip(self.bytes_for_label(label)) {
                *t += b;
            }
        }
        total
    }

    /// Payload bytes per `n` strictly increase with `n`.
    pub fn payload_superlinear(&self) -> bool {
        let per: Vec<f64> = self
            .payload_bytes()
            .iter()
            .zip(&self.points)
            .map(|(b, p)| *b as f64 / p.n as f64)
            .collect();
        per.windows(2).all(|w| w[1] > w[0])
    }
}

fn payload_labels(protocol: Protocol) -> Vec<String> {
    let labels: &[&str] = match protocol {
        Protocol::A => &["enc_b", "blinded_v"],
        Protocol::B | Protocol::BExt => &["value"],
        Protocol::C => &[crate::ot::LABEL_REPLY, "anchor_value"],
    };
    labels.iter().map(|s| s.to_string()).collect()
}

/// Inputs used at size `n`: `a = 2^n - 1` and the alternating `b = 1010...`,
/// the anchor with the widest point-function values.
pub fn bench_inputs(n: usize) -> (BigUint, BigUint) {
    (
        (BigUint::one() << n) - 1u32,
        (BigUint::one() << (n + 1)) / 3u32,
    )
}

fn sized_config(protocol: Protocol, n: usize, base: &ProtocolConfig) -> ProtocolConfig {
    let mut cfg = base.clone();
    match protocol {
        Protocol::A => cfg.width = n + 1,
        Protocol::B => cfg.complement_width = n,
        Protocol::BExt => {
            cfg.width = n;
            cfg.complement_width = n;
        }
        Protocol::C => cfg.d = n,
    }
    cfg
}

/// Runs `protocol` once per size and fits byte counts against each model.
pub fn bench(
    protocol: Protocol,
    sizes: &[usize],
    base: &ProtocolConfig,
) -> Result<BenchReport, ProtocolError> {
    if sizes.is_empty() || sizes[0] < 2 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ProtocolError::Config(
            "bench sizes must be strictly ascending and at least 2".into(),
        ));
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (a, b) = bench_inputs(n);
        let cfg = sized_config(protocol, n, base);
        let (_, t) = run_protocol(protocol, &a, &b, &cfg)?;
        let mut by_label = BTreeMap::new();
        for m in &t.messages {
            *by_label.entry(m.label.clone()).or_insert(0) += m.bytes();
        }
        points.push(BenchPoint {
            n,
            bytes: t.bytes_total(),
            messages: t.messages.len(),
            rounds: t.rounds(),
            bytes_by_label: by_label,
            counters: t.counters.to_map(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.bytes as f64).collect();
    let fits = Model::ALL
        .iter()
        .filter_map(|&m| fit(m, &xs, &ys))
        .collect();
    Ok(BenchReport {
        protocol: protocol.to_string(),
        points,
        expected_model: match protocol {
            Protocol::A | Protocol::B => Model::Linear,
            Protocol::BExt => Model::NLogN,
            Protocol::C => Model::Quadratic,
        },
        fits,
        payload_labels: payload_labels(protocol),
    })
}
