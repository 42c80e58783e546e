use num_bigint::BigUint;
use serde::Serialize;

use crate::ot::OtBackend;
use crate::prg::Seed;
use crate::protocols::{
    oracle, run_protocol, Coin, Outcome, Protocol, ProtocolConfig, ProtocolError, Seeds,
};
use crate::simnet::Transcript;

pub const MAX_SWEEP_BITS: usize = 12;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub protocol: Protocol,
    /// Inputs range over `[0, 2^max_bits)`.
    pub max_bits: usize,
    /// Independent seed variants; each gets its own master seed.
    pub seeds: usize,
    pub master: Seed,
    /// Backends exercised by Protocol C.
    pub ot_backends: Vec<OtBackend>,
    pub base: ProtocolConfig,
}

impl SweepOptions {
    pub fn new(protocol: Protocol, max_bits: usize) -> Self {
        SweepOptions {
            protocol,
            max_bits,
            seeds: 1,
            master: Seed::from_u64(1),
            ot_backends: vec![OtBackend::Transparent],
            base: ProtocolConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub a: u64,
    pub b: u64,
    pub variant: String,
    pub got: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub protocol: String,
    pub max_bits: usize,
    pub variants: Vec<String>,
    pub pairs_per_variant: u64,
    pub runs: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<Mismatch>,
    pub note: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn variants(opts: &SweepOptions) -> Vec<(String, ProtocolConfig)> {
    let n = opts.max_bits;
    let mut out = Vec::new();
    for i in 0..opts.seeds.max(1) {
        let seeds = Seeds::from_master(&opts.master.derive_indexed("sweep", i as u64));
        let base = ProtocolConfig {
            seeds,
            ..opts.base.clone()
        };
        match opts.protocol {
            Protocol::A => out.push((
                format!("seed {i}, w={}", n + 1),
                ProtocolConfig {
                    width: n + 1,
                    ..base
                },
            )),
            Protocol::B | Protocol::BExt => {
                for u in [true, false] {
                    out.push((
                        format!("seed {i}, u={}", u as u8),
                        ProtocolConfig {
                            width: n,
                            coin: Coin::Fixed(u),
                            complement_width: n,
                            ..base.clone()
                        },
                    ));
                }
            }
            Protocol::C => {
                for &backend in &opts.ot_backends {
                    out.push((
                        format!("seed {i}, ot={backend}"),
                        ProtocolConfig {
                            d: n,
                            ot_backend: backend,
                            ..base.clone()
                        },
                    ));
                }
            }
        }
    }
    out
}

fn describe(o: &Outcome) -> String {
    format!("{} (ge={})", o.label(), o.predicate_ge)
}

/// Compares every pair in `[0, 2^max_bits)²` against the plaintext oracle
/// under each variant. Protocol A is judged on `a ≥ b` only.
pub fn sweep(opts: &SweepOptions) -> Result<SweepReport, ProtocolError> {
    sweep_with(opts, |_| {})
}

/// One completed run, as handed to a [`sweep_with`] observer.
#[derive(Debug)]
pub struct SweepRun<'a> {
    pub variant: &'a str,
    pub a: u64,
    pub b: u64,
    pub outcome: &'a Outcome,
    pub transcript: &'a Transcript,
}

/// [`sweep`], also passing every run to `observe`.
pub fn sweep_with(
    opts: &SweepOptions,
    mut observe: impl FnMut(SweepRun<'_>),
) -> Result<SweepReport, ProtocolError> {
    if opts.max_bits == 0 || opts.max_bits > MAX_SWEEP_BITS {
        return Err(ProtocolError::Config(format!(
            "exhaustive sweeps take 1..={MAX_SWEEP_BITS} bits, got {}",
            opts.max_bits
        )));
    }
    let limit = 1u64 << opts.max_bits;
    let variants = variants(opts);
    let mut report = SweepReport {
        protocol: opts.protocol.to_string(),
        max_bits: opts.max_bits,
        variants: variants.iter().map(|(name, _)| name.clone()).collect(),
        pairs_per_variant: limit * limit,
        runs: 0,
        mismatches: 0,
        first_mismatch: None,
        note: (opts.protocol == Protocol::A)
            .then(|| "protocol A reports a >= b; equal inputs are not separated from a > b".into()),
    };
    for (name, cfg) in &variants {
        for a in 0..limit {
            for b in 0..limit {
                let (ba, bb) = (BigUint::from(a), BigUint::from(b));
                let (got, t) = run_protocol(opts.protocol, &ba, &bb, cfg)?;
                observe(SweepRun {
                    variant: name,
                    a,
                    b,
                    outcome: &got,
                    transcript: &t,
                });
                let truth = oracle(&ba, &bb);
                let ok = match opts.protocol {
                    Protocol::A => got.predicate_ge == (a >= b) && got.consistent_with(&truth),
                    _ => got == truth,
                };
                report.runs += 1;
                if !ok {
                    report.mismatches += 1;
                    report.first_mismatch.get_or_insert_with(|| Mismatch {
                        a,
                        b,
                        variant: name.clone(),
                        got: describe(&got),
                        expected: describe(&truth),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        for p in [Protocol::A, Protocol::B, Protocol::BExt, Protocol::C] {
            let mut opts = SweepOptions::new(p, 3);
            opts.seeds = 2;
            let r = sweep(&opts).unwrap();
            assert!(r.passed(), "{r:?}");
            let per_seed = if matches!(p, Protocol::B | Protocol::BExt) {
                2
            } else {
                1
            };
            assert_eq!(r.runs, 64 * 2 * per_seed);
        }
    }

    #[test]
    fn observer_sees_every_run() {
        let mut seen = 0u64;
        let r = sweep_with(&SweepOptions::new(Protocol::B, 2), |run| {
            assert_eq!(run.transcript.messages.len(), 5);
            assert!(run.a < 4 && run.b < 4);
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, r.runs);
    }

    #[test]
    fn bit_limit() {
        assert!(sweep(&SweepOptions::new(Protocol::B, 13)).is_err());
        assert!(sweep(&SweepOptions::new(Protocol::B, 0)).is_err());
    }

    #[test]
    fn protocol_a_note() {
        let r = sweep(&SweepOptions::new(Protocol::A, 2)).unwrap();
        assert!(r.note.is_some());
        assert_eq!(r.variants, vec!["seed 0, w=3".to_string()]);
    }
}
