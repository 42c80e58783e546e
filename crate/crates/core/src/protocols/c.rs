//! Comparison through a function that preserves order around Bob's input.
//!
//! Bob builds the point function at `b` and announces `(d, W)`, the input
//! bound and the word width of its values. Alice obtains `f_i(a_i)` for each
//! bit through `d` oblivious transfers, sums them to `F(a)`, receives `F(b)`
//! and sends Bob the three-way comparison in one byte.

use num_bigint::{BigInt, BigUint};

use super::{drive, relation_byte, unexpected, Outcome, ProtocolConfig, ProtocolError, Relation};
use crate::bitcore::{to_bits, BitString};
use crate::opf::{construct_at_point, construct_at_point_injected, PointOpf};
use crate::ot::{
    is_ot_label, packet_index, OtConfig, OtPacket, OtReceiver, OtReceiverInput, OtSender,
    OtSenderInput,
};
use crate::prg::Seed;
use crate::simnet::{Envelope, Message, OpCounters, Party, PartyId, Transcript};
use crate::wire::{decode_int, encode_int, Reader, Writer};

const OPF_PARAMS: &str = "opf_params";
const ANCHOR_VALUE: &str = "anchor_value";
const RESULT: &str = "result";

fn to_envelope(to: PartyId, p: Option<OtPacket>) -> Vec<Envelope> {
    p.map(|p| Envelope::new(to, p.label, p.payload))
        .into_iter()
        .collect()
}

struct Bob {
    f: PointOpf<BigInt>,
    senders: Vec<OtSender>,
    sent_anchor: bool,
    relation: Option<Relation>,
}

struct Alice {
    a: BitString,
    cfg: ProtocolConfig,
    receivers: Vec<OtReceiver>,
    anchor_value: Option<BigInt>,
    relation: Option<Relation>,
}

impl Party for Bob {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Bob
    }

    fn start(&mut self, ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        let d = self.f.d() as u16;
        let w = self.f.value_width()? as u16;
        let mut out = vec![Envelope::new(
            PartyId::Alice,
            OPF_PARAMS,
            Writer::new().u16(d).u16(w).finish(),
        )];
        for s in &mut self.senders {
            out.extend(to_envelope(PartyId::Alice, s.start(ops)?));
        }
        Ok(out)
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        if is_ot_label(&msg.label) {
            let idx = packet_index(&msg.payload)? as usize;
            let Some(s) = self.senders.get_mut(idx) else {
                return Err(unexpected(
                    PartyId::Bob,
                    &msg.label,
                    "transfers out of range",
                ));
            };
            let mut out = to_envelope(PartyId::Alice, s.on_packet(&msg.label, &msg.payload, ops)?);
            if !self.sent_anchor && self.senders.iter().all(OtSender::is_done) {
                self.sent_anchor = true;
                out.push(Envelope::new(
                    PartyId::Alice,
                    ANCHOR_VALUE,
                    encode_int(&self.f.anchor_value()?),
                ));
            }
            return Ok(out);
        }
        match (msg.label.as_str(), self.sent_anchor, self.relation) {
            (RESULT, true, None) => {
                self.relation = Some(relation_byte(&msg.payload)?);
                Ok(vec![])
            }
            (label, ..) => Err(unexpected(PartyId::Bob, label, self.state_name())),
        }
    }

    fn is_terminal(&self) -> bool {
        self.relation.is_some()
    }

    fn state(&self) -> String {
        self.state_name().into()
    }
}

impl Bob {
    fn state_name(&self) -> &'static str {
        match (self.sent_anchor, self.relation) {
            (false, _) => "transferring",
            (true, None) => "awaiting result",
            _ => "done",
        }
    }
}

impl Alice {
    fn ot_config(&self, width: usize) -> Result<OtConfig, ProtocolError> {
        Ok(OtConfig::with_modulus(
            self.cfg.ot_backend,
            width,
            self.cfg.ot_modulus_bits,
        )?)
    }

    fn maybe_finish(&mut self) -> Vec<Envelope> {
        let ready = !self.receivers.is_empty() && self.receivers.iter().all(OtReceiver::is_done);
        match (&self.anchor_value, self.relation, ready) {
            (Some(fb), None, true) => {
                let fa: BigInt = self
                    .receivers
                    .iter()
                    .map(|r| r.received().expect("done receivers hold values"))
                    .sum();
                let r = Relation::from_ordering(fa.cmp(fb));
                self.relation = Some(r);
                vec![Envelope::new(PartyId::Bob, RESULT, vec![r.to_byte()])]
            }
            _ => vec![],
        }
    }

    fn state_name(&self) -> &'static str {
        if self.relation.is_some() {
            "done"
        } else if self.receivers.is_empty() {
            "awaiting opf_params"
        } else {
            "transferring"
        }
    }
}

impl Party for Alice {
    type Error = ProtocolError;

    fn id(&self) -> PartyId {
        PartyId::Alice
    }

    fn start(&mut self, _ops: &mut OpCounters) -> Result<Vec<Envelope>, ProtocolError> {
        Ok(vec![])
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, ProtocolError> {
        let mut out = Vec::new();
        match msg.label.as_str() {
            OPF_PARAMS if self.receivers.is_empty() => {
                let mut r = Reader::new(&msg.payload);
                let d = r.u16("d")? as usize;
                let w = r.u16("width")? as usize;
                r.finish()?;
                if d != self.a.width() {
                    return Err(ProtocolError::Config(format!(
                        "Bob announced d = {d}, Alice expects {}",
                        self.a.width()
                    )));
                }
                let cfg = self.ot_config(w)?;
                let seed = self.cfg.seeds.alice.derive("protocol-c");
                for i in 0..d {
                    let choice = OtReceiverInput {
                        choice: self.a.bit(i + 1),
                    };
                    let mut recv = OtReceiver::new(i as u16, choice, cfg, &seed);
                    out.extend(to_envelope(PartyId::Bob, recv.start(ops)?));
                    self.receivers.push(recv);
                }
            }
            label if is_ot_label(label) && !self.receivers.is_empty() => {
                let idx = packet_index(&msg.payload)? as usize;
                let Some(recv) = self.receivers.get_mut(idx) else {
                    return Err(unexpected(PartyId::Alice, label, "transfers out of range"));
                };
                out.extend(to_envelope(
                    PartyId::Bob,
                    recv.on_packet(label, &msg.payload, ops)?,
                ));
            }
            ANCHOR_VALUE if self.anchor_value.is_none() && !self.receivers.is_empty() => {
                self.anchor_value = Some(decode_int(&msg.payload)?);
            }
            label => return Err(unexpected(PartyId::Alice, label, self.state_name())),
        }
        out.extend(self.maybe_finish());
        Ok(out)
    }

    fn is_terminal(&self) -> bool {
        self.relation.is_some()
    }

    fn state(&self) -> String {
        self.state_name().into()
    }
}

fn bounded(v: &BigUint, d: usize, who: &str) -> Result<BitString, ProtocolError> {
    if v.bits() as usize > d {
        return Err(ProtocolError::InputRange {
            value: v.clone(),
            reason: format!("{who}'s input exceeds the {d}-bit bound"),
        });
    }
    Ok(to_bits(v, Some(d))?)
}

/// Bob's point function for `b` under `cfg`.
pub(crate) fn bob_function(
    b: &BitString,
    cfg: &ProtocolConfig,
) -> Result<PointOpf<BigInt>, ProtocolError> {
    let (lo, hi) = cfg.point_range.clone();
    let l = cfg.point_l.clone();
    Ok(match &cfg.point_draws {
        Some(draws) => construct_at_point_injected(b, l, lo, hi, draws)?,
        None => construct_at_point(b, l, lo, hi, &cfg.seeds.bob.derive("point-opf"))?,
    })
}

/// Runs Protocol C with inputs bounded by `cfg.d` bits.
pub fn run_protocol_c(
    a: &BigUint,
    b: &BigUint,
    cfg: &ProtocolConfig,
) -> Result<(Outcome, Transcript), ProtocolError> {
    let d = cfg.d;
    if d == 0 || d > u16::MAX as usize {
        return Err(ProtocolError::Config(format!(
            "input bound d must be in 1..=65535, got {d}"
        )));
    }
    let a_bits = bounded(a, d, "Alice")?;
    let b_bits = bounded(b, d, "Bob")?;
    let f = bob_function(&b_bits, cfg)?;
    let ot = OtConfig::with_modulus(cfg.ot_backend, f.value_width()?, cfg.ot_modulus_bits)?;
    let seed: Seed = cfg.seeds.bob.derive("protocol-c");
    let senders = f
        .maps()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let input = OtSenderInput {
                m0: m.zero_val.clone(),
                m1: m.one_val.clone(),
            };
            OtSender::new(i as u16, &input, ot, &seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut bob = Bob {
        f,
        senders,
        sent_anchor: false,
        relation: None,
    };
    let mut alice = Alice {
        a: a_bits,
        cfg: cfg.clone(),
        receivers: vec![],
        anchor_value: None,
        relation: None,
    };
    let t = drive(&mut [&mut alice, &mut bob])?;
    let (ra, rb) = (
        alice.relation.expect("terminal"),
        bob.relation.expect("terminal"),
    );
    if ra != rb {
        return Err(ProtocolError::Disagreement {
            alice: ra.to_string(),
            bob: rb.to_string(),
        });
    }
    Ok((Outcome::from_relation(ra), t))
}
