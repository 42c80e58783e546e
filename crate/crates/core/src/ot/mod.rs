//! 1-out-of-2 oblivious transfer of signed integers.
//!
//! The sender holds `(m0, m1)`, the receiver a choice bit, and the receiver
//! ends with `m_choice`. Values travel as fixed-width two's complement words.
//!
//! Two backends:
//!
//! * `transparent`: the receiver sends its choice in the clear and the sender
//!   answers with the chosen word. No privacy, no counted operations; used as
//!   a reference.
//! * `commutative-rsa`: the sender publishes an RSA key and two random
//!   values `x0, x1`; the receiver returns `v = x_c + k^e mod N`; the sender
//!   masks `m_i` with a pad derived from `(v - x_i)^d` and returns both
//!   masked words. Only the pad for `c` equals the receiver's `k`.
//!
//! Counter convention for the RSA backend, per transfer: `ot_enc = 4`
//! (receiver's `k^e`, the blind of `x_c`, and the sender's two masks) and
//! `ot_dec = 2` (the sender's two private-key exponentiations).

mod rsa;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::prg::{Keystream, Seed};
use crate::simnet::{self, Envelope, Message, OpCounters, OpTag, Party, PartyId, Transcript};
use crate::wire::{Reader, WireError, Writer};

pub use rsa::{RsaKey, DEFAULT_MODULUS_BITS, MIN_MODULUS_BITS, PUBLIC_EXPONENT};

pub const LABEL_SETUP: &str = "ot_setup";
pub const LABEL_CHOICE: &str = "ot_choice";
pub const LABEL_REPLY: &str = "ot_reply";

pub const MAX_PAYLOAD_WIDTH: usize = u16::MAX as usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OtError {
    #[error("value {value} does not fit a {width}-bit two's complement word")]
    PayloadWidth { value: BigInt, width: usize },
    #[error("payload width must be in 1..={MAX_PAYLOAD_WIDTH}, got {0}")]
    BadWidth(usize),
    #[error("modulus size must be even and at least {MIN_MODULUS_BITS} bits, got {0}")]
    ModulusBits(usize),
    #[error("key generation failed: {0}")]
    KeyGen(String),
    #[error("unknown transfer backend {0:?} (expected transparent or commutative-rsa)")]
    UnknownBackend(String),
    #[error("transfer {index}: unexpected {label:?} in state {state}")]
    Unexpected {
        index: u16,
        label: String,
        state: &'static str,
    },
    #[error("message for transfer {got} delivered to transfer {expected}")]
    IndexMismatch { expected: u16, got: u16 },
    #[error("peer announced a {got}-bit payload, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("malformed transfer message: {0}")]
    Wire(#[from] WireError),
    #[error("value {0} out of range for the announced modulus")]
    OutOfGroup(BigUint),
    #[error("transfer run failed: {0}")]
    Network(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OtBackend {
    Transparent,
    CommutativeRsa,
}

impl OtBackend {
    pub const ALL: [OtBackend; 2] = [OtBackend::Transparent, OtBackend::CommutativeRsa];
}

impl FromStr for OtBackend {
    type Err = OtError;

    fn from_str(s: &str) -> Result<Self, OtError> {
        match s {
            "transparent" => Ok(OtBackend::Transparent),
            "commutative-rsa" => Ok(OtBackend::CommutativeRsa),
            other => Err(OtError::UnknownBackend(other.to_string())),
        }
    }
}

impl fmt::Display for OtBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OtBackend::Transparent => "transparent",
            OtBackend::CommutativeRsa => "commutative-rsa",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OtConfig {
    pub backend: OtBackend,
    /// Two's complement width of each transferred value.
    pub width: usize,
    pub modulus_bits: usize,
}

impl OtConfig {
    pub fn new(backend: OtBackend, width: usize) -> Result<Self, OtError> {
        Self::with_modulus(backend, width, DEFAULT_MODULUS_BITS)
    }

    pub fn with_modulus(
        backend: OtBackend,
        width: usize,
        modulus_bits: usize,
    ) -> Result<Self, OtError> {
        if width == 0 || width > MAX_PAYLOAD_WIDTH {
            return Err(OtError::BadWidth(width));
        }
        if modulus_bits < MIN_MODULUS_BITS || !modulus_bits.is_multiple_of(2) {
            return Err(OtError::ModulusBits(modulus_bits));
        }
        Ok(OtConfig {
            backend,
            width,
            modulus_bits,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtSenderInput {
    pub m0: BigInt,
    pub m1: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OtReceiverInput {
    pub choice: bool,
}

/// A message one side of a transfer wants sent to the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtPacket {
    pub label: &'static str,
    pub payload: Vec<u8>,
}

pub fn is_ot_label(label: &str) -> bool {
    matches!(label, LABEL_SETUP | LABEL_CHOICE | LABEL_REPLY)
}

/// Transfer index carried at the front of every transfer payload.
pub fn packet_index(payload: &[u8]) -> Result<u16, OtError> {
    Ok(Reader::new(payload).u16("transfer index")?)
}

fn to_word(v: &BigInt, width: usize) -> Result<BigUint, OtError> {
    let half = BigInt::one() << (width - 1);
    if *v >= half || *v < -&half {
        return Err(OtError::PayloadWidth {
            value: v.clone(),
            width,
        });
    }
    let word = v.mod_floor(&(half << 1));
    Ok(word.to_biguint().expect("reduced value is non-negative"))
}

fn from_word(word: &BigUint, width: usize) -> BigInt {
    let v = BigInt::from_biguint(Sign::Plus, word.clone());
    if word.bit(width as u64 - 1) {
        v - (BigInt::one() << width)
    } else {
        v
    }
}

fn word_modulus(width: usize) -> BigUint {
    BigUint::one() << width
}

/// `width`-bit pad derived from a group element.
fn pad(k: &BigUint, modulus_len: usize, width: usize) -> BigUint {
    let mut bytes = b"ot-pad".to_vec();
    let mut kb = k.to_bytes_be();
    while kb.len() < modulus_len {
        kb.insert(0, 0);
    }
    bytes.extend_from_slice(&kb);
    Keystream::new(&Seed::new(bytes).expect("non-empty")).bits(width)
}

fn check_index(expected: u16, r: &mut Reader<'_>) -> Result<(), OtError> {
    let got = r.u16("transfer index")?;
    if got != expected {
        return Err(OtError::IndexMismatch { expected, got });
    }
    Ok(())
}

#[derive(Debug)]
pub struct OtSender {
    index: u16,
    cfg: OtConfig,
    words: [BigUint; 2],
    rng: Keystream,
    key_seed: Seed,
    key: Option<Arc<RsaKey>>,
    x: Option<[BigUint; 2]>,
    done: bool,
}

impl OtSender {
    /// `seed` is the sender's party seed; per-transfer randomness and the
    /// RSA key are derived from it and `index`.
    pub fn new(
        index: u16,
        input: &OtSenderInput,
        cfg: OtConfig,
        seed: &Seed,
    ) -> Result<Self, OtError> {
        Ok(OtSender {
            index,
            cfg,
            words: [
                to_word(&input.m0, cfg.width)?,
                to_word(&input.m1, cfg.width)?,
            ],
            rng: Keystream::new(&seed.derive_indexed("ot-sender", index as u64)),
            key_seed: seed.derive_indexed("ot-key", index as u64),
            key: None,
            x: None,
            done: false,
        })
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn start(&mut self, _ops: &mut OpCounters) -> Result<Option<OtPacket>, OtError> {
        match self.cfg.backend {
            OtBackend::Transparent => Ok(None),
            OtBackend::CommutativeRsa => {
                let key = RsaKey::cached(&self.key_seed, self.cfg.modulus_bits)?;
                let x = [self.rng.below(&key.n), self.rng.below(&key.n)];
                let payload = Writer::new()
                    .u16(self.index)
                    .u16(self.cfg.width as u16)
                    .uint(&key.n)
                    .uint(&key.e)
                    .uint(&x[0])
                    .uint(&x[1])
                    .finish();
                self.key = Some(key);
                self.x = Some(x);
                Ok(Some(OtPacket {
                    label: LABEL_SETUP,
                    payload,
                }))
            }
        }
    }

    pub fn on_packet(
        &mut self,
        label: &str,
        payload: &[u8],
        ops: &mut OpCounters,
    ) -> Result<Option<OtPacket>, OtError> {
        if self.done || label != LABEL_CHOICE {
            return Err(OtError::Unexpected {
                index: self.index,
                label: label.to_string(),
                state: if self.done { "done" } else { "awaiting choice" },
            });
        }
        let mut r = Reader::new(payload);
        check_index(self.index, &mut r)?;
        let width = self.cfg.width;
        let reply = match self.cfg.backend {
            OtBackend::Transparent => {
                let choice = r.u8("choice")? != 0;
                r.finish()?;
                Writer::new()
                    .u16(self.index)
                    .word(&self.words[choice as usize], width)
                    .finish()
            }
            OtBackend::CommutativeRsa => {
                let v = r.uint("blinded value")?;
                r.finish()?;
                let key = self.key.as_ref().expect("setup precedes choice");
                let x = self.x.as_ref().expect("setup precedes choice");
                if v >= key.n {
                    return Err(OtError::OutOfGroup(v));
                }
                let modulus = word_modulus(width);
                let n_len = key.n.bits().div_ceil(8) as usize;
                let mut w = Writer::new().u16(self.index);
                for (xi, mi) in x.iter().zip(&self.words) {
                    let k = key.decrypt(&((&v + &key.n - xi) % &key.n));
                    ops.bump(OpTag::OtDec);
                    let masked = (mi + pad(&k, n_len, width)) % &modulus;
                    ops.bump(OpTag::OtEnc);
                    w = w.word(&masked, width);
                }
                w.finish()
            }
        };
        self.done = true;
        Ok(Some(OtPacket {
            label: LABEL_REPLY,
            payload: reply,
        }))
    }
}

#[derive(Debug)]
pub struct OtReceiver {
    index: u16,
    cfg: OtConfig,
    choice: bool,
    rng: Keystream,
    /// `(k, modulus byte length)` once the setup has been answered.
    blind: Option<(BigUint, usize)>,
    received: Option<BigInt>,
}

impl OtReceiver {
    pub fn new(index: u16, input: OtReceiverInput, cfg: OtConfig, seed: &Seed) -> Self {
        OtReceiver {
            index,
            cfg,
            choice: input.choice,
            rng: Keystream::new(&seed.derive_indexed("ot-receiver", index as u64)),
            blind: None,
            received: None,
        }
    }

    pub fn index(&self) -> u16 {
        self.index
    }

    pub fn received(&self) -> Option<&BigInt> {
        self.received.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.received.is_some()
    }

    pub fn start(&mut self, _ops: &mut OpCounters) -> Result<Option<OtPacket>, OtError> {
        match self.cfg.backend {
            OtBackend::Transparent => Ok(Some(OtPacket {
                label: LABEL_CHOICE,
                payload: Writer::new().u16(self.index).u8(self.choice as u8).finish(),
            })),
            OtBackend::CommutativeRsa => Ok(None),
        }
    }

    fn unexpected(&self, label: &str) -> OtError {
        OtError::Unexpected {
            index: self.index,
            label: label.to_string(),
            state: if self.received.is_some() {
                "done"
            } else if self.blind.is_some() {
                "awaiting reply"
            } else {
                "awaiting setup"
            },
        }
    }

    pub fn on_packet(
        &mut self,
        label: &str,
        payload: &[u8],
        ops: &mut OpCounters,
    ) -> Result<Option<OtPacket>, OtError> {
        if self.received.is_some() {
            return Err(self.unexpected(label));
        }
        let mut r = Reader::new(payload);
        let width = self.cfg.width;
        match (self.cfg.backend, label, &self.blind) {
            (OtBackend::CommutativeRsa, LABEL_SETUP, None) => {
                check_index(self.index, &mut r)?;
                let announced = r.u16("payload width")? as usize;
                if announced != width {
                    return Err(OtError::WidthMismatch {
                        expected: width,
                        got: announced,
                    });
                }
                let n = r.uint("modulus")?;
                let e = r.uint("exponent")?;
                let x0 = r.uint("x0")?;
                let x1 = r.uint("x1")?;
                r.finish()?;
                let xc = if self.choice { x1 } else { x0 };
                if xc >= n {
                    return Err(OtError::OutOfGroup(xc));
                }
                let k = self.rng.below(&n);
                let ke = k.modpow(&e, &n);
                ops.bump(OpTag::OtEnc);
                let v = (xc + ke) % &n;
                ops.bump(OpTag::OtEnc);
                self.blind = Some((k, n.bits().div_ceil(8) as usize));
                Ok(Some(OtPacket {
                    label: LABEL_CHOICE,
                    payload: Writer::new().u16(self.index).uint(&v).finish(),
                }))
            }
            (OtBackend::CommutativeRsa, LABEL_REPLY, Some((k, n_len))) => {
                check_index(self.index, &mut r)?;
                let m0 = r.word(width, "masked m0")?;
                let m1 = r.word(width, "masked m1")?;
                r.finish()?;
                let masked = if self.choice { m1 } else { m0 };
                let modulus = word_modulus(width);
                let word = (masked + &modulus - pad(k, *n_len, width)) % &modulus;
                self.received = Some(from_word(&word, width));
                Ok(None)
            }
            (OtBackend::Transparent, LABEL_REPLY, _) => {
                check_index(self.index, &mut r)?;
                let word = r.word(width, "value")?;
                r.finish()?;
                self.received = Some(from_word(&word, width));
                Ok(None)
            }
            _ => Err(self.unexpected(label)),
        }
    }
}

struct SenderParty(OtSender);
struct ReceiverParty(OtReceiver);

fn envelopes(to: PartyId, p: Option<OtPacket>) -> Vec<Envelope> {
    p.map(|p| Envelope::new(to, p.label, p.payload))
        .into_iter()
        .collect()
}

impl Party for SenderParty {
    type Error = OtError;

    fn id(&self) -> PartyId {
        PartyId::Bob
    }

    fn start(&mut self, ops: &mut OpCounters) -> Result<Vec<Envelope>, OtError> {
        Ok(envelopes(PartyId::Alice, self.0.start(ops)?))
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, OtError> {
        Ok(envelopes(
            PartyId::Alice,
            self.0.on_packet(&msg.label, &msg.payload, ops)?,
        ))
    }

    fn is_terminal(&self) -> bool {
        self.0.is_done()
    }

    fn state(&self) -> String {
        if self.0.is_done() { "done" } else { "pending" }.into()
    }
}

impl Party for ReceiverParty {
    type Error = OtError;

    fn id(&self) -> PartyId {
        PartyId::Alice
    }

    fn start(&mut self, ops: &mut OpCounters) -> Result<Vec<Envelope>, OtError> {
        Ok(envelopes(PartyId::Bob, self.0.start(ops)?))
    }

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, OtError> {
        Ok(envelopes(
            PartyId::Bob,
            self.0.on_packet(&msg.label, &msg.payload, ops)?,
        ))
    }

    fn is_terminal(&self) -> bool {
        self.0.is_done()
    }

    fn state(&self) -> String {
        if self.0.is_done() { "done" } else { "pending" }.into()
    }
}

/// One standalone transfer with Bob as sender and Alice as receiver.
pub fn ot_execute(
    sender: &OtSenderInput,
    receiver: OtReceiverInput,
    cfg: OtConfig,
    seed: &Seed,
) -> Result<(BigInt, Transcript), OtError> {
    let mut s = SenderParty(OtSender::new(0, sender, cfg, &seed.derive("sender"))?);
    let mut r = ReceiverParty(OtReceiver::new(0, receiver, cfg, &seed.derive("receiver")));
    let transcript = simnet::run::<OtError>(&mut [&mut s, &mut r], None).map_err(|e| match e {
        simnet::SimError::Party { source, .. } => source,
        other => OtError::Network(other.to_string()),
    })?;
    let received = r.0.received.expect("terminal receiver holds a value");
    Ok((received, transcript))
}
