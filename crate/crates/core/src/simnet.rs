//! In-memory message network for party state machines.
//!
//! Messages are delivered first-in first-out. A message's round is the
//! previous message's round, plus one whenever the sender changes, so a
//! strict ping-pong of `n` messages spans `n` rounds while a party's burst
//! of messages shares one.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartyId {
    Alice,
    Bob,
    /// Third party used only by the order-preserving protocol with a helper.
    Ursula,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpTag {
    Enc,
    Dec,
    HomSub,
    HomXor,
    OtEnc,
    OtDec,
}

impl OpTag {
    pub const ALL: [OpTag; 6] = [
        OpTag::Enc,
        OpTag::Dec,
        OpTag::HomSub,
        OpTag::HomXor,
        OpTag::OtEnc,
        OpTag::OtDec,
    ];
}

/// Cryptographic operation tallies for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters(BTreeMap<OpTag, u64>);

impl OpCounters {
    pub fn bump(&mut self, tag: OpTag) {
        self.add(tag, 1);
    }

    pub fn add(&mut self, tag: OpTag, n: u64) {
        *self.0.entry(tag).or_insert(0) += n;
    }

    pub fn get(&self, tag: OpTag) -> u64 {
        self.0.get(&tag).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &OpCounters) {
        for (&tag, &n) in &other.0 {
            self.add(tag, n);
        }
    }

    /// Every tag, zeros included.
    pub fn to_map(&self) -> BTreeMap<OpTag, u64> {
        OpTag::ALL.iter().map(|&t| (t, self.get(t))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub from: PartyId,
    pub to: PartyId,
    pub label: String,
    pub payload: Vec<u8>,
    pub round: u32,
}

impl Message {
    pub fn bytes(&self) -> usize {
        self.payload.len()
    }
}

/// A message as emitted by a party, before the network stamps it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub to: PartyId,
    pub label: String,
    pub payload: Vec<u8>,
}

impl Envelope {
    pub fn new(to: PartyId, label: impl Into<String>, payload: Vec<u8>) -> Self {
        Envelope {
            to,
            label: label.into(),
            payload,
        }
    }
}

pub trait Party {
    type Error: std::error::Error + 'static;

    fn id(&self) -> PartyId;

    /// Messages the party sends before hearing from anyone.
    fn start(&mut self, ops: &mut OpCounters) -> Result<Vec<Envelope>, Self::Error>;

    fn on_message(
        &mut self,
        msg: &Message,
        ops: &mut OpCounters,
    ) -> Result<Vec<Envelope>, Self::Error>;

    fn is_terminal(&self) -> bool;

    /// Short state name for deadlock reports.
    fn state(&self) -> String;
}

#[derive(Debug, Error)]
pub enum SimError<E: std::error::Error + 'static> {
    #[error("deadlock: no pending messages, states {states:?}")]
    Deadlock { states: Vec<(PartyId, String)> },
    #[error("message {label:?} addressed to {to}, who is not in the run")]
    UnknownParty { to: PartyId, label: String },
    #[error("{from} emitted an empty payload for {label:?}")]
    EmptyPayload { from: PartyId, label: String },
    #[error("party {party} failed")]
    Party {
        party: PartyId,
        #[source]
        source: E,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub counters: OpCounters,
}

impl Transcript {
    pub fn bytes_total(&self) -> usize {
        self.messages.iter().map(Message::bytes).sum()
    }

    pub fn rounds(&self) -> u32 {
        self.messages.iter().map(|m| m.round).max().unwrap_or(0)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.messages.iter().map(|m| m.label.as_str()).collect()
    }

    pub fn parties(&self) -> Vec<PartyId> {
        let mut ps: Vec<PartyId> = self.messages.iter().flat_map(|m| [m.from, m.to]).collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// Appends a sub-run (such as one oblivious transfer) after this one.
    pub fn append(&mut self, other: Transcript) {
        let mut last = self.messages.last().map(|m| (m.from, m.round));
        for mut m in other.messages {
            m.round = match last {
                None => 1,
                Some((from, r)) if from == m.from => r,
                Some((_, r)) => r + 1,
            };
            last = Some((m.from, m.round));
            self.messages.push(m);
        }
        self.counters.merge(&other.counters);
    }

    pub fn to_document(&self, protocol: &str, outcome: serde_json::Value) -> TranscriptDocument {
        TranscriptDocument {
            protocol: protocol.to_string(),
            parties: self.parties(),
            messages: self
                .messages
                .iter()
                .map(|m| MessageRecord {
                    from: m.from,
                    to: m.to,
                    label: m.label.clone(),
                    bytes: m.bytes(),
                    round: m.round,
                    payload_hex: hex::encode(&m.payload),
                })
                .collect(),
            counters: self.counters.to_map(),
            bytes_total: self.bytes_total(),
            rounds: self.rounds(),
            outcome,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub from: PartyId,
    pub to: PartyId,
    pub label: String,
    pub bytes: usize,
    pub round: u32,
    pub payload_hex: String,
}

/// JSON form of a transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptDocument {
    pub protocol: String,
    pub parties: Vec<PartyId>,
    pub messages: Vec<MessageRecord>,
    pub counters: BTreeMap<OpTag, u64>,
    pub bytes_total: usize,
    pub rounds: u32,
    pub outcome: serde_json::Value,
}

/// Runs the parties to completion and returns the full transcript.
///
/// Parties start in `PartyId` order. `initial`, when given, is delivered
/// before anything the parties emit from `start`.
pub fn run<E: std::error::Error + 'static>(
    parties: &mut [&mut dyn Party<Error = E>],
    initial: Option<Message>,
) -> Result<Transcript, SimError<E>> {
    let mut order: Vec<usize> = (0..parties.len()).collect();
    order.sort_by_key(|&i| parties[i].id());

    let mut transcript = Transcript::default();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut last: Option<(PartyId, u32)> = None;

    if let Some(mut msg) = initial {
        msg.round = 1;
        last = Some((msg.from, 1));
        transcript.messages.push(msg);
        queue.push_back(0);
    }

    let mut stamp = |from: PartyId, env: Envelope, transcript: &mut Transcript| {
        if env.payload.is_empty() {
            return Err(SimError::EmptyPayload {
                from,
                label: env.label,
            });
        }
        let round = match last {
            None => 1,
            Some((prev, r)) if prev == from => r,
            Some((_, r)) => r + 1,
        };
        last = Some((from, round));
        transcript.messages.push(Message {
            from,
            to: env.to,
            label: env.label,
            payload: env.payload,
            round,
        });
        Ok(transcript.messages.len() - 1)
    };

    for &i in &order {
        let id = parties[i].id();
        let out = parties[i]
            .start(&mut transcript.counters)
            .map_err(|source| SimError::Party { party: id, source })?;
        for env in out {
            let idx = stamp(id, env, &mut transcript)?;
            queue.push_back(idx);
        }
    }

    while let Some(idx) = queue.pop_front() {
        let msg = transcript.messages[idx].clone();
        let Some(&target) = order.iter().find(|&&i| parties[i].id() == msg.to) else {
            return Err(SimError::UnknownParty {
                to: msg.to,
                label: msg.label,
            });
        };
        let out = parties[target]
            .on_message(&msg, &mut transcript.counters)
            .map_err(|source| SimError::Party {
                party: msg.to,
                source,
            })?;
        for env in out {
            let i = stamp(msg.to, env, &mut transcript)?;
            queue.push_back(i);
        }
    }

    if order.iter().any(|&i| !parties[i].is_terminal()) {
        return Err(SimError::Deadlock {
            states: order
                .iter()
                .map(|&i| (parties[i].id(), parties[i].state()))
                .collect(),
        });
    }
    Ok(transcript)
}

/// The messages `p` sent or received, in transcript order.
pub fn view(t: &Transcript, p: PartyId) -> Vec<Message> {
    t.messages
        .iter()
        .filter(|m| m.from == p || m.to == p)
        .cloned()
        .collect()
}
