//! Event-driven simulation of the four agents on a logical clock.
//!
//! Agents only interact through [`Frame`]s placed on the network. A frame
//! sent at time `t` arrives at `t + local_channel_time_s` within a location
//! and at `t + d/c` across locations. Deliveries and timers are processed
//! in order of (time, sender id, round, insertion).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use super::frame::{AgentId, Frame, FrameKind};
use super::HarnessError;
use crate::adversary::{CheatingStrategy, ResponderView};
use crate::gf::{FieldElement, FieldSpec, FieldTables};
use crate::protocol::{HonestAlice, HonestBob, Location};
use crate::spacetime::SpacetimeConfig;

/// Timer tag used for the reveal.
pub const REVEAL_TAG: u32 = u32::MAX;

const MAX_EVENTS: usize = 1 << 24;

/// What an agent asks the simulator to do while handling one event.
#[derive(Debug)]
pub struct Outbox {
    now: f64,
    from: AgentId,
    sends: Vec<(AgentId, Frame)>,
    wakes: Vec<(f64, u32)>,
}

impl Outbox {
    pub fn now(&self) -> f64 {
        self.now
    }

    /// Sends a frame stamped with the current time.
    pub fn send(&mut self, to: AgentId, kind: FrameKind, round: u32, payload: Vec<u8>) {
        let frame = Frame { kind, sender: self.from, round, stamp: self.now, payload };
        self.sends.push((to, frame));
    }

    pub fn forward(&mut self, to: AgentId, frame: &Frame) {
        self.send(to, frame.kind, frame.round, frame.payload.clone());
    }

    pub fn wake_at(&mut self, time: f64, tag: u32) {
        self.wakes.push((time.max(self.now), tag));
    }
}

pub trait Agent {
    fn id(&self) -> AgentId;
    fn start(&mut self, out: &mut Outbox) -> Result<(), HarnessError>;
    fn on_frame(&mut self, frame: &Frame, out: &mut Outbox) -> Result<(), HarnessError>;
    fn on_wake(&mut self, tag: u32, out: &mut Outbox) -> Result<(), HarnessError>;
    fn as_any(&self) -> &dyn std::any::Any;
}

/// One frame moved by the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub from: AgentId,
    pub to: AgentId,
    pub sent: f64,
    pub arrived: f64,
    pub frame: Frame,
}

impl Delivery {
    pub fn crosses_locations(&self) -> bool {
        self.from.location() != self.to.location()
    }
}

enum Action {
    Deliver { to: AgentId, frame: Frame },
    Wake { agent: AgentId, tag: u32 },
}

struct Pending {
    time: f64,
    sender: u8,
    round: u32,
    seq: u64,
    action: Action,
}

impl Pending {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.sender.cmp(&other.sender))
            .then(self.round.cmp(&other.round))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap
        other.key_cmp(self)
    }
}

pub struct Simulator {
    spacetime: SpacetimeConfig,
    agents: Vec<Box<dyn Agent>>,
    queue: BinaryHeap<Pending>,
    seq: u64,
    log: Vec<Delivery>,
    last_stamp: [f64; 4],
}

impl Simulator {
    /// `agents` must contain each of A1, A2, B1, B2 exactly once.
    pub fn new(spacetime: SpacetimeConfig, mut agents: Vec<Box<dyn Agent>>) -> Result<Self, HarnessError> {
        agents.sort_by_key(|a| a.id());
        if agents.iter().map(|a| a.id()).ne(AgentId::ALL) {
            return Err(HarnessError::Config("simulation needs agents A1, A2, B1, B2".into()));
        }
        Ok(Self { spacetime, agents, queue: BinaryHeap::new(), seq: 0, log: Vec::new(), last_stamp: [0.0; 4] })
    }

    fn latency(&self, from: AgentId, to: AgentId) -> f64 {
        if from.location() == to.location() {
            self.spacetime.local_channel_time_s
        } else {
            self.spacetime.light_time()
        }
    }

    fn schedule(&mut self, out: Outbox) {
        for (time, tag) in out.wakes {
            self.seq += 1;
            self.queue.push(Pending {
                time,
                sender: out.from as u8,
                round: tag,
                seq: self.seq,
                action: Action::Wake { agent: out.from, tag },
            });
        }
        for (to, frame) in out.sends {
            let last = &mut self.last_stamp[frame.sender as usize];
            debug_assert!(frame.stamp >= *last, "stamps from one sender never decrease");
            *last = frame.stamp;
            self.seq += 1;
            let time = frame.stamp + self.latency(frame.sender, to);
            self.queue.push(Pending {
                time,
                sender: frame.sender as u8,
                round: frame.round,
                seq: self.seq,
                action: Action::Deliver { to, frame },
            });
        }
    }

    /// Runs until no events remain.
    pub fn run(&mut self) -> Result<(), HarnessError> {
        for i in 0..self.agents.len() {
            let mut out = Outbox { now: 0.0, from: self.agents[i].id(), sends: Vec::new(), wakes: Vec::new() };
            self.agents[i].start(&mut out)?;
            self.schedule(out);
        }
        let mut processed = 0usize;
        while let Some(p) = self.queue.pop() {
            processed += 1;
            if processed > MAX_EVENTS {
                return Err(HarnessError::Config("event limit exceeded".into()));
            }
            let (agent, mut out) = match &p.action {
                Action::Deliver { to, .. } | Action::Wake { agent: to, .. } => {
                    (*to, Outbox { now: p.time, from: *to, sends: Vec::new(), wakes: Vec::new() })
                }
            };
            let handler = &mut self.agents[agent as usize];
            match p.action {
                Action::Deliver { to, frame } => {
                    handler.on_frame(&frame, &mut out)?;
                    self.log.push(Delivery { from: frame.sender, to, sent: frame.stamp, arrived: p.time, frame });
                }
                Action::Wake { tag, .. } => handler.on_wake(tag, &mut out)?,
            }
            self.schedule(out);
        }
        Ok(())
    }

    pub fn deliveries(&self) -> &[Delivery] {
        &self.log
    }

    pub fn agent(&self, id: AgentId) -> &dyn Agent {
        self.agents[id as usize].as_ref()
    }

    pub fn into_parts(self) -> (Vec<Box<dyn Agent>>, Vec<Delivery>) {
        (self.agents, self.log)
    }
}

fn decode(field: &Arc<FieldSpec>, frame: &Frame) -> Result<FieldElement, HarnessError> {
    frame.check_payload(field)?;
    Ok(field.from_bytes(&frame.payload)?)
}

fn unexpected(agent: AgentId, frame: &Frame) -> HarnessError {
    HarnessError::UnexpectedFrame { agent: agent.name(), kind: frame.kind, round: frame.round as usize }
}

/// One exchange as seen by the Bob that ran it.
#[derive(Debug, Clone, PartialEq)]
pub struct BobRecord {
    pub round: usize,
    pub challenge: Vec<u8>,
    pub response: Option<Vec<u8>>,
    pub challenge_time: f64,
    pub emit_time: f64,
}

/// A Bob agent: issues its challenges on the round schedule and records
/// responses. B2 forwards each completed exchange to B1; B1 receives the
/// reveal.
pub struct BobAgent {
    id: AgentId,
    field: Arc<FieldSpec>,
    bob: HonestBob,
    period: f64,
    pub records: BTreeMap<usize, BobRecord>,
    /// B1 only: frames forwarded by B2, with arrival times.
    pub forwarded: Vec<(Frame, f64)>,
    /// B1 only: reveal frames with arrival times.
    pub reveal_bit: Option<(Frame, f64)>,
    pub reveal_ak: Option<(Frame, f64)>,
}

impl BobAgent {
    pub fn new(location: Location, field: Arc<FieldSpec>, b: Vec<FieldElement>, period: f64) -> Self {
        Self {
            id: AgentId::bob_at(location),
            field,
            bob: HonestBob::new(location, b),
            period,
            records: BTreeMap::new(),
            forwarded: Vec::new(),
            reveal_bit: None,
            reveal_ak: None,
        }
    }
}

impl Agent for BobAgent {
    fn id(&self) -> AgentId {
        self.id
    }

    fn start(&mut self, out: &mut Outbox) -> Result<(), HarnessError> {
        for j in self.bob.rounds().collect::<Vec<_>>() {
            out.wake_at((j - 1) as f64 * self.period, j as u32);
        }
        Ok(())
    }

    fn on_wake(&mut self, tag: u32, out: &mut Outbox) -> Result<(), HarnessError> {
        let j = tag as usize;
        let b = self.bob.challenge(j).expect("scheduled rounds belong to this location").to_bytes();
        self.records.insert(
            j,
            BobRecord { round: j, challenge: b.clone(), response: None, challenge_time: out.now(), emit_time: f64::NAN },
        );
        out.send(AgentId::alice_at(self.id.location()), FrameKind::Challenge, tag, b);
        Ok(())
    }

    fn on_frame(&mut self, frame: &Frame, out: &mut Outbox) -> Result<(), HarnessError> {
        let local_alice = AgentId::alice_at(self.id.location());
        match (frame.kind, frame.sender) {
            (FrameKind::Response, s) if s == local_alice => {
                decode(&self.field, frame)?;
                let rec = self
                    .records
                    .get_mut(&(frame.round as usize))
                    .filter(|r| r.response.is_none())
                    .ok_or_else(|| unexpected(self.id, frame))?;
                rec.response = Some(frame.payload.clone());
                rec.emit_time = frame.stamp;
                if self.id == AgentId::B2 {
                    let challenge = Frame {
                        kind: FrameKind::Challenge,
                        sender: self.id,
                        round: frame.round,
                        stamp: out.now(),
                        payload: rec.challenge.clone(),
                    };
                    out.forward(AgentId::B1, &challenge);
                    out.forward(AgentId::B1, frame);
                }
            }
            (FrameKind::Challenge | FrameKind::Response, AgentId::B2) if self.id == AgentId::B1 => {
                decode(&self.field, frame)?;
                self.forwarded.push((frame.clone(), out.now()));
            }
            (FrameKind::RevealBit, AgentId::A1) if self.id == AgentId::B1 => {
                decode(&self.field, frame)?;
                self.reveal_bit = Some((frame.clone(), out.now()));
            }
            (FrameKind::RevealAk, AgentId::A1) if self.id == AgentId::B1 => {
                decode(&self.field, frame)?;
                self.reveal_ak = Some((frame.clone(), out.now()));
            }
            _ => return Err(unexpected(self.id, frame)),
        }
        Ok(())
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// Response timing shared by both Alice implementations.
#[derive(Debug, Clone, Copy)]
pub struct AliceTiming {
    /// Channel plus processing time, measured from the challenge's emission.
    pub local_latency_s: f64,
    pub injection: Option<(usize, f64)>,
    /// Earliest reveal time (A1 only).
    pub reveal_at: f64,
}

impl AliceTiming {
    /// Response time for a challenge emitted at `challenge_stamp`.
    fn respond_at(&self, challenge_stamp: f64, round: usize) -> f64 {
        let t = challenge_stamp + self.local_latency_s;
        match self.injection {
            Some((r, d)) if r == round => t + d,
            _ => t,
        }
    }
}

pub struct HonestAliceAgent {
    id: AgentId,
    field: Arc<FieldSpec>,
    alice: HonestAlice,
    timing: AliceTiming,
    pending: BTreeMap<usize, FieldElement>,
}

impl HonestAliceAgent {
    pub fn new(location: Location, field: Arc<FieldSpec>, a: Vec<FieldElement>, bit: Option<bool>, timing: AliceTiming) -> Self {
        Self { id: AgentId::alice_at(location), field, alice: HonestAlice::new(location, a, bit), timing, pending: BTreeMap::new() }
    }
}

impl Agent for HonestAliceAgent {
    fn id(&self) -> AgentId {
        self.id
    }

    fn start(&mut self, out: &mut Outbox) -> Result<(), HarnessError> {
        if self.id == AgentId::A1 {
            out.wake_at(self.timing.reveal_at, REVEAL_TAG);
        }
        Ok(())
    }

    fn on_frame(&mut self, frame: &Frame, out: &mut Outbox) -> Result<(), HarnessError> {
        if frame.kind != FrameKind::Challenge || frame.sender != AgentId::bob_at(self.id.location()) {
            return Err(unexpected(self.id, frame));
        }
        let j = frame.round as usize;
        self.pending.insert(j, decode(&self.field, frame)?);
        out.wake_at(self.timing.respond_at(frame.stamp, j), frame.round);
        Ok(())
    }

    fn on_wake(&mut self, tag: u32, out: &mut Outbox) -> Result<(), HarnessError> {
        if tag == REVEAL_TAG {
            let (bit, ak) = self.alice.reveal().expect("A1 holds the bit");
            out.send(AgentId::B1, FrameKind::RevealBit, 0, self.field.from_bit(bit).to_bytes());
            out.send(AgentId::B1, FrameKind::RevealAk, 0, ak.to_bytes());
            return Ok(());
        }
        let j = tag as usize;
        let b = self.pending.remove(&j).expect("woken for a received challenge");
        let y = self.alice.respond(j, &b)?;
        out.send(AgentId::bob_at(self.id.location()), FrameKind::Response, tag, y.to_bytes());
        Ok(())
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// A cheating Alice agent driven by lookup tables. Each agent relays every
/// challenge it receives to its partner; a response is computed from the
/// challenges that have actually arrived.
pub struct CheatingAliceAgent {
    id: AgentId,
    tables: Arc<FieldTables>,
    strategy: Arc<CheatingStrategy>,
    bit: bool,
    timing: AliceTiming,
    known: Vec<Option<usize>>,
    reveal_pending: bool,
    revealed: bool,
}

impl CheatingAliceAgent {
    pub fn new(location: Location, strategy: Arc<CheatingStrategy>, bit: bool, timing: AliceTiming) -> Self {
        let k = strategy.rounds();
        Self {
            id: AgentId::alice_at(location),
            tables: Arc::clone(strategy.field_tables()),
            strategy,
            bit,
            timing,
            known: vec![None; k],
            reveal_pending: false,
            revealed: false,
        }
    }

    fn known_prefix(&self, n: usize) -> Option<Vec<usize>> {
        self.known[..n].iter().copied().collect()
    }

    fn try_reveal(&mut self, out: &mut Outbox) {
        let k = self.strategy.rounds();
        if self.revealed || !self.reveal_pending {
            return;
        }
        if let Some(b) = self.known_prefix(k - 1) {
            let ak = self.strategy.guess(self.bit, &b);
            let field = self.tables.spec();
            out.send(AgentId::B1, FrameKind::RevealBit, 0, field.from_bit(self.bit).to_bytes());
            out.send(AgentId::B1, FrameKind::RevealAk, 0, self.tables.element(ak).to_bytes());
            self.revealed = true;
        }
    }
}

impl Agent for CheatingAliceAgent {
    fn id(&self) -> AgentId {
        self.id
    }

    fn start(&mut self, out: &mut Outbox) -> Result<(), HarnessError> {
        if self.id == AgentId::A1 {
            out.wake_at(self.timing.reveal_at, REVEAL_TAG);
        }
        Ok(())
    }

    fn on_frame(&mut self, frame: &Frame, out: &mut Outbox) -> Result<(), HarnessError> {
        let j = frame.round as usize;
        if frame.kind != FrameKind::Challenge || j == 0 || j > self.known.len() {
            return Err(unexpected(self.id, frame));
        }
        let b = self.tables.index_of(&decode(self.tables.spec(), frame)?)?;
        self.known[j - 1] = Some(b);
        let partner = AgentId::alice_at(self.id.location().other());
        if frame.sender == AgentId::bob_at(self.id.location()) {
            out.forward(partner, frame);
            out.wake_at(self.timing.respond_at(frame.stamp, j), frame.round);
        } else if frame.sender != partner {
            return Err(unexpected(self.id, frame));
        }
        self.try_reveal(out);
        Ok(())
    }

    fn on_wake(&mut self, tag: u32, out: &mut Outbox) -> Result<(), HarnessError> {
        if tag == REVEAL_TAG {
            self.reveal_pending = true;
            self.try_reveal(out);
            return Ok(());
        }
        let j = tag as usize;
        let view = if j == 1 {
            ResponderView::Commit { challenge: self.known[0].expect("own challenge") }
        } else {
            let earlier = self.known_prefix(j - 2).ok_or(HarnessError::Premature { round: j })?;
            ResponderView::Sustain { bit: self.bit, earlier, challenge: self.known[j - 1].expect("own challenge") }
        };
        let y = self.strategy.respond(&view);
        out.send(AgentId::bob_at(self.id.location()), FrameKind::Response, tag, self.tables.element(y).to_bytes());
        Ok(())
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}
