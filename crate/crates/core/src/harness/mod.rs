//! Deterministic four-agent simulation, transcript files and run modes.

pub mod config;
pub mod frame;
pub mod persist;
pub mod sim;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub use config::{ConfigFile, Injection, RunMode, SimulationConfig};
pub use frame::{AgentId, Frame, FrameError, FrameKind};
pub use persist::{verify_text, Part, VerifyReport};
pub use sim::{Agent, Delivery, Simulator};

use crate::adversary::{attack_value, AdversaryError, CheatingStrategy};
use crate::exact::{self, Rational};
use crate::gf::{FieldElement, GfError};
use crate::protocol::{self, HidingReport, Location, ProtocolError, ProtocolParams, RoundRecord, Transcript, Verdict};
use crate::spacetime::{self, SpacetimeConfig, SpacetimeError, Violation};
use sim::{AliceTiming, BobAgent, CheatingAliceAgent, HonestAliceAgent};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Io(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Spacetime(#[from] SpacetimeError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("strategy does not fit the protocol: {0}")]
    StrategyMismatch(String),
    #[error("round {round} response needs a challenge that has not arrived")]
    Premature { round: usize },
    #[error("{agent} cannot handle {kind:?} for round {round}")]
    UnexpectedFrame { agent: &'static str, kind: FrameKind, round: usize },
    #[error("round {round} was not completed")]
    Incomplete { round: usize },
    #[error("{detail}")]
    Tampered { part: Part, kind: &'static str, detail: String },
}

impl HarnessError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Io(_) => "io",
            HarnessError::Config(_) => "config",
            HarnessError::Field(_) => "field",
            HarnessError::Protocol(_) => "protocol",
            HarnessError::Spacetime(_) => "spacetime",
            HarnessError::Adversary(_) => "adversary",
            HarnessError::Frame(_) => "frame",
            HarnessError::StrategyMismatch(_) => "strategy_mismatch",
            HarnessError::Premature { .. } => "premature",
            HarnessError::UnexpectedFrame { .. } => "unexpected_frame",
            HarnessError::Incomplete { .. } => "incomplete",
            HarnessError::Tampered { kind, .. } => kind,
        }
    }

    /// Where the error was located, if it belongs to one part of a run.
    pub fn part(&self) -> Option<Part> {
        match self {
            HarnessError::Premature { round } | HarnessError::Incomplete { round } => Some(Part::Round(*round)),
            HarnessError::UnexpectedFrame { round, .. } if *round > 0 => Some(Part::Round(*round)),
            HarnessError::Tampered { part, .. } => Some(*part),
            _ => None,
        }
    }
}

/// Alice's side of a simulated run.
#[derive(Debug, Clone)]
pub enum AliceSide {
    Honest { a: Vec<FieldElement>, bit: bool },
    Cheating { strategy: Arc<CheatingStrategy>, bit: bool },
}

/// A finished simulation.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub transcript: Transcript,
    pub spacetime: SpacetimeConfig,
    pub mode: String,
    /// Verdict of the reveal check alone.
    pub reveal_check: Verdict,
    pub violations: Vec<Violation>,
    /// Reveal check and timing together.
    pub verdict: Verdict,
    /// Emission time of the reveal at location 1.
    pub reveal_time: f64,
    /// When B1 holds every record and the reveal.
    pub verified_at: f64,
    pub deliveries: Vec<Delivery>,
}

impl SimulationOutcome {
    pub fn timing_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_jsonl(&self) -> Result<String, HarnessError> {
        persist::render(&self.transcript, &self.spacetime, &self.mode, self.reveal_time, self.verdict, &self.violations)
    }
}

/// Runs the four agents once with pre-drawn challenges `b`.
pub fn simulate(
    params: &ProtocolParams,
    spacetime: &SpacetimeConfig,
    alice: &AliceSide,
    b: &[FieldElement],
    injection: Option<Injection>,
    mode: &str,
) -> Result<SimulationOutcome, HarnessError> {
    spacetime.validate()?;
    let k = params.rounds();
    let field = Arc::clone(params.field());
    if b.len() != k {
        return Err(HarnessError::Config(format!("{} challenges for {k} rounds", b.len())));
    }
    let period = spacetime.default_period();
    let timing = AliceTiming {
        local_latency_s: spacetime.local_latency(),
        injection: injection.map(|i| (i.round, i.delay_s)),
        reveal_at: (k - 1) as f64 * period + spacetime.local_latency(),
    };
    let mut agents: Vec<Box<dyn Agent>> = Vec::with_capacity(4);
    match alice {
        AliceSide::Honest { a, bit } => {
            agents.push(Box::new(HonestAliceAgent::new(Location::One, field.clone(), a.clone(), Some(*bit), timing)));
            agents.push(Box::new(HonestAliceAgent::new(Location::Two, field.clone(), a.clone(), None, timing)));
        }
        AliceSide::Cheating { strategy, bit } => {
            if **strategy.field_tables().spec() != *field || strategy.rounds() != k {
                return Err(HarnessError::StrategyMismatch(format!("strategy for {} rounds over {}", strategy.rounds(), strategy.field_tables().spec())));
            }
            agents.push(Box::new(CheatingAliceAgent::new(Location::One, Arc::clone(strategy), *bit, timing)));
            agents.push(Box::new(CheatingAliceAgent::new(Location::Two, Arc::clone(strategy), *bit, timing)));
        }
    }
    for loc in [Location::One, Location::Two] {
        agents.push(Box::new(BobAgent::new(loc, field.clone(), b.to_vec(), period)));
    }
    let mut sim = Simulator::new(*spacetime, agents)?;
    sim.run()?;
    let (agents, deliveries) = sim.into_parts();
    let bob = |id: AgentId| agents[id as usize].as_any().downcast_ref::<BobAgent>().expect("bob slot");
    let (b1, b2) = (bob(AgentId::B1), bob(AgentId::B2));

    // pool both Bobs' records; B2's must have reached B1
    let mut transcript = Transcript::new(params.clone());
    let mut verified_at: f64 = 0.0;
    for j in 1..=k {
        let holder = if Location::for_round(j) == Location::One { b1 } else { b2 };
        let rec = holder.records.get(&j).ok_or(HarnessError::Incomplete { round: j })?;
        let response = rec.response.as_ref().ok_or(HarnessError::Incomplete { round: j })?;
        if holder.id() == AgentId::B2 {
            for (kind, payload) in [(FrameKind::Challenge, &rec.challenge), (FrameKind::Response, response)] {
                let (_, arrived) = b1
                    .forwarded
                    .iter()
                    .find(|(f, _)| f.round as usize == j && f.kind == kind && &f.payload == payload)
                    .ok_or(HarnessError::Incomplete { round: j })?;
                verified_at = verified_at.max(*arrived);
            }
        }
        transcript.push(RoundRecord {
            index: j,
            location: Location::for_round(j),
            challenge: field.from_bytes(&rec.challenge)?,
            response: field.from_bytes(response)?,
            challenge_time: rec.challenge_time,
            emit_time: rec.emit_time,
        })?;
    }
    let (bit_frame, bit_arrived) = b1.reveal_bit.as_ref().ok_or(HarnessError::Incomplete { round: k })?;
    let (ak_frame, ak_arrived) = b1.reveal_ak.as_ref().ok_or(HarnessError::Incomplete { round: k })?;
    verified_at = verified_at.max(*bit_arrived).max(*ak_arrived);
    let bit = field.from_bytes(&bit_frame.payload)?;
    let bit = if bit.is_zero() {
        false
    } else if bit.is_one() {
        true
    } else {
        return Err(HarnessError::Config("revealed bit is not 0 or 1".into()));
    };
    transcript.set_reveal(bit, field.from_bytes(&ak_frame.payload)?);
    let reveal_check = transcript.verify()?;
    let reveal_time = bit_frame.stamp;
    let events = persist::schedule_of(transcript.records(), reveal_time);
    let violations = spacetime::validate_schedule(&events, spacetime)?;
    let verdict = if reveal_check.is_accept() && violations.is_empty() { Verdict::Accept } else { Verdict::Reject };
    Ok(SimulationOutcome {
        transcript,
        spacetime: *spacetime,
        mode: mode.into(),
        reveal_check,
        violations,
        verdict,
        reveal_time,
        verified_at,
        deliveries,
    })
}

/// Empirical success of repeated attack runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    /// Exact success probability of the strategy under the same bit choice.
    pub expected: Rational,
    /// Revealed 0 and 1 counts, and accepted reveals of each.
    pub by_bit: [(u64, u64); 2],
}

impl TrialStats {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard deviation of the rate at the expected value.
    pub fn sigma(&self) -> f64 {
        let p = exact::to_f64(&self.expected);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Deviation from the expected rate in standard deviations; zero when
    /// the outcome is deterministic and matched.
    pub fn z_score(&self) -> f64 {
        let diff = self.rate() - exact::to_f64(&self.expected);
        let s = self.sigma();
        if s == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / s
        }
    }
}

/// Replays a cheating strategy `trials` times. Each trial draws fresh
/// challenges and, unless `bit` is fixed, a uniform bit to reveal.
pub fn attack_trials(
    params: &ProtocolParams,
    spacetime: &SpacetimeConfig,
    strategy: &Arc<CheatingStrategy>,
    bit: Option<bool>,
    trials: u64,
    seed: u64,
) -> Result<TrialStats, HarnessError> {
    let exact_value = attack_value(strategy)?;
    let expected = match bit {
        None => exact_value.mean_success(),
        Some(false) => exact_value.p0.clone(),
        Some(true) => exact_value.p1.clone(),
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut by_bit = [(0u64, 0u64); 2];
    let mut successes = 0;
    for _ in 0..trials {
        let shared = protocol::prepare(params, &mut rng);
        let d = bit.unwrap_or_else(|| rng.random());
        let side = AliceSide::Cheating { strategy: Arc::clone(strategy), bit: d };
        let out = simulate(params, spacetime, &side, &shared.b, None, "attack")?;
        let slot = &mut by_bit[d as usize];
        slot.0 += 1;
        if out.verdict.is_accept() {
            slot.1 += 1;
            successes += 1;
        }
    }
    Ok(TrialStats { trials, successes, expected, by_bit })
}

/// What a configured run produced.
#[derive(Debug, Clone)]
pub enum RunReport {
    Simulation(Box<SimulationOutcome>),
    Trials(TrialStats),
    Hiding(HidingReport),
}

/// Executes a configuration. All randomness comes from the seed: the
/// shared vectors first, then the bit if the config leaves it open.
pub fn run(config: &SimulationConfig) -> Result<RunReport, HarnessError> {
    let params = &config.params;
    match &config.mode {
        RunMode::HidingAudit => Ok(RunReport::Hiding(protocol::hiding_audit(params.field(), params.rounds())?)),
        RunMode::Attack(strategy) if config.trials > 1 => Ok(RunReport::Trials(attack_trials(
            params,
            &config.spacetime,
            strategy,
            config.bit,
            config.trials,
            config.seed,
        )?)),
        mode => {
            let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
            let shared = protocol::prepare(params, &mut rng);
            let bit = config.bit.unwrap_or_else(|| rng.random());
            let side = match mode {
                RunMode::Attack(strategy) => AliceSide::Cheating { strategy: Arc::clone(strategy), bit },
                _ => AliceSide::Honest { a: shared.a.clone(), bit },
            };
            let out = simulate(params, &config.spacetime, &side, &shared.b, config.injection, mode.name())?;
            Ok(RunReport::Simulation(Box::new(out)))
        }
    }
}
