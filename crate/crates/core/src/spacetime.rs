//! Simulated relativistic timing.
//!
//! Two stations sit `distance_m` apart on a line. Round `j`'s response must
//! be emitted strictly before any signal carrying the previous challenge
//! `b_{j-1}` (emitted at the other station) can arrive:
//! `response_sent(j) < challenge_sent(j-1) + d/c`.

use std::collections::BTreeMap;

use crate::magnitude::Magnitude;
use crate::protocol::Location;

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Fraction of the light-cone slack used as the default round period.
pub const DEFAULT_PERIOD_FRACTION: f64 = 0.9;

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpacetimeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
    #[error("invalid planner input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpacetimeConfig {
    pub distance_m: f64,
    #[serde(default = "default_speed")]
    pub signal_speed_mps: f64,
    #[serde(default)]
    pub processing_time_s: f64,
    #[serde(default)]
    pub local_channel_time_s: f64,
}

fn default_speed() -> f64 {
    SPEED_OF_LIGHT
}

impl SpacetimeConfig {
    pub fn new(
        distance_m: f64,
        signal_speed_mps: f64,
        processing_time_s: f64,
        local_channel_time_s: f64,
    ) -> Result<Self, SpacetimeError> {
        let cfg = Self { distance_m, signal_speed_mps, processing_time_s, local_channel_time_s };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Vacuum light speed and zero local latencies.
    pub fn ideal(distance_m: f64) -> Result<Self, SpacetimeError> {
        Self::new(distance_m, SPEED_OF_LIGHT, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<(), SpacetimeError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if !positive(self.distance_m) || !positive(self.signal_speed_mps) {
            return Err(SpacetimeError::InvalidConfig("distance and signal speed must be positive".into()));
        }
        if !non_negative(self.processing_time_s) || !non_negative(self.local_channel_time_s) {
            return Err(SpacetimeError::InvalidConfig("latencies must be non-negative".into()));
        }
        if self.local_latency() >= self.light_time() {
            return Err(SpacetimeError::InvalidConfig(format!(
                "local latency {} s does not fit inside d/c = {} s",
                self.local_latency(),
                self.light_time()
            )));
        }
        Ok(())
    }

    /// `d/c`, the one-way signal time between the stations.
    pub fn light_time(&self) -> f64 {
        self.distance_m / self.signal_speed_mps
    }

    /// Time from challenge emission to response emission at one station.
    pub fn local_latency(&self) -> f64 {
        self.local_channel_time_s + self.processing_time_s
    }

    /// Longest round period that still satisfies the light-cone bound.
    pub fn period_bound(&self) -> f64 {
        self.light_time() - self.local_latency()
    }

    /// Period of the default scheduler: 90% of [`Self::period_bound`].
    pub fn default_period(&self) -> f64 {
        DEFAULT_PERIOD_FRACTION * self.period_bound()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    ChallengeSent,
    ResponseSent,
    Reveal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub round: usize,
    pub location: Location,
    pub time_s: f64,
    pub kind: EventKind,
}

/// A response emitted inside the light cone of the previous challenge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub round: usize,
    pub response_time: f64,
    /// `challenge_sent(round - 1) + d/c`; the response must be strictly earlier.
    pub deadline: f64,
}

/// Default schedule: challenge of round `j` at `(j-1) * period`, response
/// after the local latency, reveal at location 1 when round `k` completes.
pub fn default_schedule(rounds: usize, config: &SpacetimeConfig) -> Vec<Event> {
    let period = config.default_period();
    let mut events = Vec::with_capacity(2 * rounds + 1);
    for j in 1..=rounds {
        let location = Location::for_round(j);
        let t = (j - 1) as f64 * period;
        events.push(Event { round: j, location, time_s: t, kind: EventKind::ChallengeSent });
        events.push(Event {
            round: j,
            location,
            time_s: t + config.local_latency(),
            kind: EventKind::ResponseSent,
        });
    }
    let end = events.last().map_or(0.0, |e| e.time_s);
    events.push(Event { round: rounds, location: Location::One, time_s: end, kind: EventKind::Reveal });
    events
}

/// Checks the light-cone condition for every round `j >= 2` and returns
/// every violation. Each round must have exactly one challenge and one
/// response at its alternating location.
pub fn validate_schedule(events: &[Event], config: &SpacetimeConfig) -> Result<Vec<Violation>, SpacetimeError> {
    config.validate()?;
    let mut by_round: BTreeMap<usize, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for e in events {
        if !(e.time_s.is_finite() && e.time_s >= 0.0) {
            return Err(SpacetimeError::MalformedSchedule(format!("round {} has time {}", e.round, e.time_s)));
        }
        if e.kind == EventKind::Reveal {
            continue;
        }
        if e.round == 0 || e.location != Location::for_round(e.round) {
            return Err(SpacetimeError::MalformedSchedule(format!(
                "round {} at location {}",
                e.round,
                e.location.number()
            )));
        }
        let slot = by_round.entry(e.round).or_default();
        let target = match e.kind {
            EventKind::ChallengeSent => &mut slot.0,
            _ => &mut slot.1,
        };
        if target.replace(e.time_s).is_some() {
            return Err(SpacetimeError::MalformedSchedule(format!("duplicate {:?} in round {}", e.kind, e.round)));
        }
    }
    let rounds = by_round.len();
    if by_round.keys().copied().ne(1..=rounds) {
        return Err(SpacetimeError::MalformedSchedule("rounds are not contiguous from 1".into()));
    }
    let mut times = Vec::with_capacity(rounds);
    for (j, (c, r)) in &by_round {
        match (c, r) {
            (Some(c), Some(r)) if r >= c => times.push((*c, *r)),
            (Some(_), Some(_)) => {
                return Err(SpacetimeError::MalformedSchedule(format!("round {j} responds before its challenge")))
            }
            _ => return Err(SpacetimeError::MalformedSchedule(format!("round {j} is missing an event"))),
        }
    }
    let light = config.light_time();
    let violations = times
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let deadline = w[0].0 + light;
            let response_time = w[1].1;
            (response_time >= deadline).then_some(Violation { round: i + 2, response_time, deadline })
        })
        .collect();
    Ok(violations)
}

/// Largest `k` with `k * period_bound <= total_time_s`, never less than 1
/// (the commit round alone).
pub fn max_rounds(config: &SpacetimeConfig, total_time_s: f64) -> u64 {
    let period = config.period_bound();
    // relative guard against the quotient landing one ulp below an integer
    let k = (total_time_s / period * (1.0 + 1e-12)).floor();
    if k.is_finite() && k >= 1.0 {
        k as u64
    } else {
        1
    }
}

fn check_security_inputs(epsilon: Magnitude, q: Magnitude) -> Result<(), SpacetimeError> {
    if epsilon.is_zero() || epsilon > Magnitude::ONE {
        return Err(SpacetimeError::InvalidInput("epsilon must lie in (0, 1]".into()));
    }
    if q < Magnitude::from_f64(2.0) {
        return Err(SpacetimeError::InvalidInput("q must be at least 2".into()));
    }
    Ok(())
}

/// Number of rounds allowed at binding level `epsilon`: `epsilon * sqrt(q/2)`.
pub fn rounds_for_security(epsilon: Magnitude, q: Magnitude) -> Result<Magnitude, SpacetimeError> {
    check_security_inputs(epsilon, q)?;
    Ok(epsilon * (q / Magnitude::from_f64(2.0)).sqrt())
}

/// Commitment lifetime `(d/c) * epsilon * sqrt(q/2)`, in seconds.
pub fn commitment_time(epsilon: Magnitude, q: Magnitude, config: &SpacetimeConfig) -> Result<Magnitude, SpacetimeError> {
    config.validate()?;
    Ok(rounds_for_security(epsilon, q)? * Magnitude::from_f64(config.light_time()))
}

/// Binding bound after `k` rounds: `2k * sqrt(2/q)`.
pub fn binding_bound(rounds: u64, q: Magnitude) -> Magnitude {
    Magnitude::from_f64(2.0 * rounds as f64) * (Magnitude::from_f64(2.0) / q).sqrt()
}

/// Smallest separation (infimum, meters) for which the local latency fits
/// strictly inside `d/c`.
pub fn min_distance(processing_time_s: f64, config: &SpacetimeConfig) -> f64 {
    (processing_time_s + config.local_channel_time_s) * config.signal_speed_mps
}

/// One row of the planner table.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRow {
    pub epsilon: Magnitude,
    pub q: Magnitude,
    pub distance_m: f64,
    pub rounds: Magnitude,
    pub total_time_s: Magnitude,
}

impl PlanRow {
    pub fn q_bits(&self) -> f64 {
        self.q.log2()
    }

    pub fn years(&self) -> f64 {
        self.total_time_s.to_f64() / SECONDS_PER_YEAR
    }
}

pub fn plan(epsilon: Magnitude, q: Magnitude, config: &SpacetimeConfig) -> Result<PlanRow, SpacetimeError> {
    let rounds = rounds_for_security(epsilon, q)?;
    let total_time_s = commitment_time(epsilon, q, config)?;
    Ok(PlanRow { epsilon, q, distance_m: config.distance_m, rounds, total_time_s })
}
