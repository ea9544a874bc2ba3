//! Honest parties of the two-location commitment and the reveal check.
//!
//! Round 1 is the commit exchange at location 1 (`y_1 = a_1 + d*b_1`);
//! rounds 2..=k are sustain exchanges alternating between locations
//! (`y_j = a_j + a_{j-1}*b_j`). The verifier rebuilds the chain
//! `â_0 = d`, `â_j = y_j - b_j*â_{j-1}` and accepts iff `â_k` equals the
//! revealed value. In characteristic 2 the subtraction is the same as the
//! addition form; for odd p it is the only sign that keeps honest runs
//! verifying.

use std::sync::Arc;

use rand::RngCore;

use crate::gf::{FieldElement, FieldSpec, FieldTables, GfError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("at least one round is required")]
    NoRounds,
    #[error("strict mode requires an even number of rounds, got {0}")]
    OddRounds(usize),
    #[error("transcript has {got} of {expected} rounds")]
    IncompleteTranscript { expected: usize, got: usize },
    #[error("round {got} recorded where round {expected} was due")]
    OutOfOrder { expected: usize, got: usize },
    #[error("round {round} recorded at the wrong location")]
    WrongLocation { round: usize },
    #[error("round {round} carries an element of a different field")]
    ForeignElement { round: usize },
    #[error("exhaustive audit too large: {0}")]
    TooLarge(String),
}

/// One of the two sites hosting an (Alice, Bob) agent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    One,
    Two,
}

impl Location {
    /// Odd rounds run at location 1, even rounds at location 2.
    pub fn for_round(round: usize) -> Self {
        if round % 2 == 1 {
            Location::One
        } else {
            Location::Two
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Location::One => 1,
            Location::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Location::One),
            2 => Some(Location::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Location::One => Location::Two,
            Location::Two => Location::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolParams {
    field: Arc<FieldSpec>,
    rounds: usize,
    strict: bool,
}

impl ProtocolParams {
    /// `strict` enforces an even round count.
    pub fn new(field: Arc<FieldSpec>, rounds: usize, strict: bool) -> Result<Self, ProtocolError> {
        if rounds == 0 {
            return Err(ProtocolError::NoRounds);
        }
        if strict && rounds % 2 == 1 {
            return Err(ProtocolError::OddRounds(rounds));
        }
        Ok(Self { field, rounds, strict })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn strict(&self) -> bool {
        self.strict
    }
}

/// Values pre-shared between the two agents of each party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedRandomness {
    /// `a_1..a_k`, held by both Alice agents.
    pub a: Vec<FieldElement>,
    /// `b_1..b_k`, held by both Bob agents.
    pub b: Vec<FieldElement>,
}

/// Draws Alice's vector, then Bob's, each uniform over F_q^k.
pub fn prepare<R: RngCore + ?Sized>(params: &ProtocolParams, rng: &mut R) -> SharedRandomness {
    let k = params.rounds;
    let a = (0..k).map(|_| params.field.random_element(rng)).collect();
    let b = (0..k).map(|_| params.field.random_element(rng)).collect();
    SharedRandomness { a, b }
}

/// `y_1 = a_1 + d*b_1`.
pub fn commit_response(a1: &FieldElement, d: bool, b1: &FieldElement) -> Result<FieldElement, GfError> {
    let d = a1.spec().from_bit(d);
    a1.checked_add(&d.checked_mul(b1)?)
}

/// `y_i = a_i + a_{i-1}*b_i`.
pub fn sustain_response(
    ai: &FieldElement,
    a_prev: &FieldElement,
    bi: &FieldElement,
) -> Result<FieldElement, GfError> {
    ai.checked_add(&a_prev.checked_mul(bi)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub index: usize,
    pub location: Location,
    pub challenge: FieldElement,
    pub response: FieldElement,
    /// Simulated emission time of the challenge `b_j`.
    pub challenge_time: f64,
    /// Simulated emission time of the response `y_j`.
    pub emit_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        }
    }
}

/// Append-only record of the exchanges seen by the Bob agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    params: ProtocolParams,
    records: Vec<RoundRecord>,
    pub revealed_bit: Option<bool>,
    pub revealed_ak: Option<FieldElement>,
}

impl Transcript {
    pub fn new(params: ProtocolParams) -> Self {
        Self { params, records: Vec::new(), revealed_bit: None, revealed_ak: None }
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn is_complete(&self) -> bool {
        self.records.len() == self.params.rounds
    }

    /// Appends the next round, enforcing index order and location parity.
    pub fn push(&mut self, record: RoundRecord) -> Result<(), ProtocolError> {
        let expected = self.records.len() + 1;
        if record.index != expected || expected > self.params.rounds {
            return Err(ProtocolError::OutOfOrder { expected, got: record.index });
        }
        if record.location != Location::for_round(record.index) {
            return Err(ProtocolError::WrongLocation { round: record.index });
        }
        let field = &self.params.field;
        if **record.challenge.spec() != **field || **record.response.spec() != **field {
            return Err(ProtocolError::ForeignElement { round: record.index });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn set_reveal(&mut self, d: bool, ak: FieldElement) {
        self.revealed_bit = Some(d);
        self.revealed_ak = Some(ak);
    }

    /// Verifies the stored reveal; a transcript with no reveal is rejected.
    pub fn verify(&self) -> Result<Verdict, ProtocolError> {
        match (self.revealed_bit, &self.revealed_ak) {
            (Some(d), Some(ak)) => verify_reveal(self, d, ak),
            _ => Ok(Verdict::Reject),
        }
    }
}

/// The verifier's chain `â_0 = d, â_j = y_j - b_j*â_{j-1}` for `j = 0..=k`.
pub fn reconstruct_chain(records: &[RoundRecord], d: bool) -> Result<Vec<FieldElement>, GfError> {
    let first = match records.first() {
        Some(r) => r,
        None => return Ok(Vec::new()),
    };
    let mut chain = Vec::with_capacity(records.len() + 1);
    chain.push(first.challenge.spec().from_bit(d));
    for r in records {
        let prev = chain.last().expect("chain starts with a_0");
        let next = r.response.checked_sub(&r.challenge.checked_mul(prev)?)?;
        chain.push(next);
    }
    Ok(chain)
}

pub fn verify_reveal(transcript: &Transcript, d: bool, ak_revealed: &FieldElement) -> Result<Verdict, ProtocolError> {
    if !transcript.is_complete() {
        return Err(ProtocolError::IncompleteTranscript {
            expected: transcript.params.rounds,
            got: transcript.records.len(),
        });
    }
    let chain = reconstruct_chain(&transcript.records, d)?;
    let ak = chain.last().expect("k >= 1");
    ak.checked_sub(ak_revealed)?;
    Ok(if ak == ak_revealed { Verdict::Accept } else { Verdict::Reject })
}

/// Alice's agent at one location. Both agents hold the full `a` vector; only
/// the agent at location 1 learns the committed bit.
#[derive(Debug, Clone)]
pub struct HonestAlice {
    location: Location,
    a: Vec<FieldElement>,
    bit: Option<bool>,
}

impl HonestAlice {
    pub fn new(location: Location, a: Vec<FieldElement>, bit: Option<bool>) -> Self {
        Self { location, a, bit }
    }

    pub fn location(&self) -> Location {
        self.location
    }

    /// Answers challenge `b` for the given round (1-based).
    pub fn respond(&self, round: usize, b: &FieldElement) -> Result<FieldElement, ProtocolError> {
        if round == 0 || round > self.a.len() {
            return Err(ProtocolError::OutOfOrder { expected: self.a.len(), got: round });
        }
        if Location::for_round(round) != self.location {
            return Err(ProtocolError::WrongLocation { round });
        }
        let ai = &self.a[round - 1];
        let y = if round == 1 {
            let d = self.bit.ok_or(ProtocolError::WrongLocation { round })?;
            commit_response(ai, d, b)?
        } else {
            sustain_response(ai, &self.a[round - 2], b)?
        };
        Ok(y)
    }

    /// `(d, a_k)`; only available at the committing location.
    pub fn reveal(&self) -> Option<(bool, FieldElement)> {
        Some((self.bit?, self.a.last()?.clone()))
    }
}

/// Bob's agent at one location; issues the pre-shared challenges for its rounds.
#[derive(Debug, Clone)]
pub struct HonestBob {
    location: Location,
    b: Vec<FieldElement>,
}

impl HonestBob {
    pub fn new(location: Location, b: Vec<FieldElement>) -> Self {
        Self { location, b }
    }

    pub fn location(&self) -> Location {
        self.location
    }

    /// Rounds this agent is active in.
    pub fn rounds(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.b.len()).filter(move |&j| Location::for_round(j) == self.location)
    }

    pub fn challenge(&self, round: usize) -> Option<&FieldElement> {
        if Location::for_round(round) != self.location {
            return None;
        }
        self.b.get(round.checked_sub(1)?)
    }
}

/// Result of an in-memory honest execution.
#[derive(Debug, Clone)]
pub struct HonestRun {
    pub transcript: Transcript,
    pub verdict: Verdict,
}

/// Runs all four phases with honest agents on logical stamps (round `j`
/// challenges and responds at time `j - 1`). The timed simulation lives in
/// [`crate::harness`].
pub fn run_honest<R: RngCore + ?Sized>(
    params: &ProtocolParams,
    d: bool,
    rng: &mut R,
) -> Result<HonestRun, ProtocolError> {
    let shared = prepare(params, rng);
    let alices = [
        HonestAlice::new(Location::One, shared.a.clone(), Some(d)),
        HonestAlice::new(Location::Two, shared.a.clone(), None),
    ];
    let bobs = [
        HonestBob::new(Location::One, shared.b.clone()),
        HonestBob::new(Location::Two, shared.b.clone()),
    ];
    let mut transcript = Transcript::new(params.clone());
    for j in 1..=params.rounds {
        let loc = Location::for_round(j);
        let slot = (loc.number() - 1) as usize;
        let b = bobs[slot].challenge(j).expect("active bob holds the round").clone();
        let y = alices[slot].respond(j, &b)?;
        let t = (j - 1) as f64;
        transcript.push(RoundRecord {
            index: j,
            location: loc,
            challenge: b,
            response: y,
            challenge_time: t,
            emit_time: t,
        })?;
    }
    let (bit, ak) = alices[0].reveal().expect("location 1 holds the bit");
    transcript.set_reveal(bit, ak);
    let verdict = transcript.verify()?;
    Ok(HonestRun { transcript, verdict })
}

/// Outcome of the exhaustive hiding audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingReport {
    pub order: usize,
    pub rounds: usize,
    pub challenge_vectors: usize,
    /// Response-prefix distributions for `d = 0` and `d = 1` coincide
    /// (compared as exact counts over all `a` vectors).
    pub identical: bool,
    /// Every prefix distribution is exactly uniform over F_q^j.
    pub uniform: bool,
    /// First `(b vector, prefix length)` at which a check failed.
    pub first_failure: Option<(Vec<usize>, usize)>,
}

impl HidingReport {
    pub fn perfectly_hiding(&self) -> bool {
        self.identical && self.uniform
    }
}

/// Maximum `q^k` accepted by [`hiding_audit`].
pub const HIDING_AUDIT_LIMIT: usize = 1 << 12;

/// For every challenge vector, enumerates all `a` vectors and compares the
/// distributions of `(y_1..y_j)` under `d = 0` and `d = 1` for each `j <= k`.
pub fn hiding_audit(field: &Arc<FieldSpec>, rounds: usize) -> Result<HidingReport, ProtocolError> {
    let tables = FieldTables::new(field)?;
    let q = tables.order();
    let space = q
        .checked_pow(rounds as u32)
        .filter(|&s| s <= HIDING_AUDIT_LIMIT && rounds >= 1)
        .ok_or_else(|| ProtocolError::TooLarge(format!("q^k for q={q}, k={rounds}")))?;
    let digits = |mut idx: usize| {
        let mut v = vec![0usize; rounds];
        for x in v.iter_mut() {
            *x = idx % q;
            idx /= q;
        }
        v
    };
    let mut report = HidingReport {
        order: q,
        rounds,
        challenge_vectors: space,
        identical: true,
        uniform: true,
        first_failure: None,
    };
    for b_idx in 0..space {
        let b = digits(b_idx);
        // hist[d][j-1][prefix index]
        let mut hist = vec![vec![Vec::new(); rounds]; 2];
        for per_d in hist.iter_mut() {
            for (j, h) in per_d.iter_mut().enumerate() {
                *h = vec![0u64; q.pow(j as u32 + 1)];
            }
        }
        for (d, per_d) in hist.iter_mut().enumerate() {
            for a_idx in 0..space {
                let a = digits(a_idx);
                let mut prefix = 0usize;
                let mut scale = 1usize;
                for j in 0..rounds {
                    let prev = if j == 0 { d } else { a[j - 1] };
                    let y = tables.add(a[j], tables.mul(prev, b[j]));
                    prefix += y * scale;
                    scale *= q;
                    per_d[j][prefix] += 1;
                }
            }
        }
        for j in 0..rounds {
            let expected = (space / q.pow(j as u32 + 1)) as u64;
            let same = hist[0][j] == hist[1][j];
            let flat = hist[0][j].iter().all(|&c| c == expected);
            if !(same && flat) {
                report.identical &= same;
                report.uniform &= flat;
                report.first_failure.get_or_insert((b.clone(), j + 1));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::binary_preset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn f3() -> Arc<FieldSpec> {
        FieldSpec::prime(3).unwrap()
    }

    fn record(spec: &Arc<FieldSpec>, j: usize, b: u64, y: u64) -> RoundRecord {
        RoundRecord {
            index: j,
            location: Location::for_round(j),
            challenge: spec.from_u64(b),
            response: spec.from_u64(y),
            challenge_time: 0.0,
            emit_time: 0.0,
        }
    }

    #[test]
    fn commit_examples() {
        let f = f3();
        assert_eq!(commit_response(&f.from_u64(2), true, &f.from_u64(1)).unwrap(), f.zero());
        let a = f.from_u64(2);
        assert_eq!(commit_response(&a, false, &f.from_u64(1)).unwrap(), a);
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(commit_response(&f2.one(), true, &f2.one()).unwrap(), f2.zero());
    }

    #[test]
    fn sustain_examples() {
        let f = f3();
        let y = sustain_response(&f.from_u64(1), &f.from_u64(2), &f.from_u64(2)).unwrap();
        assert_eq!(y, f.from_u64(2));
        assert_eq!(sustain_response(&f.from_u64(1), &f.from_u64(2), &f.zero()).unwrap(), f.from_u64(1));
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(sustain_response(&f2.zero(), &f2.one(), &f2.one()).unwrap(), f2.one());
    }

    #[test]
    fn worked_reveal_trace() {
        let f = f3();
        let params = ProtocolParams::new(f.clone(), 2, true).unwrap();
        let mut t = Transcript::new(params);
        t.push(record(&f, 1, 1, 0)).unwrap();
        t.push(record(&f, 2, 2, 2)).unwrap();
        let chain = reconstruct_chain(t.records(), true).unwrap();
        assert_eq!(chain, vec![f.one(), f.from_u64(2), f.from_u64(1)]);
        assert_eq!(verify_reveal(&t, true, &f.from_u64(1)).unwrap(), Verdict::Accept);
        assert_eq!(verify_reveal(&t, false, &f.from_u64(1)).unwrap(), Verdict::Reject);
    }

    #[test]
    fn incomplete_transcript_is_an_error() {
        let f = f3();
        let mut t = Transcript::new(ProtocolParams::new(f.clone(), 2, false).unwrap());
        t.push(record(&f, 1, 1, 0)).unwrap();
        assert_eq!(
            verify_reveal(&t, true, &f.one()),
            Err(ProtocolError::IncompleteTranscript { expected: 2, got: 1 })
        );
    }

    #[test]
    fn transcript_ordering_enforced() {
        let f = f3();
        let mut t = Transcript::new(ProtocolParams::new(f.clone(), 3, false).unwrap());
        assert_eq!(t.push(record(&f, 2, 0, 0)), Err(ProtocolError::OutOfOrder { expected: 1, got: 2 }));
        let mut bad = record(&f, 1, 0, 0);
        bad.location = Location::Two;
        assert_eq!(t.push(bad), Err(ProtocolError::WrongLocation { round: 1 }));
    }

    #[test]
    fn params_validation() {
        assert_eq!(ProtocolParams::new(f3(), 0, false), Err(ProtocolError::NoRounds));
        assert_eq!(ProtocolParams::new(f3(), 3, true), Err(ProtocolError::OddRounds(3)));
        assert!(ProtocolParams::new(f3(), 3, false).is_ok());
    }

    #[test]
    fn prepare_shapes_and_determinism() {
        let params = ProtocolParams::new(binary_preset(8).unwrap(), 4, true).unwrap();
        let s1 = prepare(&params, &mut ChaCha20Rng::seed_from_u64(1));
        let s2 = prepare(&params, &mut ChaCha20Rng::seed_from_u64(1));
        assert_eq!(s1.a.len(), 4);
        assert_eq!(s1.b.len(), 4);
        assert_eq!(s1, s2);
    }

    #[test]
    fn prepare_coordinates_unbiased() {
        let params = ProtocolParams::new(FieldSpec::prime(2).unwrap(), 10_000, true).unwrap();
        let s = prepare(&params, &mut ChaCha20Rng::seed_from_u64(77));
        let sigma = (10_000f64 * 0.25).sqrt();
        for v in [&s.a, &s.b] {
            let ones = v.iter().filter(|e| e.is_one()).count() as f64;
            assert!((ones - 5000.0).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn honest_runs_accept() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let p2 = ProtocolParams::new(FieldSpec::prime(2).unwrap(), 2, true).unwrap();
        assert!(run_honest(&p2, false, &mut rng).unwrap().verdict.is_accept());
        let p256 = ProtocolParams::new(binary_preset(8).unwrap(), 6, true).unwrap();
        let run = run_honest(&p256, true, &mut rng).unwrap();
        assert!(run.verdict.is_accept());
        for r in run.transcript.records() {
            assert_eq!(r.location, Location::for_round(r.index));
        }
    }

    #[test]
    fn honest_runs_accept_for_every_binary_challenge_vector() {
        let f = FieldSpec::prime(2).unwrap();
        for k in 1..=3usize {
            let params = ProtocolParams::new(f.clone(), k, false).unwrap();
            for a_idx in 0..(1 << k) {
                for b_idx in 0..(1 << k) {
                    for d in [false, true] {
                        let a: Vec<_> = (0..k).map(|i| f.from_u64((a_idx >> i) & 1)).collect();
                        let b: Vec<_> = (0..k).map(|i| f.from_u64((b_idx >> i) & 1)).collect();
                        let alice = [
                            HonestAlice::new(Location::One, a.clone(), Some(d)),
                            HonestAlice::new(Location::Two, a.clone(), None),
                        ];
                        let mut t = Transcript::new(params.clone());
                        for j in 1..=k {
                            let slot = (Location::for_round(j).number() - 1) as usize;
                            let y = alice[slot].respond(j, &b[j - 1]).unwrap();
                            t.push(RoundRecord {
                                index: j,
                                location: Location::for_round(j),
                                challenge: b[j - 1].clone(),
                                response: y,
                                challenge_time: 0.0,
                                emit_time: 0.0,
                            })
                            .unwrap();
                        }
                        assert!(verify_reveal(&t, d, &a[k - 1]).unwrap().is_accept());
                    }
                }
            }
        }
    }

    #[test]
    fn hiding_audit_small() {
        let report = hiding_audit(&f3(), 2).unwrap();
        assert!(report.perfectly_hiding());
        assert_eq!(report.challenge_vectors, 9);
        assert!(hiding_audit(&binary_preset(8).unwrap(), 2).is_err());
    }
}
