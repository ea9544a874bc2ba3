//! Classical cheating strategies for the committer and exact analysis of
//! the binding property.
//!
//! A deterministic cheating Alice is a set of lookup tables:
//!
//! - round 1 (commit): `y_1(b_1)`; the bit is not chosen yet,
//! - round `j >= 2`: `y_j(d, b_1, .., b_{j-2}, b_j)`; `b_{j-1}` was issued at
//!   the other location and cannot have arrived,
//! - reveal: `G(d, b_1, .., b_{k-1})`, the guess for `a_k`.
//!
//! The committed value evolves as `a_0 = d`, `a_j = y_j - b_j * a_{j-1}`,
//! the same chain the verifier rebuilds. Alice reveals `d` successfully iff
//! `G = a_k`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational};
use crate::games::{DeterministicStrategy, GameError, GameSpec, InputDistribution};
use crate::gf::{FieldConfig, FieldElement, FieldTables, GfError};

/// Ceiling on `q^k` for exhaustive evaluation of one strategy.
pub const MAX_EVALUATION_SPACE: usize = 1 << 24;

/// Ceiling on the number of responder-table combinations enumerated by
/// [`optimal_attack_exact`] and [`for_each_responder_set`].
pub const MAX_RESPONDER_SETS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("round {round} table has {got} entries, expected {expected}")]
    TableSize { round: usize, expected: usize, got: usize },
    #[error("table value {0} is not a field element index")]
    ValueOutOfRange(usize),
    #[error("strategy has {got} rounds, expected {expected}")]
    RoundMismatch { expected: usize, got: usize },
    #[error("empty domain")]
    EmptyDomain,
    #[error("function table shape does not match its weights")]
    ShapeMismatch,
    #[error("mixture weights must be non-negative and sum to 1")]
    BadMixture,
    #[error("invalid strategy file: {0}")]
    Parse(String),
}

/// Entries in round `j`'s responder table.
pub fn responder_domain_size(q: usize, round: usize) -> usize {
    if round == 1 {
        q
    } else {
        2 * q.pow(round as u32 - 1)
    }
}

/// Entries in the reveal guess table for `k` rounds.
pub fn guesser_domain_size(q: usize, rounds: usize) -> usize {
    2 * q.pow(rounds as u32 - 1)
}

/// Everything a round-`j` responder may read. There is no slot for
/// `b_{j-1}`, and the commit round has no bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponderView {
    Commit { challenge: usize },
    Sustain { bit: bool, earlier: Vec<usize>, challenge: usize },
}

impl ResponderView {
    /// View for round `j` given the full challenge history `b_1..b_j`.
    pub fn from_history(round: usize, bit: bool, challenges: &[usize]) -> Self {
        let challenge = challenges[round - 1];
        if round == 1 {
            ResponderView::Commit { challenge }
        } else {
            ResponderView::Sustain { bit, earlier: challenges[..round - 2].to_vec(), challenge }
        }
    }

    pub fn round(&self) -> usize {
        match self {
            ResponderView::Commit { .. } => 1,
            ResponderView::Sustain { earlier, .. } => earlier.len() + 2,
        }
    }

    fn key(&self, q: usize) -> usize {
        match self {
            ResponderView::Commit { challenge } => *challenge,
            ResponderView::Sustain { bit, earlier, challenge } => {
                let mut idx = *challenge;
                for &b in earlier.iter().rev() {
                    idx = idx * q + b;
                }
                2 * idx + *bit as usize
            }
        }
    }
}

/// Key of round `j`'s table read directly from a full history; touches
/// only the entries a [`ResponderView`] exposes.
#[inline]
fn responder_key(q: usize, round: usize, bit: bool, b: &[usize]) -> usize {
    if round == 1 {
        return b[0];
    }
    let mut idx = b[round - 1];
    for &x in b[..round - 2].iter().rev() {
        idx = idx * q + x;
    }
    2 * idx + bit as usize
}

#[inline]
fn guesser_key(q: usize, rounds: usize, bit: bool, b: &[usize]) -> usize {
    let idx = b[..rounds - 1].iter().rev().fold(0, |acc, &x| acc * q + x);
    2 * idx + bit as usize
}

/// A deterministic cheating strategy as explicit tables over field-element
/// indices.
#[derive(Debug, Clone)]
pub struct CheatingStrategy {
    tables: Arc<FieldTables>,
    responders: Vec<Vec<usize>>,
    guesser: Vec<usize>,
}

impl PartialEq for CheatingStrategy {
    fn eq(&self, other: &Self) -> bool {
        self.tables.spec() == other.tables.spec() && self.responders == other.responders && self.guesser == other.guesser
    }
}

impl Eq for CheatingStrategy {}

impl CheatingStrategy {
    pub fn new(tables: Arc<FieldTables>, responders: Vec<Vec<usize>>, guesser: Vec<usize>) -> Result<Self, AdversaryError> {
        let q = tables.order();
        let k = responders.len();
        if k == 0 {
            return Err(AdversaryError::RoundMismatch { expected: 1, got: 0 });
        }
        for (i, t) in responders.iter().enumerate() {
            let expected = responder_domain_size(q, i + 1);
            if t.len() != expected {
                return Err(AdversaryError::TableSize { round: i + 1, expected, got: t.len() });
            }
        }
        let expected = guesser_domain_size(q, k);
        if guesser.len() != expected {
            return Err(AdversaryError::TableSize { round: k + 1, expected, got: guesser.len() });
        }
        if let Some(&v) = responders.iter().flatten().chain(&guesser).find(|&&v| v >= q) {
            return Err(AdversaryError::ValueOutOfRange(v));
        }
        Ok(Self { tables, responders, guesser })
    }

    /// The honest behavior for bit `d0` with pre-shared `a` (indices):
    /// `y_1 = a_1 + d0*b_1`, `y_j = a_j + a_{j-1}*b_j`, `G = a_k`.
    pub fn honest(tables: Arc<FieldTables>, a: &[usize], d0: bool) -> Result<Self, AdversaryError> {
        let q = tables.order();
        let k = a.len();
        let mut responders = Vec::with_capacity(k);
        for j in 1..=k {
            let size = responder_domain_size(q, j);
            let table = (0..size)
                .map(|key| {
                    let b = if j == 1 { key } else { (key / 2) / q.pow(j as u32 - 2) };
                    let prev = if j == 1 { d0 as usize } else { a[j - 2] };
                    tables.add(a[j - 1], tables.mul(prev, b))
                })
                .collect();
            responders.push(table);
        }
        let guesser = vec![a[k - 1]; guesser_domain_size(q, k)];
        Self::new(tables, responders, guesser)
    }

    /// Uniformly random tables.
    pub fn random<R: RngCore + ?Sized>(tables: Arc<FieldTables>, rounds: usize, rng: &mut R) -> Result<Self, AdversaryError> {
        let q = tables.order();
        let responders = (1..=rounds)
            .map(|j| (0..responder_domain_size(q, j)).map(|_| rng.random_range(0..q)).collect())
            .collect();
        let guesser = (0..guesser_domain_size(q, rounds)).map(|_| rng.random_range(0..q)).collect();
        Self::new(tables, responders, guesser)
    }

    pub fn field_tables(&self) -> &Arc<FieldTables> {
        &self.tables
    }

    pub fn rounds(&self) -> usize {
        self.responders.len()
    }

    pub fn responders(&self) -> &[Vec<usize>] {
        &self.responders
    }

    pub fn guesser(&self) -> &[usize] {
        &self.guesser
    }

    pub fn respond(&self, view: &ResponderView) -> usize {
        self.responders[view.round() - 1][view.key(self.tables.order())]
    }

    /// Response in round `j` given the full history `b_1..b_j`.
    pub fn respond_in_history(&self, round: usize, bit: bool, b: &[usize]) -> usize {
        self.responders[round - 1][responder_key(self.tables.order(), round, bit, b)]
    }

    /// `G(d, b_1..b_{k-1})`; entries of `b` past `k - 1` are ignored.
    pub fn guess(&self, bit: bool, b: &[usize]) -> usize {
        self.guesser[guesser_key(self.tables.order(), self.rounds(), bit, b)]
    }

    /// `a_0..a_k` for bit `d` and challenges `b`.
    pub fn chain(&self, bit: bool, b: &[usize]) -> Vec<usize> {
        let t = &self.tables;
        let mut a = Vec::with_capacity(b.len() + 1);
        a.push(bit as usize);
        for j in 1..=self.rounds() {
            let y = self.respond_in_history(j, bit, b);
            a.push(t.sub(y, t.mul(b[j - 1], a[j - 1])));
        }
        a
    }
}

/// `a_k` induced by the strategy for bit `d` and challenges `b_1..b_k`.
pub fn induced_ak(strategy: &CheatingStrategy, bit: bool, b: &[usize]) -> Result<usize, AdversaryError> {
    if b.len() != strategy.rounds() {
        return Err(AdversaryError::RoundMismatch { expected: strategy.rounds(), got: b.len() });
    }
    if let Some(&v) = b.iter().find(|&&v| v >= strategy.tables.order()) {
        return Err(AdversaryError::ValueOutOfRange(v));
    }
    Ok(*strategy.chain(bit, b).last().expect("k >= 1"))
}

/// [`induced_ak`] over field elements.
pub fn induced_ak_element(strategy: &CheatingStrategy, bit: bool, b: &[FieldElement]) -> Result<FieldElement, AdversaryError> {
    let idx = b.iter().map(|e| strategy.tables.index_of(e)).collect::<Result<Vec<_>, _>>()?;
    Ok(strategy.tables.element(induced_ak(strategy, bit, &idx)?))
}

/// Success probabilities for revealing 0 and 1, and the binding advantage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackResult {
    pub p0: Rational,
    pub p1: Rational,
    /// `p0 + p1 - 1`.
    pub epsilon: Rational,
}

impl AttackResult {
    fn from_pair(p0: Rational, p1: Rational) -> Self {
        let epsilon = &p0 + &p1 - Rational::one();
        Self { p0, p1, epsilon }
    }

    /// Average success when the bit to reveal is uniform: `(p0 + p1) / 2`.
    pub fn mean_success(&self) -> Rational {
        (&self.p0 + &self.p1) / exact::int(2)
    }

    /// `epsilon <= min(1, 2k sqrt(2/q))`, decided exactly.
    pub fn within_binding_bound(&self, rounds: usize, q: usize) -> bool {
        let k = rounds as u64;
        self.epsilon <= Rational::one() && exact::le_sqrt(&self.epsilon, &exact::ratio((8 * k * k) as i64, q as i64))
    }
}

fn evaluation_space(q: usize, k: usize) -> Result<usize, AdversaryError> {
    q.checked_pow(k as u32)
        .filter(|&s| s <= MAX_EVALUATION_SPACE)
        .ok_or_else(|| AdversaryError::TooLarge(format!("q^k = {q}^{k}")))
}

/// Calls `visit(bit, b, a)` for every bit and every challenge vector, where
/// `a` is the chain `a_0..a_k`. Challenge vectors are visited in
/// lexicographic order with `b_1` most significant.
fn for_each_history(strategy: &CheatingStrategy, mut visit: impl FnMut(bool, &[usize], &[usize])) {
    let q = strategy.tables.order();
    let k = strategy.rounds();
    let t = &strategy.tables;
    let mut b = vec![0usize; k];
    let mut a = vec![0usize; k + 1];
    for bit in [false, true] {
        a[0] = bit as usize;
        // iterative depth-first walk over b_1..b_k
        let mut depth = 0usize;
        let mut next = vec![0usize; k];
        loop {
            if depth == k {
                visit(bit, &b, &a);
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            if next[depth] == q {
                next[depth] = 0;
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            let v = next[depth];
            next[depth] += 1;
            b[depth] = v;
            let j = depth + 1;
            let y = strategy.responders[j - 1][responder_key(q, j, bit, &b)];
            a[j] = t.sub(y, t.mul(v, a[j - 1]));
            depth += 1;
        }
    }
}

/// Exact `p_d = Pr_b[G(d, b_<k) = a_k(d, b)]` by full enumeration.
pub fn attack_value(strategy: &CheatingStrategy) -> Result<AttackResult, AdversaryError> {
    let q = strategy.tables.order();
    let k = strategy.rounds();
    let space = evaluation_space(q, k)?;
    let mut hits = [0u64; 2];
    for_each_history(strategy, |bit, b, a| {
        if strategy.guess(bit, b) == a[k] {
            hits[bit as usize] += 1;
        }
    });
    let den = BigInt::from(space);
    let p = |h: u64| BigRational::new(BigInt::from(h), den.clone());
    Ok(AttackResult::from_pair(p(hits[0]), p(hits[1])))
}

/// Attack value of a probabilistic strategy given as a convex combination
/// of table strategies.
pub fn attack_value_mixture(mixture: &[(Rational, CheatingStrategy)]) -> Result<AttackResult, AdversaryError> {
    let total: Rational = mixture.iter().map(|(w, _)| w.clone()).sum();
    if mixture.is_empty() || !total.is_one() || mixture.iter().any(|(w, _)| *w < Rational::zero()) {
        return Err(AdversaryError::BadMixture);
    }
    let (mut p0, mut p1) = (Rational::zero(), Rational::zero());
    for (w, s) in mixture {
        let r = attack_value(s)?;
        p0 += w * r.p0;
        p1 += w * r.p1;
    }
    Ok(AttackResult::from_pair(p0, p1))
}

/// Number of responder-table combinations for `(q, k)`, if within the ceiling.
pub fn responder_set_count(q: usize, rounds: usize) -> Result<usize, AdversaryError> {
    let entries: usize = (1..=rounds).map(|j| responder_domain_size(q, j)).sum();
    q.checked_pow(entries as u32)
        .filter(|&n| n <= MAX_RESPONDER_SETS)
        .ok_or_else(|| AdversaryError::TooLarge(format!("{q}^{entries} responder table combinations")))
}

/// Responder tables for combination number `index` (mixed radix, first
/// entry of round 1 least significant).
fn responder_set(q: usize, rounds: usize, mut index: usize) -> Vec<Vec<usize>> {
    (1..=rounds)
        .map(|j| {
            (0..responder_domain_size(q, j))
                .map(|_| {
                    let v = index % q;
                    index /= q;
                    v
                })
                .collect()
        })
        .collect()
}

/// Strategy with the given responders and the pointwise-optimal guesser
/// (modal `a_k` over `b_k`, smallest value on ties).
pub fn with_optimal_guesser(tables: Arc<FieldTables>, responders: Vec<Vec<usize>>) -> Result<CheatingStrategy, AdversaryError> {
    let q = tables.order();
    let k = responders.len();
    evaluation_space(q, k)?;
    let placeholder = vec![0; guesser_domain_size(q, k)];
    let mut strategy = CheatingStrategy::new(tables, responders, placeholder)?;
    let mut counts = vec![0u32; guesser_domain_size(q, k) * q];
    for_each_history(&strategy, |bit, b, a| {
        counts[guesser_key(q, k, bit, b) * q + a[k]] += 1;
    });
    strategy.guesser = counts
        .chunks(q)
        .map(|c| {
            let top = *c.iter().max().expect("q >= 1");
            c.iter().position(|&v| v == top).expect("max present")
        })
        .collect();
    Ok(strategy)
}

/// Calls `visit` on every responder-table combination for `(q, k)` in
/// index order.
pub fn for_each_responder_set(
    tables: &Arc<FieldTables>,
    rounds: usize,
    mut visit: impl FnMut(usize, Vec<Vec<usize>>),
) -> Result<(), AdversaryError> {
    let q = tables.order();
    let count = responder_set_count(q, rounds)?;
    for i in 0..count {
        visit(i, responder_set(q, rounds, i));
    }
    Ok(())
}

/// Exact optimum of `p0 + p1` over all deterministic cheating strategies.
///
/// Enumerates every responder-table combination (in parallel, reduced in
/// index order) and pairs each with its optimal guesser. Returns the first
/// combination reaching the maximum.
pub fn optimal_attack_exact(
    tables: &Arc<FieldTables>,
    rounds: usize,
) -> Result<(AttackResult, CheatingStrategy), AdversaryError> {
    let q = tables.order();
    let count = responder_set_count(q, rounds)?;
    evaluation_space(q, rounds)?;
    let scored: Vec<(Rational, usize)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = with_optimal_guesser(Arc::clone(tables), responder_set(q, rounds, i)).expect("sizes checked");
            let r = attack_value(&s).expect("sizes checked");
            (r.p0 + r.p1, i)
        })
        .collect();
    let mut best: Option<&(Rational, usize)> = None;
    for entry in &scored {
        if best.is_none_or(|b| entry.0 > b.0) {
            best = Some(entry);
        }
    }
    let (_, index) = best.expect("at least one combination");
    let strategy = with_optimal_guesser(Arc::clone(tables), responder_set(q, rounds, *index))?;
    let result = attack_value(&strategy)?;
    Ok((result, strategy))
}

/// Exact independence parameter `max_g Pr[f(x, y) = g(x)]`.
///
/// `values[x * ny + y]` holds `f(x, y)`; `x` and `y` are independent with
/// the given weights. Computed as `E_x[max_z Pr_y[f(x, y) = z]]`.
pub fn independence_parameter(values: &[usize], x_weights: &[Rational], y_weights: &[Rational]) -> Result<Rational, AdversaryError> {
    let (nx, ny) = (x_weights.len(), y_weights.len());
    if nx == 0 || ny == 0 {
        return Err(AdversaryError::EmptyDomain);
    }
    if values.len() != nx * ny {
        return Err(AdversaryError::ShapeMismatch);
    }
    let mut total = Rational::zero();
    for (x, wx) in x_weights.iter().enumerate() {
        let row = &values[x * ny..(x + 1) * ny];
        let mut mass: Vec<(usize, Rational)> = Vec::new();
        for (&z, wy) in row.iter().zip(y_weights) {
            match mass.iter_mut().find(|(v, _)| *v == z) {
                Some((_, m)) => *m += wy,
                None => mass.push((z, wy.clone())),
            }
        }
        let best = mass.into_iter().map(|(_, m)| m).max().unwrap_or_else(Rational::zero);
        total += wx * best;
    }
    Ok(total)
}

/// One history-conditioned increment `Z_{j+1}^h <= Z_j^h + sqrt(2/q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementCheck {
    /// Round `j`; the check relates rounds `j` and `j + 1`.
    pub round: usize,
    pub bit: bool,
    /// `b_1..b_{j-1}`.
    pub history: Vec<usize>,
    /// `max_c Pr_{b_j}[a_j(h, b_j) = c]`.
    pub z_current: Rational,
    /// `max_g Pr_{b_j, b_{j+1}}[a_{j+1}(h, b_j, b_{j+1}) = g(b_j)]`.
    pub z_next: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundIndependence {
    pub round: usize,
    /// `E_h[Z_j^h]`.
    pub averaged: Rational,
    /// `IP(a_j; b_j)` from [`independence_parameter`] on the full table.
    pub direct: Rational,
    /// `IP(a_j; b_j) <= 1/2 + j sqrt(2/q)`.
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition1Report {
    pub q: usize,
    pub rounds: Vec<RoundIndependence>,
    pub increments: Vec<IncrementCheck>,
}

impl Proposition1Report {
    pub fn all_hold(&self) -> bool {
        self.rounds.iter().all(|r| r.within_bound && r.averaged == r.direct) && self.increments.iter().all(|c| c.holds)
    }
}

/// Distribution of `a_j` over `b_j` for every history `(d, b_1..b_{j-1})`,
/// as counts: `out[hist][c]`. Histories are ordered with `d` least
/// significant, then `b_1`, ...
fn chain_counts(strategy: &CheatingStrategy, round: usize) -> Vec<Vec<u64>> {
    let q = strategy.tables.order();
    let histories = 2 * q.pow(round as u32 - 1);
    let mut counts = vec![vec![0u64; q]; histories];
    let k = strategy.rounds();
    // each (d, b_1..b_j) is reached q^(k-j) times in the full walk
    let repeat = q.pow((k - round) as u32) as u64;
    for_each_history(strategy, |bit, b, a| {
        let h = b[..round - 1].iter().rev().fold(0, |acc, &x| acc * q + x) * 2 + bit as usize;
        counts[h][a[round]] += 1;
    });
    for c in counts.iter_mut().flatten() {
        *c /= repeat;
    }
    counts
}

/// Computes `IP(a_j; b_j)` per round, both history-averaged and directly,
/// and every history-conditioned increment, all with exact arithmetic.
pub fn proposition1_check(strategy: &CheatingStrategy) -> Result<Proposition1Report, AdversaryError> {
    let q = strategy.tables.order();
    let k = strategy.rounds();
    evaluation_space(q, k)?;
    let qr = exact::int(q as u64);
    let two_over_q = exact::ratio(2, q as i64);

    let per_round: Vec<Vec<Vec<u64>>> = (1..=k).map(|j| chain_counts(strategy, j)).collect();
    let modal = |c: &Vec<u64>| BigRational::new(BigInt::from(*c.iter().max().expect("q >= 1")), BigInt::from(q));

    let mut rounds = Vec::with_capacity(k);
    for j in 1..=k {
        let counts = &per_round[j - 1];
        let histories = counts.len();
        let averaged = counts.iter().map(modal).sum::<Rational>() / exact::int(histories as u64);

        // direct: x = history, y = b_j, f = a_j
        let mut values = vec![0usize; histories * q];
        let mut filled = vec![false; histories * q];
        for_each_history(strategy, |bit, b, a| {
            let h = b[..j - 1].iter().rev().fold(0, |acc, &x| acc * q + x) * 2 + bit as usize;
            let cell = h * q + b[j - 1];
            if !filled[cell] {
                values[cell] = a[j];
                filled[cell] = true;
            }
        });
        let xw = vec![exact::ratio(1, histories as i64); histories];
        let yw = vec![exact::ratio(1, q as i64); q];
        let direct = independence_parameter(&values, &xw, &yw)?;
        let excess = &direct - exact::ratio(1, 2);
        let within_bound = exact::le_sqrt(&excess, &(exact::int((j * j) as u64) * &two_over_q));
        rounds.push(RoundIndependence { round: j, averaged, direct, within_bound });
    }

    let mut increments = Vec::new();
    for j in 1..k {
        let current = &per_round[j - 1];
        let next = &per_round[j];
        for (h, c) in current.iter().enumerate() {
            let z_current = modal(c);
            // refinements (h, b_j) of h in the next round's ordering
            let stride = 2 * q.pow(j as u32 - 1);
            let z_next = (0..q).map(|bj| modal(&next[h + bj * stride])).sum::<Rational>() / &qr;
            let holds = exact::le_plus_sqrt(&z_next, &z_current, &two_over_q);
            let bit = h % 2 == 1;
            let mut rest = h / 2;
            let history = (0..j - 1)
                .map(|_| {
                    let v = rest % q;
                    rest /= q;
                    v
                })
                .collect();
            increments.push(IncrementCheck { round: j, bit, history, z_current, z_next, holds });
        }
    }
    Ok(Proposition1Report { q, rounds, increments })
}

/// Base-case reduction to a game in CHSH_q(1/2): Bastian holds `Y = d`
/// (uniform on {0, 1}) and answers `-G(Y)`, Adeline holds `X = b_1`
/// (uniform) and answers `y_1(X)`. The game's first player is Bastian.
/// For `k = 1` the strategy's value equals `(p0 + p1) / 2`.
pub fn base_case_reduction(strategy: &CheatingStrategy, guess: [usize; 2]) -> Result<(GameSpec, DeterministicStrategy), AdversaryError> {
    let t = Arc::clone(&strategy.tables);
    let q = t.order();
    let mut probs = vec![Rational::zero(); q];
    probs[0] = exact::ratio(1, 2);
    probs[1] = exact::ratio(1, 2);
    let spec = GameSpec::with_tables(Arc::clone(&t), InputDistribution::new(probs)?, InputDistribution::uniform(q))?;
    let mut f = vec![0usize; q];
    f[0] = t.neg(guess[0]);
    f[1] = t.neg(guess[1]);
    let g = strategy.responders[0].clone();
    Ok((spec, DeterministicStrategy { f, g }))
}

/// Inductive reduction for round `j -> j+1` at history `h = (d, b_1..b_{j-1})`.
///
/// Bastian receives `Y = a_j(h, b_j)` (distributed as `b_j` is uniform) and
/// answers `-g(Y)` with `g` the best guess of `a_{j+1}` from `a_j`; Adeline
/// receives `X = b_{j+1}` and answers `y_{j+1}(h, X)`. Returns the game,
/// the strategy, and `Z_{j+1}^h`, which the strategy's value equals.
pub fn inductive_reduction(
    strategy: &CheatingStrategy,
    round: usize,
    bit: bool,
    history: &[usize],
) -> Result<(GameSpec, DeterministicStrategy, Rational), AdversaryError> {
    let t = Arc::clone(&strategy.tables);
    let q = t.order();
    let k = strategy.rounds();
    if round == 0 || round >= k || history.len() != round - 1 {
        return Err(AdversaryError::RoundMismatch { expected: k, got: round });
    }
    // b buffer: history, b_j, b_{j+1}, zeros after
    let mut b = vec![0usize; k];
    b[..round - 1].copy_from_slice(history);
    let mut y_dist = vec![0u64; q];
    // joint[c][z] = #{(b_j, b_{j+1}) : a_j = c, a_{j+1} = z}
    let mut joint = vec![vec![0u64; q]; q];
    for bj in 0..q {
        b[round - 1] = bj;
        for bn in 0..q {
            b[round] = bn;
            let chain = strategy.chain(bit, &b);
            let (c, z) = (chain[round], chain[round + 1]);
            if bn == 0 {
                y_dist[c] += 1;
            }
            joint[c][z] += 1;
        }
    }
    let guess: Vec<usize> = joint
        .iter()
        .map(|row| {
            let top = *row.iter().max().expect("q >= 1");
            row.iter().position(|&v| v == top).expect("max present")
        })
        .collect();
    let z_next = BigRational::new(
        BigInt::from(joint.iter().map(|row| *row.iter().max().expect("q >= 1")).sum::<u64>()),
        BigInt::from(q * q),
    );
    let probs = y_dist.iter().map(|&c| BigRational::new(BigInt::from(c), BigInt::from(q))).collect();
    let spec = GameSpec::with_tables(Arc::clone(&t), InputDistribution::new(probs)?, InputDistribution::uniform(q))?;
    let f = guess.iter().map(|&z| t.neg(z)).collect();
    let g = (0..q)
        .map(|x| {
            b[round] = x;
            strategy.respond_in_history(round + 1, bit, &b)
        })
        .collect();
    Ok((spec, DeterministicStrategy { f, g }, z_next))
}

/// Strategy file: the field, then each round's table and the guesser as
/// explicit rows of canonical hex encodings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub field: FieldConfig,
    pub rounds: usize,
    pub responders: Vec<ResponderSection>,
    pub guesser: Vec<GuessRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponderSection {
    pub round: usize,
    pub rows: Vec<ResponderRow>,
}

/// `(d, b_1..b_{j-2}, b_j) -> y_j`; round 1 rows omit `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponderRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u8>,
    pub earlier: Vec<String>,
    pub challenge: String,
    pub y: String,
}

/// `(d, b_1..b_{k-1}) -> guess for a_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessRow {
    pub d: u8,
    pub challenges: Vec<String>,
    pub a_k: String,
}

impl StrategyFile {
    pub fn from_strategy(strategy: &CheatingStrategy) -> Self {
        let t = &strategy.tables;
        let q = t.order();
        let hex = |i: usize| t.element(i).to_hex();
        let digits = |mut idx: usize, n: usize| {
            (0..n)
                .map(|_| {
                    let v = idx % q;
                    idx /= q;
                    v
                })
                .collect::<Vec<_>>()
        };
        let responders = strategy
            .responders
            .iter()
            .enumerate()
            .map(|(i, table)| {
                let round = i + 1;
                let rows = table
                    .iter()
                    .enumerate()
                    .map(|(key, &y)| {
                        if round == 1 {
                            ResponderRow { d: None, earlier: vec![], challenge: hex(key), y: hex(y) }
                        } else {
                            let ds = digits(key / 2, round - 1);
                            ResponderRow {
                                d: Some((key % 2) as u8),
                                earlier: ds[..round - 2].iter().map(|&v| hex(v)).collect(),
                                challenge: hex(ds[round - 2]),
                                y: hex(y),
                            }
                        }
                    })
                    .collect();
                ResponderSection { round, rows }
            })
            .collect();
        let k = strategy.rounds();
        let guesser = strategy
            .guesser
            .iter()
            .enumerate()
            .map(|(key, &g)| GuessRow {
                d: (key % 2) as u8,
                challenges: digits(key / 2, k - 1).into_iter().map(hex).collect(),
                a_k: hex(g),
            })
            .collect();
        Self { field: FieldConfig::from(&**t.spec()), rounds: k, responders, guesser }
    }

    pub fn to_strategy(&self) -> Result<CheatingStrategy, AdversaryError> {
        let spec = self.field.build()?;
        let t = Arc::new(FieldTables::new(&spec)?);
        let q = t.order();
        let idx = |s: &str| -> Result<usize, AdversaryError> { Ok(t.index_of(&spec.from_hex(s)?)?) };
        let bit = |d: u8| match d {
            0 | 1 => Ok(d == 1),
            other => Err(AdversaryError::Parse(format!("bit {other}"))),
        };
        if self.responders.len() != self.rounds {
            return Err(AdversaryError::RoundMismatch { expected: self.rounds, got: self.responders.len() });
        }
        let mut responders = Vec::with_capacity(self.rounds);
        for (i, section) in self.responders.iter().enumerate() {
            let round = i + 1;
            if section.round != round {
                return Err(AdversaryError::Parse(format!("section {} out of order", section.round)));
            }
            let size = responder_domain_size(q, round);
            let mut table = vec![None; size];
            for row in &section.rows {
                let mut b = vec![0usize; round];
                if row.earlier.len() != round.saturating_sub(2) {
                    return Err(AdversaryError::Parse(format!("round {round} row has wrong arity")));
                }
                for (slot, s) in b.iter_mut().zip(&row.earlier) {
                    *slot = idx(s)?;
                }
                b[round - 1] = idx(&row.challenge)?;
                let d = match (round, row.d) {
                    (1, None) => false,
                    (1, Some(_)) => return Err(AdversaryError::Parse("commit rows take no bit".into())),
                    (_, Some(d)) => bit(d)?,
                    (_, None) => return Err(AdversaryError::Parse(format!("round {round} row lacks d"))),
                };
                table[responder_key(q, round, d, &b)] = Some(idx(&row.y)?);
            }
            let table = table
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| AdversaryError::Parse(format!("round {round} table is incomplete")))?;
            responders.push(table);
        }
        let mut guesser = vec![None; guesser_domain_size(q, self.rounds)];
        for row in &self.guesser {
            if row.challenges.len() != self.rounds - 1 {
                return Err(AdversaryError::Parse("guess row has wrong arity".into()));
            }
            let b = row.challenges.iter().map(|s| idx(s)).collect::<Result<Vec<_>, _>>()?;
            guesser[guesser_key(q, self.rounds, bit(row.d)?, &b)] = Some(idx(&row.a_k)?);
        }
        let guesser = guesser
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| AdversaryError::Parse("guess table is incomplete".into()))?;
        CheatingStrategy::new(t, responders, guesser)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, AdversaryError> {
        serde_json::from_str(text).map_err(|e| AdversaryError::Parse(e.to_string()))
    }
}
