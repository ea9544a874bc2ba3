//! CHSH_q games and their exact classical values.
//!
//! In CHSH_q(p) Alice receives `x` from a distribution with
//! `max_x p_x <= p`, Bob receives a uniform `y`, and they win when
//! `a + b = x*y` in F_q. Classical values are maximized over deterministic
//! strategies `a = f(x)`, `b = g(y)` by enumerating Bob's tables and letting
//! Alice answer pointwise-optimally.
//!
//! Quantum values are not computed here. For reference: for q = 2 the
//! entangled value of CHSH_2(p) is at most `(1 + sqrt(p^2 + (1-p)^2)) / 2`,
//! and for prime (or odd prime power) q the entangled value of uniform
//! CHSH_q is at most `(q-1)/q * 1/sqrt(q) + 1/q`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{self, Rational};
use crate::gf::{FieldConfig, FieldElement, FieldSpec, FieldTables, GfError};
use crate::magnitude::Magnitude;

/// Largest field order accepted by [`classical_value_exact`].
pub const MAX_SOLVER_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("distribution has {got} entries, field order is {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("negative probability at index {0}")]
    Negative(usize),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("field order {0} exceeds the exact-solver ceiling of {MAX_SOLVER_ORDER}")]
    TooLarge(usize),
    #[error("probability denominators too large for exact enumeration")]
    DenominatorTooLarge,
    #[error("distribution is supported on a single point")]
    SingleSupport,
    #[error("strategy tables must have one entry per field element")]
    MalformedStrategy,
    #[error("Bob's input distribution must be uniform for this check")]
    NonUniformBob,
    #[error("invalid game file: {0}")]
    Parse(String),
}

/// Exact probability distribution over field elements, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDistribution {
    probs: Vec<Rational>,
}

impl InputDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self, GameError> {
        if let Some(i) = probs.iter().position(|p| p.is_negative()) {
            return Err(GameError::Negative(i));
        }
        let sum: Rational = probs.iter().sum();
        if !sum.is_one() {
            return Err(GameError::NotNormalized(sum.to_string()));
        }
        Ok(Self { probs })
    }

    pub fn uniform(q: usize) -> Self {
        Self { probs: vec![exact::ratio(1, q as i64); q] }
    }

    /// Mass `heavy` on `index`, the remainder spread uniformly over the other
    /// `q - 1` points.
    pub fn point_heavy(q: usize, index: usize, heavy: Rational) -> Result<Self, GameError> {
        if q < 2 || index >= q {
            return Err(GameError::WrongLength { expected: q, got: index });
        }
        let rest = (Rational::one() - &heavy) / exact::int(q as u64 - 1);
        let mut probs = vec![rest; q];
        probs[index] = heavy;
        Self::new(probs)
    }

    /// Parses `"num/den"` (or integer) entries.
    pub fn from_fractions<S: AsRef<str>>(entries: &[S]) -> Result<Self, GameError> {
        let probs = entries
            .iter()
            .map(|s| Rational::from_str(s.as_ref().trim()).map_err(|e| GameError::Parse(format!("{}: {e}", s.as_ref()))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max_prob(&self) -> Rational {
        self.probs.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.probs.len();
        n > 0 && self.probs.iter().all(|p| *p == exact::ratio(1, n as i64))
    }

    /// Integer weights over a common denominator.
    pub fn integer_weights(&self) -> Result<(Vec<u64>, u64), GameError> {
        let den = self.probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let weights = self
            .probs
            .iter()
            .map(|p| (p.numer() * (&den / p.denom())).to_u64().ok_or(GameError::DenominatorTooLarge))
            .collect::<Result<Vec<_>, _>>()?;
        let den = den.to_u64().filter(|&d| d < 1 << 40).ok_or(GameError::DenominatorTooLarge)?;
        Ok((weights, den))
    }
}

/// A game `a + b = x*y` over F_q with explicit input distributions.
#[derive(Debug, Clone)]
pub struct GameSpec {
    tables: Arc<FieldTables>,
    alice: InputDistribution,
    bob: InputDistribution,
}

impl GameSpec {
    pub fn new(field: &Arc<FieldSpec>, alice: InputDistribution, bob: InputDistribution) -> Result<Self, GameError> {
        let tables = Arc::new(FieldTables::new(field)?);
        Self::with_tables(tables, alice, bob)
    }

    pub fn with_tables(tables: Arc<FieldTables>, alice: InputDistribution, bob: InputDistribution) -> Result<Self, GameError> {
        let q = tables.order();
        for d in [&alice, &bob] {
            if d.len() != q {
                return Err(GameError::WrongLength { expected: q, got: d.len() });
            }
        }
        Ok(Self { tables, alice, bob })
    }

    /// Member of CHSH_q(p) for `p = alice.max_prob()`: Bob's input is uniform.
    pub fn chsh_p(field: &Arc<FieldSpec>, alice: InputDistribution) -> Result<Self, GameError> {
        let q = field.order_u64().unwrap_or(u64::MAX) as usize;
        Self::new(field, alice, InputDistribution::uniform(q))
    }

    /// Uniform CHSH_q.
    pub fn chsh(field: &Arc<FieldSpec>) -> Result<Self, GameError> {
        let q = field.order_u64().unwrap_or(u64::MAX) as usize;
        Self::chsh_p(field, InputDistribution::uniform(q))
    }

    pub fn tables(&self) -> &Arc<FieldTables> {
        &self.tables
    }

    pub fn order(&self) -> usize {
        self.tables.order()
    }

    pub fn alice(&self) -> &InputDistribution {
        &self.alice
    }

    pub fn bob(&self) -> &InputDistribution {
        &self.bob
    }

    /// Bob's input is exactly uniform, as in the CHSH_q(p) family.
    pub fn bob_is_uniform(&self) -> bool {
        self.bob.is_uniform()
    }

    #[inline]
    fn wins(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        self.tables.add(a, b) == self.tables.mul(x, y)
    }
}

/// `a + b = x*y`.
pub fn win_predicate(x: &FieldElement, y: &FieldElement, a: &FieldElement, b: &FieldElement) -> Result<bool, GfError> {
    Ok(a.checked_add(b)? == x.checked_mul(y)?)
}

/// Deterministic strategy tables indexed by field-element index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    /// Alice's answer `f(x)`.
    pub f: Vec<usize>,
    /// Bob's answer `g(y)`.
    pub g: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn constant(q: usize, a: usize, b: usize) -> Self {
        Self { f: vec![a; q], g: vec![b; q] }
    }

    fn check(&self, q: usize) -> Result<(), GameError> {
        if self.f.len() != q || self.g.len() != q || self.f.iter().chain(&self.g).any(|&v| v >= q) {
            return Err(GameError::MalformedStrategy);
        }
        Ok(())
    }
}

/// `sum_{x,y} p_x q_y [f(x) + g(y) = x*y]`.
pub fn strategy_value(spec: &GameSpec, strategy: &DeterministicStrategy) -> Result<Rational, GameError> {
    let q = spec.order();
    strategy.check(q)?;
    let mut total = Rational::zero();
    for x in 0..q {
        for y in 0..q {
            if spec.wins(x, y, strategy.f[x], strategy.g[y]) {
                total += &spec.alice.probs[x] * &spec.bob.probs[y];
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSolution {
    pub value: Rational,
    pub strategy: DeterministicStrategy,
}

/// Exact classical value with a witness.
///
/// Bob's tables are enumerated in lexicographic order (`g(0)` most
/// significant); for each, Alice plays the smallest answer maximizing her
/// conditional win weight. The first table reaching the maximum is the
/// witness. The search is split over table prefixes and run on `workers`
/// threads; the reduction is by prefix order, so the result does not depend
/// on the worker count.
pub fn classical_value_exact(spec: &GameSpec, workers: usize) -> Result<GameSolution, GameError> {
    let q = spec.order();
    if q > MAX_SOLVER_ORDER {
        return Err(GameError::TooLarge(q));
    }
    let (wa, wa_den) = spec.alice.integer_weights()?;
    let (wb, wb_den) = spec.bob.integer_weights()?;
    let solver = Solver { tables: &spec.tables, q, wa: &wa, wb: &wb };

    let prefix_len = if q >= 4 { 2 } else { 1 };
    let prefixes: Vec<Vec<usize>> = (0..q.pow(prefix_len as u32))
        .map(|i| {
            let mut digits = vec![0; prefix_len];
            let mut rest = i;
            for d in digits.iter_mut().rev() {
                *d = rest % q;
                rest /= q;
            }
            digits
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| GameError::Parse(e.to_string()))?;
    let partials: Vec<(u128, Vec<usize>)> = pool.install(|| prefixes.par_iter().map(|p| solver.search_prefix(p)).collect());

    let mut best: Option<(u128, Vec<usize>)> = None;
    for (score, g) in partials {
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, g));
        }
    }
    let (score, g) = best.expect("at least one prefix");
    let f = solver.best_response(&g);
    let value = BigRational::new(BigInt::from(score), BigInt::from(wa_den as u128 * wb_den as u128));
    Ok(GameSolution { value, strategy: DeterministicStrategy { f, g } })
}

struct Solver<'a> {
    tables: &'a FieldTables,
    q: usize,
    wa: &'a [u64],
    wb: &'a [u64],
}

impl Solver<'_> {
    /// Best (score, g) among tables starting with `prefix`; ties keep the
    /// lexicographically first table.
    fn search_prefix(&self, prefix: &[usize]) -> (u128, Vec<usize>) {
        let q = self.q;
        // score[x * q + a] = Bob weight of the y's where answering a wins at x
        let mut score = vec![0u64; q * q];
        let mut g = vec![0usize; q];
        for (y, &c) in prefix.iter().enumerate() {
            g[y] = c;
            self.apply(&mut score, y, c, true);
        }
        let mut best = (0u128, Vec::new());
        let mut found = false;
        self.dfs(prefix.len(), &mut g, &mut score, &mut best, &mut found);
        best
    }

    #[inline]
    fn apply(&self, score: &mut [u64], y: usize, c: usize, add: bool) {
        let w = self.wb[y];
        for x in 0..self.q {
            let a = self.tables.sub(self.tables.mul(x, y), c);
            let cell = &mut score[x * self.q + a];
            if add {
                *cell += w;
            } else {
                *cell -= w;
            }
        }
    }

    fn dfs(&self, y: usize, g: &mut [usize], score: &mut [u64], best: &mut (u128, Vec<usize>), found: &mut bool) {
        let q = self.q;
        if y == q {
            let total: u128 = (0..q)
                .map(|x| self.wa[x] as u128 * *score[x * q..(x + 1) * q].iter().max().expect("q >= 1") as u128)
                .sum();
            if !*found || total > best.0 {
                *best = (total, g.to_vec());
                *found = true;
            }
            return;
        }
        for c in 0..q {
            g[y] = c;
            self.apply(score, y, c, true);
            self.dfs(y + 1, g, score, best, found);
            self.apply(score, y, c, false);
        }
    }

    /// Alice's pointwise-optimal answers to `g`, smallest answer on ties.
    fn best_response(&self, g: &[usize]) -> Vec<usize> {
        let q = self.q;
        (0..q)
            .map(|x| {
                let mut weights = vec![0u64; q];
                for (y, &c) in g.iter().enumerate() {
                    weights[self.tables.sub(self.tables.mul(x, y), c)] += self.wb[y];
                }
                let top = *weights.iter().max().expect("q >= 1");
                weights.iter().position(|&w| w == top).expect("max is present")
            })
            .collect()
    }
}

/// `p + sqrt(2/q)` in extended precision.
pub fn lemma1_bound(p: &Rational, q: &BigUint) -> Magnitude {
    let q = Magnitude::from_biguint(q);
    Magnitude::from_ratio(p).add((Magnitude::from_f64(2.0) / q).sqrt())
}

/// `value <= p + sqrt(2/q)`, decided exactly.
pub fn lemma1_holds(value: &Rational, p: &Rational, q: u64) -> bool {
    exact::le_plus_sqrt(value, p, &exact::ratio(2, q as i64))
}

/// Output of the non-signaling guessing reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessingReport {
    /// `S_y`: probability that the guess `(f(x)-f(x')) / (x-x')` equals `y`.
    pub success: Vec<Rational>,
    /// `E_y[S_y]` under uniform `y`.
    pub mean: Rational,
    /// `D = sum_{x != x'} p_x p_x'`.
    pub pair_mass: Rational,
}

/// Alice samples distinct `x, x'` with weight `p_x p_x' / D` and guesses
/// Bob's input as `(f(x) - f(x')) * (x - x')^-1`.
pub fn guessing_reduction(
    tables: &FieldTables,
    f: &[usize],
    alice: &InputDistribution,
) -> Result<GuessingReport, GameError> {
    let q = tables.order();
    if f.len() != q || f.iter().any(|&v| v >= q) {
        return Err(GameError::MalformedStrategy);
    }
    if alice.len() != q {
        return Err(GameError::WrongLength { expected: q, got: alice.len() });
    }
    let p = alice.probs();
    let mut mass = vec![Rational::zero(); q];
    let mut pair_mass = Rational::zero();
    for x in 0..q {
        for xp in 0..q {
            if x == xp {
                continue;
            }
            let w = &p[x] * &p[xp];
            if w.is_zero() {
                continue;
            }
            let inv = tables.inv(tables.sub(x, xp)).expect("distinct inputs");
            let guess = tables.mul(tables.sub(f[x], f[xp]), inv);
            mass[guess] += &w;
            pair_mass += w;
        }
    }
    if pair_mass.is_zero() {
        return Err(GameError::SingleSupport);
    }
    let success: Vec<Rational> = mass.into_iter().map(|m| m / &pair_mass).collect();
    let mean = success.iter().sum::<Rational>() / exact::int(q as u64);
    Ok(GuessingReport { success, mean, pair_mass })
}

/// Per-`y` quantities of the value bound's derivation and whether each step holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Row {
    pub y: usize,
    /// `omega^y = sum_x p_x r_x^y`.
    pub omega_y: Rational,
    pub s_y: Rational,
    /// `S_y >= sum_{x != x'} p_x r_x^y p_x' r_x'^y`.
    pub pair_bound: bool,
    /// `(omega^y)^2 <= sum_x p_x^2 r_x^y + 2 S_y <= p omega^y + 2 S_y`.
    pub square_bound: bool,
    /// `omega^y <= (p + sqrt(p^2 + 8 S_y)) / 2`.
    pub quadratic_root: bool,
    /// `omega^y <= p + sqrt(2 S_y)`.
    pub relaxed_root: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub p: Rational,
    pub q: usize,
    pub value: Rational,
    pub rows: Vec<Lemma1Row>,
    /// `E_y[S_y] = 1/q`.
    pub non_signaling: bool,
    /// `omega <= p + E_y[sqrt(2 S_y)] <= p + sqrt(2 E_y[S_y])`, in floating point.
    pub jensen_chain: bool,
    /// `omega <= p + sqrt(2/q)`, exact.
    pub final_bound: bool,
    pub bound: f64,
}

impl Lemma1Report {
    pub fn all_hold(&self) -> bool {
        self.non_signaling
            && self.jensen_chain
            && self.final_bound
            && self.rows.iter().all(|r| r.pair_bound && r.square_bound && r.quadratic_root && r.relaxed_root)
    }

    pub fn slack(&self) -> f64 {
        self.bound - exact::to_f64(&self.value)
    }
}

/// Evaluates every inequality of the value bound's derivation for a concrete game and
/// strategy. Requires uniform Bob inputs.
pub fn lemma1_chain_check(spec: &GameSpec, strategy: &DeterministicStrategy) -> Result<Lemma1Report, GameError> {
    if !spec.bob_is_uniform() {
        return Err(GameError::NonUniformBob);
    }
    let q = spec.order();
    strategy.check(q)?;
    let probs = spec.alice.probs();
    let p = spec.alice.max_prob();
    let guess = guessing_reduction(&spec.tables, &strategy.f, &spec.alice)?;
    let q_rat = exact::int(q as u64);
    let two = exact::int(2);

    let mut rows = Vec::with_capacity(q);
    let mut value = Rational::zero();
    let mut root_sum = 0.0f64;
    for y in 0..q {
        let wins: Vec<bool> = (0..q).map(|x| spec.wins(x, y, strategy.f[x], strategy.g[y])).collect();
        let omega_y: Rational = (0..q).filter(|&x| wins[x]).map(|x| probs[x].clone()).sum();
        let diagonal: Rational = (0..q).filter(|&x| wins[x]).map(|x| &probs[x] * &probs[x]).sum();
        let off_diagonal = &omega_y * &omega_y - &diagonal;
        let s_y = guess.success[y].clone();

        let pair_bound = s_y >= &off_diagonal / &guess.pair_mass && &off_diagonal / &guess.pair_mass >= off_diagonal;
        let square_bound = &omega_y * &omega_y <= &diagonal + &two * &s_y && diagonal <= &p * &omega_y;
        let quadratic_root =
            exact::le_sqrt(&(&two * &omega_y - &p), &(&p * &p + exact::int(8) * &s_y));
        let relaxed_root = exact::le_plus_sqrt(&omega_y, &p, &(&two * &s_y));

        root_sum += (2.0 * exact::to_f64(&s_y)).sqrt();
        value += &omega_y / &q_rat;
        rows.push(Lemma1Row { y, omega_y, s_y, pair_bound, square_bound, quadratic_root, relaxed_root });
    }
    let pf = exact::to_f64(&p);
    let vf = exact::to_f64(&value);
    let mean_root = root_sum / q as f64;
    let tol = 1e-12;
    let jensen_chain = vf <= pf + mean_root + tol && mean_root <= (2.0 / q as f64).sqrt() + tol;
    let non_signaling = guess.mean == exact::ratio(1, q as i64);
    let final_bound = lemma1_holds(&value, &p, q as u64);
    let bound = lemma1_bound(&p, &BigUint::from(q)).to_f64();
    Ok(Lemma1Report { p, q, value, rows, non_signaling, jensen_chain, final_bound, bound })
}

/// Bob's input mode in a game file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionConfig {
    Named(String),
    Explicit(Vec<String>),
}

impl DistributionConfig {
    fn build(&self, q: usize) -> Result<InputDistribution, GameError> {
        match self {
            DistributionConfig::Named(name) if name == "uniform" => Ok(InputDistribution::uniform(q)),
            DistributionConfig::Named(other) => Err(GameError::Parse(format!("unknown distribution '{other}'"))),
            DistributionConfig::Explicit(entries) => InputDistribution::from_fractions(entries),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSection {
    pub alice: DistributionConfig,
    #[serde(default = "uniform_config")]
    pub bob: DistributionConfig,
}

fn uniform_config() -> DistributionConfig {
    DistributionConfig::Named("uniform".into())
}

/// Game spec file: a `[field]` table and a `[game]` table with
/// `alice = "uniform" | ["num/den", ...]` and an optional `bob` of the same
/// form (default uniform).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFile {
    pub field: FieldConfig,
    pub game: GameSection,
}

impl GameFile {
    pub fn parse(text: &str) -> Result<Self, GameError> {
        toml::from_str(text).map_err(|e| GameError::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<GameSpec, GameError> {
        let field = self.field.build()?;
        let q = field
            .order_u64()
            .map(|q| q as usize)
            .filter(|&q| q <= crate::gf::MAX_TABLE_ORDER)
            .ok_or(GameError::TooLarge(usize::MAX))?;
        GameSpec::new(&field, self.game.alice.build(q)?, self.game.bob.build(q)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::binary_preset;

    fn f2() -> Arc<FieldSpec> {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn win_predicate_examples() {
        let f = f2();
        assert!(win_predicate(&f.one(), &f.one(), &f.one(), &f.zero()).unwrap());
        let g = FieldSpec::prime(3).unwrap();
        assert!(win_predicate(&g.from_u64(2), &g.from_u64(2), &g.one(), &g.zero()).unwrap());
        for y in g.elements() {
            assert!(win_predicate(&g.zero(), &y, &g.zero(), &g.zero()).unwrap());
        }
    }

    #[test]
    fn constant_strategy_wins_zero_products() {
        let spec = GameSpec::chsh(&f2()).unwrap();
        assert_eq!(strategy_value(&spec, &DeterministicStrategy::constant(2, 0, 0)).unwrap(), exact::ratio(3, 4));
        for field in [FieldSpec::prime(5).unwrap(), binary_preset(3).unwrap()] {
            let q = field.order_u64().unwrap() as i64;
            let spec = GameSpec::chsh(&field).unwrap();
            let v = strategy_value(&spec, &DeterministicStrategy::constant(q as usize, 0, 0)).unwrap();
            assert_eq!(v, exact::ratio(2 * q - 1, q * q));
        }
    }

    #[test]
    fn chsh2_closed_form() {
        for (n, d) in [(1, 2), (2, 3), (3, 4), (1, 1)] {
            let p = exact::ratio(n, d);
            let alice = InputDistribution::new(vec![p.clone(), Rational::one() - &p]).unwrap();
            let spec = GameSpec::chsh_p(&f2(), alice).unwrap();
            let sol = classical_value_exact(&spec, 1).unwrap();
            assert_eq!(sol.value, (Rational::one() + p) / exact::int(2));
            assert_eq!(strategy_value(&spec, &sol.strategy).unwrap(), sol.value);
        }
    }

    #[test]
    fn frozen_uniform_values() {
        let cases = [
            (FieldSpec::prime(3).unwrap(), exact::ratio(2, 3)),
            (binary_preset(2).unwrap(), exact::ratio(9, 16)),
            (FieldSpec::prime(5).unwrap(), exact::ratio(12, 25)),
        ];
        for (field, expected) in cases {
            let spec = GameSpec::chsh(&field).unwrap();
            let sol = classical_value_exact(&spec, 2).unwrap();
            assert_eq!(sol.value, expected, "{field}");
            assert_eq!(strategy_value(&spec, &sol.strategy).unwrap(), sol.value);
        }
    }

    #[test]
    fn witness_is_lexicographically_first() {
        // every g is optimal for a point mass on x = 0
        let alice = InputDistribution::point_heavy(3, 0, Rational::one()).unwrap();
        let spec = GameSpec::chsh_p(&FieldSpec::prime(3).unwrap(), alice).unwrap();
        let sol = classical_value_exact(&spec, 3).unwrap();
        assert!(sol.value.is_one());
        assert_eq!(sol.strategy.g, vec![0, 0, 0]);
        assert_eq!(sol.strategy.f[0], 0);
    }

    #[test]
    fn solver_ceiling() {
        let spec = GameSpec::chsh(&FieldSpec::prime(11).unwrap()).unwrap();
        assert_eq!(classical_value_exact(&spec, 1), Err(GameError::TooLarge(11)));
    }

    #[test]
    fn value_bound_formula() {
        assert_eq!(lemma1_bound(&exact::ratio(1, 2), &BigUint::from(2u32)).to_f64(), 1.5);
        assert_eq!(lemma1_bound(&exact::ratio(1, 8), &BigUint::from(8u32)).to_f64(), 0.625);
        let q = BigUint::one() << 340u32;
        let p = BigRational::new(BigInt::one(), BigInt::one() << 170u32);
        let b = lemma1_bound(&p, &q);
        let expected = 2f64.powf(-169.5) + 2f64.powf(-170.0);
        assert!((b.to_f64() - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn guessing_examples() {
        let t2 = FieldTables::new(&f2()).unwrap();
        let r = guessing_reduction(&t2, &[0, 1], &InputDistribution::uniform(2)).unwrap();
        assert_eq!(r.success, vec![Rational::zero(), Rational::one()]);
        assert_eq!(r.mean, exact::ratio(1, 2));
        let t3 = FieldTables::new(&FieldSpec::prime(3).unwrap()).unwrap();
        let r = guessing_reduction(&t3, &[2, 2, 2], &InputDistribution::uniform(3)).unwrap();
        assert_eq!(r.success, vec![Rational::one(), Rational::zero(), Rational::zero()]);
        assert_eq!(r.mean, exact::ratio(1, 3));
        let point = InputDistribution::point_heavy(3, 1, Rational::one()).unwrap();
        assert_eq!(guessing_reduction(&t3, &[0, 0, 0], &point), Err(GameError::SingleSupport));
    }

    #[test]
    fn bound_chain_on_chsh2_optimum() {
        let spec = GameSpec::chsh(&f2()).unwrap();
        let sol = classical_value_exact(&spec, 1).unwrap();
        let report = lemma1_chain_check(&spec, &sol.strategy).unwrap();
        assert!(report.all_hold());
        assert_eq!(report.value, exact::ratio(3, 4));
        assert_eq!(report.bound, 1.5);
        assert_eq!(report.slack(), 0.75);
    }

    #[test]
    fn bound_chain_requires_uniform_bob() {
        let field = f2();
        let skew = InputDistribution::new(vec![exact::ratio(1, 3), exact::ratio(2, 3)]).unwrap();
        let spec = GameSpec::new(&field, InputDistribution::uniform(2), skew).unwrap();
        let s = DeterministicStrategy::constant(2, 0, 0);
        assert_eq!(lemma1_chain_check(&spec, &s), Err(GameError::NonUniformBob));
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            InputDistribution::from_fractions(&["1/2", "1/3"]),
            Err(GameError::NotNormalized(_))
        ));
        assert_eq!(InputDistribution::from_fractions(&["3/2", "-1/2"]), Err(GameError::Negative(1)));
        let d = InputDistribution::from_fractions(&["1/6", "1/3", "1/2"]).unwrap();
        assert_eq!(d.max_prob(), exact::ratio(1, 2));
        assert_eq!(d.integer_weights().unwrap(), (vec![1, 2, 3], 6));
    }

    #[test]
    fn game_file_round_trip() {
        let text = r#"
[field]
characteristic = 2
degree = 2
modulus = [1, 1, 1]

[game]
alice = ["1/2", "1/6", "1/6", "1/6"]
"#;
        let file = GameFile::parse(text).unwrap();
        let spec = file.build().unwrap();
        assert!(spec.bob_is_uniform());
        assert_eq!(spec.alice().max_prob(), exact::ratio(1, 2));
        let again = GameFile::parse(&toml::to_string(&file).unwrap()).unwrap();
        assert_eq!(again, file);
    }
}
